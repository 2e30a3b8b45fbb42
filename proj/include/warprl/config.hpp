#pragma once
#include <json.hpp>

#include <memory>
#include <string>

#include "warprl/env/chase.hpp"
#include "warprl/env/football.hpp"
#include "warprl/train/trainer.hpp"

namespace warprl::cfg {

struct DemoGenConfig {
    int episodes = 500;
    long expert_steps = 200000;
    double val_frac = 0.1;
    double test_frac = 0.1;
    int rl_train_pool = 50;
    int rl_test_pool = 10;
    uint64_t seed = 12345;
    uint64_t stage1_seed = 1000;  ///< football frozen-defender run
};

/// One experiment file drives every pipeline stage. Parsing is strict:
/// unknown keys and out-of-range values are errors naming the key.
struct ExperimentConfig {
    std::string task = "chase2v1";  ///< chase2v1 | football2v2 | football4v8
    env::ChaseConfig chase;
    env::FootballConfig football;
    double source_mobility_ratio = 1.2;        ///< chase source dynamics
    double source_attacker_speed_scale = 1.1;  ///< football surrogate source
    train::TrainerConfig trainer;
    DemoGenConfig demogen;

    bool is_football() const { return task.rfind("football", 0) == 0; }
    void validate() const;
};

ExperimentConfig config_from_json(const nlohmann::json& j);
nlohmann::json config_to_json(const ExperimentConfig& c);

ExperimentConfig load_config(const std::string& path);
void save_resolved_config(const std::string& path, const ExperimentConfig& c);

/// Target-dynamics environment (chase 110% predators / football unit speed).
std::unique_ptr<env::Env> make_target_env(const ExperimentConfig& c);
/// Source-dynamics environment used for demonstrations (chase 120% /
/// football 110% attackers with pretrain rewards).
std::unique_ptr<env::Env> make_source_env(const ExperimentConfig& c);

}  // namespace warprl::cfg
