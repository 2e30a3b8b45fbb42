#pragma once
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "warprl/demo/demogen.hpp"
#include "warprl/env/env.hpp"
#include "warprl/losses.hpp"
#include "warprl/nn/adam.hpp"
#include "warprl/nn/qnet.hpp"
#include "warprl/replay/buffer.hpp"

namespace warprl::train {

/// The five model variants. The variant fixes the supervised-loss kind,
/// whether demonstrations are seeded into the buffer, and whether expert
/// actions are assigned at the same index or at the warped index.
enum class Variant { DQN, DQfD, DQfAD, DQAS, DQAAS };

Variant variant_from_name(const std::string& s);
std::string variant_name(Variant v);
losses::SupervisedKind kind_for(Variant v);
bool uses_demos(Variant v);
bool uses_warping(Variant v);

/// How a finished learner episode is paired with a demonstration episode:
/// the demo whose initial condition seeded the episode (football), or the
/// train-split demo with the nearest initial joint-position vector (chase).
enum class Pairing { SeedDemo, NearestInit };

struct TrainerConfig {
    Variant variant = Variant::DQAAS;
    long pretrain_steps = 10000;
    long rl_steps = 500000;
    int batch_size = 32;
    long target_sync = 1000;  ///< gradient steps between target copies
    int update_every = 4;     ///< env steps per gradient step
    int learn_start = 32;     ///< agent transitions required before learning
    double eps_start = 0.1, eps_end = 0.01, eps_anneal_frac = 0.2;
    double dqn_eps_start = 1.0, dqn_eps_end = 0.05, dqn_eps_anneal_frac = 0.1;
    long eval_every = 10000;
    long pretrain_val_every = 500;
    std::vector<uint64_t> seeds = {0, 1, 2, 3, 4};
    std::vector<int> hidden = {128, 128};
    nn::AdamConfig adam;
    losses::LossConfig loss;  ///< kind is overridden from the variant
    replay::ReplayConfig replay;

    void validate() const;
};

struct MetricRow {
    long step = 0;
    uint64_t seed = 0;
    std::string variant;
    double reward = 0.0;
    double dtw = 0.0;
    double success_rate = 0.0;  ///< capture / goal rate on the eval pool
    double loss_td = 0.0, loss_sup = 0.0, loss_l2 = 0.0, loss_total = 0.0;
    double epsilon = 0.0;
    long episodes = 0;
};
using MetricSink = std::function<void(const MetricRow&)>;

/// Same-index expert assignment: a^E_t is the demo action at min(t, m-1).
std::vector<std::vector<int>> assign_same_index(const env::Episode& learner,
                                                const env::Episode& demo);

/// Annotate a finished learner episode against its paired demo; warped
/// variants use the DTW assignment, the others the same-index rule.
void annotate_episode(env::Episode& learner, const env::Episode& demo, bool warped);

/// Nearest-initial-condition pairing over the train split.
int pair_nearest_init(const env::Episode& learner, const demo::DemonstrationSet& demos);

struct PretrainResult {
    std::vector<nn::QNetwork> nets;  ///< one per agent; non-learning agents keep their input nets
    double best_val_accuracy = 0.0;
    std::vector<std::pair<long, double>> val_curve;  ///< (gradient step, action-match accuracy)
};

/// Supervised+TD pre-training on demo-only batches (train split), selecting
/// the checkpoint with the best held-out action-match accuracy (val split).
/// A no-op for DQN. Demonstrations must be materialized.
PretrainResult pretrain(const TrainerConfig& tc, const demo::DemonstrationSet& demos,
                        const env::Env& proto_env, const std::vector<int>& learning_agents,
                        uint64_t seed, std::vector<nn::QNetwork> initial_nets = {});

struct RLOptions {
    std::vector<int> learning_agents;  ///< all other agents act greedily (frozen)
    std::vector<int> init_pool;        ///< demo episode ids used as initial conditions; empty = random
    std::vector<int> eval_pool;        ///< demo episode ids for evaluation; empty = random-init eval
    Pairing pairing = Pairing::SeedDemo;
    int eval_episodes_random = 10;  ///< random-init eval episodes when eval_pool is empty
    MetricSink sink;                ///< optional streaming of metric rows
    /// optional early stop, checked after each periodic evaluation
    std::function<bool(const MetricRow&)> stop_when;
};

struct RLResult {
    std::vector<nn::QNetwork> nets;
    std::vector<MetricRow> metrics;
    long episodes_completed = 0;
};

/// Target-environment RL per the variant: epsilon-greedy acting, episode-end
/// demo pairing and expert-action annotation, prioritized updates with the
/// protected demo partition, periodic greedy evaluation.
RLResult train_rl(const TrainerConfig& tc, std::vector<nn::QNetwork> nets,
                  const demo::DemonstrationSet& demos, env::Env& env, const RLOptions& opts,
                  uint64_t seed);

struct TwoStageResult {
    std::vector<nn::QNetwork> stage1_nets;  ///< frozen-opponent networks
    PretrainResult pretrain_result;
    RLResult rl;
};

/// Stage 1 provides the frozen opponents (the chase prey comes from the
/// source expert and must be passed in; football defenders come from a
/// full-agent DQAAS run when not supplied). Stage 2 pre-trains and trains
/// the focal side against them.
TwoStageResult run_two_stage(const TrainerConfig& tc, const demo::DemonstrationSet& demos,
                             env::Env& target_env, const demo::RlPools& pools,
                             std::vector<nn::QNetwork> stage1_nets, uint64_t seed,
                             const MetricSink& sink = {});

}  // namespace warprl::train
