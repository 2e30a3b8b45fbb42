#pragma once
#include <string>
#include <vector>

#include "warprl/env/env.hpp"
#include "warprl/env/football.hpp"
#include "warprl/nn/qnet.hpp"

namespace warprl::demo {

/// Immutable collection of expert episodes with split tags and
/// source-environment metadata.
struct DemonstrationSet {
    std::string task;        ///< env id the episodes belong to
    std::string provenance;  ///< "synthetic-expert" or "external-tracking"
    std::string source_desc; ///< human-readable source-dynamics note
    std::vector<env::Episode> episodes;

    std::vector<int> split_ids(env::Split s) const;
    int count(env::Split s) const { return static_cast<int>(split_ids(s).size()); }
};

/// Split sizes from fractions; train gets the remainder. For 500 episodes at
/// (0.1, 0.1) this yields 400/50/50.
struct SplitCounts {
    int train = 0, val = 0, test = 0;
};
SplitCounts proportional_split(int n, double val_frac, double test_frac);

/// Tag episodes in order: train block, then val, then test.
void assign_splits(std::vector<env::Episode>& episodes, const SplitCounts& counts);

/// Plain-DQN training of every agent in the source environment. Returns one
/// network per agent (including the prey / defenders frozen later).
std::vector<nn::QNetwork> train_source_expert(env::Env& source_env, long steps, uint64_t seed,
                                              const std::vector<int>& hidden = {128, 128});

/// Greedy rollouts of the expert in the source environment from seeded
/// random initial conditions, split per the fractions.
DemonstrationSet rollout_demos(const std::vector<nn::QNetwork>& experts, env::Env& source_env,
                               int n_episodes, uint64_t seed, double val_frac, double test_frac);

/// Fill in per-agent observations (and demo annotations: is_demo plus the
/// expert action equal to the episode's own action) for every transition.
/// Synthetic episodes are replayed through the environment; external
/// tracking episodes are reconstructed from the recorded trajectory.
void materialize(DemonstrationSet& demos, const env::Env& proto_env);

/// Episode ids for the target-RL initial-condition pool (drawn from the val
/// split) and the held-out test pool (from the test split). When
/// prefer_goal is set, goal-outcome episodes are taken first.
struct RlPools {
    std::vector<int> train_ids;
    std::vector<int> test_ids;
};
RlPools select_rl_pools(const DemonstrationSet& demos, int n_train, int n_test, bool prefer_goal);

/// Dataset directory layout: episodes.jsonl + manifest.json (with checksum).
void save_dataset(const std::string& dir, const DemonstrationSet& demos);
DemonstrationSet load_dataset(const std::string& dir);

/// FNV-1a over the episode file bytes; manifest records it.
uint64_t file_checksum(const std::string& path);

/// Diagnostics from the tracking loader (reported, not asserted).
struct TrackingLoadReport {
    int sequences = 0;
    int frames = 0;
    double max_resim_position_error = 0.0;  ///< re-simulated movement vs recorded
};

/// Load 25 Hz tracking/event data (documented schema: per-sequence header,
/// per-frame player/ball positions and optional event labels), resample to
/// the environment step by nearest frame, quantize movement to the 8
/// directional actions, map event labels to pass/shot actions, clip to the
/// step limit, synthesize label-driven rewards, and tag splits.
DemonstrationSet load_external_tracking(const std::string& path, const env::FootballConfig& cfg,
                                        double val_frac, double test_frac,
                                        TrackingLoadReport* report = nullptr);

}  // namespace warprl::demo
