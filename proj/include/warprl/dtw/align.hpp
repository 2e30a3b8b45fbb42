#pragma once
#include <functional>

#include "warprl/dtw/dtw.hpp"
#include "warprl/env/types.hpp"

namespace warprl::dtw {

using FeatureExtractor = std::function<Seq(const env::Episode&)>;

/// Default alignment features: per step, the concatenated absolute xy
/// positions of all agents, plus the ball for football episodes. One
/// feature vector per recorded trajectory point (num_steps + 1).
Seq alignment_features(const env::Episode& ep);

/// Warped expert-action assignment: one joint alignment per episode pair,
/// shared by all agents. Returns ids[t][agent] = demo action of the
/// corresponding agent at t' = warped_index(W, t), with t' clipped to the
/// demo's action range (the final demo state has no action).
std::vector<std::vector<int>> assign_expert_actions(const env::Episode& learner,
                                                    const env::Episode& demo,
                                                    const FeatureExtractor& features = alignment_features);

/// DTW distance between episodes: mean over agents of the per-agent
/// position-trajectory DTW cost.
double episode_dtw_distance(const env::Episode& a, const env::Episode& b);

}  // namespace warprl::dtw
