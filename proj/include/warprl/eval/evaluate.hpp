#pragma once
#include <map>
#include <string>
#include <vector>

#include "warprl/demo/demogen.hpp"
#include "warprl/env/env.hpp"
#include "warprl/nn/qnet.hpp"
#include "warprl/parallel.hpp"

namespace warprl::eval {

struct EvalResult {
    double reward_mean = 0.0;  ///< mean over episodes of the focal-side return
    double dtw_mean = 0.0;     ///< mean over episodes of the episode DTW distance
    double success_rate = 0.0;  ///< fraction of episodes ending in capture / goal
    std::map<std::string, int> outcome_counts;
    int episodes = 0;
    std::vector<int> episode_ids;
};

/// Greedy action for one agent (epsilon = 0, smallest-index ties).
int greedy_action(const nn::QNetwork& net, const std::vector<double>& obs);

/// Deterministic greedy rollout from an explicit initial condition.
env::Episode rollout_greedy(env::Env& env, const std::vector<nn::QNetwork>& nets,
                            const env::InitialCondition& init);

/// Greedy test-phase evaluation: each pool episode's initial condition is
/// rolled out and scored for reward (focal side) and DTW distance against
/// that same demonstration. Episodes run in parallel on cloned envs.
EvalResult evaluate(const std::vector<nn::QNetwork>& nets, const env::Env& proto_env,
                    const demo::DemonstrationSet& demos, const std::vector<int>& test_pool,
                    Exec exec = Exec::Parallel);

/// Random-initial-condition evaluation (reward only), for runs without a
/// demonstration pool such as source-expert training.
EvalResult evaluate_random(const std::vector<nn::QNetwork>& nets, const env::Env& proto_env,
                           int episodes, uint64_t seed, Exec exec = Exec::Parallel);

}  // namespace warprl::eval
