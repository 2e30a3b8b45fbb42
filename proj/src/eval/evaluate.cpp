#include "warprl/eval/evaluate.hpp"

#include <cmath>

#include "warprl/dtw/align.hpp"

namespace warprl::eval {

int greedy_action(const nn::QNetwork& net, const std::vector<double>& obs) {
    const auto q = net.forward(obs);
    int best = 0;
    for (int a = 1; a < static_cast<int>(q.size()); ++a)
        if (q[a] > q[best]) best = a;
    return best;
}

env::Episode rollout_greedy(env::Env& env, const std::vector<nn::QNetwork>& nets,
                            const env::InitialCondition& init) {
    auto obs = env.reset(init);
    while (!env.done()) {
        std::vector<int> actions(nets.size());
        for (size_t k = 0; k < nets.size(); ++k) actions[k] = greedy_action(nets[k], obs[k]);
        obs = env.step(actions).obs;
    }
    return env.episode();
}

namespace {

double focal_return(const env::Episode& ep, const std::vector<int>& focal) {
    const auto ret = ep.returns();
    double sum = 0.0;
    for (int k : focal) sum += ret[k];
    return sum / static_cast<double>(focal.size());
}

}  // namespace

EvalResult evaluate(const std::vector<nn::QNetwork>& nets, const env::Env& proto_env,
                    const demo::DemonstrationSet& demos, const std::vector<int>& test_pool,
                    Exec exec) {
    require(!test_pool.empty(), "evaluate: empty test pool");
    const int n = static_cast<int>(test_pool.size());
    std::vector<env::Episode> rollouts(n);

    auto run_one = [&](int i) {
        auto e = proto_env.clone_fresh();
        rollouts[i] = rollout_greedy(*e, nets, demos.episodes[test_pool[i]].init);
    };
    if (exec == Exec::Parallel) {
#pragma omp parallel for schedule(dynamic)
        for (int i = 0; i < n; ++i) run_one(i);
    } else {
        for (int i = 0; i < n; ++i) run_one(i);
    }

    EvalResult out;
    out.episodes = n;
    const auto& focal = proto_env.focal_agents();
    for (int i = 0; i < n; ++i) {
        out.reward_mean += focal_return(rollouts[i], focal);
        out.dtw_mean += dtw::episode_dtw_distance(rollouts[i], demos.episodes[test_pool[i]]);
        out.outcome_counts[env::outcome_name(rollouts[i].outcome)] += 1;
        if (rollouts[i].outcome == env::Outcome::Capture || rollouts[i].outcome == env::Outcome::Goal)
            out.success_rate += 1.0;
        out.episode_ids.push_back(test_pool[i]);
    }
    out.reward_mean /= n;
    out.dtw_mean /= n;
    out.success_rate /= n;
    return out;
}

EvalResult evaluate_random(const std::vector<nn::QNetwork>& nets, const env::Env& proto_env,
                           int episodes, uint64_t seed, Exec exec) {
    require(episodes >= 1, "evaluate_random: need at least one episode");
    std::vector<env::InitialCondition> inits(episodes);
    Rng rng(seed);
    for (auto& init : inits) {
        Rng child(rng.split());
        init = proto_env.sample_initial_condition(child);
    }
    std::vector<env::Episode> rollouts(episodes);
    auto run_one = [&](int i) {
        auto e = proto_env.clone_fresh();
        rollouts[i] = rollout_greedy(*e, nets, inits[i]);
    };
    if (exec == Exec::Parallel) {
#pragma omp parallel for schedule(dynamic)
        for (int i = 0; i < episodes; ++i) run_one(i);
    } else {
        for (int i = 0; i < episodes; ++i) run_one(i);
    }

    EvalResult out;
    out.episodes = episodes;
    const auto& focal = proto_env.focal_agents();
    for (const auto& ep : rollouts) {
        out.reward_mean += focal_return(ep, focal);
        out.outcome_counts[env::outcome_name(ep.outcome)] += 1;
        if (ep.outcome == env::Outcome::Capture || ep.outcome == env::Outcome::Goal)
            out.success_rate += 1.0;
    }
    out.reward_mean /= episodes;
    out.success_rate /= episodes;
    out.dtw_mean = std::nan("");
    return out;
}

}  // namespace warprl::eval
