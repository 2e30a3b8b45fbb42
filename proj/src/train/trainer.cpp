#include "warprl/train/trainer.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "warprl/dtw/align.hpp"
#include "warprl/eval/evaluate.hpp"

namespace warprl::train {

namespace {

int argmax_smallest(const std::vector<double>& v) {
    int best = 0;
    for (int i = 1; i < static_cast<int>(v.size()); ++i)
        if (v[i] > v[best]) best = i;
    return best;
}

double lerp(double a, double b, double t) { return a + (b - a) * std::min(1.0, std::max(0.0, t)); }

double epsilon_at(const TrainerConfig& tc, long step) {
    const bool dqn = tc.variant == Variant::DQN;
    const double s0 = dqn ? tc.dqn_eps_start : tc.eps_start;
    const double s1 = dqn ? tc.dqn_eps_end : tc.eps_end;
    const double frac = dqn ? tc.dqn_eps_anneal_frac : tc.eps_anneal_frac;
    const long anneal = std::lround(frac * static_cast<double>(tc.rl_steps));
    if (anneal <= 0) return s1;
    return lerp(s0, s1, static_cast<double>(step) / static_cast<double>(anneal));
}

struct Learner {
    nn::QNetwork net;
    nn::QNetwork target;
    nn::AdamState adam;
    std::vector<double> grad;
    losses::Workspace ws;
};

losses::Batch build_agent_batch(const replay::ReplayBuffer& buf,
                                const replay::ReplayBuffer::SampleResult& s, int agent) {
    losses::Batch batch;
    batch.reserve(s.refs.size());
    for (size_t i = 0; i < s.refs.size(); ++i) {
        const env::Transition& tr = buf.get(s.refs[i]);
        losses::BatchItem it;
        it.s = &tr.obs[agent];
        it.next_s = &tr.next_obs[agent];
        it.action = tr.actions[agent];
        it.reward = tr.rewards[agent];
        it.terminal = tr.terminal;
        it.expert_action = tr.has_expert_actions() ? tr.expert_actions[agent] : -1;
        it.is_demo = tr.is_demo;
        it.weight = s.weights[i];
        batch.push_back(it);
    }
    return batch;
}

/// One prioritized gradient step for every learning agent on a shared
/// sampled batch; returns the loss terms of the last agent updated and
/// writes back combined TD-error priorities.
losses::LossBreakdown gradient_step(const TrainerConfig& tc, replay::ReplayBuffer& buf,
                                    std::vector<Learner>& learners,
                                    const std::vector<int>& learning_agents, double gamma,
                                    Rng& rng) {
    auto sample = buf.sample(tc.batch_size, rng);
    std::vector<double> combined(sample.refs.size(), 0.0);
    losses::LossBreakdown last{};
    losses::LossConfig loss_cfg = tc.loss;
    loss_cfg.kind = kind_for(tc.variant);

    for (int agent : learning_agents) {
        Learner& L = learners[agent];
        losses::Batch batch = build_agent_batch(buf, sample, agent);
        L.grad.assign(L.net.param_count(), 0.0);
        auto res = losses::total_loss_grad(batch, L.net, L.target, gamma, loss_cfg, L.grad, L.ws);
        if (!std::isfinite(res.terms.total))
            throw std::runtime_error("training diverged: non-finite loss for agent " +
                                     std::to_string(agent));
        nn::adam_step(L.net.params(), L.grad, L.adam, tc.adam);
        for (size_t i = 0; i < combined.size(); ++i) combined[i] += res.td_errors[i];
        last = res.terms;
    }
    for (double& d : combined) d /= static_cast<double>(learning_agents.size());
    buf.update_priorities(sample.refs, combined);
    return last;
}

void sync_targets(std::vector<Learner>& learners, const std::vector<int>& learning_agents) {
    for (int agent : learning_agents) learners[agent].target = learners[agent].net;
}

/// Held-out action-match accuracy: argmax of q vs the demonstrated action,
/// averaged over the learning agents.
double action_match_accuracy(const std::vector<Learner>& learners,
                             const std::vector<int>& learning_agents,
                             const demo::DemonstrationSet& demos, const std::vector<int>& ids) {
    double acc_sum = 0.0;
    for (int agent : learning_agents) {
        long hits = 0, total = 0;
        std::vector<double> q;
        for (int id : ids) {
            for (const auto& tr : demos.episodes[id].transitions) {
                learners[agent].net.forward(tr.obs[agent], q);
                hits += argmax_smallest(q) == tr.actions[agent] ? 1 : 0;
                ++total;
            }
        }
        if (total > 0) acc_sum += static_cast<double>(hits) / static_cast<double>(total);
    }
    return acc_sum / static_cast<double>(learning_agents.size());
}

std::vector<env::Transition> demo_transitions(const demo::DemonstrationSet& demos,
                                              const std::vector<int>& ids,
                                              std::vector<int>* episode_ids) {
    std::vector<env::Transition> out;
    for (int id : ids) {
        for (const auto& tr : demos.episodes[id].transitions) {
            require(!tr.obs.empty(), "demo transitions are not materialized");
            out.push_back(tr);
            if (episode_ids) episode_ids->push_back(id);
        }
    }
    return out;
}

std::vector<nn::QNetwork> init_agent_nets(const TrainerConfig& tc, const env::EnvSpec& spec,
                                          Rng& rng) {
    std::vector<nn::QNetwork> nets;
    nets.reserve(spec.num_agents);
    for (int k = 0; k < spec.num_agents; ++k) {
        std::vector<int> dims;
        dims.push_back(spec.state_dims[k]);
        for (int h : tc.hidden) dims.push_back(h);
        dims.push_back(spec.action_counts[k]);
        nets.push_back(nn::QNetwork::init_uniform(dims, rng));
    }
    return nets;
}

}  // namespace

Variant variant_from_name(const std::string& s) {
    if (s == "DQN") return Variant::DQN;
    if (s == "DQfD") return Variant::DQfD;
    if (s == "DQfAD") return Variant::DQfAD;
    if (s == "DQAS") return Variant::DQAS;
    if (s == "DQAAS") return Variant::DQAAS;
    throw std::invalid_argument("unknown variant: " + s +
                                " (expected DQN, DQfD, DQfAD, DQAS, or DQAAS)");
}

std::string variant_name(Variant v) {
    switch (v) {
        case Variant::DQN: return "DQN";
        case Variant::DQfD: return "DQfD";
        case Variant::DQfAD: return "DQfAD";
        case Variant::DQAS: return "DQAS";
        case Variant::DQAAS: return "DQAAS";
    }
    return "DQN";
}

losses::SupervisedKind kind_for(Variant v) {
    switch (v) {
        case Variant::DQN: return losses::SupervisedKind::None;
        case Variant::DQfD: return losses::SupervisedKind::Margin;
        case Variant::DQfAD: return losses::SupervisedKind::MarginWarp;
        case Variant::DQAS: return losses::SupervisedKind::Action;
        case Variant::DQAAS: return losses::SupervisedKind::ActionWarp;
    }
    return losses::SupervisedKind::None;
}

bool uses_demos(Variant v) { return v != Variant::DQN; }

bool uses_warping(Variant v) { return v == Variant::DQfAD || v == Variant::DQAAS; }

void TrainerConfig::validate() const {
    require(pretrain_steps >= 0, "trainer.pretrain_steps must be >= 0");
    require(rl_steps >= 0, "trainer.rl_steps must be >= 0");
    require(batch_size >= 1, "trainer.batch_size must be >= 1");
    require(target_sync >= 1, "trainer.target_sync must be >= 1");
    require(update_every >= 1, "trainer.update_every must be >= 1");
    require(learn_start >= batch_size, "trainer.learn_start must be >= batch_size");
    require(eps_start >= eps_end && eps_end >= 0.0, "trainer eps schedule must be non-increasing");
    require(dqn_eps_start >= dqn_eps_end && dqn_eps_end >= 0.0,
            "trainer dqn eps schedule must be non-increasing");
    require(!seeds.empty(), "trainer.seeds must not be empty");
    require(!hidden.empty(), "trainer.hidden must not be empty");
    loss.validate();
    replay.validate();
}

std::vector<std::vector<int>> assign_same_index(const env::Episode& learner,
                                                const env::Episode& demo) {
    const int m = demo.num_steps();
    require(m >= 1, "assign_same_index: empty demo");
    std::vector<std::vector<int>> assigned(learner.num_steps());
    for (int t = 0; t < learner.num_steps(); ++t)
        assigned[t] = demo.transitions[std::min(t, m - 1)].actions;
    return assigned;
}

void annotate_episode(env::Episode& learner, const env::Episode& demo, bool warped) {
    auto assigned = warped ? dtw::assign_expert_actions(learner, demo)
                           : assign_same_index(learner, demo);
    for (int t = 0; t < learner.num_steps(); ++t)
        learner.transitions[t].expert_actions = assigned[t];
}

int pair_nearest_init(const env::Episode& learner, const demo::DemonstrationSet& demos) {
    int best = -1;
    double best_d = 0.0;
    for (size_t id = 0; id < demos.episodes.size(); ++id) {
        const env::Episode& ep = demos.episodes[id];
        if (ep.split != env::Split::Train) continue;
        double d = 0.0;
        for (size_t k = 0; k < ep.init.positions.size(); ++k) {
            const Vec2 diff = ep.init.positions[k] - learner.init.positions[k];
            d += diff.dot(diff);
        }
        if (best < 0 || d < best_d) {
            best = static_cast<int>(id);
            best_d = d;
        }
    }
    require(best >= 0, "pair_nearest_init: no train-split demonstrations");
    return best;
}

PretrainResult pretrain(const TrainerConfig& tc, const demo::DemonstrationSet& demos,
                        const env::Env& proto_env, const std::vector<int>& learning_agents,
                        uint64_t seed, std::vector<nn::QNetwork> initial_nets) {
    tc.validate();
    Rng rng(seed);
    PretrainResult out;
    out.nets = initial_nets.empty() ? init_agent_nets(tc, proto_env.spec(), rng)
                                    : std::move(initial_nets);
    if (tc.variant == Variant::DQN || tc.pretrain_steps == 0) return out;

    require(!demos.episodes.empty(), "pretrain: variant requires demonstrations");
    const auto train_ids = demos.split_ids(env::Split::Train);
    const auto val_ids = demos.split_ids(env::Split::Val);
    require(!train_ids.empty(), "pretrain: no train-split demonstrations");

    replay::ReplayBuffer buf(tc.replay);
    {
        std::vector<int> ep_ids;
        buf.seed_demos(demo_transitions(demos, train_ids, &ep_ids), ep_ids);
    }

    std::vector<Learner> learners(proto_env.spec().num_agents);
    for (int k = 0; k < proto_env.spec().num_agents; ++k) {
        learners[k].net = out.nets[k];
        learners[k].target = out.nets[k];
        learners[k].adam = nn::AdamState(out.nets[k].param_count());
    }

    const double gamma = proto_env.spec().discount;
    std::vector<nn::QNetwork> best = out.nets;
    double best_acc = -1.0;

    for (long g = 0; g < tc.pretrain_steps; ++g) {
        buf.set_beta(lerp(tc.replay.beta_start, tc.replay.beta_end,
                          static_cast<double>(g) / static_cast<double>(tc.pretrain_steps)));
        gradient_step(tc, buf, learners, learning_agents, gamma, rng);
        if ((g + 1) % tc.target_sync == 0) sync_targets(learners, learning_agents);
        if ((g + 1) % tc.pretrain_val_every == 0 || g + 1 == tc.pretrain_steps) {
            const double acc = action_match_accuracy(learners, learning_agents, demos,
                                                     val_ids.empty() ? train_ids : val_ids);
            out.val_curve.push_back({g + 1, acc});
            if (acc > best_acc) {
                best_acc = acc;
                for (int k : learning_agents) best[k] = learners[k].net;
            }
        }
    }
    out.nets = std::move(best);
    out.best_val_accuracy = best_acc;
    return out;
}

RLResult train_rl(const TrainerConfig& tc, std::vector<nn::QNetwork> nets,
                  const demo::DemonstrationSet& demos, env::Env& env, const RLOptions& opts,
                  uint64_t seed) {
    tc.validate();
    require(!opts.learning_agents.empty(), "train_rl: no learning agents");
    require(static_cast<int>(nets.size()) == env.spec().num_agents,
            "train_rl: one network per agent required");

    Rng rng(seed);
    const double gamma = env.spec().discount;
    const bool demo_variant = uses_demos(tc.variant);
    if (demo_variant) require(!demos.episodes.empty(), "train_rl: variant requires demonstrations");

    replay::ReplayBuffer buf(tc.replay);
    if (demo_variant) {
        std::vector<int> ep_ids;
        auto trs = demo_transitions(demos, demos.split_ids(env::Split::Train), &ep_ids);
        buf.seed_demos(std::move(trs), ep_ids);
    } else {
        buf.seed_demos({});
    }
    const uint64_t demo_hash_at_start = buf.demo_hash();

    std::vector<Learner> learners(nets.size());
    std::vector<bool> is_learning(nets.size(), false);
    for (size_t k = 0; k < nets.size(); ++k) {
        learners[k].net = nets[k];
        learners[k].target = nets[k];
        learners[k].adam = nn::AdamState(nets[k].param_count());
    }
    for (int k : opts.learning_agents) is_learning[k] = true;

    RLResult out;
    losses::LossBreakdown last_loss{};
    long grad_steps = 0;

    auto current_nets = [&] {
        std::vector<nn::QNetwork> snapshot;
        snapshot.reserve(learners.size());
        for (const auto& L : learners) snapshot.push_back(L.net);
        return snapshot;
    };

    bool stop_requested = false;
    auto emit_eval = [&](long step) {
        eval::EvalResult ev;
        if (!opts.eval_pool.empty())
            ev = eval::evaluate(current_nets(), env, demos, opts.eval_pool);
        else
            ev = eval::evaluate_random(current_nets(), env, opts.eval_episodes_random,
                                       seed ^ 0x5eedful);
        MetricRow row;
        row.step = step;
        row.seed = seed;
        row.variant = variant_name(tc.variant);
        row.reward = ev.reward_mean;
        row.dtw = ev.dtw_mean;
        row.success_rate = ev.success_rate;
        row.loss_td = last_loss.td;
        row.loss_sup = last_loss.supervised;
        row.loss_l2 = last_loss.l2;
        row.loss_total = last_loss.total;
        row.epsilon = epsilon_at(tc, step);
        row.episodes = out.episodes_completed;
        out.metrics.push_back(row);
        if (opts.sink) opts.sink(row);
        if (opts.stop_when && opts.stop_when(row)) stop_requested = true;
    };

    // one finished-episode handler: pair, annotate, insert
    int current_pool_demo = -1;
    auto start_episode = [&] {
        if (!opts.init_pool.empty()) {
            current_pool_demo = opts.init_pool[rng.uniform_int(static_cast<int>(opts.init_pool.size()))];
            return env.reset(demos.episodes[current_pool_demo].init);
        }
        current_pool_demo = -1;
        return env.reset(rng.split());
    };

    auto finish_episode = [&] {
        env::Episode ep = env.episode();
        out.episodes_completed += 1;
        if (demo_variant) {
            const int paired = opts.pairing == Pairing::SeedDemo && current_pool_demo >= 0
                                   ? current_pool_demo
                                   : pair_nearest_init(ep, demos);
            annotate_episode(ep, demos.episodes[paired], uses_warping(tc.variant));
        }
        for (auto& tr : ep.transitions) buf.insert(std::move(tr), ep.id);
    };

    emit_eval(0);

    auto obs = start_episode();
    std::vector<double> q;
    for (long step = 0; step < tc.rl_steps; ++step) {
        const double eps = epsilon_at(tc, step);
        std::vector<int> actions(learners.size());
        for (size_t k = 0; k < learners.size(); ++k) {
            if (is_learning[k] && rng.next_double() < eps) {
                actions[k] = rng.uniform_int(env.spec().action_counts[k]);
            } else {
                learners[k].net.forward(obs[k], q);
                actions[k] = argmax_smallest(q);
            }
        }
        auto res = env.step(actions);
        obs = res.obs;
        if (res.done) {
            finish_episode();
            obs = start_episode();
        }

        if ((step + 1) % tc.update_every == 0 &&
            buf.agent_size() >= static_cast<size_t>(tc.learn_start)) {
            buf.set_beta(lerp(tc.replay.beta_start, tc.replay.beta_end,
                              static_cast<double>(step) / static_cast<double>(tc.rl_steps)));
            last_loss = gradient_step(tc, buf, learners, opts.learning_agents, gamma, rng);
            grad_steps += 1;
            if (grad_steps % tc.target_sync == 0) sync_targets(learners, opts.learning_agents);
        }

        if (tc.eval_every > 0 && (step + 1) % tc.eval_every == 0) {
            emit_eval(step + 1);
            if (stop_requested) break;
        }
    }
    if (!stop_requested && (tc.eval_every <= 0 || tc.rl_steps % tc.eval_every != 0))
        emit_eval(tc.rl_steps);

    if (buf.demo_hash() != demo_hash_at_start)
        throw std::logic_error("train_rl: demonstration partition was modified during training");

    out.nets = current_nets();
    return out;
}

TwoStageResult run_two_stage(const TrainerConfig& tc, const demo::DemonstrationSet& demos,
                             env::Env& target_env, const demo::RlPools& pools,
                             std::vector<nn::QNetwork> stage1_nets, uint64_t seed,
                             const MetricSink& sink) {
    TwoStageResult out;
    const auto& focal = target_env.focal_agents();
    const bool is_football = target_env.spec().env_id.rfind("football", 0) == 0;

    if (stage1_nets.empty()) {
        if (!is_football)
            throw std::runtime_error(
                "run_two_stage: chase requires the source-expert checkpoint for the frozen prey");
        // stage 1: full-agent run with adaptive action supervision
        TrainerConfig stage1 = tc;
        stage1.variant = Variant::DQAAS;
        std::vector<int> all_agents(target_env.spec().num_agents);
        for (size_t k = 0; k < all_agents.size(); ++k) all_agents[k] = static_cast<int>(k);
        auto pre = pretrain(stage1, demos, target_env, all_agents, seed ^ 0xa11a6e47ull);
        RLOptions o1;
        o1.learning_agents = all_agents;
        o1.init_pool = pools.train_ids;
        o1.eval_pool = pools.test_ids;
        o1.pairing = Pairing::SeedDemo;
        auto rl1 = train_rl(stage1, std::move(pre.nets), demos, target_env, o1, seed ^ 0xa11a6e47ull);
        stage1_nets = std::move(rl1.nets);
    }
    out.stage1_nets = stage1_nets;

    out.pretrain_result = pretrain(tc, demos, target_env, focal, seed);
    // focal agents start from pre-training; opponents are the frozen stage-1 nets
    std::vector<nn::QNetwork> nets = stage1_nets;
    for (int k : focal) nets[k] = out.pretrain_result.nets[k];

    RLOptions opts;
    opts.learning_agents = focal;
    opts.init_pool = pools.train_ids;
    opts.eval_pool = pools.test_ids;
    opts.pairing = is_football ? Pairing::SeedDemo : Pairing::NearestInit;
    opts.sink = sink;
    out.rl = train_rl(tc, std::move(nets), demos, target_env, opts, seed);
    return out;
}

}  // namespace warprl::train
