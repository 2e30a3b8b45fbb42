#include "warprl/env/chase.hpp"

#include <cmath>
#include <numbers>

namespace warprl::env {

namespace {
constexpr int kPrey = 2;

EnvSpec make_spec(const ChaseConfig& cfg) {
    EnvSpec spec;
    spec.env_id = "chase2v1";
    spec.num_agents = kChaseAgents;
    spec.action_counts.assign(kChaseAgents, kChaseActions);
    // own velocity + (rel pos, rel vel) per other agent, in the frame axis basis
    spec.state_dims.assign(kChaseAgents, 2 + 4 * (kChaseAgents - 1));
    spec.dt = cfg.dt;
    spec.max_steps = cfg.max_steps;
    spec.bounds = Rect{-cfg.half_width, cfg.half_width, -cfg.half_width, cfg.half_width};
    spec.discount = cfg.discount;
    return spec;
}
}  // namespace

Vec2 chase_frame_axis(const ChaseState& s, int agent) {
    if (agent != kPrey) return (s.pos[kPrey] - s.pos[agent]).unit();
    // prey: away from the nearest predator
    double d0 = s.pos[kPrey].dist(s.pos[0]);
    double d1 = s.pos[kPrey].dist(s.pos[1]);
    int nearest = d0 <= d1 ? 0 : 1;
    return (s.pos[kPrey] - s.pos[nearest]).unit();
}

void chase_dynamics(ChaseState& s, const std::vector<int>& actions, const ChaseConfig& cfg) {
    // frame axes are computed from the pre-step state for every agent
    std::vector<Vec2> axis(kChaseAgents);
    for (int k = 0; k < kChaseAgents; ++k) axis[k] = chase_frame_axis(s, k);

    for (int k = 0; k < kChaseAgents; ++k) {
        const bool predator = k != kPrey;
        const double accel = (predator ? cfg.mobility_ratio : 1.0) * cfg.prey_accel;
        const double max_speed = (predator ? cfg.mobility_ratio : 1.0) * cfg.prey_max_speed;

        Vec2 a{0.0, 0.0};
        if (actions[k] < 12) {
            const double angle = actions[k] * (std::numbers::pi / 6.0);
            a = axis[k].rotated(angle) * accel;
        }
        s.vel[k] = clip_norm(s.vel[k] * (1.0 - cfg.damping) + a * cfg.dt, max_speed);
        s.pos[k] += s.vel[k] * cfg.dt;
    }
}

ChaseRewardResult chase_rewards(const ChaseState& next, const ChaseConfig& cfg) {
    ChaseRewardResult res;
    const Rect area{-cfg.half_width, cfg.half_width, -cfg.half_width, cfg.half_width};

    for (int p = 0; p < 2; ++p) {
        if (next.pos[p].dist(next.pos[kPrey]) <= cfg.diameter) {
            res.rewards = {1.0, 1.0, -1.0};
            res.terminal = true;
            res.outcome = Outcome::Capture;
            return res;
        }
    }

    const bool prey_out = !area.contains(next.pos[kPrey]);
    bool predator_out = false;
    for (int p = 0; p < 2; ++p) {
        if (!area.contains(next.pos[p])) {
            res.rewards[p] = -1.0;
            predator_out = true;
        }
    }
    if (prey_out) res.rewards[kPrey] = -1.0;
    if (prey_out || predator_out) {
        res.terminal = true;
        res.outcome = prey_out ? Outcome::PreyOut : Outcome::PredatorOut;
    }
    return res;
}

ChaseEnv::ChaseEnv(const ChaseConfig& cfg) : Env(make_spec(cfg), {0, 1}), cfg_(cfg) {
    cfg_.validate();
    state_.pos.assign(kChaseAgents, {});
    state_.vel.assign(kChaseAgents, {});
}

InitialCondition ChaseEnv::sample_initial_condition(Rng& rng) const {
    InitialCondition init;
    init.positions.resize(kChaseAgents);
    init.velocities.assign(kChaseAgents, Vec2{});
    const double r = cfg_.init_half_range;
    for (int k = 0; k < kChaseAgents; ++k)
        init.positions[k] = {rng.uniform(-r, r), rng.uniform(-r, r)};
    return init;
}

std::unique_ptr<Env> ChaseEnv::clone_fresh() const { return std::make_unique<ChaseEnv>(cfg_); }

void ChaseEnv::load_state(const InitialCondition& init) {
    require(static_cast<int>(init.positions.size()) == kChaseAgents, "chase init: need 3 positions");
    state_.pos = init.positions;
    if (init.velocities.empty())
        state_.vel.assign(kChaseAgents, Vec2{});
    else {
        require(static_cast<int>(init.velocities.size()) == kChaseAgents, "chase init: velocity count");
        state_.vel = init.velocities;
    }
}

void ChaseEnv::step_dynamics(const std::vector<int>& actions, std::vector<double>& rewards,
                             bool& terminal, Outcome& outcome) {
    chase_dynamics(state_, actions, cfg_);
    ChaseRewardResult res = chase_rewards(state_, cfg_);
    rewards = res.rewards;
    terminal = res.terminal;
    outcome = res.outcome;
}

std::vector<std::vector<double>> chase_observation(const ChaseState& s) {
    std::vector<std::vector<double>> obs(kChaseAgents);
    for (int k = 0; k < kChaseAgents; ++k) {
        const Vec2 u = chase_frame_axis(s, k);
        const Vec2 v = u.perp();
        std::vector<double>& o = obs[k];
        o.reserve(2 + 4 * (kChaseAgents - 1));
        o.push_back(s.vel[k].dot(u));
        o.push_back(s.vel[k].dot(v));
        for (int j = 0; j < kChaseAgents; ++j) {
            if (j == k) continue;
            const Vec2 rp = s.pos[j] - s.pos[k];
            const Vec2 rv = s.vel[j] - s.vel[k];
            o.push_back(rp.dot(u));
            o.push_back(rp.dot(v));
            o.push_back(rv.dot(u));
            o.push_back(rv.dot(v));
        }
    }
    return obs;
}

void ChaseEnv::observe(std::vector<std::vector<double>>& obs) const { obs = chase_observation(state_); }

std::vector<std::vector<double>> ChaseEnv::observe_from_record(const Episode& ep, int t) const {
    ChaseState s;
    s.pos.resize(kChaseAgents);
    s.vel.assign(kChaseAgents, Vec2{});
    for (int k = 0; k < kChaseAgents; ++k) {
        s.pos[k] = ep.positions[k][t];
        if (t > 0)
            s.vel[k] = (ep.positions[k][t] - ep.positions[k][t - 1]) * (1.0 / cfg_.dt);
        else if (!ep.init.velocities.empty())
            s.vel[k] = ep.init.velocities[k];
    }
    return chase_observation(s);
}

InitialCondition ChaseEnv::current_initial_condition() const {
    InitialCondition init;
    init.positions = state_.pos;
    init.velocities = state_.vel;
    return init;
}

}  // namespace warprl::env
