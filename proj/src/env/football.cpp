#include "warprl/env/football.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace warprl::env {

namespace {

EnvSpec make_spec(const FootballConfig& cfg) {
    EnvSpec spec;
    spec.env_id = "football" + std::to_string(cfg.attackers) + "v" + std::to_string(cfg.defenders);
    spec.num_agents = cfg.num_players();
    spec.action_counts.assign(spec.num_agents, kFootballActions);
    // own velocity + (rel pos, rel vel) per other player + ball (pos, vel) + goal center
    spec.state_dims.assign(spec.num_agents, 2 + 4 * (spec.num_agents - 1) + 4 + 2);
    spec.dt = cfg.dt;
    spec.max_steps = cfg.max_steps;
    spec.bounds = cfg.pitch();
    spec.discount = cfg.discount;
    return spec;
}

Vec2 goal_axis(const FootballConfig& cfg, const Vec2& pos) {
    return (cfg.goal_center() - pos).unit();
}

/// y at which the segment prev->next crosses x = x_line, if it does.
std::optional<double> crossing_y(const Vec2& prev, const Vec2& next, double x_line) {
    if (prev.x >= x_line || next.x < x_line) return std::nullopt;
    double t = (x_line - prev.x) / (next.x - prev.x);
    return prev.y + t * (next.y - prev.y);
}

int short_pass_target(const FootballState& s, const FootballConfig& cfg, int passer) {
    const int team = player_team(cfg, passer);
    int best = -1, fallback = -1;
    double best_d = 0.0, fallback_d = 0.0;
    for (int j = 0; j < cfg.num_players(); ++j) {
        if (j == passer || player_team(cfg, j) != team) continue;
        const Vec2 rel = s.players[j].pos - s.players[passer].pos;
        const double d = rel.norm();
        if (fallback < 0 || d < fallback_d) fallback = j, fallback_d = d;
        // facing half-plane: within +-90 degrees of the last movement direction
        if (rel.dot(s.players[passer].facing) > 0.0 && (best < 0 || d < best_d))
            best = j, best_d = d;
    }
    return best >= 0 ? best : fallback;
}

int high_pass_target(const FootballState& s, const FootballConfig& cfg, int passer) {
    const int team = player_team(cfg, passer);
    int best = -1;
    double best_d = -1.0;
    for (int j = 0; j < cfg.num_players(); ++j) {
        if (j == passer || player_team(cfg, j) != team) continue;
        const double d = s.players[j].pos.dist(s.players[passer].pos);
        if (d > best_d) best = j, best_d = d;
    }
    return best;
}

}  // namespace

Phase phase_from_name(const std::string& s) {
    if (s == "pretrain") return Phase::Pretrain;
    if (s == "train") return Phase::Train;
    if (s == "test") return Phase::Test;
    throw std::invalid_argument("unknown phase: " + s);
}

std::string phase_name(Phase p) {
    switch (p) {
        case Phase::Pretrain: return "pretrain";
        case Phase::Train: return "train";
        case Phase::Test: return "test";
    }
    return "train";
}

std::vector<int> football_dynamics(FootballState& s, const std::vector<int>& actions,
                                   const FootballConfig& cfg) {
    s.landed_this_step = false;
    std::vector<int> kicks(cfg.num_players(), -1);

    // kick resolution from the pre-move state
    if (s.ball.mode == BallState::Mode::Possessed) {
        const int p = s.ball.possessor;
        const int a = actions[p];
        if (a == kActionHighPass || a == kActionShortPass || a == kActionShot) {
            Vec2 target;
            double speed = 0.0;
            bool airborne = false;
            if (a == kActionShot) {
                target = cfg.goal_center();
                speed = cfg.shot_speed;
            } else if (a == kActionShortPass) {
                int mate = short_pass_target(s, cfg, p);
                target = s.players[mate].pos;
                speed = cfg.short_pass_speed;
            } else {
                int mate = high_pass_target(s, cfg, p);
                target = s.players[mate].pos;
                speed = cfg.high_pass_speed;
                airborne = true;
            }
            s.ball.vel = (target - s.ball.pos).unit() * speed;
            s.ball.mode = airborne ? BallState::Mode::Airborne : BallState::Mode::Rolling;
            s.ball.time_to_land = airborne ? cfg.high_pass_flight : 0.0;
            s.last_touch_team = player_team(cfg, p);
            s.ball.possessor = -1;
            kicks[p] = a;
        }
    }

    // movement: actions 0-7 set velocity, 8-11 stand for this step
    for (int k = 0; k < cfg.num_players(); ++k) {
        PlayerState& pl = s.players[k];
        if (actions[k] < 8) {
            const double angle = actions[k] * (std::numbers::pi / 4.0);
            const Vec2 dir = goal_axis(cfg, pl.pos).rotated(angle);
            const double speed =
                cfg.player_speed * (player_team(cfg, k) == 0 ? cfg.attacker_speed_scale : 1.0);
            pl.vel = dir * speed;
            pl.facing = dir;
        } else {
            pl.vel = {0.0, 0.0};
        }
        pl.pos += pl.vel * cfg.dt;
    }

    // ball flight
    switch (s.ball.mode) {
        case BallState::Mode::Possessed:
            s.ball.pos = s.players[s.ball.possessor].pos;
            s.ball.vel = s.players[s.ball.possessor].vel;
            break;
        case BallState::Mode::Rolling:
            s.ball.pos += s.ball.vel * cfg.dt;
            break;
        case BallState::Mode::Airborne:
            s.ball.pos += s.ball.vel * cfg.dt;
            s.ball.time_to_land -= cfg.dt;
            if (s.ball.time_to_land <= 1e-12) {
                s.ball.mode = BallState::Mode::Rolling;
                s.ball.time_to_land = 0.0;
                s.landed_this_step = true;
            }
            break;
    }
    return kicks;
}

PossessionEvent possession_update(FootballState& s, const FootballConfig& cfg) {
    PossessionEvent ev;
    if (s.ball.mode != BallState::Mode::Rolling) return ev;

    int winner = -1;
    double winner_d = 0.0;
    for (int j = 0; j < cfg.num_players(); ++j) {
        const double d = s.players[j].pos.dist(s.ball.pos);
        if (d > cfg.control_radius) continue;
        if (winner < 0 || d < winner_d) {
            winner = j;
            winner_d = d;
        } else if (d == winner_d) {
            // tie: defender beats attacker; same team resolves to the lower index
            const bool j_def = player_team(cfg, j) == 1;
            const bool w_def = player_team(cfg, winner) == 1;
            if (j_def && !w_def) winner = j;
        }
    }
    if (winner < 0) return ev;

    ev.possessed = true;
    ev.player = winner;
    ev.gaining_team = player_team(cfg, winner);
    ev.team_changed = ev.gaining_team != s.last_touch_team;
    s.ball.mode = BallState::Mode::Possessed;
    s.ball.possessor = winner;
    s.ball.pos = s.players[winner].pos;
    s.ball.vel = s.players[winner].vel;
    s.last_touch_team = ev.gaining_team;
    return ev;
}

RewardResult football_rewards(const FootballState& prev, FootballState& next,
                              const std::vector<int>& kicks, Phase phase,
                              const FootballConfig& cfg) {
    RewardResult res;
    const int n = cfg.num_players();
    res.rewards.assign(n, 0.0);

    auto reward_team = [&](int team, double value) {
        for (int k = 0; k < n; ++k)
            if (player_team(cfg, k) == team) res.rewards[k] += value;
    };

    const bool ball_free = next.ball.mode != BallState::Mode::Possessed;
    if (ball_free) {
        // goal: rolling ball crosses the goal line inside the mouth
        if (next.ball.mode == BallState::Mode::Rolling && !next.landed_this_step) {
            auto yc = crossing_y(prev.ball.pos, next.ball.pos, cfg.x_max);
            if (yc && std::abs(*yc) <= cfg.goal_half) {
                reward_team(0, cfg.goal_reward);
                reward_team(1, -cfg.goal_reward);
                res.terminal = true;
                res.outcome = Outcome::Goal;
            }
        }
        // ball out of pitch anywhere else: lost by the last-touching team
        if (!res.terminal && !cfg.pitch().contains(next.ball.pos)) {
            reward_team(next.last_touch_team, -cfg.ball_gain_reward);
            reward_team(1 - next.last_touch_team, cfg.ball_gain_reward);
            res.terminal = true;
            res.outcome = Outcome::BallLost;
        }
    }

    if (!res.terminal) {
        PossessionEvent ev = possession_update(next, cfg);
        if (ev.team_changed) {
            reward_team(ev.gaining_team, cfg.ball_gain_reward);
            reward_team(1 - ev.gaining_team, -cfg.ball_gain_reward);
            res.terminal = true;
            res.outcome = Outcome::BallLost;
        }
    }

    if (!res.terminal && phase != Phase::Pretrain) {
        bool any_out = false;
        for (int k = 0; k < n; ++k) {
            if (!cfg.pitch().contains(next.players[k].pos)) {
                res.rewards[k] -= cfg.out_of_pitch_penalty;
                any_out = true;
            }
        }
        if (any_out) {
            res.terminal = true;
            res.outcome = Outcome::PlayerOut;
        }
    }

    if (phase == Phase::Pretrain) {
        for (int k = 0; k < cfg.attackers; ++k)
            if (kicks[k] == kActionShot) res.rewards[k] += cfg.pretrain_shot_bonus;
    }
    return res;
}

FootballEnv::FootballEnv(const FootballConfig& cfg, Phase phase)
    : Env(make_spec(cfg), [&] {
          std::vector<int> focal(cfg.attackers);
          for (int i = 0; i < cfg.attackers; ++i) focal[i] = i;
          return focal;
      }()),
      cfg_(cfg),
      phase_(phase) {
    cfg_.validate();
    state_.players.assign(cfg_.num_players(), {});
}

InitialCondition FootballEnv::sample_initial_condition(Rng& rng) const {
    // surrogate "last passer's possession" scene: one attacker holds the
    // ball in midfield, teammates spread nearby, defenders between the ball
    // and the goal
    InitialCondition init;
    const int n = cfg_.num_players();
    init.positions.resize(n);
    init.velocities.assign(n, Vec2{});

    const int possessor = rng.uniform_int(cfg_.attackers);
    const double margin = 0.05;
    auto clamp_pitch = [&](Vec2 p) {
        p.x = std::clamp(p.x, cfg_.x_min + margin, cfg_.x_max - margin);
        p.y = std::clamp(p.y, -cfg_.y_half + margin, cfg_.y_half - margin);
        return p;
    };

    const Vec2 ball_pos = clamp_pitch({rng.uniform(-0.3, 0.5), rng.uniform(-0.3, 0.3)});
    for (int k = 0; k < cfg_.attackers; ++k) {
        if (k == possessor)
            init.positions[k] = ball_pos;
        else
            init.positions[k] = clamp_pitch(ball_pos + Vec2{rng.uniform(-0.4, 0.4), rng.uniform(-0.4, 0.4)});
    }
    for (int k = cfg_.attackers; k < n; ++k) {
        const double x = rng.uniform(std::min(ball_pos.x + 0.1, cfg_.x_max - 2 * margin), cfg_.x_max - margin);
        init.positions[k] = clamp_pitch({x, rng.uniform(-cfg_.y_half + margin, cfg_.y_half - margin)});
    }

    BallState ball;
    ball.mode = BallState::Mode::Possessed;
    ball.possessor = possessor;
    ball.pos = ball_pos;
    init.ball = ball;
    return init;
}

std::unique_ptr<Env> FootballEnv::clone_fresh() const {
    return std::make_unique<FootballEnv>(cfg_, phase_);
}

void FootballEnv::load_state(const InitialCondition& init) {
    const int n = cfg_.num_players();
    require(static_cast<int>(init.positions.size()) == n, "football init: player count mismatch");
    require(init.ball.has_value(), "football init: ball state required");
    state_.players.assign(n, {});
    for (int k = 0; k < n; ++k) {
        state_.players[k].pos = init.positions[k];
        state_.players[k].vel = init.velocities.empty() ? Vec2{} : init.velocities[k];
        state_.players[k].facing = goal_axis(cfg_, init.positions[k]);
    }
    state_.ball = *init.ball;
    if (state_.ball.mode == BallState::Mode::Possessed) {
        require(state_.ball.possessor >= 0 && state_.ball.possessor < n,
                "football init: invalid possessor");
        state_.ball.pos = state_.players[state_.ball.possessor].pos;
        state_.last_touch_team = player_team(cfg_, state_.ball.possessor);
    }
    state_.landed_this_step = false;
}

void FootballEnv::step_dynamics(const std::vector<int>& actions, std::vector<double>& rewards,
                                bool& terminal, Outcome& outcome) {
    FootballState prev = state_;
    std::vector<int> kicks = football_dynamics(state_, actions, cfg_);
    RewardResult res = football_rewards(prev, state_, kicks, phase_, cfg_);
    rewards = res.rewards;
    terminal = res.terminal;
    outcome = res.outcome;
}

std::vector<std::vector<double>> football_observation(const FootballState& s,
                                                      const FootballConfig& cfg) {
    const int n = cfg.num_players();
    std::vector<std::vector<double>> obs(n);
    for (int k = 0; k < n; ++k) {
        const PlayerState& me = s.players[k];
        const Vec2 u = goal_axis(cfg, me.pos);
        const Vec2 v = u.perp();
        std::vector<double>& o = obs[k];
        o.reserve(2 + 4 * (n - 1) + 6);
        o.push_back(me.vel.dot(u));
        o.push_back(me.vel.dot(v));
        auto push_player = [&](int j) {
            const Vec2 rp = s.players[j].pos - me.pos;
            const Vec2 rv = s.players[j].vel - me.vel;
            o.push_back(rp.dot(u));
            o.push_back(rp.dot(v));
            o.push_back(rv.dot(u));
            o.push_back(rv.dot(v));
        };
        // teammates first, then opponents, each in ascending index order
        for (int j = 0; j < n; ++j)
            if (j != k && player_team(cfg, j) == player_team(cfg, k)) push_player(j);
        for (int j = 0; j < n; ++j)
            if (player_team(cfg, j) != player_team(cfg, k)) push_player(j);
        const Vec2 bp = s.ball.pos - me.pos;
        const Vec2 bv = s.ball.vel - me.vel;
        o.push_back(bp.dot(u));
        o.push_back(bp.dot(v));
        o.push_back(bv.dot(u));
        o.push_back(bv.dot(v));
        const Vec2 gp = cfg.goal_center() - me.pos;
        o.push_back(gp.dot(u));
        o.push_back(gp.dot(v));
    }
    return obs;
}

void FootballEnv::observe(std::vector<std::vector<double>>& obs) const {
    obs = football_observation(state_, cfg_);
}

std::vector<std::vector<double>> FootballEnv::observe_from_record(const Episode& ep, int t) const {
    FootballState s;
    const int n = cfg_.num_players();
    s.players.assign(n, {});
    for (int k = 0; k < n; ++k) {
        s.players[k].pos = ep.positions[k][t];
        if (t > 0)
            s.players[k].vel = (ep.positions[k][t] - ep.positions[k][t - 1]) * (1.0 / cfg_.dt);
        else if (!ep.init.velocities.empty())
            s.players[k].vel = ep.init.velocities[k];
    }
    require(ep.init.ball.has_value(), "observe_from_record: football episode lacks ball state");
    s.ball = t == 0 ? *ep.init.ball : ep.ball_states[t - 1];
    return football_observation(s, cfg_);
}

std::vector<Vec2> FootballEnv::agent_positions() const {
    std::vector<Vec2> pos(cfg_.num_players());
    for (int k = 0; k < cfg_.num_players(); ++k) pos[k] = state_.players[k].pos;
    return pos;
}

InitialCondition FootballEnv::current_initial_condition() const {
    InitialCondition init;
    const int n = cfg_.num_players();
    init.positions.resize(n);
    init.velocities.resize(n);
    for (int k = 0; k < n; ++k) {
        init.positions[k] = state_.players[k].pos;
        init.velocities[k] = state_.players[k].vel;
    }
    init.ball = state_.ball;
    return init;
}

}  // namespace warprl::env
