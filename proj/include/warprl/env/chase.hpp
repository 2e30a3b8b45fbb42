#pragma once
#include "warprl/env/env.hpp"

namespace warprl::env {

/// 2-predator / 1-prey chase in a square arena. Both sides pick one of 13
/// discrete actions: accelerate along one of 12 directions spaced 30 degrees
/// in the agent's egocentric frame (action 0 points along the frame axis),
/// or do nothing (action 12). The predator frame axis points at the prey;
/// the prey frame axis points away from the nearest predator.
struct ChaseConfig {
    double half_width = 1.0;    ///< play area is [-half_width, half_width]^2
    double diameter = 0.1;      ///< agent disk diameter; capture threshold
    double dt = 0.1;
    int max_steps = 300;
    double mobility_ratio = 1.1;  ///< predator accel & speed vs prey (1.2 source, 1.1 target)
    double prey_max_speed = 1.0;
    double prey_accel = 3.0;
    double damping = 0.25;
    double discount = 0.99;
    double init_half_range = 0.5;  ///< random starts uniform in [-r, r]^2

    void validate() const {
        require(mobility_ratio > 1.0, "chase.mobility_ratio must be > 1.0");
        require(diameter > 0.0, "chase.diameter must be > 0");
        require(dt > 0.0, "chase.dt must be > 0");
        require(max_steps >= 1, "chase.max_steps must be >= 1");
        require(damping >= 0.0 && damping < 1.0, "chase.damping must be in [0,1)");
        require(prey_max_speed > 0.0 && prey_accel > 0.0, "chase speed/accel must be > 0");
        require(init_half_range <= half_width, "chase.init_half_range must fit in the area");
    }
};

constexpr int kChaseActions = 13;
constexpr int kChaseAgents = 3;  ///< agents 0,1 predators; agent 2 prey

struct ChaseState {
    std::vector<Vec2> pos;  ///< size 3
    std::vector<Vec2> vel;
};

/// Egocentric frame axis (unit vector) for one agent: predators aim at the
/// prey, the prey aims away from the nearest predator.
Vec2 chase_frame_axis(const ChaseState& s, int agent);

/// Point-mass update for one step:
///   v <- v*(1-damping) + accel_dir*accel*dt, clipped to max speed
///   p <- p + v*dt
/// Predator accel and max speed are mobility_ratio times the prey's.
void chase_dynamics(ChaseState& s, const std::vector<int>& actions, const ChaseConfig& cfg);

struct ChaseRewardResult {
    std::vector<double> rewards{0.0, 0.0, 0.0};
    bool terminal = false;
    Outcome outcome = Outcome::None;
};

/// Event rules on the post-step state: capture (center distance <= diameter),
/// then out-of-area (tested on disk centers). Simultaneous out-of-area by
/// both sides penalizes every offender; the outcome label follows the
/// precedence capture > prey_out > predator_out.
ChaseRewardResult chase_rewards(const ChaseState& next, const ChaseConfig& cfg);

/// Egocentric observations: own velocity plus relative position/velocity of
/// every other agent, all expressed in the agent's frame-axis basis.
std::vector<std::vector<double>> chase_observation(const ChaseState& s);

class ChaseEnv final : public Env {
public:
    explicit ChaseEnv(const ChaseConfig& cfg);

    const ChaseConfig& config() const { return cfg_; }
    const ChaseState& state() const { return state_; }

    InitialCondition sample_initial_condition(Rng& rng) const override;
    std::unique_ptr<Env> clone_fresh() const override;
    std::vector<std::vector<double>> observe_from_record(const Episode& ep, int t) const override;

protected:
    void load_state(const InitialCondition& init) override;
    void step_dynamics(const std::vector<int>& actions, std::vector<double>& rewards,
                       bool& terminal, Outcome& outcome) override;
    void observe(std::vector<std::vector<double>>& obs) const override;
    std::vector<Vec2> agent_positions() const override { return state_.pos; }
    InitialCondition current_initial_condition() const override;

private:
    ChaseConfig cfg_;
    ChaseState state_;
};

}  // namespace warprl::env
