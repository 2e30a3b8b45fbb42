#pragma once
#include "warprl/env/env.hpp"

namespace warprl::env {

/// Simplified 2-D football attack scenarios (2vs2 / 4vs8). Players move at
/// constant speed in 8 directions spaced 45 degrees in an egocentric frame
/// whose axis points at the goal center (action 0), stand still (action 8),
/// or — for the ball possessor only — high pass (9), short pass (10),
/// shot (11).
struct FootballConfig {
    int attackers = 2;
    int defenders = 2;
    double dt = 0.1;
    int max_steps = 85;
    double player_speed = 0.5;
    double attacker_speed_scale = 1.0;  ///< 1.1 in the surrogate source environment
    double control_radius = 0.05;
    double short_pass_speed = 1.2;
    double high_pass_speed = 1.6;
    double high_pass_flight = 0.6;  ///< seconds airborne, un-interceptable
    double shot_speed = 2.0;
    double goal_reward = 10.0;
    double ball_gain_reward = 1.0;
    double out_of_pitch_penalty = 5.0;
    double pretrain_shot_bonus = 1.0;
    double discount = 0.99;
    double x_min = -1.0, x_max = 1.0;
    double y_half = 0.42;
    double goal_half = 0.044;  ///< goal mouth is y in [-goal_half, goal_half] at x_max

    int num_players() const { return attackers + defenders; }
    Vec2 goal_center() const { return {x_max, 0.0}; }
    Rect pitch() const { return {x_min, x_max, -y_half, y_half}; }

    void validate() const {
        require(attackers >= 2 && defenders >= 1, "football: need >= 2 attackers and >= 1 defender");
        require(dt > 0.0 && max_steps >= 1, "football: dt/max_steps invalid");
        require(player_speed > 0.0 && short_pass_speed > 0.0 && high_pass_speed > 0.0 && shot_speed > 0.0,
                "football: speeds must be > 0");
        require(control_radius > 0.0, "football.control_radius must be > 0");
        require(goal_half < y_half, "football: goal mouth must fit in the pitch");
        require(attacker_speed_scale > 0.0, "football.attacker_speed_scale must be > 0");
    }
};

constexpr int kFootballActions = 12;
constexpr int kActionStand = 8;
constexpr int kActionHighPass = 9;
constexpr int kActionShortPass = 10;
constexpr int kActionShot = 11;

enum class Phase { Pretrain, Train, Test };

Phase phase_from_name(const std::string& s);
std::string phase_name(Phase p);

struct PlayerState {
    Vec2 pos;
    Vec2 vel;
    Vec2 facing{1.0, 0.0};  ///< last movement direction, used for pass targeting
};

struct FootballState {
    std::vector<PlayerState> players;  ///< attackers first, then defenders
    BallState ball;
    int last_touch_team = 0;  ///< 0 attackers, 1 defenders
    bool landed_this_step = false;
};

inline int player_team(const FootballConfig& cfg, int player) {
    return player < cfg.attackers ? 0 : 1;
}

/// Kick + movement + ball flight for one step. Kicks are resolved from the
/// pre-move state (the ball leaves from the possessor's current position);
/// pass/shot actions by non-possessors are no-ops equivalent to standing.
/// Returns the kick action per player (-1 for none) for reward shaping.
std::vector<int> football_dynamics(FootballState& s, const std::vector<int>& actions,
                                   const FootballConfig& cfg);

struct PossessionEvent {
    bool possessed = false;
    int player = -1;
    bool team_changed = false;
    int gaining_team = -1;
};

/// A rolling (or just-landed) ball within control radius of a player becomes
/// possessed: nearest player wins, exact ties go to the defender (then the
/// lower index). Airborne balls cannot be intercepted.
PossessionEvent possession_update(FootballState& s, const FootballConfig& cfg);

struct RewardResult {
    std::vector<double> rewards;
    bool terminal = false;
    Outcome outcome = Outcome::None;
};

/// Event resolution for one step, given the pre-step state and the state
/// after football_dynamics. Applies, with this precedence, the first of:
/// goal crossing (linear interpolation across the step), ball out of pitch
/// (lost by the last-touching team), possession change of team (+-1), player
/// out of pitch (-5 each; disabled in pretrain). Runs possession_update on
/// `next` when no boundary event fired. The pretrain shot bonus (+1 per
/// attacker who shot) is additive and never terminal by itself.
RewardResult football_rewards(const FootballState& prev, FootballState& next,
                              const std::vector<int>& kicks, Phase phase,
                              const FootballConfig& cfg);

/// Egocentric observations: own velocity, relative position/velocity of
/// teammates then opponents, ball position/velocity, goal center, all in
/// the goal-axis basis.
std::vector<std::vector<double>> football_observation(const FootballState& s,
                                                      const FootballConfig& cfg);

class FootballEnv final : public Env {
public:
    FootballEnv(const FootballConfig& cfg, Phase phase);

    const FootballConfig& config() const { return cfg_; }
    const FootballState& state() const { return state_; }
    Phase phase() const { return phase_; }
    void set_phase(Phase p) { phase_ = p; }

    InitialCondition sample_initial_condition(Rng& rng) const override;
    std::unique_ptr<Env> clone_fresh() const override;
    std::vector<std::vector<double>> observe_from_record(const Episode& ep, int t) const override;

protected:
    void load_state(const InitialCondition& init) override;
    void step_dynamics(const std::vector<int>& actions, std::vector<double>& rewards,
                       bool& terminal, Outcome& outcome) override;
    void observe(std::vector<std::vector<double>>& obs) const override;
    std::vector<Vec2> agent_positions() const override;
    std::optional<BallState> current_ball() const override { return state_.ball; }
    InitialCondition current_initial_condition() const override;

private:
    FootballConfig cfg_;
    Phase phase_;
    FootballState state_;
};

}  // namespace warprl::env
