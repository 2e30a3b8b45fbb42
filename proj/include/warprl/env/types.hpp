#pragma once
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "warprl/common.hpp"

namespace warprl::env {

/// Static description of an environment instance.
struct EnvSpec {
    std::string env_id;
    int num_agents = 0;
    std::vector<int> action_counts;  ///< per agent
    std::vector<int> state_dims;     ///< per agent
    double dt = 0.1;
    int max_steps = 1;
    Rect bounds;
    double discount = 1.0;

    void validate() const {
        require(num_agents >= 1, "EnvSpec: num_agents must be >= 1");
        require(static_cast<int>(action_counts.size()) == num_agents, "EnvSpec: action_counts size");
        require(static_cast<int>(state_dims.size()) == num_agents, "EnvSpec: state_dims size");
        for (int a : action_counts) require(a >= 1, "EnvSpec: action count must be >= 1");
        require(dt > 0.0, "EnvSpec: dt must be > 0");
        require(max_steps >= 1, "EnvSpec: max_steps must be >= 1");
        require(discount > 0.0 && discount <= 1.0, "EnvSpec: discount must be in (0,1]");
    }
};

/// Ball possession / flight state (football only).
struct BallState {
    enum class Mode { Possessed, Rolling, Airborne };
    Mode mode = Mode::Rolling;
    Vec2 pos;
    Vec2 vel;
    int possessor = -1;         ///< player index when Mode::Possessed
    double time_to_land = 0.0;  ///< remaining flight time when Mode::Airborne

    bool operator==(const BallState&) const = default;
};

/// One environment step for all agents. Expert-action annotations are
/// attached after episode-end alignment; empty means unannotated.
struct Transition {
    std::vector<std::vector<double>> obs;       ///< per-agent observation
    std::vector<int> actions;                   ///< joint action, one id per agent
    std::vector<double> rewards;                ///< per-agent
    std::vector<std::vector<double>> next_obs;  ///< per-agent
    bool terminal = false;
    int step = 0;
    std::vector<int> expert_actions;  ///< per-agent warped/same-index assignment; empty if none
    bool is_demo = false;

    bool has_expert_actions() const { return !expert_actions.empty(); }
};

enum class Outcome {
    None,        ///< episode still running
    Capture,     ///< chase: predators touched the prey
    PreyOut,     ///< chase: prey left the area
    PredatorOut, ///< chase: a predator left the area
    Timeout,
    Goal,        ///< football
    BallLost,    ///< football: possession changed team or ball left the pitch
    PlayerOut,   ///< football: a player left the pitch
};

std::string outcome_name(Outcome o);
Outcome outcome_from_name(const std::string& s);

enum class Split { Train, Val, Test };

std::string split_name(Split s);
Split split_from_name(const std::string& s);

/// Everything needed to restart an episode from a recorded starting state.
struct InitialCondition {
    std::vector<Vec2> positions;
    std::vector<Vec2> velocities;          ///< empty means all zero
    std::optional<BallState> ball;         ///< football only
};

/// A full recorded episode: the unit of alignment and evaluation.
struct Episode {
    int id = 0;
    std::string env_id;
    uint64_t seed = 0;
    Split split = Split::Train;
    std::string provenance;  ///< "synthetic-expert", "external-tracking", or "rollout"
    InitialCondition init;
    Outcome outcome = Outcome::None;
    std::vector<Transition> transitions;
    /// positions[agent][step], length num_steps()+1 per agent
    std::vector<std::vector<Vec2>> positions;
    /// football: ball state after each step (length num_steps()), index 0 state is in init
    std::vector<BallState> ball_states;

    int num_steps() const { return static_cast<int>(transitions.size()); }
    int num_agents() const { return static_cast<int>(positions.size()); }

    /// Undiscounted per-agent return.
    std::vector<double> returns() const {
        if (transitions.empty()) return {};
        std::vector<double> r(transitions[0].rewards.size(), 0.0);
        for (const auto& tr : transitions)
            for (size_t k = 0; k < r.size(); ++k) r[k] += tr.rewards[k];
        return r;
    }
};

}  // namespace warprl::env
