#pragma once
#include <memory>
#include <optional>
#include <vector>

#include "warprl/env/types.hpp"
#include "warprl/rng.hpp"

namespace warprl::env {

struct StepResult {
    std::vector<std::vector<double>> obs;
    std::vector<double> rewards;
    bool done = false;
    Outcome outcome = Outcome::None;
};

/// Environment base: deterministic single-threaded state machine that
/// records the episode as it runs. Independent instances can run in
/// parallel; a single instance is never shared.
class Env {
public:
    virtual ~Env() = default;

    const EnvSpec& spec() const { return spec_; }

    /// Agents that learn in the focal (stage-2) phase: predators / attackers.
    const std::vector<int>& focal_agents() const { return focal_agents_; }

    /// Start an episode from a seeded random initial condition.
    std::vector<std::vector<double>> reset(uint64_t seed);

    /// Start an episode from an explicit initial condition (e.g., a
    /// demonstration's starting state). Rejects out-of-bounds positions.
    std::vector<std::vector<double>> reset(const InitialCondition& init);

    StepResult step(const std::vector<int>& joint_action);

    bool done() const { return done_; }

    /// The episode recorded since the last reset.
    const Episode& episode() const { return episode_; }

    virtual InitialCondition sample_initial_condition(Rng& rng) const = 0;

    /// A fresh, unstarted environment with the same configuration.
    virtual std::unique_ptr<Env> clone_fresh() const = 0;

    /// Per-agent observations at step t of a recorded episode, rebuilt from
    /// the trajectory (velocities by finite difference). Used for datasets
    /// whose dynamics cannot be replayed (external tracking data).
    virtual std::vector<std::vector<double>> observe_from_record(const Episode& ep, int t) const;

protected:
    explicit Env(EnvSpec spec, std::vector<int> focal_agents)
        : spec_(std::move(spec)), focal_agents_(std::move(focal_agents)) {
        spec_.validate();
    }

    /// Install an initial condition; throws on invalid/out-of-bounds input.
    virtual void load_state(const InitialCondition& init) = 0;

    /// Advance the dynamics one dt and resolve the task's reward/termination
    /// events. The base class layers the time-limit rule on top.
    virtual void step_dynamics(const std::vector<int>& actions, std::vector<double>& rewards,
                               bool& terminal, Outcome& outcome) = 0;

    virtual void observe(std::vector<std::vector<double>>& obs) const = 0;
    virtual std::vector<Vec2> agent_positions() const = 0;
    virtual std::optional<BallState> current_ball() const { return std::nullopt; }
    virtual InitialCondition current_initial_condition() const = 0;

    EnvSpec spec_;

private:
    void begin_episode(uint64_t seed);

    std::vector<int> focal_agents_;
    Episode episode_;
    std::vector<std::vector<double>> last_obs_;
    bool done_ = true;
    bool started_ = false;
    int step_index_ = 0;
    int episode_counter_ = 0;
};

}  // namespace warprl::env
