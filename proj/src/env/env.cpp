#include "warprl/env/env.hpp"

#include <stdexcept>

namespace warprl::env {

std::string outcome_name(Outcome o) {
    switch (o) {
        case Outcome::None: return "none";
        case Outcome::Capture: return "capture";
        case Outcome::PreyOut: return "prey_out";
        case Outcome::PredatorOut: return "predator_out";
        case Outcome::Timeout: return "timeout";
        case Outcome::Goal: return "goal";
        case Outcome::BallLost: return "ball_lost";
        case Outcome::PlayerOut: return "player_out";
    }
    return "none";
}

Outcome outcome_from_name(const std::string& s) {
    if (s == "none") return Outcome::None;
    if (s == "capture") return Outcome::Capture;
    if (s == "prey_out") return Outcome::PreyOut;
    if (s == "predator_out") return Outcome::PredatorOut;
    if (s == "timeout") return Outcome::Timeout;
    if (s == "goal") return Outcome::Goal;
    if (s == "ball_lost") return Outcome::BallLost;
    if (s == "player_out") return Outcome::PlayerOut;
    throw std::invalid_argument("unknown outcome name: " + s);
}

std::string split_name(Split s) {
    switch (s) {
        case Split::Train: return "train";
        case Split::Val: return "val";
        case Split::Test: return "test";
    }
    return "train";
}

Split split_from_name(const std::string& s) {
    if (s == "train") return Split::Train;
    if (s == "val") return Split::Val;
    if (s == "test") return Split::Test;
    throw std::invalid_argument("unknown split name: " + s);
}

std::vector<std::vector<double>> Env::observe_from_record(const Episode&, int) const {
    throw std::logic_error("observe_from_record: not supported by " + spec_.env_id);
}

std::vector<std::vector<double>> Env::reset(uint64_t seed) {
    Rng rng(seed);
    load_state(sample_initial_condition(rng));
    begin_episode(seed);
    return last_obs_;
}

std::vector<std::vector<double>> Env::reset(const InitialCondition& init) {
    for (const auto& p : init.positions)
        require(spec_.bounds.contains(p), "reset: initial position outside bounds");
    load_state(init);
    begin_episode(0);
    return last_obs_;
}

void Env::begin_episode(uint64_t seed) {
    episode_ = Episode{};
    episode_.id = episode_counter_++;
    episode_.env_id = spec_.env_id;
    episode_.seed = seed;
    episode_.init = current_initial_condition();
    episode_.positions.assign(spec_.num_agents, {});
    auto pos = agent_positions();
    for (int k = 0; k < spec_.num_agents; ++k) episode_.positions[k].push_back(pos[k]);
    observe(last_obs_);
    done_ = false;
    started_ = true;
    step_index_ = 0;
}

StepResult Env::step(const std::vector<int>& joint_action) {
    if (!started_ || done_) throw std::logic_error("step: episode is not running (reset first)");
    require(static_cast<int>(joint_action.size()) == spec_.num_agents, "step: joint action size mismatch");
    for (int k = 0; k < spec_.num_agents; ++k)
        require(joint_action[k] >= 0 && joint_action[k] < spec_.action_counts[k],
                "step: action id out of range");

    StepResult res;
    res.rewards.assign(spec_.num_agents, 0.0);
    bool terminal = false;
    Outcome outcome = Outcome::None;
    step_dynamics(joint_action, res.rewards, terminal, outcome);

    if (!terminal && step_index_ + 1 >= spec_.max_steps) {
        terminal = true;
        outcome = Outcome::Timeout;
    }

    observe(res.obs);

    Transition tr;
    tr.obs = last_obs_;
    tr.actions = joint_action;
    tr.rewards = res.rewards;
    tr.next_obs = res.obs;
    tr.terminal = terminal;
    tr.step = step_index_;
    episode_.transitions.push_back(std::move(tr));

    auto pos = agent_positions();
    for (int k = 0; k < spec_.num_agents; ++k) episode_.positions[k].push_back(pos[k]);
    if (auto ball = current_ball()) episode_.ball_states.push_back(*ball);

    last_obs_ = res.obs;
    step_index_ += 1;
    done_ = terminal;
    if (terminal) episode_.outcome = outcome;

    res.done = terminal;
    res.outcome = outcome;
    return res;
}

}  // namespace warprl::env
