#include "warprl/dtw/align.hpp"

namespace warprl::dtw {

Seq alignment_features(const env::Episode& ep) {
    const int n_points = ep.num_steps() + 1;
    const int n_agents = ep.num_agents();
    const bool with_ball = !ep.ball_states.empty();
    Seq seq(n_points);
    for (int t = 0; t < n_points; ++t) {
        std::vector<double>& f = seq[t];
        f.reserve(2 * n_agents + (with_ball ? 2 : 0));
        for (int k = 0; k < n_agents; ++k) {
            f.push_back(ep.positions[k][t].x);
            f.push_back(ep.positions[k][t].y);
        }
        if (with_ball) {
            const Vec2 bp = t == 0 ? ep.init.ball.value().pos : ep.ball_states[t - 1].pos;
            f.push_back(bp.x);
            f.push_back(bp.y);
        }
    }
    return seq;
}

std::vector<std::vector<int>> assign_expert_actions(const env::Episode& learner,
                                                    const env::Episode& demo,
                                                    const FeatureExtractor& features) {
    require(learner.num_steps() >= 1 && demo.num_steps() >= 1,
            "assign_expert_actions: empty episode");
    require(learner.num_agents() == demo.num_agents(),
            "assign_expert_actions: agent count mismatch");
    for (const auto& tr : demo.transitions)
        require(static_cast<int>(tr.actions.size()) == demo.num_agents(),
                "assign_expert_actions: demo lacks per-agent actions");

    const auto wm = accumulate(local_distance(features(learner), features(demo), Exec::Serial));
    const int demo_actions = demo.num_steps();

    std::vector<std::vector<int>> assigned(learner.num_steps());
    for (int t = 0; t < learner.num_steps(); ++t) {
        const int warped = std::min(warped_index(wm, t), demo_actions - 1);
        assigned[t] = demo.transitions[warped].actions;
    }
    return assigned;
}

double episode_dtw_distance(const env::Episode& a, const env::Episode& b) {
    require(a.num_agents() == b.num_agents(), "episode_dtw_distance: agent count mismatch");
    double sum = 0.0;
    for (int k = 0; k < a.num_agents(); ++k) sum += dtw_distance(a.positions[k], b.positions[k]);
    return sum / static_cast<double>(a.num_agents());
}

}  // namespace warprl::dtw
