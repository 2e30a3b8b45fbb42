#include "warprl/env/serialize.hpp"

#include <json.hpp>
#include <sstream>

namespace warprl::env {

using nlohmann::json;

namespace {

json vec2_json(const Vec2& v) { return json::array({v.x, v.y}); }
Vec2 vec2_from(const json& j) { return {j.at(0).get<double>(), j.at(1).get<double>()}; }

json points_json(const std::vector<Vec2>& pts) {
    json arr = json::array();
    for (const auto& p : pts) arr.push_back(vec2_json(p));
    return arr;
}

std::vector<Vec2> points_from(const json& j) {
    std::vector<Vec2> pts;
    for (const auto& e : j) pts.push_back(vec2_from(e));
    return pts;
}

json ball_json(const BallState& b) {
    json j;
    switch (b.mode) {
        case BallState::Mode::Possessed: j["mode"] = "possessed"; break;
        case BallState::Mode::Rolling: j["mode"] = "rolling"; break;
        case BallState::Mode::Airborne: j["mode"] = "airborne"; break;
    }
    j["pos"] = vec2_json(b.pos);
    j["vel"] = vec2_json(b.vel);
    if (b.mode == BallState::Mode::Possessed) j["possessor"] = b.possessor;
    if (b.mode == BallState::Mode::Airborne) j["ttl"] = b.time_to_land;
    return j;
}

BallState ball_from(const json& j) {
    BallState b;
    const std::string mode = j.at("mode").get<std::string>();
    if (mode == "possessed")
        b.mode = BallState::Mode::Possessed;
    else if (mode == "rolling")
        b.mode = BallState::Mode::Rolling;
    else if (mode == "airborne")
        b.mode = BallState::Mode::Airborne;
    else
        throw std::invalid_argument("unknown ball mode: " + mode);
    b.pos = vec2_from(j.at("pos"));
    b.vel = vec2_from(j.at("vel"));
    b.possessor = j.value("possessor", -1);
    b.time_to_land = j.value("ttl", 0.0);
    return b;
}

}  // namespace

void write_episode(std::ostream& out, const Episode& ep) {
    json h;
    h["id"] = ep.id;
    h["env"] = ep.env_id;
    h["seed"] = ep.seed;
    h["split"] = split_name(ep.split);
    h["prov"] = ep.provenance;
    h["outcome"] = outcome_name(ep.outcome);
    json init;
    init["pos"] = points_json(ep.init.positions);
    if (!ep.init.velocities.empty()) init["vel"] = points_json(ep.init.velocities);
    if (ep.init.ball) init["ball"] = ball_json(*ep.init.ball);
    h["init"] = std::move(init);
    h["steps"] = ep.num_steps();
    out << json{{"h", std::move(h)}}.dump() << '\n';

    for (int t = 0; t < ep.num_steps(); ++t) {
        const Transition& tr = ep.transitions[t];
        json s;
        s["t"] = tr.step;
        s["a"] = tr.actions;
        s["r"] = tr.rewards;
        json pos = json::array();
        for (int k = 0; k < ep.num_agents(); ++k) pos.push_back(vec2_json(ep.positions[k][t + 1]));
        s["p"] = std::move(pos);
        if (tr.terminal) s["term"] = true;
        if (tr.has_expert_actions()) s["e"] = tr.expert_actions;
        if (!ep.ball_states.empty()) s["ball"] = ball_json(ep.ball_states[t]);
        out << json{{"s", std::move(s)}}.dump() << '\n';
    }
}

std::vector<Episode> read_episodes(std::istream& in, const std::string& source_name) {
    std::vector<Episode> episodes;
    std::string line;
    int line_no = 0;
    Episode* cur = nullptr;
    int expected_steps = 0;

    auto fail = [&](const std::string& msg) {
        throw std::runtime_error(source_name + ":" + std::to_string(line_no) + ": " + msg);
    };

    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        json j;
        try {
            j = json::parse(line);
        } catch (const json::exception& e) {
            fail(std::string("invalid json: ") + e.what());
        }
        if (j.contains("h")) {
            if (cur && cur->num_steps() != expected_steps) fail("previous episode truncated");
            const json& h = j["h"];
            Episode ep;
            ep.id = h.at("id").get<int>();
            ep.env_id = h.at("env").get<std::string>();
            ep.seed = h.at("seed").get<uint64_t>();
            ep.split = split_from_name(h.at("split").get<std::string>());
            ep.provenance = h.value("prov", "");
            ep.outcome = outcome_from_name(h.value("outcome", "none"));
            const json& init = h.at("init");
            ep.init.positions = points_from(init.at("pos"));
            if (init.contains("vel")) ep.init.velocities = points_from(init["vel"]);
            if (init.contains("ball")) ep.init.ball = ball_from(init["ball"]);
            expected_steps = h.at("steps").get<int>();
            ep.positions.assign(ep.init.positions.size(), {});
            for (size_t k = 0; k < ep.init.positions.size(); ++k)
                ep.positions[k].push_back(ep.init.positions[k]);
            episodes.push_back(std::move(ep));
            cur = &episodes.back();
        } else if (j.contains("s")) {
            if (!cur) fail("step record before any header");
            const json& s = j["s"];
            Transition tr;
            tr.step = s.at("t").get<int>();
            tr.actions = s.at("a").get<std::vector<int>>();
            tr.rewards = s.at("r").get<std::vector<double>>();
            tr.terminal = s.value("term", false);
            if (s.contains("e")) tr.expert_actions = s["e"].get<std::vector<int>>();
            auto pos = points_from(s.at("p"));
            if (pos.size() != cur->positions.size()) fail("position count mismatch");
            for (size_t k = 0; k < pos.size(); ++k) cur->positions[k].push_back(pos[k]);
            if (s.contains("ball")) cur->ball_states.push_back(ball_from(s["ball"]));
            cur->transitions.push_back(std::move(tr));
        } else {
            fail("unknown record type");
        }
    }
    if (cur && cur->num_steps() != expected_steps) fail("final episode truncated");
    return episodes;
}

std::string episode_to_string(const Episode& ep) {
    std::ostringstream ss;
    write_episode(ss, ep);
    return ss.str();
}

}  // namespace warprl::env
