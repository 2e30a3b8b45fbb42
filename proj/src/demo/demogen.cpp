#include "warprl/demo/demogen.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>

#include "warprl/env/serialize.hpp"
#include "warprl/eval/evaluate.hpp"
#include "warprl/train/trainer.hpp"

namespace warprl::demo {

using nlohmann::json;

std::vector<int> DemonstrationSet::split_ids(env::Split s) const {
    std::vector<int> ids;
    for (size_t i = 0; i < episodes.size(); ++i)
        if (episodes[i].split == s) ids.push_back(static_cast<int>(i));
    return ids;
}

SplitCounts proportional_split(int n, double val_frac, double test_frac) {
    require(n >= 1, "proportional_split: need at least one episode");
    require(val_frac >= 0.0 && test_frac >= 0.0 && val_frac + test_frac < 1.0,
            "proportional_split: fractions must be nonnegative and sum below 1");
    SplitCounts c;
    c.val = static_cast<int>(std::lround(n * val_frac));
    c.test = static_cast<int>(std::lround(n * test_frac));
    c.train = n - c.val - c.test;
    return c;
}

void assign_splits(std::vector<env::Episode>& episodes, const SplitCounts& counts) {
    require(counts.train + counts.val + counts.test == static_cast<int>(episodes.size()),
            "assign_splits: counts do not cover the episodes");
    for (int i = 0; i < static_cast<int>(episodes.size()); ++i) {
        if (i < counts.train)
            episodes[i].split = env::Split::Train;
        else if (i < counts.train + counts.val)
            episodes[i].split = env::Split::Val;
        else
            episodes[i].split = env::Split::Test;
    }
}

std::vector<nn::QNetwork> train_source_expert(env::Env& source_env, long steps, uint64_t seed,
                                              const std::vector<int>& hidden) {
    train::TrainerConfig tc;
    tc.variant = train::Variant::DQN;
    tc.rl_steps = steps;
    tc.hidden = hidden;
    tc.eval_every = 0;  // the caller evaluates checkpoints as needed

    Rng rng(seed);
    std::vector<nn::QNetwork> nets;
    for (int k = 0; k < source_env.spec().num_agents; ++k) {
        std::vector<int> dims;
        dims.push_back(source_env.spec().state_dims[k]);
        for (int h : hidden) dims.push_back(h);
        dims.push_back(source_env.spec().action_counts[k]);
        nets.push_back(nn::QNetwork::init_uniform(dims, rng));
    }
    if (steps == 0) return nets;

    train::RLOptions opts;
    opts.learning_agents.resize(source_env.spec().num_agents);
    for (size_t k = 0; k < opts.learning_agents.size(); ++k)
        opts.learning_agents[k] = static_cast<int>(k);
    DemonstrationSet no_demos;
    auto res = train::train_rl(tc, std::move(nets), no_demos, source_env, opts, seed);
    return std::move(res.nets);
}

DemonstrationSet rollout_demos(const std::vector<nn::QNetwork>& experts, env::Env& source_env,
                               int n_episodes, uint64_t seed, double val_frac, double test_frac) {
    require(n_episodes >= 1, "rollout_demos: need at least one episode");
    DemonstrationSet out;
    out.task = source_env.spec().env_id;
    out.provenance = "synthetic-expert";
    Rng rng(seed);
    out.episodes.reserve(n_episodes);
    for (int i = 0; i < n_episodes; ++i) {
        const uint64_t ep_seed = rng.split();
        env::Episode ep = eval::rollout_greedy(
            source_env, experts, [&] {
                Rng init_rng(ep_seed);
                return source_env.sample_initial_condition(init_rng);
            }());
        ep.id = i;
        ep.seed = ep_seed;
        ep.provenance = "synthetic-expert";
        out.episodes.push_back(std::move(ep));
    }
    assign_splits(out.episodes, proportional_split(n_episodes, val_frac, test_frac));
    return out;
}

namespace {

void materialize_by_replay(env::Episode& ep, env::Env& e) {
    auto obs = e.reset(ep.init);
    for (int t = 0; t < ep.num_steps(); ++t) {
        env::Transition& tr = ep.transitions[t];
        auto res = e.step(tr.actions);
        tr.obs = std::move(obs);
        tr.next_obs = res.obs;
        obs = std::move(res.obs);
        if (res.done && t + 1 < ep.num_steps())
            throw std::runtime_error("materialize: replay terminated before the recorded episode");
    }
}

void materialize_from_record(env::Episode& ep, const env::Env& e) {
    auto obs = e.observe_from_record(ep, 0);
    for (int t = 0; t < ep.num_steps(); ++t) {
        env::Transition& tr = ep.transitions[t];
        tr.obs = std::move(obs);
        obs = e.observe_from_record(ep, t + 1);
        tr.next_obs = obs;
    }
}

}  // namespace

void materialize(DemonstrationSet& demos, const env::Env& proto_env) {
    std::unique_ptr<env::Env> scratch = proto_env.clone_fresh();
    for (env::Episode& ep : demos.episodes) {
        const bool has_obs = !ep.transitions.empty() && !ep.transitions.front().obs.empty();
        if (!has_obs) {
            if (ep.provenance == "external-tracking")
                materialize_from_record(ep, proto_env);
            else
                materialize_by_replay(ep, *scratch);
        }
        for (env::Transition& tr : ep.transitions) {
            tr.is_demo = true;
            tr.expert_actions = tr.actions;  // demo-vs-itself alignment is the identity
        }
    }
}

RlPools select_rl_pools(const DemonstrationSet& demos, int n_train, int n_test, bool prefer_goal) {
    auto pick = [&](env::Split split, int want) {
        std::vector<int> ids = demos.split_ids(split);
        if (prefer_goal)
            std::stable_sort(ids.begin(), ids.end(), [&](int a, int b) {
                const bool ga = demos.episodes[a].outcome == env::Outcome::Goal;
                const bool gb = demos.episodes[b].outcome == env::Outcome::Goal;
                return ga && !gb;
            });
        if (static_cast<int>(ids.size()) > want) ids.resize(want);
        return ids;
    };
    RlPools pools;
    pools.train_ids = pick(env::Split::Val, n_train);
    pools.test_ids = pick(env::Split::Test, n_test);
    require(!pools.train_ids.empty(), "select_rl_pools: empty train pool");
    require(!pools.test_ids.empty(), "select_rl_pools: empty test pool");
    return pools;
}

uint64_t file_checksum(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    require(static_cast<bool>(in), "file_checksum: cannot open " + path);
    uint64_t h = 1469598103934665603ull;
    char buf[4096];
    while (in.read(buf, sizeof buf) || in.gcount() > 0) {
        for (std::streamsize i = 0; i < in.gcount(); ++i) {
            h ^= static_cast<unsigned char>(buf[i]);
            h *= 1099511628211ull;
        }
        if (!in) break;
    }
    return h;
}

void save_dataset(const std::string& dir, const DemonstrationSet& demos) {
    std::filesystem::create_directories(dir);
    const std::string episodes_path = dir + "/episodes.jsonl";
    {
        std::ofstream out(episodes_path);
        require(static_cast<bool>(out), "save_dataset: cannot write " + episodes_path);
        for (const auto& ep : demos.episodes) env::write_episode(out, ep);
    }
    json manifest;
    manifest["task"] = demos.task;
    manifest["provenance"] = demos.provenance;
    manifest["source_desc"] = demos.source_desc;
    manifest["episodes"] = demos.episodes.size();
    manifest["splits"] = {{"train", demos.count(env::Split::Train)},
                          {"val", demos.count(env::Split::Val)},
                          {"test", demos.count(env::Split::Test)}};
    char checksum[17];
    std::snprintf(checksum, sizeof checksum, "%016llx",
                  static_cast<unsigned long long>(file_checksum(episodes_path)));
    manifest["checksum_fnv1a64"] = checksum;
    std::ofstream mf(dir + "/manifest.json");
    mf << manifest.dump(2) << '\n';
}

DemonstrationSet load_dataset(const std::string& dir) {
    const std::string manifest_path = dir + "/manifest.json";
    std::ifstream mf(manifest_path);
    require(static_cast<bool>(mf), "load_dataset: cannot open " + manifest_path);
    json manifest = json::parse(mf);

    const std::string episodes_path = dir + "/episodes.jsonl";
    char checksum[17];
    std::snprintf(checksum, sizeof checksum, "%016llx",
                  static_cast<unsigned long long>(file_checksum(episodes_path)));
    if (manifest.at("checksum_fnv1a64").get<std::string>() != checksum)
        throw std::runtime_error("load_dataset: checksum mismatch for " + episodes_path);

    DemonstrationSet out;
    out.task = manifest.at("task").get<std::string>();
    out.provenance = manifest.at("provenance").get<std::string>();
    out.source_desc = manifest.value("source_desc", "");
    std::ifstream in(episodes_path);
    out.episodes = env::read_episodes(in, episodes_path);
    require(out.episodes.size() == manifest.at("episodes").get<size_t>(),
            "load_dataset: episode count mismatch in " + dir);
    return out;
}

namespace {

int quantize_direction(const Vec2& disp, const Vec2& axis) {
    const double angle = std::atan2(axis.x * disp.y - axis.y * disp.x, axis.dot(disp));
    const int bin = static_cast<int>(std::lround(angle / (std::numbers::pi / 4.0)));
    return ((bin % 8) + 8) % 8;
}

int event_action(const std::string& type) {
    if (type == "high_pass") return env::kActionHighPass;
    if (type == "short_pass") return env::kActionShortPass;
    if (type == "shot") return env::kActionShot;
    return -1;
}

struct RawSequence {
    int id = 0;
    double fps = 25.0;
    std::string outcome;
    int header_line = 0;
    std::vector<std::vector<Vec2>> players;  // per frame
    std::vector<Vec2> ball;                  // per frame
    struct Event {
        int frame;
        int player;
        int action;
    };
    std::vector<Event> events;
};

}  // namespace

DemonstrationSet load_external_tracking(const std::string& path, const env::FootballConfig& cfg,
                                        double val_frac, double test_frac,
                                        TrackingLoadReport* report) {
    std::ifstream in(path);
    require(static_cast<bool>(in), "load_external_tracking: cannot open " + path);

    const int n_players = cfg.num_players();
    std::vector<RawSequence> seqs;
    std::string line;
    int line_no = 0;
    auto fail = [&](const std::string& msg) {
        throw std::runtime_error(path + ":" + std::to_string(line_no) + ": " + msg);
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
        if (j.contains("seq")) {
            const json& h = j["seq"];
            RawSequence s;
            s.id = h.value("id", static_cast<int>(seqs.size()));
            s.fps = h.value("fps", 25.0);
            if (s.fps <= 0.0) fail("fps must be positive");
            if (h.value("attackers", cfg.attackers) != cfg.attackers ||
                h.value("defenders", cfg.defenders) != cfg.defenders)
                fail("player counts do not match the configured scenario");
            s.outcome = h.value("outcome", "none");
            if (s.outcome != "goal" && s.outcome != "ball_lost" && s.outcome != "none")
                fail("unknown outcome label: " + s.outcome);
            s.header_line = line_no;
            seqs.push_back(std::move(s));
        } else if (j.contains("f")) {
            if (seqs.empty()) fail("frame record before any sequence header");
            RawSequence& s = seqs.back();
            const json& f = j["f"];
            std::vector<Vec2> players;
            for (const auto& p : f.at("players"))
                players.push_back({p.at(0).get<double>(), p.at(1).get<double>()});
            if (static_cast<int>(players.size()) != n_players) fail("player count mismatch in frame");
            for (const auto& p : players)
                if (!cfg.pitch().contains(p)) fail("player position outside the pitch");
            const auto& b = f.at("ball");
            const Vec2 ball{b.at(0).get<double>(), b.at(1).get<double>()};
            if (!cfg.pitch().contains(ball)) fail("ball position outside the pitch");
            if (f.contains("event")) {
                const json& e = f["event"];
                const int action = event_action(e.at("type").get<std::string>());
                if (action < 0) fail("unknown event label: " + e.at("type").get<std::string>());
                const int player = e.at("player").get<int>();
                if (player < 0 || player >= n_players) fail("event player out of range");
                s.events.push_back({static_cast<int>(s.players.size()), player, action});
            }
            s.players.push_back(std::move(players));
            s.ball.push_back(ball);
        } else {
            fail("unknown record type");
        }
    }

    DemonstrationSet out;
    out.task = "football" + std::to_string(cfg.attackers) + "v" + std::to_string(cfg.defenders);
    out.provenance = "external-tracking";
    out.source_desc = "tracking data resampled to " + std::to_string(cfg.dt) + " s steps";

    double max_err = 0.0;
    int total_frames = 0;
    for (const RawSequence& s : seqs) {
        line_no = s.header_line;
        const int n_frames = static_cast<int>(s.players.size());
        if (n_frames < 2) fail("sequence needs at least two frames");
        total_frames += n_frames;
        const double duration = (n_frames - 1) / s.fps;
        int n_steps = static_cast<int>(std::lround(duration / cfg.dt));
        n_steps = std::clamp(n_steps, 1, cfg.max_steps);

        auto frame_of_step = [&](int t) {
            return std::min(n_frames - 1,
                            static_cast<int>(std::lround(t * cfg.dt * s.fps)));
        };

        env::Episode ep;
        ep.id = s.id;
        ep.env_id = out.task;
        ep.provenance = "external-tracking";
        ep.outcome = s.outcome == "goal"        ? env::Outcome::Goal
                     : s.outcome == "ball_lost" ? env::Outcome::BallLost
                                                : env::Outcome::Timeout;
        ep.positions.assign(n_players, {});
        for (int t = 0; t <= n_steps; ++t) {
            const int f = frame_of_step(t);
            for (int k = 0; k < n_players; ++k) ep.positions[k].push_back(s.players[f][k]);
        }

        // initial condition: the nearest player holds the ball
        ep.init.positions.resize(n_players);
        ep.init.velocities.assign(n_players, Vec2{});
        for (int k = 0; k < n_players; ++k) ep.init.positions[k] = ep.positions[k][0];
        env::BallState ball0;
        ball0.pos = s.ball[0];
        int possessor = 0;
        for (int k = 1; k < n_players; ++k)
            if (ep.init.positions[k].dist(ball0.pos) < ep.init.positions[possessor].dist(ball0.pos))
                possessor = k;
        ball0.mode = env::BallState::Mode::Possessed;
        ball0.possessor = possessor;
        ball0.pos = ep.init.positions[possessor];
        ep.init.ball = ball0;

        // per-step ball states and actions
        for (int t = 0; t < n_steps; ++t) {
            const int f = frame_of_step(t + 1);
            env::BallState bs;
            bs.pos = s.ball[f];
            const int f_prev = frame_of_step(t);
            bs.vel = (s.ball[f] - s.ball[f_prev]) * (1.0 / cfg.dt);
            int nearest = -1;
            double nearest_d = 0.0;
            for (int k = 0; k < n_players; ++k) {
                const double d = ep.positions[k][t + 1].dist(bs.pos);
                if (nearest < 0 || d < nearest_d) nearest = k, nearest_d = d;
            }
            if (nearest_d <= cfg.control_radius) {
                bs.mode = env::BallState::Mode::Possessed;
                bs.possessor = nearest;
                bs.pos = ep.positions[nearest][t + 1];
                bs.vel = {0.0, 0.0};
            } else {
                bs.mode = env::BallState::Mode::Rolling;
            }
            ep.ball_states.push_back(bs);

            env::Transition tr;
            tr.step = t;
            tr.actions.assign(n_players, env::kActionStand);
            tr.rewards.assign(n_players, 0.0);

            for (int k = 0; k < n_players; ++k) {
                const Vec2 disp = ep.positions[k][t + 1] - ep.positions[k][t];
                const double speed =
                    cfg.player_speed * (k < cfg.attackers ? cfg.attacker_speed_scale : 1.0);
                if (disp.norm() >= 0.25 * speed * cfg.dt) {
                    const Vec2 axis = (cfg.goal_center() - ep.positions[k][t]).unit();
                    tr.actions[k] = quantize_direction(disp, axis);
                    const Vec2 resim = axis.rotated(tr.actions[k] * std::numbers::pi / 4.0) *
                                       (speed * cfg.dt);
                    max_err = std::max(max_err, (disp - resim).norm());
                } else {
                    max_err = std::max(max_err, disp.norm());
                }
            }
            ep.transitions.push_back(std::move(tr));
        }

        // event labels override the quantized movement at their step
        for (const auto& ev : s.events) {
            const int t = std::min(n_steps - 1,
                                   static_cast<int>(ev.frame / (s.fps * cfg.dt)));
            ep.transitions[t].actions[ev.player] = ev.action;
            if (ev.action == env::kActionShot && ev.player < cfg.attackers)
                ep.transitions[t].rewards[ev.player] += cfg.pretrain_shot_bonus;
        }

        // label-driven terminal rewards
        env::Transition& last = ep.transitions.back();
        last.terminal = true;
        if (s.outcome == "goal") {
            for (int k = 0; k < n_players; ++k)
                last.rewards[k] += k < cfg.attackers ? cfg.goal_reward : -cfg.goal_reward;
        } else if (s.outcome == "ball_lost") {
            for (int k = 0; k < n_players; ++k)
                last.rewards[k] += k < cfg.attackers ? -cfg.ball_gain_reward : cfg.ball_gain_reward;
        }
        out.episodes.push_back(std::move(ep));
    }

    require(!out.episodes.empty(), "load_external_tracking: no sequences in " + path);
    assign_splits(out.episodes,
                  proportional_split(static_cast<int>(out.episodes.size()), val_frac, test_frac));
    for (size_t i = 0; i < out.episodes.size(); ++i) out.episodes[i].id = static_cast<int>(i);

    if (report) {
        report->sequences = static_cast<int>(seqs.size());
        report->frames = total_frames;
        report->max_resim_position_error = max_err;
    }
    return out;
}

}  // namespace warprl::demo
