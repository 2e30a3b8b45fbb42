#include "warprl/config.hpp"

#include <fstream>
#include <set>

namespace warprl::cfg {

using nlohmann::json;

namespace {

/// Strict section reader: every access is recorded, unknown keys rejected.
class Section {
public:
    Section(const json& j, std::string prefix) : j_(j), prefix_(std::move(prefix)) {
        if (!j_.is_object()) throw std::invalid_argument("config: " + prefix_ + " must be an object");
    }

    template <typename T>
    void read(const char* key, T& out) {
        seen_.insert(key);
        if (!j_.contains(key)) return;
        try {
            out = j_.at(key).get<T>();
        } catch (const json::exception&) {
            throw std::invalid_argument("config: invalid value for " + prefix_ + "." + key);
        }
    }

    void finish() const {
        for (const auto& [key, value] : j_.items())
            if (!seen_.count(key))
                throw std::invalid_argument("config: unknown key " + prefix_ + "." + key);
    }

private:
    const json& j_;
    std::string prefix_;
    std::set<std::string> seen_;
};

void read_chase(const json& j, env::ChaseConfig& c) {
    Section s(j, "env");
    s.read("half_width", c.half_width);
    s.read("diameter", c.diameter);
    s.read("dt", c.dt);
    s.read("max_steps", c.max_steps);
    s.read("mobility_ratio", c.mobility_ratio);
    s.read("prey_max_speed", c.prey_max_speed);
    s.read("prey_accel", c.prey_accel);
    s.read("damping", c.damping);
    s.read("discount", c.discount);
    s.read("init_half_range", c.init_half_range);
    s.finish();
}

void read_football(const json& j, env::FootballConfig& c) {
    Section s(j, "env");
    s.read("attackers", c.attackers);
    s.read("defenders", c.defenders);
    s.read("dt", c.dt);
    s.read("max_steps", c.max_steps);
    s.read("player_speed", c.player_speed);
    s.read("control_radius", c.control_radius);
    s.read("short_pass_speed", c.short_pass_speed);
    s.read("high_pass_speed", c.high_pass_speed);
    s.read("high_pass_flight", c.high_pass_flight);
    s.read("shot_speed", c.shot_speed);
    s.read("goal_reward", c.goal_reward);
    s.read("ball_gain_reward", c.ball_gain_reward);
    s.read("out_of_pitch_penalty", c.out_of_pitch_penalty);
    s.read("pretrain_shot_bonus", c.pretrain_shot_bonus);
    s.read("discount", c.discount);
    s.finish();
}

}  // namespace

void ExperimentConfig::validate() const {
    if (task != "chase2v1" && task != "football2v2" && task != "football4v8")
        throw std::invalid_argument("config: invalid value for task: " + task +
                                    " (expected chase2v1, football2v2, or football4v8)");
    chase.validate();
    football.validate();
    trainer.validate();
    require(source_mobility_ratio > 1.0, "config: source.mobility_ratio must be > 1.0");
    require(source_attacker_speed_scale > 0.0, "config: source.attacker_speed_scale must be > 0");
    require(demogen.episodes >= 1, "config: demogen.episodes must be >= 1");
    require(demogen.expert_steps >= 0, "config: demogen.expert_steps must be >= 0");
    require(demogen.val_frac >= 0 && demogen.test_frac >= 0 &&
                demogen.val_frac + demogen.test_frac < 1.0,
            "config: demogen split fractions invalid");
    require(demogen.rl_train_pool >= 1 && demogen.rl_test_pool >= 1,
            "config: demogen pools must be >= 1");
}

ExperimentConfig config_from_json(const json& j) {
    ExperimentConfig c;
    Section top(j, "<root>");
    top.read("task", c.task);

    // the env section is task dependent, so just mark it visited here
    json env_section = json::object();
    top.read("env", env_section);
    if (c.task.rfind("football", 0) == 0) {
        if (c.task == "football4v8") {
            c.football.attackers = 4;
            c.football.defenders = 8;
        }
        read_football(env_section, c.football);
    } else {
        read_chase(env_section, c.chase);
    }

    json source = json::object();
    top.read("source", source);
    {
        Section s(source, "source");
        s.read("mobility_ratio", c.source_mobility_ratio);
        s.read("attacker_speed_scale", c.source_attacker_speed_scale);
        s.finish();
    }

    json qnet = json::object();
    top.read("qnet", qnet);
    {
        Section s(qnet, "qnet");
        s.read("hidden", c.trainer.hidden);
        s.finish();
    }

    json opt = json::object();
    top.read("optimizer", opt);
    {
        Section s(opt, "optimizer");
        s.read("lr", c.trainer.adam.lr);
        s.read("beta1", c.trainer.adam.beta1);
        s.read("beta2", c.trainer.adam.beta2);
        s.read("eps", c.trainer.adam.eps);
        s.read("clip_norm", c.trainer.adam.clip_norm);
        s.finish();
    }

    json loss = json::object();
    top.read("loss", loss);
    {
        Section s(loss, "loss");
        s.read("lambda1", c.trainer.loss.lambda1);
        s.read("lambda2", c.trainer.loss.lambda2);
        s.read("margin", c.trainer.loss.margin);
        s.read("margin_supervises_agent_transitions",
               c.trainer.loss.margin_supervises_agent_transitions);
        s.finish();
    }

    json replay = json::object();
    top.read("replay", replay);
    {
        Section s(replay, "replay");
        s.read("capacity", c.trainer.replay.capacity);
        s.read("alpha", c.trainer.replay.alpha);
        s.read("beta_start", c.trainer.replay.beta_start);
        s.read("beta_end", c.trainer.replay.beta_end);
        s.read("eps_agent", c.trainer.replay.eps_agent);
        s.read("eps_demo", c.trainer.replay.eps_demo);
        s.finish();
    }

    json trainer = json::object();
    top.read("trainer", trainer);
    {
        Section s(trainer, "trainer");
        std::string variant = train::variant_name(c.trainer.variant);
        s.read("variant", variant);
        c.trainer.variant = train::variant_from_name(variant);
        s.read("pretrain_steps", c.trainer.pretrain_steps);
        s.read("rl_steps", c.trainer.rl_steps);
        s.read("batch_size", c.trainer.batch_size);
        s.read("target_sync", c.trainer.target_sync);
        s.read("update_every", c.trainer.update_every);
        s.read("learn_start", c.trainer.learn_start);
        s.read("eps_start", c.trainer.eps_start);
        s.read("eps_end", c.trainer.eps_end);
        s.read("eps_anneal_frac", c.trainer.eps_anneal_frac);
        s.read("dqn_eps_start", c.trainer.dqn_eps_start);
        s.read("dqn_eps_end", c.trainer.dqn_eps_end);
        s.read("dqn_eps_anneal_frac", c.trainer.dqn_eps_anneal_frac);
        s.read("eval_every", c.trainer.eval_every);
        s.read("pretrain_val_every", c.trainer.pretrain_val_every);
        s.read("seeds", c.trainer.seeds);
        s.finish();
    }

    json demogen = json::object();
    top.read("demogen", demogen);
    {
        Section s(demogen, "demogen");
        s.read("episodes", c.demogen.episodes);
        s.read("expert_steps", c.demogen.expert_steps);
        s.read("val_frac", c.demogen.val_frac);
        s.read("test_frac", c.demogen.test_frac);
        s.read("rl_train_pool", c.demogen.rl_train_pool);
        s.read("rl_test_pool", c.demogen.rl_test_pool);
        s.read("seed", c.demogen.seed);
        s.read("stage1_seed", c.demogen.stage1_seed);
        s.finish();
    }

    top.finish();
    c.validate();
    return c;
}

json config_to_json(const ExperimentConfig& c) {
    json j;
    j["task"] = c.task;
    if (c.is_football()) {
        j["env"] = {{"attackers", c.football.attackers},
                    {"defenders", c.football.defenders},
                    {"dt", c.football.dt},
                    {"max_steps", c.football.max_steps},
                    {"player_speed", c.football.player_speed},
                    {"control_radius", c.football.control_radius},
                    {"short_pass_speed", c.football.short_pass_speed},
                    {"high_pass_speed", c.football.high_pass_speed},
                    {"high_pass_flight", c.football.high_pass_flight},
                    {"shot_speed", c.football.shot_speed},
                    {"goal_reward", c.football.goal_reward},
                    {"ball_gain_reward", c.football.ball_gain_reward},
                    {"out_of_pitch_penalty", c.football.out_of_pitch_penalty},
                    {"pretrain_shot_bonus", c.football.pretrain_shot_bonus},
                    {"discount", c.football.discount}};
        j["source"] = {{"attacker_speed_scale", c.source_attacker_speed_scale}};
    } else {
        j["env"] = {{"half_width", c.chase.half_width},
                    {"diameter", c.chase.diameter},
                    {"dt", c.chase.dt},
                    {"max_steps", c.chase.max_steps},
                    {"mobility_ratio", c.chase.mobility_ratio},
                    {"prey_max_speed", c.chase.prey_max_speed},
                    {"prey_accel", c.chase.prey_accel},
                    {"damping", c.chase.damping},
                    {"discount", c.chase.discount},
                    {"init_half_range", c.chase.init_half_range}};
        j["source"] = {{"mobility_ratio", c.source_mobility_ratio}};
    }
    j["qnet"] = {{"hidden", c.trainer.hidden}};
    j["optimizer"] = {{"lr", c.trainer.adam.lr},
                      {"beta1", c.trainer.adam.beta1},
                      {"beta2", c.trainer.adam.beta2},
                      {"eps", c.trainer.adam.eps},
                      {"clip_norm", c.trainer.adam.clip_norm}};
    j["loss"] = {{"lambda1", c.trainer.loss.lambda1},
                 {"lambda2", c.trainer.loss.lambda2},
                 {"margin", c.trainer.loss.margin},
                 {"margin_supervises_agent_transitions",
                  c.trainer.loss.margin_supervises_agent_transitions}};
    j["replay"] = {{"capacity", c.trainer.replay.capacity},
                   {"alpha", c.trainer.replay.alpha},
                   {"beta_start", c.trainer.replay.beta_start},
                   {"beta_end", c.trainer.replay.beta_end},
                   {"eps_agent", c.trainer.replay.eps_agent},
                   {"eps_demo", c.trainer.replay.eps_demo}};
    j["trainer"] = {{"variant", train::variant_name(c.trainer.variant)},
                    {"pretrain_steps", c.trainer.pretrain_steps},
                    {"rl_steps", c.trainer.rl_steps},
                    {"batch_size", c.trainer.batch_size},
                    {"target_sync", c.trainer.target_sync},
                    {"update_every", c.trainer.update_every},
                    {"learn_start", c.trainer.learn_start},
                    {"eps_start", c.trainer.eps_start},
                    {"eps_end", c.trainer.eps_end},
                    {"eps_anneal_frac", c.trainer.eps_anneal_frac},
                    {"dqn_eps_start", c.trainer.dqn_eps_start},
                    {"dqn_eps_end", c.trainer.dqn_eps_end},
                    {"dqn_eps_anneal_frac", c.trainer.dqn_eps_anneal_frac},
                    {"eval_every", c.trainer.eval_every},
                    {"pretrain_val_every", c.trainer.pretrain_val_every},
                    {"seeds", c.trainer.seeds}};
    j["demogen"] = {{"episodes", c.demogen.episodes},
                    {"expert_steps", c.demogen.expert_steps},
                    {"val_frac", c.demogen.val_frac},
                    {"test_frac", c.demogen.test_frac},
                    {"rl_train_pool", c.demogen.rl_train_pool},
                    {"rl_test_pool", c.demogen.rl_test_pool},
                    {"seed", c.demogen.seed},
                    {"stage1_seed", c.demogen.stage1_seed}};
    return j;
}

ExperimentConfig load_config(const std::string& path) {
    std::ifstream in(path);
    require(static_cast<bool>(in), "load_config: cannot open " + path);
    json j;
    try {
        j = json::parse(in);
    } catch (const json::exception& e) {
        throw std::invalid_argument("load_config: " + path + " is not valid json: " + e.what());
    }
    return config_from_json(j);
}

void save_resolved_config(const std::string& path, const ExperimentConfig& c) {
    std::ofstream out(path);
    require(static_cast<bool>(out), "save_resolved_config: cannot write " + path);
    out << config_to_json(c).dump(2) << '\n';
}

std::unique_ptr<env::Env> make_target_env(const ExperimentConfig& c) {
    if (c.is_football()) return std::make_unique<env::FootballEnv>(c.football, env::Phase::Train);
    return std::make_unique<env::ChaseEnv>(c.chase);
}

std::unique_ptr<env::Env> make_source_env(const ExperimentConfig& c) {
    if (c.is_football()) {
        env::FootballConfig source = c.football;
        source.attacker_speed_scale = c.source_attacker_speed_scale;
        return std::make_unique<env::FootballEnv>(source, env::Phase::Pretrain);
    }
    env::ChaseConfig source = c.chase;
    source.mobility_ratio = c.source_mobility_ratio;
    return std::make_unique<env::ChaseEnv>(source);
}

}  // namespace warprl::cfg
