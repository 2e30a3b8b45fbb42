// Command-line entry points for the whole pipeline:
//   gen-demos  train a source-environment expert and roll out demonstrations
//   pretrain   supervised+TD pre-training from a demonstration dataset
//   train      full per-variant pipeline: pretrain, then target-environment RL
//   evaluate   greedy test-pool evaluation of a checkpoint
//   report     aggregate run directories into tables and charts
#include <CLI11.hpp>
#include <json.hpp>

#include <atomic>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <mutex>
#include <thread>

#include "warprl/config.hpp"
#include "warprl/demo/demogen.hpp"
#include "warprl/eval/evaluate.hpp"
#include "warprl/eval/report.hpp"
#include "warprl/nn/checkpoint.hpp"
#include "warprl/parallel.hpp"
#include "warprl/train/trainer.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace warprl;

namespace {

std::mutex print_mutex;

void say(const std::string& msg) {
    std::lock_guard<std::mutex> lock(print_mutex);
    std::cout << msg << std::endl;
}

int worker_count(int n_jobs) {
    int n = 1;
    if (const char* env = std::getenv("WARPRL_WORKERS")) {
        n = std::atoi(env);
        if (n < 1) throw std::invalid_argument("WARPRL_WORKERS must be a positive integer");
    } else {
        n = std::max(1u, std::thread::hardware_concurrency());
    }
    return std::min(n, std::max(1, n_jobs));
}

void apply_task_override(cfg::ExperimentConfig& c, const std::string& task) {
    if (task.empty()) return;
    c.task = task;
    if (task == "football2v2") {
        c.football.attackers = 2;
        c.football.defenders = 2;
    } else if (task == "football4v8") {
        c.football.attackers = 4;
        c.football.defenders = 8;
    }
    c.validate();
}

demo::DemonstrationSet load_demos_materialized(const std::string& dir,
                                               const cfg::ExperimentConfig& c) {
    auto demos = demo::load_dataset(dir);
    auto source_env = cfg::make_source_env(c);
    require(demos.task == source_env->spec().env_id,
            "demos task " + demos.task + " does not match configured task " + c.task);
    demo::materialize(demos, *source_env);
    return demos;
}

struct RunSpec {
    train::Variant variant;
    uint64_t seed;
};

void write_metrics_header(const std::string& path) {
    std::ofstream out(path);
    out << eval::kMetricsHeader << '\n';
}

void append_metric(const std::string& path, const train::MetricRow& row) {
    std::ofstream out(path, std::ios::app);
    out << eval::metric_row_csv(row) << '\n';
}

void write_eval_jsonl(const std::string& path, const eval::EvalResult& ev, long step) {
    json j;
    j["step"] = step;
    j["reward_mean"] = ev.reward_mean;
    j["dtw_mean"] = ev.dtw_mean;
    j["episodes"] = ev.episodes;
    j["episode_ids"] = ev.episode_ids;
    j["outcomes"] = ev.outcome_counts;
    std::ofstream out(path, std::ios::app);
    out << j.dump() << '\n';
}

/// Frozen opponents for stage 2: the chase prey comes from the source-expert
/// checkpoint saved by gen-demos; football defenders come from a cached
/// full-agent stage-1 run (computed once per output directory).
std::vector<nn::QNetwork> stage1_networks(const cfg::ExperimentConfig& c,
                                          const demo::DemonstrationSet& demos,
                                          const std::string& demos_dir, const std::string& out_dir,
                                          const std::string& frozen_override) {
    if (!frozen_override.empty()) return nn::load_checkpoint(frozen_override);
    if (!c.is_football()) {
        const std::string expert = demos_dir + "/expert.qnet";
        if (!fs::exists(expert))
            throw std::runtime_error("missing stage-1 checkpoint " + expert +
                                     " (run gen-demos first or pass --frozen)");
        return nn::load_checkpoint(expert);
    }
    const std::string cache = out_dir + "/stage1/defenders.qnet";
    if (fs::exists(cache)) return nn::load_checkpoint(cache);

    say("[stage1] training full-agent DQAAS for frozen defenders");
    auto env = cfg::make_target_env(c);
    auto pools = demo::select_rl_pools(demos, c.demogen.rl_train_pool, c.demogen.rl_test_pool, true);
    train::TrainerConfig tc = c.trainer;
    tc.variant = train::Variant::DQAAS;
    std::vector<int> all_agents(env->spec().num_agents);
    for (size_t k = 0; k < all_agents.size(); ++k) all_agents[k] = static_cast<int>(k);
    auto pre = train::pretrain(tc, demos, *env, all_agents, c.demogen.stage1_seed);
    train::RLOptions opts;
    opts.learning_agents = all_agents;
    opts.init_pool = pools.train_ids;
    opts.eval_pool = pools.test_ids;
    opts.pairing = train::Pairing::SeedDemo;
    auto rl = train::train_rl(tc, std::move(pre.nets), demos, *env, opts, c.demogen.stage1_seed);

    fs::create_directories(out_dir + "/stage1");
    nn::save_checkpoint(cache, rl.nets);
    write_metrics_header(out_dir + "/stage1/metrics.csv");
    for (const auto& row : rl.metrics) append_metric(out_dir + "/stage1/metrics.csv", row);
    say("[stage1] saved " + cache);
    return rl.nets;
}

void run_training(const cfg::ExperimentConfig& base, const demo::DemonstrationSet& demos,
                  const std::vector<nn::QNetwork>& stage1, const RunSpec& spec,
                  const std::string& out_dir) {
    cfg::ExperimentConfig c = base;
    c.trainer.variant = spec.variant;
    const std::string dir =
        out_dir + "/" + train::variant_name(spec.variant) + "/seed" + std::to_string(spec.seed);
    fs::create_directories(dir);
    cfg::save_resolved_config(dir + "/resolved_config.json", c);

    auto env = cfg::make_target_env(c);
    auto pools =
        demo::select_rl_pools(demos, c.demogen.rl_train_pool, c.demogen.rl_test_pool, c.is_football());

    const std::string metrics_path = dir + "/metrics.csv";
    write_metrics_header(metrics_path);
    train::MetricSink sink = [&](const train::MetricRow& row) { append_metric(metrics_path, row); };

    auto result = train::run_two_stage(c.trainer, demos, *env, pools, stage1, spec.seed, sink);

    nn::save_checkpoint(dir + "/checkpoint_pretrained.qnet", result.pretrain_result.nets);
    nn::save_checkpoint(dir + "/checkpoint_final.qnet", result.rl.nets);
    for (const auto& row : result.rl.metrics) {
        if (row.step == 0 || row.step == c.trainer.rl_steps) {
            eval::EvalResult ev;
            ev.reward_mean = row.reward;
            ev.dtw_mean = row.dtw;
            ev.episodes = static_cast<int>(pools.test_ids.size());
            ev.episode_ids = pools.test_ids;
            write_eval_jsonl(dir + "/eval.jsonl", ev, row.step);
        }
    }
    say("[done] " + dir + "  final reward=" + std::to_string(result.rl.metrics.back().reward) +
        " dtw=" + std::to_string(result.rl.metrics.back().dtw));
}

int cmd_gen_demos(const std::string& config_path, const std::string& task,
                  const std::string& out_dir, int episodes, long expert_steps, int64_t seed) {
    cfg::ExperimentConfig c = cfg::load_config(config_path);
    apply_task_override(c, task);
    if (episodes > 0) c.demogen.episodes = episodes;
    if (expert_steps >= 0) c.demogen.expert_steps = expert_steps;
    if (seed >= 0) c.demogen.seed = static_cast<uint64_t>(seed);

    auto source_env = cfg::make_source_env(c);
    say("[gen-demos] training source expert (" + std::to_string(c.demogen.expert_steps) +
        " steps) in " + source_env->spec().env_id);
    auto experts =
        demo::train_source_expert(*source_env, c.demogen.expert_steps, c.demogen.seed, c.trainer.hidden);

    auto quick = eval::evaluate_random(experts, *source_env, 50, c.demogen.seed ^ 0xe7a1ull);
    say("[gen-demos] expert random-init eval: mean focal reward " +
        std::to_string(quick.reward_mean));

    say("[gen-demos] rolling out " + std::to_string(c.demogen.episodes) + " greedy episodes");
    auto demos = demo::rollout_demos(experts, *source_env, c.demogen.episodes,
                                     c.demogen.seed + 1, c.demogen.val_frac, c.demogen.test_frac);
    demos.source_desc = c.is_football()
                            ? "surrogate source: attacker speed x" +
                                  std::to_string(c.source_attacker_speed_scale) + ", pretrain rewards"
                            : "source: predator mobility x" + std::to_string(c.source_mobility_ratio);

    demo::save_dataset(out_dir, demos);
    nn::save_checkpoint(out_dir + "/expert.qnet", experts);
    cfg::save_resolved_config(out_dir + "/resolved_config.json", c);
    say("[gen-demos] wrote " + out_dir + " (train/val/test = " +
        std::to_string(demos.count(env::Split::Train)) + "/" +
        std::to_string(demos.count(env::Split::Val)) + "/" +
        std::to_string(demos.count(env::Split::Test)) + ")");
    return 0;
}

int cmd_pretrain(const std::string& config_path, const std::string& task,
                 const std::string& variant, int64_t seed, const std::string& demos_dir,
                 const std::string& out_dir) {
    cfg::ExperimentConfig c = cfg::load_config(config_path);
    apply_task_override(c, task);
    if (!variant.empty()) c.trainer.variant = train::variant_from_name(variant);
    const uint64_t run_seed = seed >= 0 ? static_cast<uint64_t>(seed) : c.trainer.seeds.front();

    auto demos = load_demos_materialized(demos_dir, c);
    auto env = cfg::make_target_env(c);
    auto result = train::pretrain(c.trainer, demos, *env, env->focal_agents(), run_seed);

    fs::create_directories(out_dir);
    cfg::save_resolved_config(out_dir + "/resolved_config.json", c);
    nn::save_checkpoint(out_dir + "/checkpoint_pretrained.qnet", result.nets);
    std::ofstream curve(out_dir + "/pretrain_val.csv");
    curve << "grad_step,action_match_accuracy\n";
    for (auto [step, acc] : result.val_curve) curve << step << ',' << acc << '\n';
    say("[pretrain] best val action-match accuracy: " + std::to_string(result.best_val_accuracy));
    return 0;
}

int cmd_train(const std::string& config_path, const std::string& task, const std::string& variants,
              int64_t seed, long steps, const std::string& demos_dir, const std::string& out_dir,
              const std::string& frozen) {
    cfg::ExperimentConfig c = cfg::load_config(config_path);
    apply_task_override(c, task);
    if (steps > 0) c.trainer.rl_steps = steps;

    std::vector<train::Variant> variant_list;
    if (variants.empty() || variants == "config") {
        variant_list = {c.trainer.variant};
    } else if (variants == "all") {
        variant_list = {train::Variant::DQN, train::Variant::DQfD, train::Variant::DQfAD,
                        train::Variant::DQAS, train::Variant::DQAAS};
    } else {
        std::istringstream ss(variants);
        std::string name;
        while (std::getline(ss, name, ',')) variant_list.push_back(train::variant_from_name(name));
    }
    std::vector<uint64_t> seeds =
        seed >= 0 ? std::vector<uint64_t>{static_cast<uint64_t>(seed)} : c.trainer.seeds;

    auto demos = load_demos_materialized(demos_dir, c);
    fs::create_directories(out_dir);
    auto stage1 = stage1_networks(c, demos, demos_dir, out_dir, frozen);

    std::vector<RunSpec> specs;
    for (auto v : variant_list)
        for (auto s : seeds) specs.push_back({v, s});

    const int workers = worker_count(static_cast<int>(specs.size()));
    const int omp_per_worker =
        std::max(1u, std::thread::hardware_concurrency() / static_cast<unsigned>(workers));
    say("[train] " + std::to_string(specs.size()) + " runs on " + std::to_string(workers) +
        " workers");

    std::atomic<size_t> next{0};
    std::atomic<bool> failed{false};
    std::string first_error;
    std::mutex error_mutex;
    auto work = [&] {
        parallel::set_threads(omp_per_worker);
        for (;;) {
            const size_t i = next.fetch_add(1);
            if (i >= specs.size() || failed.load()) break;
            try {
                run_training(c, demos, stage1, specs[i], out_dir);
            } catch (const std::exception& e) {
                std::lock_guard<std::mutex> lock(error_mutex);
                failed.store(true);
                if (first_error.empty()) first_error = e.what();
            }
        }
    };
    std::vector<std::thread> pool;
    for (int w = 0; w < workers; ++w) pool.emplace_back(work);
    for (auto& t : pool) t.join();
    if (failed.load()) throw std::runtime_error(first_error);
    return 0;
}

int cmd_evaluate(const std::string& config_path, const std::string& task,
                 const std::string& checkpoint, const std::string& demos_dir,
                 const std::string& out_path) {
    cfg::ExperimentConfig c = cfg::load_config(config_path);
    apply_task_override(c, task);
    auto demos = load_demos_materialized(demos_dir, c);
    auto env = cfg::make_target_env(c);
    auto pools =
        demo::select_rl_pools(demos, c.demogen.rl_train_pool, c.demogen.rl_test_pool, c.is_football());
    auto nets = nn::load_checkpoint(checkpoint);
    auto ev = eval::evaluate(nets, *env, demos, pools.test_ids);

    json j;
    j["reward_mean"] = ev.reward_mean;
    j["dtw_mean"] = ev.dtw_mean;
    j["episodes"] = ev.episodes;
    j["episode_ids"] = ev.episode_ids;
    j["outcomes"] = ev.outcome_counts;
    if (out_path.empty() || out_path == "-") {
        std::cout << j.dump(2) << std::endl;
    } else {
        std::ofstream out(out_path);
        out << j.dump(2) << '\n';
        say("[evaluate] wrote " + out_path);
    }
    return 0;
}

int cmd_report(const std::string& runs_dir, const std::string& out_dir) {
    auto summaries = eval::aggregate(runs_dir, out_dir);
    say("[report] wrote " + out_dir + "/tables.csv and charts for " +
        std::to_string(summaries.size()) + " variants");
    for (const auto& s : summaries) {
        char line[256];
        std::snprintf(line, sizeof line,
                      "  %-6s reward %.3f+-%.3f -> %.3f+-%.3f | dtw %.3f+-%.3f -> %.3f+-%.3f",
                      s.variant.c_str(), s.reward_pre_mean, s.reward_pre_se, s.reward_final_mean,
                      s.reward_final_se, s.dtw_pre_mean, s.dtw_pre_se, s.dtw_final_mean,
                      s.dtw_final_se);
        say(line);
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"multi-agent RL from demonstrations with warped action supervision"};
    app.require_subcommand(1);

    std::string config_path, task, out_dir, demos_dir, variant, checkpoint, frozen, runs_dir;
    int64_t seed = -1;
    long steps = -1;
    int episodes = -1;
    long expert_steps = -1;

    auto* gen = app.add_subcommand("gen-demos", "train a source expert and roll out demonstrations");
    gen->add_option("--config", config_path, "experiment config file")->required();
    gen->add_option("--task", task, "task override: chase2v1 | football2v2 | football4v8");
    gen->add_option("--out", out_dir, "dataset output directory")->required();
    gen->add_option("--episodes", episodes, "number of demonstration episodes");
    gen->add_option("--expert-steps", expert_steps, "source-expert training steps");
    gen->add_option("--seed", seed, "demo-generation seed");

    auto* pre = app.add_subcommand("pretrain", "pre-train from demonstrations only");
    pre->add_option("--config", config_path, "experiment config file")->required();
    pre->add_option("--task", task, "task override");
    pre->add_option("--variant", variant, "DQN | DQfD | DQfAD | DQAS | DQAAS");
    pre->add_option("--seed", seed, "run seed");
    pre->add_option("--demos", demos_dir, "demonstration dataset directory")->required();
    pre->add_option("--out", out_dir, "run output directory")->required();

    auto* tr = app.add_subcommand("train", "full pipeline: pretrain then target-environment RL");
    tr->add_option("--config", config_path, "experiment config file")->required();
    tr->add_option("--task", task, "task override");
    tr->add_option("--variant", variant, "variant, comma list, or 'all' (default: config)");
    tr->add_option("--seed", seed, "single seed (default: all seeds in config)");
    tr->add_option("--steps", steps, "override trainer.rl_steps");
    tr->add_option("--demos", demos_dir, "demonstration dataset directory")->required();
    tr->add_option("--out", out_dir, "runs output directory")->required();
    tr->add_option("--frozen", frozen, "frozen-opponent checkpoint override");

    auto* ev = app.add_subcommand("evaluate", "greedy test-pool evaluation of a checkpoint");
    ev->add_option("--config", config_path, "experiment config file")->required();
    ev->add_option("--task", task, "task override");
    ev->add_option("--checkpoint", checkpoint, "checkpoint file")->required();
    ev->add_option("--demos", demos_dir, "demonstration dataset directory")->required();
    ev->add_option("--out", out_dir, "output json file ('-' for stdout)");

    auto* rep = app.add_subcommand("report", "aggregate runs into tables and charts");
    rep->add_option("--runs", runs_dir, "directory containing run outputs")->required();
    rep->add_option("--out", out_dir, "report output directory")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (gen->parsed()) return cmd_gen_demos(config_path, task, out_dir, episodes, expert_steps, seed);
        if (pre->parsed()) return cmd_pretrain(config_path, task, variant, seed, demos_dir, out_dir);
        if (tr->parsed())
            return cmd_train(config_path, task, variant, seed, steps, demos_dir, out_dir, frozen);
        if (ev->parsed()) return cmd_evaluate(config_path, task, checkpoint, demos_dir, out_dir);
        if (rep->parsed()) return cmd_report(runs_dir, out_dir);
    } catch (const std::exception& e) {
        json err;
        err["error"] = e.what();
        std::cerr << err.dump() << std::endl;
        return 1;
    }
    return 0;
}
