#pragma once
#include <string>
#include <vector>

#include "warprl/train/trainer.hpp"

namespace warprl::eval {

/// Metric CSV layout shared by the trainer, runner, and reports.
extern const char* kMetricsHeader;
std::string metric_row_csv(const train::MetricRow& row);
std::vector<train::MetricRow> read_metrics_csv(const std::string& path);

struct RunRecord {
    std::string variant;
    uint64_t seed = 0;
    std::string dir;
    std::vector<train::MetricRow> rows;
};

/// Find run directories (any directory containing metrics.csv) under root.
std::vector<RunRecord> scan_runs(const std::string& root);

struct VariantSummary {
    std::string variant;
    int seeds = 0;
    double reward_pre_mean = 0, reward_pre_se = 0;
    double reward_final_mean = 0, reward_final_se = 0;
    double dtw_pre_mean = 0, dtw_pre_se = 0;
    double dtw_final_mean = 0, dtw_final_se = 0;
};

/// Per-variant mean and standard error over seeds at the first (pre-trained)
/// and last evaluation steps.
std::vector<VariantSummary> summarize(const std::vector<RunRecord>& runs);

/// tables.csv + reward.svg + dtw.svg under out_dir; lists runs it used and
/// returns the summaries.
std::vector<VariantSummary> aggregate(const std::string& runs_root, const std::string& out_dir);

}  // namespace warprl::eval
