#include "warprl/eval/report.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

namespace warprl::eval {

namespace fs = std::filesystem;

const char* kMetricsHeader =
    "step,seed,variant,reward,dtw,success_rate,loss_td,loss_sup,loss_l2,loss_total,epsilon,episodes";

std::string metric_row_csv(const train::MetricRow& row) {
    std::ostringstream ss;
    ss.precision(17);
    ss << row.step << ',' << row.seed << ',' << row.variant << ',' << row.reward << ',' << row.dtw
       << ',' << row.success_rate << ',' << row.loss_td << ',' << row.loss_sup << ',' << row.loss_l2 << ',' << row.loss_total
       << ',' << row.epsilon << ',' << row.episodes;
    return ss.str();
}

std::vector<train::MetricRow> read_metrics_csv(const std::string& path) {
    std::ifstream in(path);
    require(static_cast<bool>(in), "read_metrics_csv: cannot open " + path);
    std::vector<train::MetricRow> rows;
    std::string line;
    bool first = true;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        if (first) {
            first = false;
            if (line.rfind("step,", 0) == 0) continue;  // header
        }
        std::istringstream ss(line);
        std::string field;
        train::MetricRow row;
        auto next = [&] {
            if (!std::getline(ss, field, ',')) throw std::runtime_error("bad metrics row: " + line);
            return field;
        };
        row.step = std::stol(next());
        row.seed = std::stoull(next());
        row.variant = next();
        row.reward = std::stod(next());
        row.dtw = std::stod(next());
        row.success_rate = std::stod(next());
        row.loss_td = std::stod(next());
        row.loss_sup = std::stod(next());
        row.loss_l2 = std::stod(next());
        row.loss_total = std::stod(next());
        row.epsilon = std::stod(next());
        row.episodes = std::stol(next());
        rows.push_back(std::move(row));
    }
    return rows;
}

std::vector<RunRecord> scan_runs(const std::string& root) {
    std::vector<RunRecord> runs;
    if (!fs::exists(root)) return runs;
    for (const auto& entry : fs::recursive_directory_iterator(root)) {
        if (!entry.is_regular_file() || entry.path().filename() != "metrics.csv") continue;
        RunRecord rec;
        rec.dir = entry.path().parent_path().string();
        rec.rows = read_metrics_csv(entry.path().string());
        if (rec.rows.empty()) continue;
        rec.variant = rec.rows.front().variant;
        rec.seed = rec.rows.front().seed;
        runs.push_back(std::move(rec));
    }
    std::sort(runs.begin(), runs.end(), [](const RunRecord& a, const RunRecord& b) {
        return std::tie(a.variant, a.seed) < std::tie(b.variant, b.seed);
    });
    return runs;
}

namespace {

struct MeanSe {
    double mean = 0, se = 0;
};

MeanSe mean_se(const std::vector<double>& xs) {
    MeanSe out;
    if (xs.empty()) return out;
    for (double x : xs) out.mean += x;
    out.mean /= static_cast<double>(xs.size());
    if (xs.size() > 1) {
        double ss = 0;
        for (double x : xs) ss += (x - out.mean) * (x - out.mean);
        out.se = std::sqrt(ss / static_cast<double>(xs.size() - 1)) /
                 std::sqrt(static_cast<double>(xs.size()));
    }
    return out;
}

const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"};

/// Minimal self-contained SVG line chart: per-variant mean with a +-SE band.
void write_chart_svg(const std::string& path, const std::vector<RunRecord>& runs,
                     const std::string& title, bool dtw_metric) {
    // collect per-variant, per-step values across seeds
    std::map<std::string, std::map<long, std::vector<double>>> series;
    for (const auto& run : runs)
        for (const auto& row : run.rows) {
            const double v = dtw_metric ? row.dtw : row.reward;
            if (std::isfinite(v)) series[run.variant][row.step].push_back(v);
        }
    if (series.empty()) return;

    const double W = 760, H = 440, L = 70, R = 160, T = 40, B = 50;
    double x_max = 1, y_min = 1e300, y_max = -1e300;
    for (auto& [variant, by_step] : series)
        for (auto& [step, vals] : by_step) {
            x_max = std::max(x_max, static_cast<double>(step));
            const MeanSe ms = mean_se(vals);
            y_min = std::min(y_min, ms.mean - ms.se);
            y_max = std::max(y_max, ms.mean + ms.se);
        }
    if (y_min == y_max) {
        y_min -= 1;
        y_max += 1;
    }
    const double pad = 0.05 * (y_max - y_min);
    y_min -= pad;
    y_max += pad;

    auto xs = [&](double step) { return L + (W - L - R) * (step / x_max); };
    auto ys = [&](double v) { return H - B - (H - T - B) * ((v - y_min) / (y_max - y_min)); };

    std::ostringstream svg;
    svg << "<svg xmlns='http://www.w3.org/2000/svg' width='" << W << "' height='" << H << "'>\n";
    svg << "<rect width='100%' height='100%' fill='white'/>\n";
    svg << "<text x='" << W / 2 << "' y='24' text-anchor='middle' font-family='sans-serif' "
           "font-size='16'>"
        << title << "</text>\n";
    // axes
    svg << "<line x1='" << L << "' y1='" << T << "' x2='" << L << "' y2='" << H - B
        << "' stroke='black'/>\n";
    svg << "<line x1='" << L << "' y1='" << H - B << "' x2='" << W - R << "' y2='" << H - B
        << "' stroke='black'/>\n";
    for (int i = 0; i <= 5; ++i) {
        const double step = x_max * i / 5.0;
        svg << "<line x1='" << xs(step) << "' y1='" << H - B << "' x2='" << xs(step) << "' y2='"
            << H - B + 5 << "' stroke='black'/>\n";
        svg << "<text x='" << xs(step) << "' y='" << H - B + 20
            << "' text-anchor='middle' font-family='sans-serif' font-size='11'>"
            << static_cast<long>(step) << "</text>\n";
        const double v = y_min + (y_max - y_min) * i / 5.0;
        svg << "<text x='" << L - 8 << "' y='" << ys(v) + 4
            << "' text-anchor='end' font-family='sans-serif' font-size='11'>";
        char buf[32];
        std::snprintf(buf, sizeof buf, "%.3g", v);
        svg << buf << "</text>\n";
    }
    svg << "<text x='" << (L + W - R) / 2 << "' y='" << H - 12
        << "' text-anchor='middle' font-family='sans-serif' font-size='12'>environment steps"
        << "</text>\n";

    int color_idx = 0;
    double legend_y = T + 10;
    for (auto& [variant, by_step] : series) {
        const char* color = kPalette[color_idx++ % 6];
        std::ostringstream band_top, band_bot, mean_line;
        for (auto& [step, vals] : by_step) {
            const MeanSe ms = mean_se(vals);
            band_top << xs(step) << ',' << ys(ms.mean + ms.se) << ' ';
            band_bot << xs(step) << ',' << ys(ms.mean - ms.se) << ' ';
            mean_line << xs(step) << ',' << ys(ms.mean) << ' ';
        }
        std::string bot = band_bot.str();
        // reverse the bottom edge for a closed polygon
        std::vector<std::string> pts;
        std::istringstream bss(bot);
        std::string p;
        while (bss >> p) pts.push_back(p);
        std::reverse(pts.begin(), pts.end());
        svg << "<polygon points='" << band_top.str();
        for (const auto& q : pts) svg << q << ' ';
        svg << "' fill='" << color << "' opacity='0.15'/>\n";
        svg << "<polyline points='" << mean_line.str() << "' fill='none' stroke='" << color
            << "' stroke-width='2'/>\n";
        svg << "<rect x='" << W - R + 16 << "' y='" << legend_y - 9 << "' width='12' height='12' "
            << "fill='" << color << "'/>\n";
        svg << "<text x='" << W - R + 34 << "' y='" << legend_y + 2
            << "' font-family='sans-serif' font-size='12'>" << variant << "</text>\n";
        legend_y += 20;
    }
    svg << "</svg>\n";

    std::ofstream out(path);
    out << svg.str();
}

}  // namespace

std::vector<VariantSummary> summarize(const std::vector<RunRecord>& runs) {
    std::map<std::string, std::vector<const RunRecord*>> by_variant;
    for (const auto& run : runs) by_variant[run.variant].push_back(&run);

    std::vector<VariantSummary> out;
    for (auto& [variant, recs] : by_variant) {
        VariantSummary s;
        s.variant = variant;
        s.seeds = static_cast<int>(recs.size());
        std::vector<double> r_pre, r_fin, d_pre, d_fin;
        for (const RunRecord* rec : recs) {
            const auto& rows = rec->rows;
            const auto& first = rows.front();
            const auto& last = rows.back();
            r_pre.push_back(first.reward);
            r_fin.push_back(last.reward);
            if (std::isfinite(first.dtw)) d_pre.push_back(first.dtw);
            if (std::isfinite(last.dtw)) d_fin.push_back(last.dtw);
        }
        const MeanSe rp = mean_se(r_pre), rf = mean_se(r_fin), dp = mean_se(d_pre), df = mean_se(d_fin);
        s.reward_pre_mean = rp.mean;
        s.reward_pre_se = rp.se;
        s.reward_final_mean = rf.mean;
        s.reward_final_se = rf.se;
        s.dtw_pre_mean = dp.mean;
        s.dtw_pre_se = dp.se;
        s.dtw_final_mean = df.mean;
        s.dtw_final_se = df.se;
        out.push_back(s);
    }
    return out;
}

std::vector<VariantSummary> aggregate(const std::string& runs_root, const std::string& out_dir) {
    const auto runs = scan_runs(runs_root);
    require(!runs.empty(), "aggregate: no runs with metrics.csv under " + runs_root);
    fs::create_directories(out_dir);

    const auto summaries = summarize(runs);
    {
        std::ofstream out(out_dir + "/tables.csv");
        out << "variant,seeds,reward_pretrained_mean,reward_pretrained_se,reward_final_mean,"
               "reward_final_se,dtw_pretrained_mean,dtw_pretrained_se,dtw_final_mean,dtw_final_se\n";
        out.precision(6);
        for (const auto& s : summaries) {
            out << s.variant << ',' << s.seeds << ',' << s.reward_pre_mean << ',' << s.reward_pre_se
                << ',' << s.reward_final_mean << ',' << s.reward_final_se << ',' << s.dtw_pre_mean
                << ',' << s.dtw_pre_se << ',' << s.dtw_final_mean << ',' << s.dtw_final_se << '\n';
        }
    }
    write_chart_svg(out_dir + "/reward.svg", runs, "Mean focal reward vs training step", false);
    write_chart_svg(out_dir + "/dtw.svg", runs, "DTW distance vs training step", true);
    return summaries;
}

}  // namespace warprl::eval
