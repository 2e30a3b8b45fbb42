#include "warprl/dtw/dtw.hpp"

#include <algorithm>
#include <cmath>

namespace warprl::dtw {

namespace {

double euclid(const std::vector<double>& x, const std::vector<double>& y) {
    double acc = 0.0;
    for (size_t k = 0; k < x.size(); ++k) {
        double diff = x[k] - y[k];
        acc += diff * diff;
    }
    return std::sqrt(acc);
}

void distance_row(const Seq& a, const Seq& b, int i, Matrix& d) {
    for (int j = 0; j < d.cols; ++j) d.at(i, j) = euclid(a[i], b[j]);
}

}  // namespace

Matrix local_distance(const Seq& a, const Seq& b, Exec exec) {
    require(!a.empty() && !b.empty(), "local_distance: empty sequence");
    const size_t dim = a[0].size();
    for (const auto& x : a) require(x.size() == dim, "local_distance: dimension mismatch in first sequence");
    for (const auto& y : b) require(y.size() == dim, "local_distance: dimension mismatch between sequences");

    Matrix d(static_cast<int>(a.size()), static_cast<int>(b.size()));
    if (exec == Exec::Parallel) {
#pragma omp parallel for schedule(static)
        for (int i = 0; i < d.rows; ++i) distance_row(a, b, i, d);
    } else {
        for (int i = 0; i < d.rows; ++i) distance_row(a, b, i, d);
    }
    return d;
}

WarpingMatrix accumulate(Matrix d) {
    const int n = d.rows, m = d.cols;
    Matrix w(n, m);
    w.at(0, 0) = d.at(0, 0);
    for (int i = 1; i < n; ++i) w.at(i, 0) = d.at(i, 0) + w.at(i - 1, 0);
    for (int j = 1; j < m; ++j) w.at(0, j) = d.at(0, j) + w.at(0, j - 1);
    // The recurrence carries a dependency on three predecessors, so the DP
    // stays serial; matrices here are at most a few hundred steps a side.
    for (int i = 1; i < n; ++i) {
        for (int j = 1; j < m; ++j) {
            double best = std::min({w.at(i - 1, j), w.at(i, j - 1), w.at(i - 1, j - 1)});
            w.at(i, j) = d.at(i, j) + best;
        }
    }
    return {std::move(w), std::move(d)};
}

int warped_index(const WarpingMatrix& wm, int t) {
    require(t >= 0 && t < wm.w.rows, "warped_index: t out of range");
    int best = 0;
    double best_val = wm.w.at(t, 0);
    for (int j = 1; j < wm.w.cols; ++j) {
        double v = wm.w.at(t, j);
        if (v < best_val) {
            best_val = v;
            best = j;
        }
    }
    return best;
}

double dtw_distance(const std::vector<Vec2>& a, const std::vector<Vec2>& b) {
    require(!a.empty() && !b.empty(), "dtw_distance: empty trajectory");
    auto wm = accumulate(local_distance(seq_from_points(a), seq_from_points(b), Exec::Serial));
    return wm.w.at(wm.w.rows - 1, wm.w.cols - 1);
}

std::vector<double> dtw_distance_batch(const std::vector<std::pair<const std::vector<Vec2>*, const std::vector<Vec2>*>>& pairs,
                                       Exec exec) {
    std::vector<double> out(pairs.size(), 0.0);
    if (exec == Exec::Parallel) {
#pragma omp parallel for schedule(dynamic)
        for (int i = 0; i < static_cast<int>(pairs.size()); ++i)
            out[i] = dtw_distance(*pairs[i].first, *pairs[i].second);
    } else {
        for (size_t i = 0; i < pairs.size(); ++i) out[i] = dtw_distance(*pairs[i].first, *pairs[i].second);
    }
    return out;
}

}  // namespace warprl::dtw
