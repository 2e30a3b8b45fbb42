#pragma once
#include <cstddef>
#include <vector>

#include "warprl/common.hpp"
#include "warprl/parallel.hpp"

namespace warprl::dtw {

/// Dense row-major matrix of doubles.
struct Matrix {
    int rows = 0;
    int cols = 0;
    std::vector<double> v;

    Matrix() = default;
    Matrix(int r, int c) : rows(r), cols(c), v(static_cast<size_t>(r) * c, 0.0) {}

    double& at(int i, int j) { return v[static_cast<size_t>(i) * cols + j]; }
    double at(int i, int j) const { return v[static_cast<size_t>(i) * cols + j]; }
};

/// A feature sequence: one real vector per step, all the same dimension.
using Seq = std::vector<std::vector<double>>;

/// Accumulated warping-cost matrix together with the local distance matrix
/// it was built from.
struct WarpingMatrix {
    Matrix w;  ///< accumulated costs, w(n-1, m-1) is the DTW distance
    Matrix d;  ///< local distances
};

/// Pairwise Euclidean distance matrix between two sequences.
/// d(i,j) = ||a[i] - b[j]||. Rows are independent, so the parallel path
/// splits them across threads; results are bit-identical to serial.
Matrix local_distance(const Seq& a, const Seq& b, Exec exec = Exec::Parallel);

/// Accumulate a nonnegative local distance matrix into the DTW cost matrix
/// under the boundary / monotonicity / unit-step continuity constraints:
///   w(0,0) = d(0,0)
///   w(i,0) = d(i,0) + w(i-1,0),  w(0,j) = d(0,j) + w(0,j-1)
///   w(i,j) = d(i,j) + min(w(i-1,j), w(i,j-1), w(i-1,j-1))
WarpingMatrix accumulate(Matrix d);

/// Index into the second sequence assigned to step t of the first:
/// the argmin of row t of the accumulated cost matrix, ties broken toward
/// the smallest index. t is 0-based and must be in [0, rows).
int warped_index(const WarpingMatrix& wm, int t);

/// Convenience: total DTW cost between two 2-D point trajectories.
double dtw_distance(const std::vector<Vec2>& a, const std::vector<Vec2>& b);

/// DTW costs for many independent trajectory pairs (parallel across pairs).
std::vector<double> dtw_distance_batch(const std::vector<std::pair<const std::vector<Vec2>*, const std::vector<Vec2>*>>& pairs,
                                       Exec exec = Exec::Parallel);

inline Seq seq_from_points(const std::vector<Vec2>& pts) {
    Seq s(pts.size());
    for (size_t i = 0; i < pts.size(); ++i) s[i] = {pts[i].x, pts[i].y};
    return s;
}

}  // namespace warprl::dtw
