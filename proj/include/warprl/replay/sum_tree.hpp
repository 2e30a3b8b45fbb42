#pragma once
#include <cstddef>
#include <vector>

namespace warprl::replay {

/// Segment tree over nonnegative leaf values supporting O(log N)
/// proportional sampling. Stored 1-based in a flat array: root at 1,
/// leaves at [cap, 2*cap). Internal nodes are recomputed from their
/// children on every update, so the root never drifts from the leaf sums
/// by more than tree-depth rounding.
class SumTree {
public:
    explicit SumTree(size_t capacity) : cap_(1) {
        while (cap_ < capacity) cap_ <<= 1;
        tree_.assign(2 * cap_, 0.0);
        n_leaves_ = capacity;
    }

    void set(size_t idx, double value) {
        size_t node = cap_ + idx;
        tree_[node] = value;
        for (node >>= 1; node >= 1; node >>= 1)
            tree_[node] = tree_[2 * node] + tree_[2 * node + 1];
    }

    double get(size_t idx) const { return tree_[cap_ + idx]; }

    double total() const { return tree_[1]; }

    /// Leaf index whose cumulative interval contains u, for u in [0, total()).
    size_t sample(double u) const {
        size_t node = 1;
        while (node < cap_) {
            const double left = tree_[2 * node];
            if (u < left) {
                node = 2 * node;
            } else {
                u -= left;
                node = 2 * node + 1;
            }
        }
        size_t idx = node - cap_;
        // floating-point boundary can land on a zero leaf; walk back to mass
        if (tree_[node] <= 0.0) {
            while (idx > 0 && tree_[cap_ + idx] <= 0.0) --idx;
        }
        return idx;
    }

    size_t capacity() const { return n_leaves_; }

private:
    size_t cap_;
    size_t n_leaves_;
    std::vector<double> tree_;
};

}  // namespace warprl::replay
