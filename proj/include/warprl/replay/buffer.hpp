#pragma once
#include <cstdint>
#include <vector>

#include "warprl/env/types.hpp"
#include "warprl/replay/sum_tree.hpp"
#include "warprl/rng.hpp"

namespace warprl::replay {

struct ReplayConfig {
    size_t capacity = 200000;  ///< agent partition only; demos are extra
    double alpha = 0.4;        ///< priority exponent
    double beta_start = 0.6;   ///< importance-sampling exponent, annealed to beta_end
    double beta_end = 1.0;
    double eps_agent = 0.001;  ///< priority floor for agent transitions
    double eps_demo = 1.0;     ///< priority bonus floor for demo transitions

    void validate() const {
        require(capacity >= 1, "replay.capacity must be >= 1");
        require(alpha >= 0.0, "replay.alpha must be >= 0");
        require(eps_agent > 0.0 && eps_demo > 0.0, "replay priority floors must be > 0");
        require(beta_start >= 0.0 && beta_end >= beta_start, "replay.beta schedule invalid");
    }
};

/// Reference to a sampled slot; the tag detects slots overwritten since
/// the sample was drawn.
struct SampleRef {
    size_t slot = 0;
    uint64_t tag = 0;
};

/// Prioritized replay over two partitions: a fixed demonstration partition
/// that is never evicted, and an agent ring of fixed capacity. Single
/// writer, single sampler.
class ReplayBuffer {
public:
    explicit ReplayBuffer(const ReplayConfig& cfg);

    /// Install the demonstration partition. Must be called exactly once,
    /// before any insert (an empty vector is valid).
    void seed_demos(std::vector<env::Transition> demos, const std::vector<int>& episode_ids = {});

    /// Append an agent transition with the current maximal priority,
    /// evicting the oldest agent transition when the ring is full.
    void insert(env::Transition tr, int episode_id = -1);

    struct SampleResult {
        std::vector<SampleRef> refs;
        std::vector<double> weights;  ///< (N * P(i))^-beta, normalized by the batch max
    };

    SampleResult sample(int batch_size, Rng& rng) const;

    const env::Transition& get(const SampleRef& ref) const;
    bool is_demo_slot(const SampleRef& ref) const;

    /// p_i = |td_error| + eps (demo or agent floor). Stale refs are
    /// ignored and counted.
    void update_priorities(const std::vector<SampleRef>& refs, const std::vector<double>& td_errors);

    void set_beta(double beta) { beta_ = beta; }
    double beta() const { return beta_; }

    size_t size() const { return demo_count_ + agent_count_; }
    size_t demo_size() const { return demo_count_; }
    size_t agent_size() const { return agent_count_; }
    size_t stale_update_count() const { return stale_updates_; }

    /// Root of the priority tree (sum of p^alpha); for consistency checks.
    double priority_total() const { return tree_.total(); }
    double priority_of(size_t slot) const { return slots_[slot].priority; }

    /// Order-independent FNV-based hash of the demo partition contents.
    uint64_t demo_hash() const;

private:
    struct Slot {
        env::Transition tr;
        int episode_id = -1;
        uint64_t tag = 0;
        double priority = 0.0;
        bool occupied = false;
    };

    void set_priority(size_t slot, double p);

    ReplayConfig cfg_;
    std::vector<Slot> slots_;  ///< [0, demo_count_) demos, then the agent ring
    SumTree tree_;
    size_t demo_count_ = 0;
    size_t agent_count_ = 0;
    size_t next_agent_ = 0;  ///< ring write position (relative to demo_count_)
    uint64_t next_tag_ = 1;
    double max_priority_ = 1.0;
    double beta_ = 0.6;
    bool seeded_ = false;
    size_t stale_updates_ = 0;
};

/// Canonical content hash of one transition (bit patterns of all fields).
uint64_t hash_transition(const env::Transition& tr);

}  // namespace warprl::replay
