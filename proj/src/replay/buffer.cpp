#include "warprl/replay/buffer.hpp"

#include <cmath>
#include <cstring>
#include <stdexcept>

namespace warprl::replay {

namespace {

constexpr uint64_t kFnvOffset = 1469598103934665603ull;
constexpr uint64_t kFnvPrime = 1099511628211ull;

void fnv(uint64_t& h, const void* data, size_t n) {
    const unsigned char* p = static_cast<const unsigned char*>(data);
    for (size_t i = 0; i < n; ++i) {
        h ^= p[i];
        h *= kFnvPrime;
    }
}

void fnv_double(uint64_t& h, double d) {
    uint64_t bits;
    std::memcpy(&bits, &d, sizeof bits);
    fnv(h, &bits, sizeof bits);
}

void fnv_int(uint64_t& h, int64_t v) { fnv(h, &v, sizeof v); }

}  // namespace

uint64_t hash_transition(const env::Transition& tr) {
    uint64_t h = kFnvOffset;
    fnv_int(h, tr.step);
    fnv_int(h, tr.terminal ? 1 : 0);
    fnv_int(h, tr.is_demo ? 1 : 0);
    for (const auto& o : tr.obs) {
        fnv_int(h, static_cast<int64_t>(o.size()));
        for (double v : o) fnv_double(h, v);
    }
    for (int a : tr.actions) fnv_int(h, a);
    for (double r : tr.rewards) fnv_double(h, r);
    for (const auto& o : tr.next_obs) {
        fnv_int(h, static_cast<int64_t>(o.size()));
        for (double v : o) fnv_double(h, v);
    }
    for (int a : tr.expert_actions) fnv_int(h, a);
    return h;
}

ReplayBuffer::ReplayBuffer(const ReplayConfig& cfg) : cfg_(cfg), tree_(1) { cfg_.validate(); }

void ReplayBuffer::seed_demos(std::vector<env::Transition> demos, const std::vector<int>& episode_ids) {
    if (seeded_) throw std::logic_error("seed_demos: buffer already seeded");
    if (!episode_ids.empty() && episode_ids.size() != demos.size())
        throw std::invalid_argument("seed_demos: episode id count mismatch");
    seeded_ = true;
    demo_count_ = demos.size();
    slots_.assign(demo_count_ + cfg_.capacity, Slot{});
    tree_ = SumTree(demo_count_ + cfg_.capacity);
    beta_ = cfg_.beta_start;
    for (size_t i = 0; i < demo_count_; ++i) {
        Slot& s = slots_[i];
        s.tr = std::move(demos[i]);
        s.tr.is_demo = true;
        s.episode_id = episode_ids.empty() ? -1 : episode_ids[i];
        s.tag = next_tag_++;
        s.occupied = true;
        set_priority(i, max_priority_);
    }
}

void ReplayBuffer::insert(env::Transition tr, int episode_id) {
    if (!seeded_) throw std::logic_error("insert: seed_demos must be called first");
    const size_t slot = demo_count_ + next_agent_;
    Slot& s = slots_[slot];
    if (!s.occupied) agent_count_ += 1;
    s.tr = std::move(tr);
    s.tr.is_demo = false;
    s.episode_id = episode_id;
    s.tag = next_tag_++;
    s.occupied = true;
    set_priority(slot, max_priority_);
    next_agent_ = (next_agent_ + 1) % cfg_.capacity;
}

void ReplayBuffer::set_priority(size_t slot, double p) {
    slots_[slot].priority = p;
    tree_.set(slot, std::pow(p, cfg_.alpha));
}

ReplayBuffer::SampleResult ReplayBuffer::sample(int batch_size, Rng& rng) const {
    if (!seeded_) throw std::logic_error("sample: buffer not seeded");
    const size_t n = size();
    if (static_cast<size_t>(batch_size) > n)
        throw std::invalid_argument("sample: batch_size exceeds stored transitions");
    const double total = tree_.total();
    if (!(total > 0.0)) throw std::logic_error("sample: empty priority mass");

    SampleResult out;
    out.refs.resize(batch_size);
    out.weights.assign(batch_size, 1.0);
    double max_w = 0.0;
    for (int i = 0; i < batch_size; ++i) {
        const size_t slot = tree_.sample(rng.next_double() * total);
        out.refs[i] = {slot, slots_[slot].tag};
        const double prob = tree_.get(slot) / total;
        const double w = std::pow(static_cast<double>(n) * prob, -beta_);
        out.weights[i] = w;
        max_w = std::max(max_w, w);
    }
    if (max_w > 0.0)
        for (double& w : out.weights) w /= max_w;
    return out;
}

const env::Transition& ReplayBuffer::get(const SampleRef& ref) const { return slots_[ref.slot].tr; }

bool ReplayBuffer::is_demo_slot(const SampleRef& ref) const { return ref.slot < demo_count_; }

void ReplayBuffer::update_priorities(const std::vector<SampleRef>& refs,
                                     const std::vector<double>& td_errors) {
    if (refs.size() != td_errors.size())
        throw std::invalid_argument("update_priorities: size mismatch");
    for (size_t i = 0; i < refs.size(); ++i) {
        const SampleRef& ref = refs[i];
        Slot& s = slots_[ref.slot];
        if (!s.occupied || s.tag != ref.tag) {
            stale_updates_ += 1;
            continue;
        }
        const double eps = ref.slot < demo_count_ ? cfg_.eps_demo : cfg_.eps_agent;
        const double p = std::abs(td_errors[i]) + eps;
        set_priority(ref.slot, p);
        max_priority_ = std::max(max_priority_, p);
    }
}

uint64_t ReplayBuffer::demo_hash() const {
    // order-independent combine so the check is about multiset contents
    uint64_t h = 0;
    for (size_t i = 0; i < demo_count_; ++i) h += hash_transition(slots_[i].tr);
    return h;
}

}  // namespace warprl::replay
