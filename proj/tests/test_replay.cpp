#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <map>

#include "warprl/replay/buffer.hpp"
#include "warprl/rng.hpp"

using namespace warprl;
using replay::ReplayBuffer;
using replay::ReplayConfig;

namespace {

env::Transition make_tr(int tag, bool demo = false) {
    env::Transition tr;
    tr.obs = {{static_cast<double>(tag), 1.0}};
    tr.actions = {tag % 5};
    tr.rewards = {0.1 * tag};
    tr.next_obs = {{static_cast<double>(tag) + 0.5, -1.0}};
    tr.step = tag;
    tr.is_demo = demo;
    return tr;
}

ReplayConfig small_cfg(size_t capacity) {
    ReplayConfig cfg;
    cfg.capacity = capacity;
    return cfg;
}

}  // namespace

TEST_CASE("seeding rules") {
    ReplayBuffer buf(small_cfg(8));
    CHECK_THROWS(buf.insert(make_tr(0)));
    buf.seed_demos({make_tr(0, true), make_tr(1, true)});
    CHECK(buf.demo_size() == 2);
    CHECK_THROWS(buf.seed_demos({}));
}

TEST_CASE("demo partition survives heavy overwriting") {
    ReplayBuffer buf(small_cfg(16));
    std::vector<env::Transition> demos;
    for (int i = 0; i < 100; ++i) demos.push_back(make_tr(1000 + i, true));
    buf.seed_demos(demos);
    const uint64_t h0 = buf.demo_hash();

    Rng rng(1);
    for (int i = 0; i < 16 * 10; ++i) {
        buf.insert(make_tr(i));
        if (i % 3 == 0 && buf.size() >= 4) {
            auto s = buf.sample(4, rng);
            std::vector<double> errs = {0.1, 0.0, 2.0, 0.5};
            buf.update_priorities(s.refs, errs);
        }
    }
    CHECK(buf.demo_size() == 100);
    CHECK(buf.agent_size() == 16);
    CHECK(buf.demo_hash() == h0);
}

TEST_CASE("empty demo partition behaves as a plain prioritized ring") {
    ReplayBuffer buf(small_cfg(4));
    buf.seed_demos({});
    CHECK(buf.size() == 0);
    for (int i = 0; i < 3; ++i) buf.insert(make_tr(i));
    CHECK(buf.size() == 3);
    buf.insert(make_tr(3));
    buf.insert(make_tr(4));  // evicts the oldest
    CHECK(buf.size() == 4);
    CHECK(buf.agent_size() == 4);
}

TEST_CASE("insert assigns the running maximum priority") {
    ReplayBuffer buf(small_cfg(8));
    buf.seed_demos({});
    buf.insert(make_tr(0));
    Rng rng(2);
    auto s = buf.sample(1, rng);
    buf.update_priorities(s.refs, {5.0});  // raises max priority to 5 + eps
    buf.insert(make_tr(1));
    CHECK(buf.priority_of(1) == doctest::Approx(5.0 + 0.001));
    CHECK(buf.priority_of(1) > buf.priority_of(0) - 1e-12);
}

TEST_CASE("priority floors after zero TD error") {
    ReplayConfig cfg = small_cfg(8);
    cfg.eps_agent = 0.001;
    cfg.eps_demo = 1.0;
    ReplayBuffer buf(cfg);
    buf.seed_demos({make_tr(100, true)});
    buf.insert(make_tr(0));

    buf.update_priorities({{0, 1}}, {0.0});  // demo slot, first tag
    CHECK(buf.priority_of(0) == doctest::Approx(1.0));
    buf.update_priorities({{1, 2}}, {0.0});  // agent slot
    CHECK(buf.priority_of(1) == doctest::Approx(0.001));
    CHECK(buf.priority_of(0) > buf.priority_of(1));
}

TEST_CASE("stale references are ignored and counted") {
    ReplayBuffer buf(small_cfg(2));
    buf.seed_demos({});
    buf.insert(make_tr(0));
    buf.insert(make_tr(1));
    Rng rng(3);
    auto s = buf.sample(2, rng);
    buf.insert(make_tr(2));  // overwrites slot of tr(0)
    buf.insert(make_tr(3));
    const double before = buf.priority_total();
    buf.update_priorities(s.refs, {9.0, 9.0});
    CHECK(buf.stale_update_count() == 2);
    CHECK(buf.priority_total() == doctest::Approx(before));
}

TEST_CASE("sum-tree root tracks the sum of p^alpha") {
    ReplayConfig cfg = small_cfg(64);
    cfg.alpha = 0.4;
    ReplayBuffer buf(cfg);
    std::vector<env::Transition> demos;
    for (int i = 0; i < 10; ++i) demos.push_back(make_tr(i, true));
    buf.seed_demos(demos);

    Rng rng(4);
    for (int i = 0; i < 500; ++i) {
        buf.insert(make_tr(100 + i));
        auto s = buf.sample(8, rng);
        std::vector<double> errs(8);
        for (double& e : errs) e = rng.uniform(0.0, 3.0);
        buf.update_priorities(s.refs, errs);

        double manual = 0.0;
        for (size_t slot = 0; slot < buf.size(); ++slot)
            manual += std::pow(buf.priority_of(slot), cfg.alpha);
        CHECK(std::abs(buf.priority_total() - manual) < 1e-9);
    }
}

TEST_CASE("sampling follows p^alpha proportions") {
    SUBCASE("two transitions, priorities (3,1), alpha = 1") {
        ReplayConfig cfg = small_cfg(4);
        cfg.alpha = 1.0;
        ReplayBuffer buf(cfg);
        buf.seed_demos({});
        buf.insert(make_tr(0));
        buf.insert(make_tr(1));
        buf.update_priorities({{0, 1}, {1, 2}}, {3.0 - cfg.eps_agent, 1.0 - cfg.eps_agent});

        Rng rng(5);
        const int draws = 100000;
        int first = 0;
        for (int i = 0; i < draws; ++i)
            if (buf.sample(1, rng).refs[0].slot == 0) ++first;
        // binomial: p = 0.75, 3 sigma band
        const double sigma = std::sqrt(0.75 * 0.25 * draws);
        CHECK(std::abs(first - 0.75 * draws) < 3.0 * sigma);
    }

    SUBCASE("alpha = 0 samples uniformly regardless of priorities") {
        ReplayConfig cfg = small_cfg(4);
        cfg.alpha = 0.0;
        ReplayBuffer buf(cfg);
        buf.seed_demos({});
        buf.insert(make_tr(0));
        buf.insert(make_tr(1));
        buf.update_priorities({{0, 1}, {1, 2}}, {100.0, 0.0});

        Rng rng(6);
        const int draws = 100000;
        int first = 0;
        for (int i = 0; i < draws; ++i)
            if (buf.sample(1, rng).refs[0].slot == 0) ++first;
        const double sigma = std::sqrt(0.25 * draws);
        CHECK(std::abs(first - 0.5 * draws) < 3.0 * sigma);
    }
}

TEST_CASE("importance weights are flat for uniform priorities at beta = 1") {
    ReplayConfig cfg = small_cfg(8);
    ReplayBuffer buf(cfg);
    buf.seed_demos({});
    for (int i = 0; i < 8; ++i) buf.insert(make_tr(i));
    buf.set_beta(1.0);
    Rng rng(7);
    auto s = buf.sample(8, rng);
    for (double w : s.weights) CHECK(w == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("batch size larger than contents is an error") {
    ReplayBuffer buf(small_cfg(4));
    buf.seed_demos({});
    buf.insert(make_tr(0));
    Rng rng(8);
    CHECK_THROWS(buf.sample(2, rng));
}

TEST_CASE("updated priorities shift the sampling distribution") {
    ReplayConfig cfg = small_cfg(4);
    cfg.alpha = 1.0;
    ReplayBuffer buf(cfg);
    buf.seed_demos({});
    buf.insert(make_tr(0));
    buf.insert(make_tr(1));
    buf.update_priorities({{0, 1}, {1, 2}}, {1.0 - cfg.eps_agent, 1.0 - cfg.eps_agent});

    Rng rng(9);
    auto freq = [&](int draws) {
        int first = 0;
        for (int i = 0; i < draws; ++i)
            if (buf.sample(1, rng).refs[0].slot == 0) ++first;
        return static_cast<double>(first) / draws;
    };
    const double before = freq(20000);
    CHECK(std::abs(before - 0.5) < 0.02);
    buf.update_priorities({{0, 1}}, {9.0 - cfg.eps_agent});  // now 9:1
    const double after = freq(20000);
    CHECK(std::abs(after - 0.9) < 0.02);
}
