#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "warprl/env/chase.hpp"
#include "warprl/rng.hpp"

using namespace warprl;
using namespace warprl::env;

namespace {

ChaseState make_state(std::vector<Vec2> pos) {
    ChaseState s;
    s.pos = std::move(pos);
    s.vel.assign(3, Vec2{});
    return s;
}

}  // namespace

TEST_CASE("action 12 with zero velocity leaves the position unchanged") {
    ChaseState s = make_state({{0.1, 0.1}, {-0.3, 0.2}, {0.4, -0.4}});
    ChaseConfig cfg;
    chase_dynamics(s, {12, 12, 12}, cfg);
    CHECK(s.pos[0] == Vec2{0.1, 0.1});
    CHECK(s.pos[1] == Vec2{-0.3, 0.2});
    CHECK(s.pos[2] == Vec2{0.4, -0.4});
}

TEST_CASE("predator action 0 accelerates toward the prey") {
    ChaseState s = make_state({{0.0, 0.0}, {-0.8, -0.8}, {0.5, 0.0}});
    ChaseConfig cfg;
    chase_dynamics(s, {0, 12, 12}, cfg);
    CHECK(s.vel[0].x > 0.0);
    CHECK(s.vel[0].y == doctest::Approx(0.0).epsilon(1e-15));
    CHECK(s.pos[0].x > 0.0);
}

TEST_CASE("prey action 0 accelerates away from the nearest predator") {
    ChaseState s = make_state({{-0.5, 0.0}, {-0.9, -0.9}, {0.0, 0.0}});
    ChaseConfig cfg;
    chase_dynamics(s, {12, 12, 0}, cfg);
    CHECK(s.vel[2].x > 0.0);  // nearest predator is at -x, so flee along +x
    CHECK(std::abs(s.vel[2].y) < 1e-12);
}

TEST_CASE("predator mobility scales acceleration and speed cap") {
    ChaseConfig cfg;
    cfg.mobility_ratio = 1.2;
    ChaseState s = make_state({{0.0, 0.0}, {-0.9, -0.9}, {0.5, 0.0}});
    // prey placed so both frames point along +x for agents 0 and 2
    chase_dynamics(s, {0, 12, 12}, cfg);
    const double predator_dv = s.vel[0].x;
    ChaseState s2 = make_state({{-0.9, -0.9}, {-0.9, 0.9}, {0.0, 0.0}});
    // prey flees +x from nearest predator at (-0.9,-0.9)? frame is away-from-nearest
    chase_dynamics(s2, {12, 12, 0}, cfg);
    const double prey_dv = s2.vel[2].norm();
    CHECK(predator_dv == doctest::Approx(1.2 * prey_dv).epsilon(1e-12));
}

TEST_CASE("speed never exceeds the per-role cap") {
    ChaseConfig cfg;
    cfg.mobility_ratio = 1.1;
    ChaseEnv e(cfg);
    Rng rng(4);
    e.reset(17);
    while (!e.done()) {
        e.step({rng.uniform_int(13), rng.uniform_int(13), rng.uniform_int(13)});
        const ChaseState& s = e.state();
        CHECK(s.vel[0].norm() <= 1.1 * cfg.prey_max_speed + 1e-12);
        CHECK(s.vel[1].norm() <= 1.1 * cfg.prey_max_speed + 1e-12);
        CHECK(s.vel[2].norm() <= cfg.prey_max_speed + 1e-12);
    }
}

TEST_CASE("velocity decays monotonically under damping with no input") {
    ChaseConfig cfg;
    ChaseState s = make_state({{-0.5, 0.0}, {-0.5, 0.3}, {0.5, 0.0}});
    s.vel[0] = {0.9, 0.2};
    double prev = s.vel[0].norm();
    for (int t = 0; t < 60; ++t) {
        chase_dynamics(s, {12, 12, 12}, cfg);
        const double now = s.vel[0].norm();
        CHECK(now <= prev);
        prev = now;
    }
    CHECK(prev < 1e-6);
}

TEST_CASE("mirrored states under mirrored actions give mirrored trajectories") {
    ChaseConfig cfg;
    auto mirror_action = [](int a) { return a == 12 ? 12 : (12 - a) % 12; };
    Rng rng(8);
    ChaseState s1 = make_state({{0.1, 0.2}, {-0.2, -0.3}, {0.3, 0.1}});
    ChaseState s2 = s1;
    for (auto& p : s2.pos) p.y = -p.y;

    for (int t = 0; t < 25; ++t) {
        std::vector<int> a1 = {rng.uniform_int(13), rng.uniform_int(13), rng.uniform_int(13)};
        std::vector<int> a2 = {mirror_action(a1[0]), mirror_action(a1[1]), mirror_action(a1[2])};
        chase_dynamics(s1, a1, cfg);
        chase_dynamics(s2, a2, cfg);
        for (int k = 0; k < 3; ++k) {
            CHECK(s2.pos[k].x == doctest::Approx(s1.pos[k].x).epsilon(1e-9));
            CHECK(s2.pos[k].y == doctest::Approx(-s1.pos[k].y).epsilon(1e-9));
        }
    }
}

TEST_CASE("capture rewards fire at center distance <= diameter") {
    ChaseConfig cfg;
    auto res = chase_rewards(make_state({{0.0, 0.0}, {-0.5, -0.5}, {0.05, 0.0}}), cfg);
    CHECK(res.terminal);
    CHECK(res.outcome == Outcome::Capture);
    CHECK(res.rewards == std::vector<double>{1.0, 1.0, -1.0});

    SUBCASE("capture is symmetric in which predator touches") {
        auto res2 = chase_rewards(make_state({{-0.5, -0.5}, {0.0, 0.0}, {0.05, 0.0}}), cfg);
        CHECK(res2.terminal);
        CHECK(res2.rewards == std::vector<double>{1.0, 1.0, -1.0});
    }

    SUBCASE("just beyond the threshold there is no capture") {
        auto res3 = chase_rewards(make_state({{0.0, 0.0}, {-0.5, -0.5}, {0.11, 0.0}}), cfg);
        CHECK(!res3.terminal);
    }
}

TEST_CASE("out-of-area penalties") {
    ChaseConfig cfg;
    SUBCASE("prey out: prey -1, terminal, prey_out outcome") {
        auto res = chase_rewards(make_state({{0.0, 0.0}, {-0.5, -0.5}, {1.01, 0.0}}), cfg);
        CHECK(res.terminal);
        CHECK(res.outcome == Outcome::PreyOut);
        CHECK(res.rewards == std::vector<double>{0.0, 0.0, -1.0});
    }
    SUBCASE("predator out: offender -1, prey unrewarded, terminal") {
        auto res = chase_rewards(make_state({{1.2, 0.0}, {-0.5, -0.5}, {0.0, 0.5}}), cfg);
        CHECK(res.terminal);
        CHECK(res.outcome == Outcome::PredatorOut);
        CHECK(res.rewards == std::vector<double>{-1.0, 0.0, 0.0});
    }
    SUBCASE("interior, no contact: no rewards, not terminal") {
        auto res = chase_rewards(make_state({{0.3, 0.3}, {-0.5, -0.5}, {0.0, 0.5}}), cfg);
        CHECK(!res.terminal);
        CHECK(res.rewards == std::vector<double>{0.0, 0.0, 0.0});
    }
}

TEST_CASE("capture inside the env integrates reward and outcome") {
    ChaseConfig cfg;
    ChaseEnv e(cfg);
    InitialCondition init;
    init.positions = {{-0.2, 0.0}, {-0.5, 0.5}, {0.2, 0.0}};
    e.reset(init);
    StepResult last;
    int guard = 0;
    while (!e.done() && guard++ < cfg.max_steps) last = e.step({0, 0, 12});
    REQUIRE(e.done());
    CHECK(e.episode().outcome == Outcome::Capture);
    CHECK(last.rewards[0] == 1.0);
    CHECK(last.rewards[2] == -1.0);
}
