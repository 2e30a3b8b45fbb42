#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <filesystem>

#include "warprl/nn/adam.hpp"
#include "warprl/nn/checkpoint.hpp"
#include "warprl/nn/qnet.hpp"
#include "warprl/rng.hpp"

using namespace warprl;
using nn::QNetwork;

TEST_CASE("zero parameters give zero outputs") {
    QNetwork net({4, 8, 3});
    std::vector<double> s = {1.0, -2.0, 0.5, 3.0};
    for (double q : net.forward(s)) CHECK(q == 0.0);
}

TEST_CASE("forward is a pure function of (params, state)") {
    Rng rng(3);
    QNetwork net = QNetwork::init_uniform({5, 16, 4}, rng);
    std::vector<double> s(5);
    for (double& x : s) x = rng.uniform(-1, 1);
    CHECK(net.forward(s) == net.forward(s));
}

TEST_CASE("single-hidden-layer forward matches hand evaluation") {
    // dims 2 -> 2 -> 1; set explicit parameters
    QNetwork net({2, 2, 1});
    // layout: W0 (2x2 row-major), b0 (2), W1 (1x2), b1 (1)
    std::vector<double>& p = net.params();
    p = {0.5, -1.0,   // W0 row 0
         2.0, 0.25,   // W0 row 1
         0.1, -0.2,   // b0
         1.5, -0.5,   // W1
         0.3};        // b1
    std::vector<double> s = {1.0, 2.0};
    const double h0 = std::max(0.0, 0.5 * 1.0 - 1.0 * 2.0 + 0.1);
    const double h1 = std::max(0.0, 2.0 * 1.0 + 0.25 * 2.0 - 0.2);
    const double expect = 1.5 * h0 - 0.5 * h1 + 0.3;
    CHECK(net.forward(s)[0] == doctest::Approx(expect).epsilon(1e-15));
}

TEST_CASE("all-negative hidden pre-activations leave only the bias path") {
    QNetwork net({2, 3, 2});
    std::vector<double>& p = net.params();
    // W0 strongly negative, b0 negative -> hidden all zero for positive input
    for (int i = 0; i < 6; ++i) p[i] = -5.0;
    p[6] = p[7] = p[8] = -1.0;  // b0
    // W1 arbitrary
    for (int i = 9; i < 15; ++i) p[i] = 2.0;
    p[15] = 0.7;  // b1[0]
    p[16] = -0.4; // b1[1]
    auto q = net.forward(std::vector<double>{1.0, 2.0});
    CHECK(q[0] == 0.7);
    CHECK(q[1] == -0.4);
}

TEST_CASE("parameter count is sum of fan_in*fan_out + fan_out") {
    QNetwork net({10, 128, 128, 13});
    CHECK(net.param_count() == size_t(10 * 128 + 128 + 128 * 128 + 128 + 128 * 13 + 13));
}

TEST_CASE("dimension mismatch is a usage error") {
    QNetwork net({4, 8, 3});
    CHECK_THROWS(net.forward(std::vector<double>{1.0, 2.0}));
}

TEST_CASE("backward_tape matches central finite differences") {
    // loss = sum_j c_j * q_j for random c: dL/dtheta via tape must match FD
    Rng rng(17);
    for (int rep = 0; rep < 20; ++rep) {
        QNetwork net = QNetwork::init_uniform({3, 6, 4}, rng);
        std::vector<double> s(3), c(4);
        for (double& x : s) x = rng.uniform(-1, 1);
        for (double& x : c) x = rng.uniform(-1, 1);

        QNetwork::Tape tape;
        std::vector<double> q;
        net.forward_tape(s, tape, q);
        std::vector<double> grad(net.param_count(), 0.0);
        net.backward_tape(tape, c, grad);

        auto loss = [&](const QNetwork& n) {
            auto qq = n.forward(s);
            double acc = 0.0;
            for (int j = 0; j < 4; ++j) acc += c[j] * qq[j];
            return acc;
        };
        const double h = 1e-6;
        double max_rel = 0.0;
        QNetwork pert = net;
        for (size_t i = 0; i < net.param_count(); ++i) {
            const double orig = pert.params()[i];
            pert.params()[i] = orig + h;
            const double up = loss(pert);
            pert.params()[i] = orig - h;
            const double dn = loss(pert);
            pert.params()[i] = orig;
            const double fd = (up - dn) / (2 * h);
            max_rel = std::max(max_rel, std::abs(fd - grad[i]) / std::max(1.0, std::abs(fd)));
        }
        CHECK(max_rel < 1e-6);
    }
}

TEST_CASE("batch kernels are bit-identical in serial and parallel modes") {
    Rng rng(23);
    QNetwork net = QNetwork::init_uniform({6, 32, 5}, rng);
    std::vector<std::vector<double>> states(64, std::vector<double>(6));
    for (auto& s : states)
        for (double& x : s) x = rng.uniform(-1, 1);
    nn::StateBatch views;
    for (auto& s : states) views.push_back(&s);

    std::vector<std::vector<double>> q_serial, q_par;
    nn::batch_forward(net, views, q_serial, Exec::Serial);
    nn::batch_forward(net, views, q_par, Exec::Parallel);
    CHECK(q_serial == q_par);

    std::vector<QNetwork::Tape> tapes_s, tapes_p;
    std::vector<std::vector<double>> qs, qp;
    nn::batch_forward_tape(net, views, tapes_s, qs, Exec::Serial);
    nn::batch_forward_tape(net, views, tapes_p, qp, Exec::Parallel);
    std::vector<std::vector<double>> dldq(views.size(), std::vector<double>(5));
    for (auto& row : dldq)
        for (double& x : row) x = rng.uniform(-1, 1);
    std::vector<double> grad_s(net.param_count(), 0.0), grad_p(net.param_count(), 0.0);
    std::vector<std::vector<double>> scratch;
    nn::batch_backward(net, tapes_s, dldq, grad_s, scratch, Exec::Serial);
    nn::batch_backward(net, tapes_p, dldq, grad_p, scratch, Exec::Parallel);
    CHECK(grad_s == grad_p);
}

TEST_CASE("adam: zero gradient is a fixed point") {
    std::vector<double> params = {1.0, -2.0, 3.0};
    std::vector<double> grad = {0.0, 0.0, 0.0};
    nn::AdamState st(3);
    nn::adam_step(params, grad, st, {});
    CHECK(params == std::vector<double>{1.0, -2.0, 3.0});
}

TEST_CASE("adam: single-parameter closed-form first step") {
    nn::AdamConfig cfg;
    cfg.lr = 0.1;
    cfg.clip_norm = 0.0;  // disabled
    std::vector<double> params = {1.0};
    std::vector<double> grad = {0.5};
    nn::AdamState st(1);
    nn::adam_step(params, grad, st, cfg);
    const double m = 0.1 * 0.5, v = 0.001 * 0.25;
    const double mhat = m / (1 - 0.9), vhat = v / (1 - 0.999);
    const double expect = 1.0 - cfg.lr * mhat / (std::sqrt(vhat) + cfg.eps);
    CHECK(params[0] == doctest::Approx(expect).epsilon(1e-15));
}

TEST_CASE("adam: descends a 1-D convex quadratic") {
    // f(x) = (x-3)^2, gradient 2(x-3)
    nn::AdamConfig cfg;
    cfg.lr = 0.05;
    std::vector<double> x = {10.0};
    nn::AdamState st(1);
    double prev = (x[0] - 3) * (x[0] - 3);
    for (int i = 0; i < 500; ++i) {
        std::vector<double> g = {2 * (x[0] - 3)};
        nn::adam_step(x, g, st, cfg);
    }
    const double now = (x[0] - 3) * (x[0] - 3);
    CHECK(now < prev);
    CHECK(now < 1e-2);
}

TEST_CASE("adam: non-finite gradient aborts") {
    std::vector<double> params = {1.0};
    std::vector<double> grad = {std::numeric_limits<double>::quiet_NaN()};
    nn::AdamState st(1);
    CHECK_THROWS(nn::adam_step(params, grad, st, {}));
}

TEST_CASE("adam: global-norm clipping bounds the applied gradient") {
    nn::AdamConfig cfg;
    cfg.clip_norm = 1.0;
    cfg.lr = 1.0;
    std::vector<double> a = {0.0}, b = {0.0};
    nn::AdamState sa(1), sb(1);
    nn::adam_step(a, std::vector<double>{100.0}, sa, cfg);
    nn::adam_step(b, std::vector<double>{1.0}, sb, cfg);
    CHECK(a[0] == doctest::Approx(b[0]).epsilon(1e-12));
}

TEST_CASE("target sync copies parameters exactly") {
    Rng rng(31);
    QNetwork net = QNetwork::init_uniform({4, 8, 3}, rng);
    QNetwork target({4, 8, 3});
    std::vector<double> s(4);
    for (double& x : s) x = rng.uniform(-1, 1);
    CHECK(net.forward(s) != target.forward(s));
    target = net;  // sync is an exact parameter copy
    for (int i = 0; i < 100; ++i) {
        for (double& x : s) x = rng.uniform(-1, 1);
        CHECK(net.forward(s) == target.forward(s));
    }
}

TEST_CASE("checkpoint round-trip is bit-exact") {
    Rng rng(37);
    std::vector<QNetwork> nets;
    nets.push_back(QNetwork::init_uniform({10, 32, 13}, rng));
    nets.push_back(QNetwork::init_uniform({10, 32, 13}, rng));
    nets.push_back(QNetwork::init_uniform({8, 16, 16, 5}, rng));
    const std::string path = (std::filesystem::temp_directory_path() / "warprl_ckpt_test.qnet").string();
    nn::save_checkpoint(path, nets);
    auto loaded = nn::load_checkpoint(path);
    REQUIRE(loaded.size() == nets.size());
    for (size_t i = 0; i < nets.size(); ++i) {
        CHECK(loaded[i].dims() == nets[i].dims());
        CHECK(loaded[i].params() == nets[i].params());
    }
    std::filesystem::remove(path);
}

TEST_CASE("seeded initialization is reproducible") {
    Rng a(99), b(99);
    QNetwork n1 = QNetwork::init_uniform({7, 24, 9}, a);
    QNetwork n2 = QNetwork::init_uniform({7, 24, 9}, b);
    CHECK(n1.params() == n2.params());
}
