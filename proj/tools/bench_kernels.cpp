// Timing comparison of the serial reference kernels against their
// OpenMP-parallel counterparts. The two paths are bit-identical by
// construction (see the unit tests); this target reports the speedups.
#include <chrono>
#include <cstdio>
#include <vector>

#include "warprl/dtw/dtw.hpp"
#include "warprl/losses.hpp"
#include "warprl/nn/qnet.hpp"
#include "warprl/parallel.hpp"
#include "warprl/rng.hpp"

using namespace warprl;

namespace {

double now_s() {
    using clock = std::chrono::steady_clock;
    return std::chrono::duration<double>(clock::now().time_since_epoch()).count();
}

template <typename F>
double time_best_of(int reps, F&& f) {
    double best = 1e300;
    for (int r = 0; r < reps; ++r) {
        const double t0 = now_s();
        f();
        best = std::min(best, now_s() - t0);
    }
    return best;
}

void report(const char* name, double serial_s, double parallel_s) {
    std::printf("%-28s serial %9.3f ms   omp %9.3f ms   speedup %.2fx\n", name, serial_s * 1e3,
                parallel_s * 1e3, serial_s / parallel_s);
}

}  // namespace

int main() {
    std::printf("threads: %d\n", parallel::max_threads());
    Rng rng(7);

    {
        // batch action-value evaluation, chase-sized network
        nn::QNetwork net = nn::QNetwork::init_uniform({10, 128, 128, 13}, rng);
        std::vector<std::vector<double>> states(512, std::vector<double>(10));
        for (auto& s : states)
            for (double& x : s) x = rng.uniform(-1, 1);
        nn::StateBatch views;
        for (auto& s : states) views.push_back(&s);
        std::vector<std::vector<double>> q;
        const double ts = time_best_of(5, [&] { nn::batch_forward(net, views, q, Exec::Serial); });
        const double tp = time_best_of(5, [&] { nn::batch_forward(net, views, q, Exec::Parallel); });
        report("batch_forward 512x(10-128-128-13)", ts, tp);
    }

    {
        // full loss gradient, training-sized batch
        nn::QNetwork net = nn::QNetwork::init_uniform({20, 128, 128, 12}, rng);
        nn::QNetwork target = nn::QNetwork::init_uniform({20, 128, 128, 12}, rng);
        std::vector<std::vector<double>> ss(256, std::vector<double>(20)), s2(256, std::vector<double>(20));
        for (auto& s : ss)
            for (double& x : s) x = rng.uniform(-1, 1);
        for (auto& s : s2)
            for (double& x : s) x = rng.uniform(-1, 1);
        losses::Batch batch;
        for (int i = 0; i < 256; ++i) {
            losses::BatchItem it;
            it.s = &ss[i];
            it.next_s = &s2[i];
            it.action = rng.uniform_int(12);
            it.reward = rng.uniform(-1, 1);
            it.expert_action = rng.uniform_int(12);
            it.is_demo = i % 2 == 0;
            batch.push_back(it);
        }
        losses::LossConfig cfg;
        cfg.kind = losses::SupervisedKind::ActionWarp;
        std::vector<double> grad(net.param_count());
        losses::Workspace ws;
        const double ts = time_best_of(5, [&] {
            grad.assign(grad.size(), 0.0);
            losses::total_loss_grad(batch, net, target, 0.99, cfg, grad, ws, Exec::Serial);
        });
        const double tp = time_best_of(5, [&] {
            grad.assign(grad.size(), 0.0);
            losses::total_loss_grad(batch, net, target, 0.99, cfg, grad, ws, Exec::Parallel);
        });
        report("total_loss_grad batch 256", ts, tp);
    }

    {
        // local-distance matrix between two long feature sequences
        dtw::Seq a(600, std::vector<double>(6)), b(600, std::vector<double>(6));
        for (auto& v : a)
            for (double& x : v) x = rng.uniform(-1, 1);
        for (auto& v : b)
            for (double& x : v) x = rng.uniform(-1, 1);
        const double ts = time_best_of(5, [&] { dtw::local_distance(a, b, Exec::Serial); });
        const double tp = time_best_of(5, [&] { dtw::local_distance(a, b, Exec::Parallel); });
        report("local_distance 600x600x6", ts, tp);
    }

    {
        // many independent trajectory pairs, evaluation-style
        std::vector<std::vector<Vec2>> trajs(64);
        for (auto& t : trajs) {
            t.resize(300);
            for (auto& p : t) p = {rng.uniform(-1, 1), rng.uniform(-1, 1)};
        }
        std::vector<std::pair<const std::vector<Vec2>*, const std::vector<Vec2>*>> pairs;
        for (int i = 0; i + 1 < 64; i += 2) pairs.push_back({&trajs[i], &trajs[i + 1]});
        const double ts = time_best_of(3, [&] { dtw::dtw_distance_batch(pairs, Exec::Serial); });
        const double tp = time_best_of(3, [&] { dtw::dtw_distance_batch(pairs, Exec::Parallel); });
        report("dtw_distance_batch 32x300", ts, tp);
    }
    return 0;
}
