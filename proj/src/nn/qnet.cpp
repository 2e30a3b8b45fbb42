#include "warprl/nn/qnet.hpp"

#include <cmath>

#include "warprl/common.hpp"

namespace warprl::nn {

QNetwork::QNetwork(std::vector<int> dims) : dims_(std::move(dims)) {
    require(dims_.size() >= 2, "QNetwork: need at least input and output dims");
    for (int d : dims_) require(d >= 1, "QNetwork: layer width must be >= 1");
    size_t total = 0;
    for (int l = 0; l + 1 < static_cast<int>(dims_.size()); ++l) {
        layer_offset_.push_back(total);
        total += static_cast<size_t>(dims_[l]) * dims_[l + 1] + dims_[l + 1];
    }
    params_.assign(total, 0.0);
}

QNetwork QNetwork::init_uniform(std::vector<int> dims, Rng& rng) {
    QNetwork net(std::move(dims));
    for (int l = 0; l < net.num_layers(); ++l) {
        const int in = net.dims_[l], out = net.dims_[l + 1];
        const double bound = 1.0 / std::sqrt(static_cast<double>(in));
        double* w = net.params_.data() + net.layer_offset_[l];
        for (int k = 0; k < out * in; ++k) w[k] = rng.uniform(-bound, bound);
        // biases stay zero
    }
    return net;
}

void QNetwork::layer_forward(int l, std::span<const double> in, std::span<double> out) const {
    const int n_in = dims_[l], n_out = dims_[l + 1];
    const double* w = params_.data() + layer_offset_[l];
    const double* b = w + static_cast<size_t>(n_in) * n_out;
    for (int o = 0; o < n_out; ++o) {
        double acc = b[o];
        const double* row = w + static_cast<size_t>(o) * n_in;
        for (int i = 0; i < n_in; ++i) acc += row[i] * in[i];
        out[o] = acc;
    }
}

void QNetwork::forward(std::span<const double> state, std::vector<double>& q_out) const {
    require(static_cast<int>(state.size()) == input_dim(), "QNetwork::forward: state dimension mismatch");
    std::vector<double> cur(state.begin(), state.end());
    std::vector<double> next;
    for (int l = 0; l < num_layers(); ++l) {
        next.assign(dims_[l + 1], 0.0);
        layer_forward(l, cur, next);
        if (l + 1 < num_layers())
            for (double& z : next) z = z > 0.0 ? z : 0.0;
        cur.swap(next);
    }
    q_out = std::move(cur);
}

std::vector<double> QNetwork::forward(std::span<const double> state) const {
    std::vector<double> q;
    forward(state, q);
    return q;
}

void QNetwork::forward_tape(std::span<const double> state, Tape& tape, std::vector<double>& q_out) const {
    require(static_cast<int>(state.size()) == input_dim(), "QNetwork::forward_tape: state dimension mismatch");
    tape.act.resize(num_layers());
    tape.act[0].assign(state.begin(), state.end());
    for (int l = 0; l < num_layers(); ++l) {
        std::vector<double>& out = (l + 1 < num_layers()) ? tape.act[l + 1] : q_out;
        out.assign(dims_[l + 1], 0.0);
        layer_forward(l, tape.act[l], out);
        if (l + 1 < num_layers())
            for (double& z : out) z = z > 0.0 ? z : 0.0;
    }
}

void QNetwork::backward_tape(const Tape& tape, std::span<const double> dldq, std::span<double> grad) const {
    require(grad.size() == params_.size(), "QNetwork::backward_tape: grad size mismatch");
    std::vector<double> delta(dldq.begin(), dldq.end());
    std::vector<double> delta_prev;
    for (int l = num_layers() - 1; l >= 0; --l) {
        const int n_in = dims_[l], n_out = dims_[l + 1];
        const std::vector<double>& a = tape.act[l];
        double* gw = grad.data() + layer_offset_[l];
        double* gb = gw + static_cast<size_t>(n_in) * n_out;
        for (int o = 0; o < n_out; ++o) {
            const double d = delta[o];
            double* grow = gw + static_cast<size_t>(o) * n_in;
            for (int i = 0; i < n_in; ++i) grow[i] += d * a[i];
            gb[o] += d;
        }
        if (l > 0) {
            const double* w = params_.data() + layer_offset_[l];
            delta_prev.assign(n_in, 0.0);
            for (int o = 0; o < n_out; ++o) {
                const double d = delta[o];
                const double* row = w + static_cast<size_t>(o) * n_in;
                for (int i = 0; i < n_in; ++i) delta_prev[i] += row[i] * d;
            }
            // rectifier mask: the tape holds post-activation values
            for (int i = 0; i < n_in; ++i)
                if (a[i] <= 0.0) delta_prev[i] = 0.0;
            delta.swap(delta_prev);
        }
    }
}

bool QNetwork::params_finite() const {
    for (double p : params_)
        if (!std::isfinite(p)) return false;
    return true;
}

void batch_forward(const QNetwork& net, const StateBatch& states,
                   std::vector<std::vector<double>>& q_out, Exec exec) {
    q_out.resize(states.size());
    if (exec == Exec::Parallel) {
#pragma omp parallel for schedule(static)
        for (int i = 0; i < static_cast<int>(states.size()); ++i) net.forward(*states[i], q_out[i]);
    } else {
        for (size_t i = 0; i < states.size(); ++i) net.forward(*states[i], q_out[i]);
    }
}

void batch_forward_tape(const QNetwork& net, const StateBatch& states,
                        std::vector<QNetwork::Tape>& tapes,
                        std::vector<std::vector<double>>& q_out, Exec exec) {
    tapes.resize(states.size());
    q_out.resize(states.size());
    if (exec == Exec::Parallel) {
#pragma omp parallel for schedule(static)
        for (int i = 0; i < static_cast<int>(states.size()); ++i)
            net.forward_tape(*states[i], tapes[i], q_out[i]);
    } else {
        for (size_t i = 0; i < states.size(); ++i) net.forward_tape(*states[i], tapes[i], q_out[i]);
    }
}

void batch_backward(const QNetwork& net, const std::vector<QNetwork::Tape>& tapes,
                    const std::vector<std::vector<double>>& dldq,
                    std::vector<double>& grad_out,
                    std::vector<std::vector<double>>& scratch, Exec exec) {
    const int b = static_cast<int>(tapes.size());
    scratch.resize(b);
    if (exec == Exec::Parallel) {
#pragma omp parallel for schedule(static)
        for (int i = 0; i < b; ++i) {
            scratch[i].assign(net.param_count(), 0.0);
            net.backward_tape(tapes[i], dldq[i], scratch[i]);
        }
    } else {
        for (int i = 0; i < b; ++i) {
            scratch[i].assign(net.param_count(), 0.0);
            net.backward_tape(tapes[i], dldq[i], scratch[i]);
        }
    }
    // fixed-order reduction keeps the sum independent of the thread count
    for (int i = 0; i < b; ++i) {
        const std::vector<double>& g = scratch[i];
        for (size_t k = 0; k < g.size(); ++k) grad_out[k] += g[k];
    }
}

}  // namespace warprl::nn
