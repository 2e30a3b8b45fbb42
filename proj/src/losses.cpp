#include "warprl/losses.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "warprl/common.hpp"

namespace warprl::losses {

namespace {

int argmax_smallest(const std::vector<double>& v) {
    int best = 0;
    for (int i = 1; i < static_cast<int>(v.size()); ++i)
        if (v[i] > v[best]) best = i;
    return best;
}

/// Whether the supervised term covers this item under the given kind.
bool supervised_selects(const LossConfig& cfg, const BatchItem& it) {
    switch (cfg.kind) {
        case SupervisedKind::None:
            return false;
        case SupervisedKind::Margin:
        case SupervisedKind::MarginWarp:
            if (it.is_demo) return true;
            return cfg.margin_supervises_agent_transitions && it.expert_action >= 0;
        case SupervisedKind::Action:
        case SupervisedKind::ActionWarp:
            if (it.is_demo && it.expert_action < 0)
                throw std::invalid_argument("losses: demo transition lacks an expert-action annotation");
            return it.expert_action >= 0;
    }
    return false;
}

bool is_margin(SupervisedKind k) {
    return k == SupervisedKind::Margin || k == SupervisedKind::MarginWarp;
}

double td_target(const BatchItem& it, const std::vector<double>& q2_net,
                 const std::vector<double>& q2_tgt, double gamma) {
    if (it.terminal) return it.reward;
    return it.reward + gamma * q2_tgt[argmax_smallest(q2_net)];
}

}  // namespace

SupervisedKind kind_from_name(const std::string& s) {
    if (s == "none") return SupervisedKind::None;
    if (s == "margin") return SupervisedKind::Margin;
    if (s == "margin_warp") return SupervisedKind::MarginWarp;
    if (s == "action") return SupervisedKind::Action;
    if (s == "action_warp") return SupervisedKind::ActionWarp;
    throw std::invalid_argument("unknown supervised-loss kind: " + s);
}

std::string kind_name(SupervisedKind k) {
    switch (k) {
        case SupervisedKind::None: return "none";
        case SupervisedKind::Margin: return "margin";
        case SupervisedKind::MarginWarp: return "margin_warp";
        case SupervisedKind::Action: return "action";
        case SupervisedKind::ActionWarp: return "action_warp";
    }
    return "none";
}

void LossConfig::validate() const {
    require(lambda1 >= 0.0 && lambda2 >= 0.0, "loss: lambdas must be >= 0");
    require(margin > 0.0, "loss.margin must be > 0");
}

std::vector<double> softmax(const std::vector<double>& q) {
    double m = *std::max_element(q.begin(), q.end());
    std::vector<double> p(q.size());
    double z = 0.0;
    for (size_t i = 0; i < q.size(); ++i) {
        p[i] = std::exp(q[i] - m);
        z += p[i];
    }
    for (double& x : p) x /= z;
    return p;
}

double td_double_q(const Batch& batch, const nn::QNetwork& net, const nn::QNetwork& target,
                   double gamma) {
    require(!batch.empty(), "td_double_q: empty batch");
    double sum = 0.0;
    std::vector<double> q_s, q2n, q2t;
    for (const BatchItem& it : batch) {
        net.forward(*it.s, q_s);
        net.forward(*it.next_s, q2n);
        target.forward(*it.next_s, q2t);
        const double delta = td_target(it, q2n, q2t, gamma) - q_s[it.action];
        sum += it.weight * delta * delta;
    }
    return sum / static_cast<double>(batch.size());
}

double margin_loss(const Batch& batch, const nn::QNetwork& net, double margin) {
    require(!batch.empty(), "margin_loss: empty batch");
    double sum = 0.0;
    std::vector<double> q;
    for (const BatchItem& it : batch) {
        require(it.expert_action >= 0, "margin_loss: transition lacks an expert action");
        net.forward(*it.s, q);
        double best = q[0] + (it.expert_action == 0 ? 0.0 : margin);
        for (int a = 1; a < static_cast<int>(q.size()); ++a)
            best = std::max(best, q[a] + (a == it.expert_action ? 0.0 : margin));
        sum += best - q[it.expert_action];
    }
    return sum / static_cast<double>(batch.size());
}

double action_supervision(const Batch& batch, const nn::QNetwork& net) {
    require(!batch.empty(), "action_supervision: empty batch");
    double sum = 0.0;
    std::vector<double> q;
    for (const BatchItem& it : batch) {
        require(it.expert_action >= 0, "action_supervision: transition lacks an expert action");
        net.forward(*it.s, q);
        // -log softmax(q)[aE] via the log-sum-exp form; the max-subtracted
        // difference goes first so the result is shift invariant
        const double m = *std::max_element(q.begin(), q.end());
        double z = 0.0;
        for (double v : q) z += std::exp(v - m);
        sum += (m - q[it.expert_action]) + std::log(z);
    }
    return sum / static_cast<double>(batch.size());
}

double l2_regularization(const nn::QNetwork& net) {
    double sum = 0.0;
    for (double p : net.params()) sum += p * p;
    return 0.5 * sum;
}

LossBreakdown total_loss(const Batch& batch, const nn::QNetwork& net, const nn::QNetwork& target,
                         double gamma, const LossConfig& cfg) {
    cfg.validate();
    LossBreakdown out;
    out.td = td_double_q(batch, net, target, gamma);
    if (cfg.kind != SupervisedKind::None) {
        Batch selected;
        for (const BatchItem& it : batch)
            if (supervised_selects(cfg, it)) selected.push_back(it);
        if (!selected.empty())
            out.supervised = is_margin(cfg.kind) ? margin_loss(selected, net, cfg.margin)
                                                 : action_supervision(selected, net);
    }
    out.l2 = l2_regularization(net);
    out.total = out.td + cfg.lambda1 * out.supervised + cfg.lambda2 * out.l2;
    return out;
}

GradResult total_loss_grad(const Batch& batch, const nn::QNetwork& net, const nn::QNetwork& target,
                           double gamma, const LossConfig& cfg, std::vector<double>& grad_out,
                           Workspace& ws, Exec exec) {
    require(!batch.empty(), "total_loss_grad: empty batch");
    cfg.validate();
    const int b = static_cast<int>(batch.size());
    const int n_actions = net.output_dim();

    ws.s_views.resize(b);
    ws.s2_views.resize(b);
    for (int i = 0; i < b; ++i) {
        ws.s_views[i] = batch[i].s;
        ws.s2_views[i] = batch[i].next_s;
    }
    nn::batch_forward_tape(net, ws.s_views, ws.tapes, ws.q_s, exec);
    nn::batch_forward(net, ws.s2_views, ws.q2_net, exec);
    nn::batch_forward(target, ws.s2_views, ws.q2_tgt, exec);

    GradResult res;
    res.td_errors.assign(b, 0.0);
    ws.dldq.assign(b, std::vector<double>(n_actions, 0.0));

    double td_sum = 0.0;
    for (int i = 0; i < b; ++i) {
        const BatchItem& it = batch[i];
        const double delta = td_target(it, ws.q2_net[i], ws.q2_tgt[i], gamma) - ws.q_s[i][it.action];
        td_sum += it.weight * delta * delta;
        ws.dldq[i][it.action] = -2.0 * it.weight * delta / static_cast<double>(b);
        res.td_errors[i] = std::abs(delta);
    }
    res.terms.td = td_sum / static_cast<double>(b);

    if (cfg.kind != SupervisedKind::None && cfg.lambda1 >= 0.0) {
        std::vector<int> selected;
        for (int i = 0; i < b; ++i)
            if (supervised_selects(cfg, batch[i])) selected.push_back(i);
        const double m_count = static_cast<double>(selected.size());
        double sup_sum = 0.0;
        for (int i : selected) {
            const BatchItem& it = batch[i];
            require(it.expert_action >= 0, "total_loss_grad: selected transition lacks annotation");
            const std::vector<double>& q = ws.q_s[i];
            if (is_margin(cfg.kind)) {
                int best = 0;
                double best_v = q[0] + (it.expert_action == 0 ? 0.0 : cfg.margin);
                for (int a = 1; a < n_actions; ++a) {
                    const double v = q[a] + (a == it.expert_action ? 0.0 : cfg.margin);
                    if (v > best_v) {
                        best_v = v;
                        best = a;
                    }
                }
                sup_sum += best_v - q[it.expert_action];
                ws.dldq[i][best] += cfg.lambda1 / m_count;
                ws.dldq[i][it.expert_action] -= cfg.lambda1 / m_count;
            } else {
                std::vector<double> p = softmax(q);
                sup_sum += -std::log(p[it.expert_action]);
                for (int a = 0; a < n_actions; ++a)
                    ws.dldq[i][a] += cfg.lambda1 * (p[a] - (a == it.expert_action ? 1.0 : 0.0)) / m_count;
            }
        }
        if (!selected.empty()) res.terms.supervised = sup_sum / m_count;
    }

    nn::batch_backward(net, ws.tapes, ws.dldq, grad_out, ws.scratch, exec);

    res.terms.l2 = l2_regularization(net);
    if (cfg.lambda2 > 0.0) {
        const std::vector<double>& p = net.params();
        for (size_t k = 0; k < p.size(); ++k) grad_out[k] += cfg.lambda2 * p[k];
    }
    res.terms.total = res.terms.td + cfg.lambda1 * res.terms.supervised + cfg.lambda2 * res.terms.l2;
    return res;
}

}  // namespace warprl::losses
