#pragma once
#include <string>
#include <vector>

#include "warprl/nn/qnet.hpp"
#include "warprl/parallel.hpp"

namespace warprl::losses {

/// Which supervised term the variant adds to the double-Q TD loss. The
/// warped kinds share the formula with their unwarped counterparts; they
/// differ only in which expert-action annotation the batch carries.
enum class SupervisedKind { None, Margin, MarginWarp, Action, ActionWarp };

SupervisedKind kind_from_name(const std::string& s);
std::string kind_name(SupervisedKind k);

struct LossConfig {
    double lambda1 = 1.0;   ///< supervised-loss weight
    double lambda2 = 1e-5;  ///< L2 weight
    double margin = 0.8;    ///< margin value of l(aE, a)
    SupervisedKind kind = SupervisedKind::None;
    /// Margin kinds supervise demonstration transitions only (the classic
    /// behavior) unless this is set, in which case they also supervise
    /// annotated self-generated transitions like the action kinds do.
    bool margin_supervises_agent_transitions = false;

    void validate() const;
};

/// One per-agent training sample: views into a stored joint transition.
struct BatchItem {
    const std::vector<double>* s = nullptr;
    const std::vector<double>* next_s = nullptr;
    int action = 0;
    double reward = 0.0;
    bool terminal = false;
    int expert_action = -1;  ///< -1 when unannotated
    bool is_demo = false;
    double weight = 1.0;  ///< importance-sampling weight, applied to the TD term
};
using Batch = std::vector<BatchItem>;

struct LossBreakdown {
    double td = 0.0;
    double supervised = 0.0;
    double l2 = 0.0;
    double total = 0.0;
};

/// 1-step double-Q TD loss: a_max from the online network, value from the
/// target network, y = r for terminal transitions. Mean over the batch,
/// weighted per item; targets are constants under differentiation.
double td_double_q(const Batch& batch, const nn::QNetwork& net, const nn::QNetwork& target,
                   double gamma);

/// Large-margin classification loss, mean over the batch. Every item must
/// carry an expert action.
double margin_loss(const Batch& batch, const nn::QNetwork& net, double margin);

/// Cross-entropy of the softmax of the action values against the expert
/// action, mean over the batch. Every item must carry an expert action.
double action_supervision(const Batch& batch, const nn::QNetwork& net);

/// 0.5 * sum of squared weights and biases.
double l2_regularization(const nn::QNetwork& net);

/// Weighted total per the variant's supervised kind. Margin kinds select
/// demonstration items (plus annotated agent items when configured); action
/// kinds select every annotated item. The supervised term is the mean over
/// the selected items, 0 when none are selected.
LossBreakdown total_loss(const Batch& batch, const nn::QNetwork& net, const nn::QNetwork& target,
                         double gamma, const LossConfig& cfg);

/// Scratch buffers reused across gradient evaluations.
struct Workspace {
    nn::StateBatch s_views, s2_views;
    std::vector<nn::QNetwork::Tape> tapes;
    std::vector<std::vector<double>> q_s, q2_net, q2_tgt, dldq, scratch;
};

struct GradResult {
    LossBreakdown terms;
    std::vector<double> td_errors;  ///< per-item |TD residual| for priority updates
};

/// Analytic gradient of total_loss with respect to the online network's
/// parameters, accumulated into grad_out (caller zeroes it).
GradResult total_loss_grad(const Batch& batch, const nn::QNetwork& net, const nn::QNetwork& target,
                           double gamma, const LossConfig& cfg, std::vector<double>& grad_out,
                           Workspace& ws, Exec exec = Exec::Parallel);

/// Stable softmax (max subtraction), exposed for tests.
std::vector<double> softmax(const std::vector<double>& q);

}  // namespace warprl::losses
