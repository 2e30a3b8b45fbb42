#pragma once
#include <cstddef>
#include <span>
#include <vector>

#include "warprl/parallel.hpp"
#include "warprl/rng.hpp"

namespace warprl::nn {

/// Fully-connected action-value network: rectifier hidden layers, identity
/// output, double precision throughout. Parameters are stored flat,
/// layer-major (W0 row-major, b0, W1, b1, ...), so the optimizer and
/// checkpoints can treat them as one vector.
class QNetwork {
public:
    QNetwork() = default;

    /// All-zero parameters with the given layer widths [input, hidden..., output].
    explicit QNetwork(std::vector<int> dims);

    /// Weights uniform in (-1/sqrt(fan_in), +1/sqrt(fan_in)), biases zero.
    static QNetwork init_uniform(std::vector<int> dims, Rng& rng);

    const std::vector<int>& dims() const { return dims_; }
    int input_dim() const { return dims_.front(); }
    int output_dim() const { return dims_.back(); }
    int num_layers() const { return static_cast<int>(dims_.size()) - 1; }
    size_t param_count() const { return params_.size(); }

    std::vector<double>& params() { return params_; }
    const std::vector<double>& params() const { return params_; }

    /// Action values for one state. Pure function of (params, state).
    void forward(std::span<const double> state, std::vector<double>& q_out) const;
    std::vector<double> forward(std::span<const double> state) const;

    /// Activations recorded by forward_tape for use in backward_tape.
    /// act[0] is the input, act[l] the post-rectifier output of hidden layer l.
    struct Tape {
        std::vector<std::vector<double>> act;
    };

    void forward_tape(std::span<const double> state, Tape& tape, std::vector<double>& q_out) const;

    /// Backpropagate dL/dq through the taped forward pass, accumulating the
    /// parameter gradient into `grad` (same layout/size as params()).
    void backward_tape(const Tape& tape, std::span<const double> dldq, std::span<double> grad) const;

    bool params_finite() const;

private:
    std::vector<int> dims_;
    std::vector<double> params_;
    std::vector<size_t> layer_offset_;  // offset of W_l within params_

    void layer_forward(int l, std::span<const double> in, std::span<double> out) const;
};

/// Batch of state views (one pointer per sample).
using StateBatch = std::vector<const std::vector<double>*>;

/// Evaluate the network on a batch of states. The parallel path splits
/// samples across threads; outputs are bit-identical to the serial path.
void batch_forward(const QNetwork& net, const StateBatch& states,
                   std::vector<std::vector<double>>& q_out, Exec exec = Exec::Parallel);

void batch_forward_tape(const QNetwork& net, const StateBatch& states,
                        std::vector<QNetwork::Tape>& tapes,
                        std::vector<std::vector<double>>& q_out, Exec exec = Exec::Parallel);

/// Accumulate the summed parameter gradient of a batch into `grad_out`
/// (caller zeroes it). Per-sample gradients are computed independently
/// (parallel across samples) and reduced serially in sample order, so the
/// result does not depend on the thread count.
void batch_backward(const QNetwork& net, const std::vector<QNetwork::Tape>& tapes,
                    const std::vector<std::vector<double>>& dldq,
                    std::vector<double>& grad_out,
                    std::vector<std::vector<double>>& scratch, Exec exec = Exec::Parallel);

}  // namespace warprl::nn
