#pragma once

#include "cellcast/lstm.hpp"
#include "cellcast/matrix.hpp"

#include <span>
#include <vector>

namespace cellcast {

/// Gaussian likelihood parameters on the scaled target.
struct LikelihoodParams {
    double mu = 0.0;
    double sigma = 1.0;
    bool operator==(const LikelihoodParams&) const = default;
};

/// -log N(z / scale | mu, sigma^2). Throws on sigma <= 0, scale <= 0 or
/// non-finite operands.
double gaussian_nll(double z, const LikelihoodParams& theta, double scale);

/// nu = 1 + mean(conditioning). Throws on empty input.
double series_scale(std::span<const double> conditioning);

/// Likelihood head applied to the top hidden vector:
/// mu = w_mu . h + b_mu, sigma = softplus(w_sigma . h + b_sigma) + sigma_floor.
LikelihoodParams likelihood_head(const NetworkParams& params, std::span<const double> top_hidden,
                                 double sigma_floor);

/// Advances `state` by one step on network input `input` (size
/// params.input_size()) and returns the likelihood parameters.
LikelihoodParams network_step(const NetworkParams& params, HiddenState& state, std::span<const double> input,
                              double sigma_floor);

struct WindowOutput {
    std::vector<LikelihoodParams> theta;
    HiddenState final_state;
};

/// Teacher-forced pass from the all-zero state. At step t the network input
/// is [lagged[t] / scale, covariates.row(t)].
WindowOutput forward_window(std::span<const double> lagged, MatrixView covariates, const NetworkParams& params,
                            double scale, double sigma_floor);

struct LossAndGrad {
    double loss = 0.0;
    NetworkParams grad;
};

/// Mean gaussian_nll of `targets` over the window and its exact gradient by
/// backpropagation through time.
LossAndGrad window_loss_and_grad(std::span<const double> lagged, std::span<const double> targets,
                                 MatrixView covariates, const NetworkParams& params, double scale,
                                 double sigma_floor);

/// Loss only; same arithmetic as window_loss_and_grad.
double window_loss(std::span<const double> lagged, std::span<const double> targets, MatrixView covariates,
                   const NetworkParams& params, double scale, double sigma_floor);

} // namespace cellcast
