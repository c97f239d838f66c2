#include "cellcast/network.hpp"

#include "cellcast/error.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace cellcast {

namespace {

void check_window(std::span<const double> lagged, MatrixView covariates, const NetworkParams& params,
                  double scale) {
    if (covariates.rows != lagged.size()) throw ValidationError("covariate rows must match window length");
    if (covariates.cols + 1 != params.input_size()) {
        throw ValidationError("network input size " + std::to_string(params.input_size()) + " does not match 1 + " +
                              std::to_string(covariates.cols) + " covariate channels");
    }
    if (!(scale > 0.0) || !std::isfinite(scale)) throw ValidationError("scale must be finite and > 0");
    for (double v : lagged) {
        if (!std::isfinite(v)) throw ValidationError("non-finite lagged target in window");
    }
    for (double v : covariates.data) {
        if (!std::isfinite(v)) throw ValidationError("non-finite covariate in window");
    }
}

void fill_input(std::vector<double>& input, double lagged, MatrixView covariates, std::size_t t, double scale) {
    input[0] = lagged / scale;
    for (std::size_t k = 0; k < covariates.cols; ++k) input[k + 1] = covariates(t, k);
}

double dot(const double* a, const double* b, std::size_t n) {
    double acc = 0.0;
    for (std::size_t j = 0; j < n; ++j) acc += a[j] * b[j];
    return acc;
}

double nll_scaled(double y, double mu, double sigma) {
    const double d = y - mu;
    return 0.5 * std::log(2.0 * std::numbers::pi * sigma * sigma) + d * d / (2.0 * sigma * sigma);
}

// Activations recorded by the forward pass, one block per (layer, step).
struct Trace {
    std::size_t steps = 0;
    std::size_t hidden = 0;
    std::vector<std::vector<double>> inputs; // per layer: steps x layer_input
    std::vector<std::vector<double>> gates;  // per layer: steps x 4H
    std::vector<std::vector<double>> c;      // per layer: (steps + 1) x H, row 0 is the zero state
    std::vector<std::vector<double>> tanh_c; // per layer: steps x H
    std::vector<std::vector<double>> h;      // per layer: (steps + 1) x H, row 0 is the zero state
    std::vector<double> pre_sigma;
    std::vector<LikelihoodParams> theta;
};

Trace run_forward(std::span<const double> lagged, MatrixView covariates, const NetworkParams& params, double scale,
                  double sigma_floor) {
    const std::size_t steps = lagged.size();
    const std::size_t hidden = params.hidden_size();
    const std::size_t layers = params.num_layers();
    Trace tr;
    tr.steps = steps;
    tr.hidden = hidden;
    tr.inputs.resize(layers);
    tr.gates.resize(layers);
    tr.c.resize(layers);
    tr.tanh_c.resize(layers);
    tr.h.resize(layers);
    for (std::size_t l = 0; l < layers; ++l) {
        tr.inputs[l].assign(steps * params.layer_input_size(l), 0.0);
        tr.gates[l].assign(steps * 4 * hidden, 0.0);
        tr.c[l].assign((steps + 1) * hidden, 0.0);
        tr.tanh_c[l].assign(steps * hidden, 0.0);
        tr.h[l].assign((steps + 1) * hidden, 0.0);
    }
    tr.pre_sigma.resize(steps);
    tr.theta.resize(steps);

    std::vector<double> net_input(params.input_size());
    for (std::size_t t = 0; t < steps; ++t) {
        fill_input(net_input, lagged[t], covariates, t, scale);
        for (std::size_t l = 0; l < layers; ++l) {
            const std::size_t in = params.layer_input_size(l);
            double* x = tr.inputs[l].data() + t * in;
            if (l == 0) {
                std::copy(net_input.begin(), net_input.end(), x);
            } else {
                const double* below = tr.h[l - 1].data() + (t + 1) * hidden;
                std::copy(below, below + hidden, x);
            }
            detail::cell_forward(params.layer(l), x, tr.h[l].data() + t * hidden, tr.c[l].data() + t * hidden,
                                 tr.gates[l].data() + t * 4 * hidden, tr.c[l].data() + (t + 1) * hidden,
                                 tr.tanh_c[l].data() + t * hidden, tr.h[l].data() + (t + 1) * hidden);
        }
        const double* top = tr.h[layers - 1].data() + (t + 1) * hidden;
        const double mu = dot(params.mu_weights().data(), top, hidden) + params.mu_bias();
        const double pre = dot(params.sigma_weights().data(), top, hidden) + params.sigma_bias();
        tr.pre_sigma[t] = pre;
        tr.theta[t] = {mu, softplus(pre) + sigma_floor};
    }
    return tr;
}

double mean_loss(const Trace& tr, std::span<const double> targets, double scale) {
    double total = 0.0;
    for (std::size_t t = 0; t < tr.steps; ++t) total += nll_scaled(targets[t] / scale, tr.theta[t].mu, tr.theta[t].sigma);
    return total / static_cast<double>(tr.steps);
}

} // namespace

double gaussian_nll(double z, const LikelihoodParams& theta, double scale) {
    if (!(theta.sigma > 0.0)) throw ValidationError("gaussian_nll: sigma must be > 0");
    if (!(scale > 0.0)) throw ValidationError("gaussian_nll: scale must be > 0");
    if (!std::isfinite(z) || !std::isfinite(theta.mu) || !std::isfinite(theta.sigma) || !std::isfinite(scale)) {
        throw ValidationError("gaussian_nll: non-finite operand");
    }
    return nll_scaled(z / scale, theta.mu, theta.sigma);
}

double series_scale(std::span<const double> conditioning) {
    if (conditioning.empty()) throw ValidationError("series_scale: empty conditioning range");
    double sum = 0.0;
    for (double v : conditioning) sum += v;
    return 1.0 + sum / static_cast<double>(conditioning.size());
}

LikelihoodParams likelihood_head(const NetworkParams& params, std::span<const double> top_hidden,
                                 double sigma_floor) {
    const std::size_t hidden = params.hidden_size();
    const double mu = dot(params.mu_weights().data(), top_hidden.data(), hidden) + params.mu_bias();
    const double pre = dot(params.sigma_weights().data(), top_hidden.data(), hidden) + params.sigma_bias();
    return {mu, softplus(pre) + sigma_floor};
}

LikelihoodParams network_step(const NetworkParams& params, HiddenState& state, std::span<const double> input,
                              double sigma_floor) {
    if (input.size() != params.input_size()) throw ValidationError("network_step: input size mismatch");
    const std::size_t hidden = params.hidden_size();
    std::vector<double> gates(4 * hidden);
    std::vector<double> tanh_c(hidden);
    std::vector<double> h_new(hidden);
    std::vector<double> c_new(hidden);
    std::vector<double> x(input.begin(), input.end());
    for (std::size_t l = 0; l < params.num_layers(); ++l) {
        detail::cell_forward(params.layer(l), x.data(), state.h[l].data(), state.c[l].data(), gates.data(),
                             c_new.data(), tanh_c.data(), h_new.data());
        state.h[l] = h_new;
        state.c[l] = c_new;
        x = h_new;
    }
    return likelihood_head(params, state.h.back(), sigma_floor);
}

WindowOutput forward_window(std::span<const double> lagged, MatrixView covariates, const NetworkParams& params,
                            double scale, double sigma_floor) {
    check_window(lagged, covariates, params, scale);
    WindowOutput out;
    out.final_state = HiddenState::zeros(params);
    out.theta.reserve(lagged.size());
    std::vector<double> input(params.input_size());
    for (std::size_t t = 0; t < lagged.size(); ++t) {
        fill_input(input, lagged[t], covariates, t, scale);
        out.theta.push_back(network_step(params, out.final_state, input, sigma_floor));
    }
    return out;
}

double window_loss(std::span<const double> lagged, std::span<const double> targets, MatrixView covariates,
                   const NetworkParams& params, double scale, double sigma_floor) {
    check_window(lagged, covariates, params, scale);
    if (targets.size() != lagged.size() || targets.empty()) throw ValidationError("targets must match window length");
    const Trace tr = run_forward(lagged, covariates, params, scale, sigma_floor);
    return mean_loss(tr, targets, scale);
}

LossAndGrad window_loss_and_grad(std::span<const double> lagged, std::span<const double> targets,
                                 MatrixView covariates, const NetworkParams& params, double scale,
                                 double sigma_floor) {
    check_window(lagged, covariates, params, scale);
    if (targets.size() != lagged.size() || targets.empty()) throw ValidationError("targets must match window length");

    const Trace tr = run_forward(lagged, covariates, params, scale, sigma_floor);
    const std::size_t steps = tr.steps;
    const std::size_t hidden = params.hidden_size();
    const std::size_t layers = params.num_layers();
    const double inv_steps = 1.0 / static_cast<double>(steps);

    LossAndGrad result{mean_loss(tr, targets, scale),
                       NetworkParams(params.input_size(), hidden, layers)};
    NetworkParams& grad = result.grad;

    // dh_next[l] / dc_next[l]: gradient arriving from step t + 1.
    std::vector<std::vector<double>> dh_next(layers, std::vector<double>(hidden, 0.0));
    std::vector<std::vector<double>> dc_next(layers, std::vector<double>(hidden, 0.0));
    std::vector<double> dh(hidden);
    std::vector<double> dpre(4 * hidden);
    std::vector<double> dx(std::max(params.input_size(), hidden));

    for (std::size_t t = steps; t-- > 0;) {
        // Likelihood head.
        const double* top = tr.h[layers - 1].data() + (t + 1) * hidden;
        const double y = targets[t] / scale;
        const auto [mu, sigma] = tr.theta[t];
        const double diff = y - mu;
        const double d_mu = -diff / (sigma * sigma) * inv_steps;
        const double d_sigma = (1.0 / sigma - diff * diff / (sigma * sigma * sigma)) * inv_steps;
        const double d_pre_sigma = d_sigma * sigmoid(tr.pre_sigma[t]);

        auto g_mu_w = grad.mu_weights();
        auto g_sigma_w = grad.sigma_weights();
        const auto mu_w = params.mu_weights();
        const auto sigma_w = params.sigma_weights();
        for (std::size_t u = 0; u < hidden; ++u) {
            g_mu_w[u] += d_mu * top[u];
            g_sigma_w[u] += d_pre_sigma * top[u];
            dh[u] = d_mu * mu_w[u] + d_pre_sigma * sigma_w[u];
        }
        grad.mu_bias() += d_mu;
        grad.sigma_bias() += d_pre_sigma;

        for (std::size_t l = layers; l-- > 0;) {
            const LayerView lv = params.layer(l);
            const std::size_t in = lv.input_size;
            const double* gates = tr.gates[l].data() + t * 4 * hidden;
            const double* gi = gates;
            const double* gf = gates + hidden;
            const double* gg = gates + 2 * hidden;
            const double* go = gates + 3 * hidden;
            const double* c_prev = tr.c[l].data() + t * hidden;
            const double* tc = tr.tanh_c[l].data() + t * hidden;
            const double* h_prev = tr.h[l].data() + t * hidden;
            const double* x = tr.inputs[l].data() + t * in;

            for (std::size_t u = 0; u < hidden; ++u) {
                const double dh_total = dh[u] + dh_next[l][u];
                const double d_o = dh_total * tc[u];
                const double dc = dc_next[l][u] + dh_total * go[u] * (1.0 - tc[u] * tc[u]);
                const double d_i = dc * gg[u];
                const double d_g = dc * gi[u];
                const double d_f = dc * c_prev[u];
                dc_next[l][u] = dc * gf[u];
                dpre[gate_input * hidden + u] = d_i * gi[u] * (1.0 - gi[u]);
                dpre[gate_forget * hidden + u] = d_f * gf[u] * (1.0 - gf[u]);
                dpre[gate_cell * hidden + u] = d_g * (1.0 - gg[u] * gg[u]);
                dpre[gate_output * hidden + u] = d_o * go[u] * (1.0 - go[u]);
            }

            auto g_win = grad.input_weights(l);
            auto g_wrec = grad.recurrent_weights(l);
            auto g_b = grad.bias(l);
            std::fill(dx.begin(), dx.begin() + static_cast<std::ptrdiff_t>(in), 0.0);
            std::fill(dh_next[l].begin(), dh_next[l].end(), 0.0);
            for (std::size_t r = 0; r < 4 * hidden; ++r) {
                const double d = dpre[r];
                g_b[r] += d;
                double* gw = g_win.data() + r * in;
                const double* w = lv.input_weights.data() + r * in;
                for (std::size_t j = 0; j < in; ++j) {
                    gw[j] += d * x[j];
                    dx[j] += d * w[j];
                }
                double* gr = g_wrec.data() + r * hidden;
                const double* wr = lv.recurrent_weights.data() + r * hidden;
                for (std::size_t j = 0; j < hidden; ++j) {
                    gr[j] += d * h_prev[j];
                    dh_next[l][j] += d * wr[j];
                }
            }
            // Gradient flowing into the layer below at this step.
            if (l > 0) std::copy(dx.begin(), dx.begin() + static_cast<std::ptrdiff_t>(hidden), dh.begin());
        }
    }
    return result;
}

} // namespace cellcast
