#include "cellcast/lstm.hpp"

#include "cellcast/error.hpp"

#include <algorithm>
#include <cmath>

namespace cellcast {

NetworkParams::NetworkParams(std::size_t input_size, std::size_t hidden_size, std::size_t num_layers)
    : input_size_(input_size), hidden_size_(hidden_size), num_layers_(num_layers) {
    if (input_size == 0 || hidden_size == 0 || num_layers == 0) {
        throw ValidationError("network sizes must all be >= 1");
    }
    std::size_t offset = 0;
    for (std::size_t l = 0; l < num_layers; ++l) {
        layer_offsets_.push_back(offset);
        offset += 4 * hidden_size * (layer_input_size(l) + hidden_size + 1);
    }
    head_offset_ = offset;
    offset += 2 * (hidden_size + 1);
    values_.assign(offset, 0.0);
}

LayerView NetworkParams::layer(std::size_t l) const {
    const std::size_t in = layer_input_size(l);
    const std::size_t rows = 4 * hidden_size_;
    const double* base = values_.data() + layer_offset(l);
    return {{base, rows * in}, {base + rows * in, rows * hidden_size_}, {base + rows * (in + hidden_size_), rows},
            in, hidden_size_};
}

std::span<double> NetworkParams::input_weights(std::size_t l) {
    return {values_.data() + layer_offset(l), 4 * hidden_size_ * layer_input_size(l)};
}

std::span<double> NetworkParams::recurrent_weights(std::size_t l) {
    const std::size_t rows = 4 * hidden_size_;
    return {values_.data() + layer_offset(l) + rows * layer_input_size(l), rows * hidden_size_};
}

std::span<double> NetworkParams::bias(std::size_t l) {
    const std::size_t rows = 4 * hidden_size_;
    return {values_.data() + layer_offset(l) + rows * (layer_input_size(l) + hidden_size_), rows};
}

std::vector<bool> NetworkParams::bias_mask() const {
    std::vector<bool> mask(values_.size(), false);
    const std::size_t rows = 4 * hidden_size_;
    for (std::size_t l = 0; l < num_layers_; ++l) {
        const std::size_t start = layer_offset(l) + rows * (layer_input_size(l) + hidden_size_);
        for (std::size_t k = 0; k < rows; ++k) mask[start + k] = true;
    }
    mask[head_offset_ + hidden_size_] = true;
    mask[head_offset_ + 2 * hidden_size_ + 1] = true;
    return mask;
}

HiddenState HiddenState::zeros(const NetworkParams& params) {
    HiddenState s;
    s.h.assign(params.num_layers(), std::vector<double>(params.hidden_size(), 0.0));
    s.c.assign(params.num_layers(), std::vector<double>(params.hidden_size(), 0.0));
    return s;
}

double sigmoid(double x) {
    if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
    const double e = std::exp(x);
    return e / (1.0 + e);
}

double softplus(double x) {
    return std::max(x, 0.0) + std::log1p(std::exp(-std::abs(x)));
}

namespace detail {

void cell_forward(const LayerView& layer, const double* input, const double* h_prev, const double* c_prev,
                  double* gates, double* c_out, double* tanh_c_out, double* h_out) {
    const std::size_t in = layer.input_size;
    const std::size_t hidden = layer.hidden_size;
    const double* w_in = layer.input_weights.data();
    const double* w_rec = layer.recurrent_weights.data();
    for (std::size_t r = 0; r < 4 * hidden; ++r) {
        double acc = layer.bias[r];
        const double* wi = w_in + r * in;
        for (std::size_t j = 0; j < in; ++j) acc += wi[j] * input[j];
        const double* wr = w_rec + r * hidden;
        for (std::size_t j = 0; j < hidden; ++j) acc += wr[j] * h_prev[j];
        gates[r] = acc;
    }
    double* gi = gates;
    double* gf = gates + hidden;
    double* gg = gates + 2 * hidden;
    double* go = gates + 3 * hidden;
    for (std::size_t u = 0; u < hidden; ++u) {
        gi[u] = sigmoid(gi[u]);
        gf[u] = sigmoid(gf[u]);
        gg[u] = std::tanh(gg[u]);
        go[u] = sigmoid(go[u]);
        c_out[u] = gf[u] * c_prev[u] + gi[u] * gg[u];
        tanh_c_out[u] = std::tanh(c_out[u]);
        h_out[u] = go[u] * tanh_c_out[u];
    }
}

} // namespace detail

CellOutput lstm_cell(std::span<const double> input, std::span<const double> h, std::span<const double> c,
                     const LayerView& layer) {
    const std::size_t hidden = layer.hidden_size;
    if (input.size() != layer.input_size || h.size() != hidden || c.size() != hidden ||
        layer.input_weights.size() != 4 * hidden * layer.input_size ||
        layer.recurrent_weights.size() != 4 * hidden * hidden || layer.bias.size() != 4 * hidden) {
        throw ValidationError("lstm_cell: shape mismatch");
    }
    std::vector<double> gates(4 * hidden);
    std::vector<double> tanh_c(hidden);
    CellOutput out{std::vector<double>(hidden), std::vector<double>(hidden)};
    detail::cell_forward(layer, input.data(), h.data(), c.data(), gates.data(), out.c.data(), tanh_c.data(),
                         out.h.data());
    return out;
}

} // namespace cellcast
