#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace cellcast {

/// Gate blocks inside every 4H-row weight matrix and bias, in this order.
enum Gate : std::size_t { gate_input = 0, gate_forget = 1, gate_cell = 2, gate_output = 3 };

/// Read-only view of one recurrent layer. Weight matrices are row-major
/// with 4 * hidden_size rows; row `gate * hidden_size + unit`.
struct LayerView {
    std::span<const double> input_weights;     // 4H x input_size
    std::span<const double> recurrent_weights; // 4H x H
    std::span<const double> bias;              // 4H
    std::size_t input_size = 0;
    std::size_t hidden_size = 0;
};

/// Every trainable value of the network in a single flat buffer: the
/// stacked LSTM layers followed by the mu head (H weights, 1 bias) and the
/// sigma head (H weights, 1 bias). Gradients use the same type.
class NetworkParams {
public:
    NetworkParams() = default;
    /// All-zero parameters.
    NetworkParams(std::size_t input_size, std::size_t hidden_size, std::size_t num_layers);

    std::size_t input_size() const { return input_size_; }
    std::size_t hidden_size() const { return hidden_size_; }
    std::size_t num_layers() const { return num_layers_; }
    std::size_t layer_input_size(std::size_t layer) const { return layer == 0 ? input_size_ : hidden_size_; }
    std::size_t size() const { return values_.size(); }

    LayerView layer(std::size_t l) const;
    std::span<double> input_weights(std::size_t l);
    std::span<double> recurrent_weights(std::size_t l);
    std::span<double> bias(std::size_t l);

    std::span<const double> mu_weights() const { return {values_.data() + head_offset_, hidden_size_}; }
    std::span<double> mu_weights() { return {values_.data() + head_offset_, hidden_size_}; }
    double mu_bias() const { return values_[head_offset_ + hidden_size_]; }
    double& mu_bias() { return values_[head_offset_ + hidden_size_]; }
    std::span<const double> sigma_weights() const { return {values_.data() + head_offset_ + hidden_size_ + 1, hidden_size_}; }
    std::span<double> sigma_weights() { return {values_.data() + head_offset_ + hidden_size_ + 1, hidden_size_}; }
    double sigma_bias() const { return values_[head_offset_ + 2 * hidden_size_ + 1]; }
    double& sigma_bias() { return values_[head_offset_ + 2 * hidden_size_ + 1]; }

    std::span<double> values() { return values_; }
    std::span<const double> values() const { return values_; }

    /// Whether `mask[k]` marks values_[k] as a bias (vs a weight).
    std::vector<bool> bias_mask() const;

    bool same_shape(const NetworkParams& other) const {
        return input_size_ == other.input_size_ && hidden_size_ == other.hidden_size_ &&
               num_layers_ == other.num_layers_;
    }
    bool operator==(const NetworkParams&) const = default;

private:
    std::size_t layer_offset(std::size_t l) const { return layer_offsets_[l]; }

    std::size_t input_size_ = 0;
    std::size_t hidden_size_ = 0;
    std::size_t num_layers_ = 0;
    std::vector<std::size_t> layer_offsets_;
    std::size_t head_offset_ = 0;
    std::vector<double> values_;
};

/// Per-layer hidden and cell vectors.
struct HiddenState {
    std::vector<std::vector<double>> h;
    std::vector<std::vector<double>> c;

    static HiddenState zeros(const NetworkParams& params);
    bool operator==(const HiddenState&) const = default;
};

struct CellOutput {
    std::vector<double> h;
    std::vector<double> c;
};

/// One LSTM step: i, f, o = sigmoid(.), g = tanh(.), c' = f*c + i*g,
/// h' = o * tanh(c'). Throws ValidationError on shape mismatch.
CellOutput lstm_cell(std::span<const double> input, std::span<const double> h, std::span<const double> c,
                     const LayerView& layer);

double sigmoid(double x);
/// log(1 + e^x), evaluated without overflow.
double softplus(double x);

namespace detail {

/// Raw kernel shared by inference and training. `gates` receives the four
/// activated gate blocks (4H), `c_out`, `tanh_c_out`, `h_out` H each.
void cell_forward(const LayerView& layer, const double* input, const double* h_prev, const double* c_prev,
                  double* gates, double* c_out, double* tanh_c_out, double* h_out);

} // namespace detail

} // namespace cellcast
