#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace cellcast {

struct AdamConfig {
    double learning_rate = 1e-3;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double epsilon = 1e-8;
};

/// Bias-corrected Adam over a flat parameter buffer.
class Adam {
public:
    Adam(std::size_t size, AdamConfig cfg);

    /// params -= lr * m_hat / (sqrt(v_hat) + eps)
    void step(std::span<double> params, std::span<const double> grad);
    std::uint64_t steps_taken() const { return t_; }

private:
    AdamConfig cfg_;
    std::vector<double> m_;
    std::vector<double> v_;
    std::uint64_t t_ = 0;
};

} // namespace cellcast
