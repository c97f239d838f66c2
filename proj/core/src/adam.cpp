#include "cellcast/adam.hpp"

#include "cellcast/error.hpp"

#include <cmath>

namespace cellcast {

Adam::Adam(std::size_t size, AdamConfig cfg) : cfg_(cfg), m_(size, 0.0), v_(size, 0.0) {
    if (!(cfg.learning_rate > 0.0)) throw ValidationError("learning rate must be > 0");
}

void Adam::step(std::span<double> params, std::span<const double> grad) {
    if (params.size() != m_.size() || grad.size() != m_.size()) throw ValidationError("Adam: size mismatch");
    ++t_;
    const double correction1 = 1.0 - std::pow(cfg_.beta1, static_cast<double>(t_));
    const double correction2 = 1.0 - std::pow(cfg_.beta2, static_cast<double>(t_));
    for (std::size_t k = 0; k < params.size(); ++k) {
        m_[k] = cfg_.beta1 * m_[k] + (1.0 - cfg_.beta1) * grad[k];
        v_[k] = cfg_.beta2 * v_[k] + (1.0 - cfg_.beta2) * grad[k] * grad[k];
        const double m_hat = m_[k] / correction1;
        const double v_hat = v_[k] / correction2;
        params[k] -= cfg_.learning_rate * m_hat / (std::sqrt(v_hat) + cfg_.epsilon);
    }
}

} // namespace cellcast
