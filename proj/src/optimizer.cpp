#include "tactile/optimizer.hpp"

#include <cmath>
#include <string>

#include "tactile/errors.hpp"

namespace tactile {

std::string_view to_string(OptimizerKind kind) { return kind == OptimizerKind::Sgd ? "sgd" : "adam"; }

OptimizerKind parse_optimizer(std::string_view name) {
  if (name == "sgd") return OptimizerKind::Sgd;
  if (name == "adam") return OptimizerKind::Adam;
  throw ConfigError("unknown optimizer '" + std::string(name) + "' (expected sgd or adam)");
}

Optimizer::Optimizer(OptimizerKind kind, double lr, std::size_t size) : kind_(kind), lr_(lr) {
  if (!(lr > 0.0)) throw ConfigError("learning rate must be > 0");
  if (kind_ == OptimizerKind::Adam) {
    m_.assign(size, 0.0);
    v_.assign(size, 0.0);
  }
}

void Optimizer::step(std::span<double> params, std::span<const double> grad) {
  if (params.size() != grad.size()) throw UsageError("optimizer: gradient size mismatch");
  if (kind_ == OptimizerKind::Sgd) {
    for (std::size_t i = 0; i < params.size(); ++i) params[i] -= lr_ * grad[i];
    return;
  }
  if (m_.size() != params.size()) throw UsageError("optimizer: parameter size changed");
  ++steps_;
  const double c1 = 1.0 - std::pow(beta1_, static_cast<double>(steps_));
  const double c2 = 1.0 - std::pow(beta2_, static_cast<double>(steps_));
  const double step = lr_ * std::sqrt(c2) / c1;
  for (std::size_t i = 0; i < params.size(); ++i) {
    m_[i] = beta1_ * m_[i] + (1.0 - beta1_) * grad[i];
    v_[i] = beta2_ * v_[i] + (1.0 - beta2_) * grad[i] * grad[i];
    params[i] -= step * m_[i] / (std::sqrt(v_[i]) + eps_);
  }
}

}  // namespace tactile
