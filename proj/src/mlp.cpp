#include "tactile/mlp.hpp"

#include <cmath>

#include "tactile/errors.hpp"
#include "tactile/kernels.hpp"

namespace tactile {

Mlp::Mlp(std::vector<std::size_t> sizes, OutputActivation output)
    : sizes_(std::move(sizes)), output_(output) {
  if (sizes_.size() < 2) throw ConfigError("network needs at least an input and an output layer");
  std::size_t total = 0;
  for (std::size_t k = 0; k + 1 < sizes_.size(); ++k) {
    if (sizes_[k] == 0 || sizes_[k + 1] == 0) throw ConfigError("network layer sizes must be >= 1");
    offsets_.push_back(total);
    total += sizes_[k] * sizes_[k + 1] + sizes_[k + 1];
  }
  params_.assign(total, 0.0);
}

void Mlp::initialize(std::mt19937_64& rng) {
  for (std::size_t k = 0; k < layer_count(); ++k) {
    const double bound = 1.0 / std::sqrt(static_cast<double>(sizes_[k]));
    std::uniform_real_distribution<double> u(-bound, bound);
    for (double& w : weights(k)) w = u(rng);
    for (double& b : bias(k)) b = 0.0;
  }
}

std::span<const double> Mlp::weights(std::size_t k) const {
  return {params_.data() + offsets_[k], sizes_[k] * sizes_[k + 1]};
}
std::span<const double> Mlp::bias(std::size_t k) const {
  return {params_.data() + offsets_[k] + sizes_[k] * sizes_[k + 1], sizes_[k + 1]};
}
std::span<double> Mlp::weights(std::size_t k) {
  return {params_.data() + offsets_[k], sizes_[k] * sizes_[k + 1]};
}
std::span<double> Mlp::bias(std::size_t k) {
  return {params_.data() + offsets_[k] + sizes_[k] * sizes_[k + 1], sizes_[k + 1]};
}

void Mlp::forward(const Matrix& x, Trace& trace) const {
  if (x.cols() != input_dim()) throw UsageError("network input has wrong dimension");
  const std::size_t L = layer_count();
  trace.activations.resize(L + 1);
  trace.activations[0] = x;
  for (std::size_t k = 0; k < L; ++k) {
    Matrix& z = trace.activations[k + 1];
    kernels::parallel::dense_forward(trace.activations[k], weights(k), bias(k), z);
    if (k + 1 < L) {
      kernels::relu_inplace(z);
    } else {
      trace.output_preactivation = z;
      if (output_ == OutputActivation::Tanh) kernels::tanh_inplace(z);
    }
  }
}

Matrix Mlp::forward(const Matrix& x) const {
  Trace trace;
  forward(x, trace);
  return std::move(trace.activations.back());
}

Matrix Mlp::backward(const Trace& trace, const Matrix& grad_preactivation,
                     std::span<double> grad) const {
  const bool want_params = !grad.empty();
  if (want_params && grad.size() != params_.size())
    throw UsageError("gradient buffer has wrong size");
  const std::size_t L = layer_count();
  Matrix delta = grad_preactivation;
  Matrix next;
  for (std::size_t k = L; k-- > 0;) {
    const std::size_t off = offsets_[k];
    const std::size_t nw = sizes_[k] * sizes_[k + 1];
    if (want_params)
      kernels::parallel::dense_backward_params(trace.activations[k], delta, grad.subspan(off, nw),
                                               grad.subspan(off + nw, sizes_[k + 1]));
    kernels::parallel::dense_backward_input(delta, weights(k), next);
    if (k > 0) kernels::relu_backward_inplace(trace.activations[k], next);
    std::swap(delta, next);
  }
  return delta;
}

bool Mlp::all_finite() const {
  for (double v : params_)
    if (!std::isfinite(v)) return false;
  return true;
}

void soft_update(Mlp& target, const Mlp& online, double tau) {
  if (!target.same_shape(online)) throw UsageError("soft_update: network shapes differ");
  if (!(tau >= 0.0 && tau <= 1.0)) throw UsageError("soft_update: tau must be in [0, 1]");
  auto t = target.parameters();
  auto o = online.parameters();
  if (tau == 1.0) {
    std::copy(o.begin(), o.end(), t.begin());
    return;
  }
  for (std::size_t i = 0; i < t.size(); ++i) t[i] = (1.0 - tau) * t[i] + tau * o[i];
}

}  // namespace tactile
