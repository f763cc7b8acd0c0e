#pragma once

#include <cstddef>
#include <random>
#include <span>
#include <vector>

#include "tactile/matrix.hpp"

namespace tactile {

enum class OutputActivation { Identity, Tanh };

// Feedforward network: rectified-linear hidden layers, identity or tanh
// output. All parameters live in one contiguous vector; layer k occupies
// [weights (in x out, input-major) | bias (out)].
class Mlp {
 public:
  // Cached activations of one batched forward pass.
  struct Trace {
    std::vector<Matrix> activations;  // activations[0] = input, back() = output
    Matrix output_preactivation;
  };

  Mlp() = default;
  Mlp(std::vector<std::size_t> sizes, OutputActivation output);

  // Fan-in scaled uniform initialization (weights), zero biases.
  void initialize(std::mt19937_64& rng);

  std::size_t input_dim() const { return sizes_.front(); }
  std::size_t output_dim() const { return sizes_.back(); }
  std::size_t layer_count() const { return sizes_.size() - 1; }
  const std::vector<std::size_t>& sizes() const { return sizes_; }
  OutputActivation output_activation() const { return output_; }

  std::span<double> parameters() { return params_; }
  std::span<const double> parameters() const { return params_; }
  std::size_t parameter_count() const { return params_.size(); }

  std::span<const double> weights(std::size_t layer) const;
  std::span<const double> bias(std::size_t layer) const;
  std::span<double> weights(std::size_t layer);
  std::span<double> bias(std::size_t layer);
  std::size_t weight_offset(std::size_t layer) const { return offsets_[layer]; }

  Matrix forward(const Matrix& x) const;
  void forward(const Matrix& x, Trace& trace) const;

  // Backpropagates dL/d(output pre-activation). Accumulates parameter
  // gradients into `grad` (same layout as parameters(); pass an empty span to
  // skip them) and returns dL/dx.
  Matrix backward(const Trace& trace, const Matrix& grad_preactivation, std::span<double> grad) const;

  bool same_shape(const Mlp& other) const { return sizes_ == other.sizes_; }
  bool all_finite() const;

 private:
  std::vector<std::size_t> sizes_;
  OutputActivation output_ = OutputActivation::Identity;
  std::vector<double> params_;
  std::vector<std::size_t> offsets_;
};

// target <- (1 - tau) * target + tau * online, elementwise.
void soft_update(Mlp& target, const Mlp& online, double tau);

}  // namespace tactile
