#pragma once

#include <span>
#include <string_view>
#include <vector>

namespace tactile {

enum class OptimizerKind { Sgd, Adam };

std::string_view to_string(OptimizerKind kind);
OptimizerKind parse_optimizer(std::string_view name);

// First-order minimizer over a flat parameter vector.
class Optimizer {
 public:
  Optimizer(OptimizerKind kind, double lr, std::size_t size);

  // params -= update(grad)
  void step(std::span<double> params, std::span<const double> grad);

  OptimizerKind kind() const { return kind_; }
  double learning_rate() const { return lr_; }

 private:
  OptimizerKind kind_;
  double lr_;
  double beta1_ = 0.9;
  double beta2_ = 0.999;
  double eps_ = 1e-8;
  long steps_ = 0;
  std::vector<double> m_;
  std::vector<double> v_;
};

}  // namespace tactile
