#include "tactile/normalizer.hpp"

#include <algorithm>
#include <cmath>

#include "tactile/errors.hpp"

namespace tactile {

Normalizer::Normalizer(std::size_t dim, double clip, double std_floor)
    : clip_(clip), std_floor_(std_floor), sum_(dim, 0.0), sumsq_(dim, 0.0), mean_(dim, 0.0),
      std_(dim, 1.0) {
  if (!(clip > 0.0)) throw ConfigError("normalizer.clip: must be > 0");
  if (!(std_floor > 0.0)) throw ConfigError("normalizer.std_floor: must be > 0");
}

void Normalizer::update(std::span<const double> sample) {
  if (sample.size() != dim()) throw UsageError("normalizer sample has wrong dimension");
  for (std::size_t i = 0; i < dim(); ++i) {
    sum_[i] += sample[i];
    sumsq_[i] += sample[i] * sample[i];
  }
  count_ += 1.0;
  refresh();
}

void Normalizer::update(const Matrix& samples) {
  if (samples.cols() != dim()) throw UsageError("normalizer sample has wrong dimension");
  for (std::size_t r = 0; r < samples.rows(); ++r) {
    auto row = samples.row(r);
    for (std::size_t i = 0; i < dim(); ++i) {
      sum_[i] += row[i];
      sumsq_[i] += row[i] * row[i];
    }
  }
  count_ += static_cast<double>(samples.rows());
  refresh();
}

void Normalizer::refresh() {
  if (count_ == 0.0) return;
  for (std::size_t i = 0; i < dim(); ++i) {
    mean_[i] = sum_[i] / count_;
    const double var = std::max(0.0, sumsq_[i] / count_ - mean_[i] * mean_[i]);
    std_[i] = std::max(std_floor_, std::sqrt(var));
  }
}

void Normalizer::normalize_inplace(std::span<double> x) const {
  if (x.size() != dim()) throw UsageError("normalizer input has wrong dimension");
  for (std::size_t i = 0; i < dim(); ++i)
    x[i] = std::clamp((x[i] - mean_[i]) / std_[i], -clip_, clip_);
}

std::vector<double> Normalizer::normalize(std::span<const double> x) const {
  std::vector<double> out(x.begin(), x.end());
  normalize_inplace(out);
  return out;
}

Matrix Normalizer::normalize(const Matrix& x) const {
  Matrix out = x;
  for (std::size_t r = 0; r < out.rows(); ++r) normalize_inplace(out.row(r));
  return out;
}

void Normalizer::set_statistics(std::vector<double> mean, std::vector<double> stddev) {
  if (mean.size() != dim() || stddev.size() != dim())
    throw DataError("normalizer statistics have wrong dimension");
  mean_ = std::move(mean);
  std_ = std::move(stddev);
}

}  // namespace tactile
