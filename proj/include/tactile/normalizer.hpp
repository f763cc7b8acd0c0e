#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "tactile/matrix.hpp"

namespace tactile {

// Running per-dimension mean/std estimate. Statistics are frozen between
// update() calls, so normalize() is a pure function at use time.
class Normalizer {
 public:
  explicit Normalizer(std::size_t dim = 0, double clip = 5.0, double std_floor = 1e-2);

  void update(std::span<const double> sample);
  void update(const Matrix& samples);

  void normalize_inplace(std::span<double> x) const;
  std::vector<double> normalize(std::span<const double> x) const;
  Matrix normalize(const Matrix& x) const;

  std::size_t dim() const { return mean_.size(); }
  double count() const { return count_; }
  double clip() const { return clip_; }
  const std::vector<double>& mean() const { return mean_; }
  const std::vector<double>& stddev() const { return std_; }

  // Restores frozen statistics (checkpoint loading).
  void set_statistics(std::vector<double> mean, std::vector<double> stddev);

 private:
  void refresh();

  double clip_;
  double std_floor_;
  double count_ = 0.0;
  std::vector<double> sum_;
  std::vector<double> sumsq_;
  std::vector<double> mean_;
  std::vector<double> std_;
};

}  // namespace tactile
