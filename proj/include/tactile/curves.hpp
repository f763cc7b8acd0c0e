#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "tactile/trainer.hpp"

namespace tactile {

// Mean eval success across seeds with a normal-approximation 95% band:
// half_width = 1.96 * s / sqrt(n), s the sample standard deviation (n - 1
// denominator); zero for a single seed.
struct CurvePoint {
  int epoch = 0;
  double mean = 0.0;
  double half_width = 0.0;
  int seeds = 0;
};

struct Curve {
  std::string label;
  std::vector<CurvePoint> points;
};

Curve aggregate_curve(const std::string& label, const std::vector<std::vector<MetricsRow>>& runs);

// Group key of a run directory: its name with the trailing "-seed<k>" removed.
std::string group_label(const std::filesystem::path& metrics_file);

// Expands a shell glob; results sorted.
std::vector<std::filesystem::path> expand_glob(const std::string& pattern);

// Groups metrics files by label and aggregates each group. Labels sorted.
std::vector<Curve> aggregate_files(const std::vector<std::filesystem::path>& files);

// Columns: label,epoch,mean,ci_low,ci_high,half_width,seeds
void write_curves_csv(std::ostream& out, const std::vector<Curve>& curves);
std::string render_svg(const std::vector<Curve>& curves, const std::string& title);

}  // namespace tactile
