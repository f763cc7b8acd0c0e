#include "tactile/curves.hpp"

#include <glob.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <ostream>
#include <regex>
#include <sstream>

#include "tactile/errors.hpp"

namespace tactile {

Curve aggregate_curve(const std::string& label, const std::vector<std::vector<MetricsRow>>& runs) {
  std::map<int, std::vector<double>> by_epoch;
  for (const auto& run : runs)
    for (const MetricsRow& r : run) by_epoch[r.epoch].push_back(r.eval_success);
  Curve curve{label, {}};
  for (const auto& [epoch, values] : by_epoch) {
    const double n = static_cast<double>(values.size());
    double mean = 0.0;
    for (double v : values) mean += v;
    mean /= n;
    double half = 0.0;
    if (values.size() > 1) {
      double ss = 0.0;
      for (double v : values) ss += (v - mean) * (v - mean);
      half = 1.96 * std::sqrt(ss / (n - 1.0)) / std::sqrt(n);
    }
    curve.points.push_back({epoch, mean, half, static_cast<int>(values.size())});
  }
  return curve;
}

std::string group_label(const std::filesystem::path& metrics_file) {
  const std::string dir = metrics_file.parent_path().filename().string();
  static const std::regex seed_suffix("-seed[0-9]+$");
  const std::string label = std::regex_replace(dir, seed_suffix, "");
  return label.empty() ? metrics_file.stem().string() : label;
}

std::vector<std::filesystem::path> expand_glob(const std::string& pattern) {
  glob_t g{};
  std::vector<std::filesystem::path> out;
  if (::glob(pattern.c_str(), 0, nullptr, &g) == 0)
    for (std::size_t i = 0; i < g.gl_pathc; ++i) out.emplace_back(g.gl_pathv[i]);
  globfree(&g);
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<Curve> aggregate_files(const std::vector<std::filesystem::path>& files) {
  std::map<std::string, std::vector<std::vector<MetricsRow>>> groups;
  for (const auto& f : files) groups[group_label(f)].push_back(read_metrics_csv(f));
  std::vector<Curve> curves;
  for (const auto& [label, runs] : groups) curves.push_back(aggregate_curve(label, runs));
  return curves;
}

void write_curves_csv(std::ostream& out, const std::vector<Curve>& curves) {
  out << "label,epoch,mean,ci_low,ci_high,half_width,seeds\n";
  char buf[256];
  for (const Curve& c : curves) {
    for (const CurvePoint& p : c.points) {
      std::snprintf(buf, sizeof buf, ",%d,%.6f,%.6f,%.6f,%.6f,%d\n", p.epoch, p.mean,
                    p.mean - p.half_width, p.mean + p.half_width, p.half_width, p.seeds);
      out << c.label << buf;
    }
  }
}

namespace {

std::string xml_escape(const std::string& s) {
  std::string out;
  for (char ch : s) {
    switch (ch) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      case '\'': out += "&apos;"; break;
      default: out += ch;
    }
  }
  return out;
}

constexpr const char* kPalette[] = {"#d62728", "#ff7f0e", "#8c564b", "#17becf",
                                    "#1f77b4", "#9467bd", "#7f7f7f", "#2ca02c"};

}  // namespace

std::string render_svg(const std::vector<Curve>& curves, const std::string& title) {
  constexpr double W = 720, H = 440, left = 60, right = 180, top = 40, bottom = 50;
  const double pw = W - left - right, ph = H - top - bottom;
  int max_epoch = 1;
  for (const Curve& c : curves)
    for (const CurvePoint& p : c.points) max_epoch = std::max(max_epoch, p.epoch);
  auto sx = [&](double e) { return left + pw * e / max_epoch; };
  auto sy = [&](double v) { return top + ph * (1.0 - std::clamp(v, 0.0, 1.0)); };
  auto num = [](double v) {
    char b[32];
    std::snprintf(b, sizeof b, "%.2f", v);
    return std::string(b);
  };

  std::ostringstream s;
  s << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
    << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H
    << "\" viewBox=\"0 0 " << W << ' ' << H << "\">\n"
    << "<title>" << xml_escape(title) << "</title>\n"
    << "<rect x=\"0\" y=\"0\" width=\"" << W << "\" height=\"" << H << "\" fill=\"white\"/>\n"
    << "<text x=\"" << W / 2 << "\" y=\"24\" text-anchor=\"middle\" font-family=\"sans-serif\" "
       "font-size=\"15\">" << xml_escape(title) << "</text>\n";
  // Axes and grid.
  s << "<g stroke=\"#cccccc\" stroke-width=\"1\">\n";
  for (int k = 0; k <= 4; ++k) {
    const double y = sy(k / 4.0);
    s << "<line x1=\"" << left << "\" y1=\"" << num(y) << "\" x2=\"" << left + pw << "\" y2=\"" << num(y)
      << "\"/>\n";
  }
  s << "</g>\n<g font-family=\"sans-serif\" font-size=\"11\">\n";
  for (int k = 0; k <= 4; ++k)
    s << "<text x=\"" << left - 8 << "\" y=\"" << num(sy(k / 4.0) + 4) << "\" text-anchor=\"end\">"
      << num(k / 4.0) << "</text>\n";
  for (int k = 0; k <= 5; ++k) {
    const double e = max_epoch * k / 5.0;
    s << "<text x=\"" << num(sx(e)) << "\" y=\"" << top + ph + 18 << "\" text-anchor=\"middle\">"
      << static_cast<int>(std::round(e)) << "</text>\n";
  }
  s << "<text x=\"" << left + pw / 2 << "\" y=\"" << H - 12
    << "\" text-anchor=\"middle\">epoch</text>\n"
    << "<text x=\"16\" y=\"" << top + ph / 2 << "\" text-anchor=\"middle\" transform=\"rotate(-90 16 "
    << top + ph / 2 << ")\">eval success rate</text>\n</g>\n";
  s << "<rect x=\"" << left << "\" y=\"" << top << "\" width=\"" << pw << "\" height=\"" << ph
    << "\" fill=\"none\" stroke=\"black\"/>\n";

  for (std::size_t i = 0; i < curves.size(); ++i) {
    const Curve& c = curves[i];
    const char* color = kPalette[i % std::size(kPalette)];
    std::ostringstream band, line, data;
    for (const CurvePoint& p : c.points) band << num(sx(p.epoch)) << ',' << num(sy(p.mean + p.half_width)) << ' ';
    for (auto it = c.points.rbegin(); it != c.points.rend(); ++it)
      band << num(sx(it->epoch)) << ',' << num(sy(it->mean - it->half_width)) << ' ';
    for (const CurvePoint& p : c.points) {
      line << num(sx(p.epoch)) << ',' << num(sy(p.mean)) << ' ';
      char b[96];
      std::snprintf(b, sizeof b, "%d:%.6f:%.6f;", p.epoch, p.mean, p.half_width);
      data << b;
    }
    s << "<g class=\"series\" data-label=\"" << xml_escape(c.label) << "\" data-points=\""
      << data.str() << "\">\n"
      << "<polygon points=\"" << band.str() << "\" fill=\"" << color
      << "\" fill-opacity=\"0.2\" stroke=\"none\"/>\n"
      << "<polyline points=\"" << line.str() << "\" fill=\"none\" stroke=\"" << color
      << "\" stroke-width=\"2\"/>\n"
      << "<text x=\"" << left + pw + 12 << "\" y=\"" << top + 16 + 18 * static_cast<double>(i)
      << "\" font-family=\"sans-serif\" font-size=\"12\" fill=\"" << color << "\">"
      << xml_escape(c.label) << "</text>\n</g>\n";
  }
  s << "</svg>\n";
  return s.str();
}

}  // namespace tactile
