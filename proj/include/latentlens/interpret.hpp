#ifndef LATENTLENS_INTERPRET_HPP
#define LATENTLENS_INTERPRET_HPP

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "latentlens/acoustics.hpp"
#include "latentlens/errors.hpp"
#include "latentlens/format.hpp"
#include "latentlens/projection.hpp"

namespace latentlens {

struct PlaneFit {
  std::string feature_name;
  double a = 0.0;  // df/dx
  double b = 0.0;  // df/dy
  double c = 0.0;  // intercept
  double r = 0.0;  // multiple correlation, in [0, 1]
  std::size_t n = 0;
};

struct GradientArrow {
  std::string feature_name;
  double dx = 0.0, dy = 0.0;  // unit direction
  double magnitude = 0.0;     // feature units per projection unit
  double r = 0.0;
};

// Least-squares plane f(x,y) = a*x + b*y + c through (points, values),
// solved on centered coordinates; r is the Pearson correlation between the
// fitted and actual values, the nonnegative multiple correlation sqrt(R^2).
inline PlaneFit fit_plane(const Projection2D& points,
                          const std::map<std::string, double>& values,
                          const std::string& feature_name) {
  std::vector<double> xs, ys, zs;
  for (std::size_t i = 0; i < points.ids.size(); ++i) {
    auto it = values.find(points.ids[i]);
    if (it == values.end()) continue;
    xs.push_back(points.points[i][0]);
    ys.push_back(points.points[i][1]);
    zs.push_back(it->second);
  }
  const std::size_t n = xs.size();
  if (n < 3) throw TooFewPoints("plane fit needs at least 3 points");

  const double mx = mean(xs), my = mean(ys), mz = mean(zs);
  double sxx = 0, sxy = 0, syy = 0, sxz = 0, syz = 0, szz = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const double cx = xs[i] - mx, cy = ys[i] - my, cz = zs[i] - mz;
    sxx += cx * cx;
    sxy += cx * cy;
    syy += cy * cy;
    sxz += cx * cz;
    syz += cy * cz;
    szz += cz * cz;
  }
  if (szz <= 0.0) throw ConstantFeature(feature_name);

  // collinearity via the condition number of the centered 2x2 Gram matrix
  const double tr = sxx + syy;
  const double det = sxx * syy - sxy * sxy;
  const double disc = std::sqrt(std::max(0.0, tr * tr / 4.0 - det));
  const double eig_max = tr / 2.0 + disc, eig_min = tr / 2.0 - disc;
  if (eig_min <= 0.0 || eig_max / eig_min > 1e12) throw DegenerateGeometry();

  PlaneFit fit;
  fit.feature_name = feature_name;
  fit.n = n;
  fit.a = (syy * sxz - sxy * syz) / det;
  fit.b = (sxx * syz - sxy * sxz) / det;
  fit.c = mz - fit.a * mx - fit.b * my;

  std::vector<double> fitted(n);
  for (std::size_t i = 0; i < n; ++i) fitted[i] = fit.a * xs[i] + fit.b * ys[i] + fit.c;
  fit.r = std::max(0.0, pearson(fitted, zs));
  return fit;
}

// Scale-aware zero test for the gradient, relative to the fit's spread.
inline bool is_flat(const PlaneFit& fit, double feature_std, double projection_std) {
  const double scale = projection_std > 0.0 ? feature_std / projection_std : 1.0;
  return std::hypot(fit.a, fit.b) <= 1e-12 * std::max(scale, 1e-300);
}

inline GradientArrow gradient_arrow(const PlaneFit& fit) {
  const double magnitude = std::hypot(fit.a, fit.b);
  if (magnitude <= 1e-12) throw FlatPlane(fit.feature_name);
  GradientArrow arrow;
  arrow.feature_name = fit.feature_name;
  arrow.dx = fit.a / magnitude;
  arrow.dy = fit.b / magnitude;
  arrow.magnitude = magnitude;
  arrow.r = fit.r;
  return arrow;
}

struct FeatureReportRow {
  std::string feature_name;
  std::optional<PlaneFit> fit;
  std::optional<GradientArrow> arrow;
  std::string status;  // ok | constant_feature | flat_plane | skipped_missing | degenerate
};

struct InterpretReport {
  std::vector<FeatureReportRow> rows;  // sorted by descending r, errors last

  std::vector<PlaneFit> fits() const {
    std::vector<PlaneFit> out;
    for (const auto& row : rows)
      if (row.fit) out.push_back(*row.fit);
    return out;
  }
  std::vector<GradientArrow> arrows() const {
    std::vector<GradientArrow> out;
    for (const auto& row : rows)
      if (row.arrow) out.push_back(*row.arrow);
    return out;
  }
};

// One plane per feature in the fixed feature order; utterances flagged
// missing_f0 are excluded from the F0-feature fits. Per-feature failures
// land in the report as status rows, not exceptions.
inline InterpretReport interpret_features(
    const Projection2D& points,
    const std::map<std::string, FeatureVector>& features) {
  bool any = false;
  for (const auto& id : points.ids)
    if (features.count(id)) any = true;
  if (!any) throw EmptyJoin();

  std::vector<double> proj_spread;
  for (const auto& p : points.points) {
    proj_spread.push_back(p[0]);
    proj_spread.push_back(p[1]);
  }
  const double projection_std = stddev(proj_spread);

  InterpretReport report;
  for (std::size_t fi = 0; fi < FeatureVector::kCount; ++fi) {
    FeatureReportRow row;
    row.feature_name = std::string(FeatureVector::names()[fi]);
    std::map<std::string, double> column;
    for (const auto& [id, fv] : features) {
      if (FeatureVector::is_f0_feature(fi) && fv.missing_f0) continue;
      column[id] = fv.values[fi];
    }
    try {
      if (column.empty()) throw TooFewPoints("all utterances missing this feature");
      PlaneFit fit = fit_plane(points, column, row.feature_name);
      std::vector<double> vals;
      for (const auto& [_, v] : column) vals.push_back(v);
      row.fit = fit;
      if (is_flat(fit, stddev(vals), projection_std)) {
        row.status = "flat_plane";
      } else {
        row.arrow = gradient_arrow(fit);
        row.status = "ok";
      }
    } catch (const ConstantFeature&) {
      row.status = "constant_feature";
    } catch (const FlatPlane&) {
      row.status = "flat_plane";
    } catch (const TooFewPoints&) {
      row.status = "skipped_missing";
    } catch (const DegenerateGeometry&) {
      row.status = "degenerate";
    }
    report.rows.push_back(std::move(row));
  }

  std::stable_sort(report.rows.begin(), report.rows.end(),
                   [](const FeatureReportRow& a, const FeatureReportRow& b) {
                     const double ra = a.fit ? a.fit->r : -1.0;
                     const double rb = b.fit ? b.fit->r : -1.0;
                     return ra > rb;
                   });
  return report;
}

// Report CSV: feature,a,b,c,r,n,grad_dx,grad_dy,magnitude,status
inline void write_report_csv(const std::filesystem::path& path,
                             const InterpretReport& report) {
  std::ofstream out(path);
  out << "feature,a,b,c,r,n,grad_dx,grad_dy,magnitude,status\n";
  for (const auto& row : report.rows) {
    std::vector<std::string> cells = {row.feature_name};
    if (row.fit) {
      cells.push_back(format_double(row.fit->a));
      cells.push_back(format_double(row.fit->b));
      cells.push_back(format_double(row.fit->c));
      cells.push_back(format_double(row.fit->r));
      cells.push_back(std::to_string(row.fit->n));
    } else {
      cells.insert(cells.end(), {"", "", "", "", ""});
    }
    if (row.arrow) {
      cells.push_back(format_double(row.arrow->dx));
      cells.push_back(format_double(row.arrow->dy));
      cells.push_back(format_double(row.arrow->magnitude));
    } else {
      cells.insert(cells.end(), {"", "", ""});
    }
    cells.push_back(row.status);
    out << join_csv(cells) << '\n';
  }
}

inline InterpretReport read_report_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open " + path.string());
  std::string line;
  if (!std::getline(in, line) || split_csv_line(line).size() != 10)
    throw ParseError("bad report CSV header");
  InterpretReport report;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const auto cells = split_csv_line(line);
    if (cells.size() != 10) throw ParseError(line_no, "expected 10 cells");
    FeatureReportRow row;
    row.feature_name = cells[0];
    row.status = cells[9];
    if (!cells[1].empty()) {
      PlaneFit fit;
      fit.feature_name = cells[0];
      fit.a = std::stod(cells[1]);
      fit.b = std::stod(cells[2]);
      fit.c = std::stod(cells[3]);
      fit.r = std::stod(cells[4]);
      fit.n = std::stoul(cells[5]);
      row.fit = fit;
    }
    if (!cells[6].empty() && row.fit) {
      GradientArrow arrow;
      arrow.feature_name = cells[0];
      arrow.dx = std::stod(cells[6]);
      arrow.dy = std::stod(cells[7]);
      arrow.magnitude = std::stod(cells[8]);
      arrow.r = row.fit->r;
      row.arrow = arrow;
    }
    report.rows.push_back(std::move(row));
  }
  return report;
}

}  // namespace latentlens

#endif
