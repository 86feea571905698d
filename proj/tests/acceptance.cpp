// Acceptance suite: one pass/fail line per criterion, non-zero exit on any
// failure. Each criterion pins its tolerances in code.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <map>
#include <string>
#include <vector>

#include "latentlens/acoustics.hpp"
#include "latentlens/affect.hpp"
#include "latentlens/codes.hpp"
#include "latentlens/interpret.hpp"
#include "latentlens/projection.hpp"
#include "latentlens/rng.hpp"

using namespace latentlens;

namespace {

int failures = 0;

void report(int criterion, const std::string& name, bool pass,
            const std::string& detail = "") {
  std::printf("%s criterion %d: %s%s%s\n", pass ? "PASS" : "FAIL", criterion,
              name.c_str(), detail.empty() ? "" : " -- ", detail.c_str());
  if (!pass) ++failures;
}

double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
      .count();
}

std::string pad_id(std::size_t i) {
  char buf[16];
  std::snprintf(buf, sizeof(buf), "u%04zu", i);
  return buf;
}

std::vector<double> make_sine(double freq, double duration_s, unsigned rate,
                              double amplitude) {
  const std::size_t n = std::size_t(std::lround(duration_s * rate));
  std::vector<double> out(n);
  for (std::size_t i = 0; i < n; ++i)
    out[i] = amplitude * std::sin(2.0 * kPi * freq * double(i) / double(rate));
  return out;
}

// ---------------------------------------------------------------- criterion 1
void plane_recovery() {
  const auto start = std::chrono::steady_clock::now();
  Xoshiro256 rng(1001);
  Projection2D proj;
  std::map<std::string, double> values;
  for (std::size_t i = 0; i < 500; ++i) {
    proj.ids.push_back(pad_id(i));
    const double x = 4.0 * (rng.uniform() - 0.5);
    const double y = 4.0 * (rng.uniform() - 0.5);
    proj.points.push_back({x, y});
    values[proj.ids.back()] = 2.0 * x - y + 0.5 + 0.01 * rng.normal();
  }
  const PlaneFit fit = fit_plane(proj, values, "synthetic");

  // extended-precision normal-equations oracle on the full 3x3 system
  long double m[3][4] = {};
  for (std::size_t i = 0; i < 500; ++i) {
    const long double x = proj.points[i][0], y = proj.points[i][1];
    const long double z = values.at(proj.ids[i]);
    const long double row[3] = {x, y, 1.0L};
    for (int r = 0; r < 3; ++r) {
      for (int c = 0; c < 3; ++c) m[r][c] += row[r] * row[c];
      m[r][3] += row[r] * z;
    }
  }
  for (int col = 0; col < 3; ++col)
    for (int r = 0; r < 3; ++r) {
      if (r == col) continue;
      const long double factor = m[r][col] / m[col][col];
      for (int c = 0; c < 4; ++c) m[r][c] -= factor * m[col][c];
    }
  const double oa = double(m[0][3] / m[0][0]);
  const double ob = double(m[1][3] / m[1][1]);
  const double oc = double(m[2][3] / m[2][2]);

  const double elapsed = seconds_since(start);
  const bool pass = std::fabs(fit.a - 2.0) <= 1e-2 && std::fabs(fit.b + 1.0) <= 1e-2 &&
                    std::fabs(fit.c - 0.5) <= 1e-2 && fit.r >= 0.999 &&
                    std::fabs(fit.a - oa) <= 1e-9 && std::fabs(fit.b - ob) <= 1e-9 &&
                    std::fabs(fit.c - oc) <= 1e-9 && elapsed < 1.0;
  char detail[160];
  std::snprintf(detail, sizeof(detail),
                "a=%.5f b=%.5f c=%.5f r=%.6f oracle_gap=%.2e t=%.3fs", fit.a, fit.b,
                fit.c, fit.r,
                std::max({std::fabs(fit.a - oa), std::fabs(fit.b - ob),
                          std::fabs(fit.c - oc)}),
                elapsed);
  report(1, "plane recovery against extended-precision oracle", pass, detail);
}

// ---------------------------------------------------------------- criterion 2
void gradient_recovery() {
  const auto start = std::chrono::steady_clock::now();
  Xoshiro256 rng(2002);
  std::map<std::string, Embedding> embeddings;
  std::map<std::string, double> true_f0;
  std::map<std::string, FeatureVector> features;
  for (std::size_t i = 0; i < 200; ++i) {
    const std::string id = pad_id(i);
    const double f0 = 100.0 + 200.0 * rng.uniform();
    true_f0[id] = f0;
    AudioBuffer buf;
    buf.sample_rate_hz = 16000;
    buf.samples = make_sine(f0, 0.5, 16000, 0.5);
    features[id] = aggregate_features(buf);

    Embedding e;
    e.id = id;
    e.vector.push_back((f0 - 200.0) / 100.0 + 0.05 * rng.normal());
    for (int j = 1; j < 8; ++j) e.vector.push_back(0.1 * rng.normal());
    embeddings.emplace(id, std::move(e));
  }

  const Projection2D proj = pca_project(embeddings);
  const InterpretReport interpretation = interpret_features(proj, features);

  const GradientArrow* measured = nullptr;
  for (const auto& row : interpretation.rows)
    if (row.feature_name == "f0_mean_hz" && row.arrow) measured = &*row.arrow;

  bool pass = false;
  char detail[128];
  if (measured) {
    const PlaneFit oracle_fit = fit_plane(proj, true_f0, "true_f0");
    const GradientArrow oracle = gradient_arrow(oracle_fit);
    const double dot = measured->dx * oracle.dx + measured->dy * oracle.dy;
    const double angle_deg =
        std::acos(std::clamp(dot, -1.0, 1.0)) * 180.0 / kPi;
    const double elapsed = seconds_since(start);
    pass = angle_deg <= 15.0 && measured->r >= 0.9 && elapsed < 30.0;
    std::snprintf(detail, sizeof(detail), "angle=%.2fdeg r=%.4f t=%.1fs", angle_deg,
                  measured->r, elapsed);
  } else {
    std::snprintf(detail, sizeof(detail), "no f0_mean arrow produced");
  }
  report(2, "end-to-end F0 gradient recovery (features->pca->interpret)", pass,
         detail);
}

// ---------------------------------------------------------------- criterion 3
void f0_accuracy() {
  bool pass = true;
  std::string worst;
  double worst_err = 0.0;
  for (unsigned rate : {16000u, 44100u}) {
    for (double f : {80.0, 120.0, 220.0, 330.0, 400.0}) {
      AudioBuffer buf;
      buf.sample_rate_hz = rate;
      buf.samples = make_sine(f, 1.0, rate, 0.5);
      const FeatureVector fv = aggregate_features(buf);
      const double err =
          std::fabs(fv.values[FeatureVector::kF0Mean] - f) / f;
      if (fv.missing_f0 || err > 0.01) pass = false;
      if (err > worst_err) {
        worst_err = err;
        worst = std::to_string(int(f)) + "Hz@" + std::to_string(rate);
      }
    }
  }
  AudioBuffer silence;
  silence.sample_rate_hz = 16000;
  silence.samples.assign(16000, 0.0);
  if (!aggregate_features(silence).missing_f0) pass = false;
  char detail[96];
  std::snprintf(detail, sizeof(detail), "worst relative error %.4f%% at %s",
                100.0 * worst_err, worst.c_str());
  report(3, "F0 within 1% for pure tones, silence flags missing_f0", pass, detail);
}

// ---------------------------------------------------------------- criterion 4
void umap_clusters() {
  const auto start = std::chrono::steady_clock::now();
  Xoshiro256 rng(4004);
  std::map<std::string, Embedding> embeddings;
  std::map<std::string, int> labels;
  for (std::size_t i = 0; i < 200; ++i) {
    const int label = i < 100 ? 0 : 1;
    Embedding e;
    e.id = pad_id(i);
    for (int j = 0; j < 8; ++j)
      e.vector.push_back(rng.normal() + (j == 0 ? label * 10.0 : 0.0));
    labels[e.id] = label;
    embeddings.emplace(e.id, std::move(e));
  }

  const Projection2D a = umap_project(embeddings, 15, 0.1, 200, 42);
  const Projection2D b = umap_project(embeddings, 15, 0.1, 200, 42);
  bool identical = a.points.size() == b.points.size();
  for (std::size_t i = 0; identical && i < a.points.size(); ++i)
    identical = a.points[i][0] == b.points[i][0] && a.points[i][1] == b.points[i][1];

  std::size_t agree = 0, total = 0;
  for (std::size_t i = 0; i < a.ids.size(); ++i) {
    std::vector<std::pair<double, std::size_t>> dists;
    for (std::size_t j = 0; j < a.ids.size(); ++j) {
      if (i == j) continue;
      dists.emplace_back(std::hypot(a.points[i][0] - a.points[j][0],
                                    a.points[i][1] - a.points[j][1]),
                         j);
    }
    std::sort(dists.begin(), dists.end());
    for (int m = 0; m < 15; ++m) {
      ++total;
      if (labels.at(a.ids[dists[m].second]) == labels.at(a.ids[i])) ++agree;
    }
  }
  const double purity = double(agree) / double(total);
  const double elapsed = seconds_since(start);
  const bool pass = purity >= 0.95 && identical && elapsed < 10.0;
  char detail[96];
  std::snprintf(detail, sizeof(detail), "purity=%.4f bitwise_identical=%s t=%.1fs",
                purity, identical ? "yes" : "no", elapsed);
  report(4, "UMAP blob purity >= 0.95 and seeded determinism", pass, detail);
}

// ---------------------------------------------------------------- criterion 5
void ridge_oracle() {
  bool pass = true;
  double worst = 0.0;
  for (std::uint64_t problem = 0; problem < 20; ++problem) {
    Xoshiro256 rng(5000 + problem);
    const std::size_t n = 50, p = 25;
    Matrix x(n, p);
    std::vector<double> y(n);
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < p; ++j) x(i, j) = rng.normal();
      y[i] = rng.normal();
    }
    const double lambda = 1.0;

    // closed form, the same solver path the affect module uses
    Matrix gram(p, p);
    std::vector<double> rhs(p, 0.0);
    for (std::size_t a = 0; a < p; ++a) {
      for (std::size_t b = a; b < p; ++b) {
        double s = 0.0;
        for (std::size_t i = 0; i < n; ++i) s += x(i, a) * x(i, b);
        gram(a, b) = gram(b, a) = s;
      }
      gram(a, a) += lambda;
      for (std::size_t i = 0; i < n; ++i) rhs[a] += x(i, a) * y[i];
    }
    const std::vector<double> closed = solve_spd(gram, rhs);

    // iterative minimizer of the ridge objective (plain gradient descent,
    // lr 1e-3, capped at 1e6 steps with a tight gradient stop)
    std::vector<double> w(p, 0.0);
    for (std::size_t step = 0; step < 1000000; ++step) {
      std::vector<double> grad(p, 0.0);
      for (std::size_t i = 0; i < n; ++i) {
        double pred = 0.0;
        for (std::size_t j = 0; j < p; ++j) pred += x(i, j) * w[j];
        const double err = pred - y[i];
        for (std::size_t j = 0; j < p; ++j) grad[j] += err * x(i, j);
      }
      double gmax = 0.0;
      for (std::size_t j = 0; j < p; ++j) {
        grad[j] += lambda * w[j];
        gmax = std::max(gmax, std::fabs(grad[j]));
        w[j] -= 1e-3 * grad[j];
      }
      if (gmax < 1e-10) break;
    }

    for (std::size_t j = 0; j < p; ++j)
      worst = std::max(worst, std::fabs(closed[j] - w[j]));
  }
  pass = worst <= 1e-4;
  char detail[64];
  std::snprintf(detail, sizeof(detail), "worst inf-norm gap %.2e", worst);
  report(5, "closed-form ridge equals the iterative oracle on 20 problems", pass,
         detail);
}

// ---------------------------------------------------------------- criterion 6
void code_suite() {
  bool pass = true;
  Xoshiro256 rng(6006);
  const Emotion targets[] = {Emotion::amusement, Emotion::anger, Emotion::disgust,
                             Emotion::sleepiness};
  for (int trial = 0; trial < 1000 && pass; ++trial) {
    const EmotionCode code = interpolated_code(targets[rng.bounded(4)], rng.uniform());
    try {
      validate_code(code, 1e-9);
    } catch (const Error&) {
      pass = false;
    }
    double sum = 0.0;
    std::size_t non_zero = 0;
    for (double w : code.weights) {
      if (w < 0.0) pass = false;
      if (w > 0.0) ++non_zero;
      sum += w;
    }
    if (std::fabs(sum - 1.0) > 1e-9 || non_zero > 2) pass = false;
    if (non_zero == 2 && code.weights[0] == 0.0) pass = false;
  }
  // boundary identities
  if (interpolated_code(Emotion::sleepiness, 0.0).weights !=
      one_hot_code(Emotion::neutral).weights)
    pass = false;
  if (interpolated_code(Emotion::anger, 1.0).weights !=
      one_hot_code(Emotion::anger).weights)
    pass = false;
  if (interpolated_code(Emotion::amusement, 0.3).weights !=
      std::array<double, 5>{0.7, 0.3, 0.0, 0.0, 0.0})
    pass = false;
  report(6, "1000 random emotion codes validate, boundary identities exact", pass);
}

// ---------------------------------------------------------------- criterion 7
void invariance_suite() {
  bool pass = true;
  std::string failed;

  // OLS equivariances + residual orthogonality
  {
    Xoshiro256 rng(7007);
    Projection2D proj;
    std::map<std::string, double> values;
    for (std::size_t i = 0; i < 300; ++i) {
      proj.ids.push_back(pad_id(i));
      const double x = 3.0 * rng.normal(), y = 3.0 * rng.normal();
      proj.points.push_back({x, y});
      values[proj.ids.back()] = 1.2 * x - 0.4 * y + 2.0 + 0.2 * rng.normal();
    }
    const PlaneFit base = fit_plane(proj, values, "base");

    Projection2D moved = proj;
    for (auto& p : moved.points) {
      p[0] += 5.0;
      p[1] -= 3.0;
    }
    const PlaneFit shifted = fit_plane(moved, values, "shifted");
    if (std::fabs(shifted.a - base.a) > 1e-9 || std::fabs(shifted.b - base.b) > 1e-9 ||
        std::fabs(shifted.r - base.r) > 1e-9 ||
        std::fabs(shifted.c - (base.c - (base.a * 5.0 - base.b * 3.0))) > 1e-9) {
      pass = false;
      failed += "[translation]";
    }

    const double theta = 0.8;
    Projection2D rotated = proj;
    for (auto& p : rotated.points) {
      const double x = p[0], y = p[1];
      p[0] = std::cos(theta) * x - std::sin(theta) * y;
      p[1] = std::sin(theta) * x + std::cos(theta) * y;
    }
    const PlaneFit rot = fit_plane(rotated, values, "rotated");
    const double ea = std::cos(theta) * base.a - std::sin(theta) * base.b;
    const double eb = std::sin(theta) * base.a + std::cos(theta) * base.b;
    if (std::fabs(rot.a - ea) > 1e-9 || std::fabs(rot.b - eb) > 1e-9 ||
        std::fabs(rot.r - base.r) > 1e-9) {
      pass = false;
      failed += "[rotation]";
    }

    double sum_r = 0.0, sum_rx = 0.0, sum_ry = 0.0, sum_abs_z = 0.0;
    for (std::size_t i = 0; i < proj.ids.size(); ++i) {
      const double z = values.at(proj.ids[i]);
      const double resid =
          z - (base.a * proj.points[i][0] + base.b * proj.points[i][1] + base.c);
      sum_r += resid;
      sum_rx += resid * proj.points[i][0];
      sum_ry += resid * proj.points[i][1];
      sum_abs_z += std::fabs(z);
    }
    if (std::fabs(sum_r) > 1e-9 * sum_abs_z || std::fabs(sum_rx) > 1e-9 * sum_abs_z ||
        std::fabs(sum_ry) > 1e-9 * sum_abs_z) {
      pass = false;
      failed += "[residuals]";
    }
  }

  // amplitude covariance of acoustics
  {
    AudioBuffer buf;
    buf.sample_rate_hz = 16000;
    buf.samples = make_sine(220.0, 1.0, 16000, 0.2);
    AudioBuffer scaled = buf;
    for (auto& s : scaled.samples) s *= 3.0;
    const FeatureVector a = aggregate_features(buf);
    const FeatureVector b = aggregate_features(scaled);
    if (std::fabs((b.values[FeatureVector::kRmsMean] -
                   a.values[FeatureVector::kRmsMean]) -
                  20.0 * std::log10(3.0)) > 0.05 ||
        std::fabs(b.values[FeatureVector::kF0Mean] - a.values[FeatureVector::kF0Mean]) >
            0.005 * a.values[FeatureVector::kF0Mean] ||
        std::fabs(b.values[FeatureVector::kCentroid] -
                  a.values[FeatureVector::kCentroid]) >
            0.005 * a.values[FeatureVector::kCentroid]) {
      pass = false;
      failed += "[amplitude]";
    }
  }

  // PCA isometry on intrinsically 2-D data
  {
    Xoshiro256 rng(7070);
    std::map<std::string, Embedding> embeddings;
    std::vector<std::array<double, 2>> plane;
    for (std::size_t i = 0; i < 30; ++i) {
      const double u = rng.normal(), v = rng.normal();
      plane.push_back({u, v});
      Embedding e;
      e.id = pad_id(i);
      // fixed orthonormal pair in 8-D: axes e0 and e3
      e.vector = {u, 0.0, 0.0, v, 0.0, 0.0, 0.0, 0.0};
      embeddings.emplace(e.id, std::move(e));
    }
    const Projection2D proj = pca_project(embeddings);
    for (std::size_t i = 0; i < plane.size() && pass; ++i)
      for (std::size_t j = i + 1; j < plane.size(); ++j) {
        const double d_plane =
            std::hypot(plane[i][0] - plane[j][0], plane[i][1] - plane[j][1]);
        const double d_proj = std::hypot(proj.points[i][0] - proj.points[j][0],
                                         proj.points[i][1] - proj.points[j][1]);
        if (std::fabs(d_plane - d_proj) > 1e-9) {
          pass = false;
          failed += "[pca]";
          break;
        }
      }
  }

  report(7, "invariance suite (OLS equivariance, acoustics, PCA isometry)", pass,
         failed);
}

}  // namespace

int main() {
  plane_recovery();
  gradient_recovery();
  f0_accuracy();
  umap_clusters();
  ridge_oracle();
  code_suite();
  invariance_suite();
  if (failures) std::printf("%d criterion(s) FAILED\n", failures);
  return failures == 0 ? 0 : 1;
}
