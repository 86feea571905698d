#ifndef LATENTLENS_AFFECT_HPP
#define LATENTLENS_AFFECT_HPP

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <string>
#include <vector>

#include <json.hpp>

#include "latentlens/acoustics.hpp"
#include "latentlens/corpus.hpp"
#include "latentlens/errors.hpp"
#include "latentlens/linalg.hpp"
#include "latentlens/rng.hpp"

namespace latentlens {

struct AffectLabel {
  double valence = 0.0;  // in [-1, 1]
  double arousal = 0.0;  // in [-1, 1]
};

enum class AffectTarget { valence, arousal };

inline const char* affect_target_name(AffectTarget t) {
  return t == AffectTarget::valence ? "valence" : "arousal";
}

struct AffectModel {
  AffectTarget target = AffectTarget::valence;
  std::vector<double> weights;  // per feature, on standardized inputs
  double bias = 0.0;
  double lambda = 1.0;
  std::vector<double> feature_mean, feature_std;  // captured at fit time
  std::vector<bool> dropped;  // constant features, weight forced to 0
};

struct AffectMetrics {
  double pearson = 0.0;
  double ccc = 0.0;
  double rmse = 0.0;
};

namespace detail {

// Standardized design matrix; missing-F0 rows get the F0 columns imputed
// with the training mean of the observed rows.
struct Design {
  std::vector<std::string> ids;
  Matrix x;  // raw, imputed
};

inline Design build_design(const std::map<std::string, FeatureVector>& features) {
  Design d;
  for (const auto& [id, _] : features) d.ids.push_back(id);
  const std::size_t n = d.ids.size();
  d.x = Matrix(n, FeatureVector::kCount);
  std::array<double, 3> f0_sum{};
  std::size_t f0_count = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const auto& fv = features.at(d.ids[i]);
    for (std::size_t j = 0; j < FeatureVector::kCount; ++j) d.x(i, j) = fv.values[j];
    if (!fv.missing_f0) {
      for (std::size_t j = 0; j <= FeatureVector::kF0Range; ++j)
        f0_sum[j] += fv.values[j];
      ++f0_count;
    }
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (!features.at(d.ids[i]).missing_f0) continue;
    for (std::size_t j = 0; j <= FeatureVector::kF0Range; ++j)
      d.x(i, j) = f0_count ? f0_sum[j] / double(f0_count) : 0.0;
  }
  return d;
}

}  // namespace detail

// Closed-form ridge on z-scored features: w = (X'X + lambda I)^-1 X'y,
// with an unpenalized bias equal to mean(y).
inline AffectModel fit_ridge(const std::map<std::string, FeatureVector>& features,
                             const std::map<std::string, AffectLabel>& labels,
                             AffectTarget target, double lambda = 1.0) {
  std::map<std::string, FeatureVector> joined;
  std::vector<double> y;
  for (const auto& [id, fv] : features) {
    auto it = labels.find(id);
    if (it == labels.end()) continue;
    joined.emplace(id, fv);
    y.push_back(target == AffectTarget::valence ? it->second.valence
                                                : it->second.arousal);
  }
  if (joined.empty()) throw EmptyJoin();
  if (joined.size() < 5) throw TooFewPoints("ridge fit needs at least 5 joined ids");

  detail::Design d = detail::build_design(joined);
  const std::size_t n = d.x.rows, p = d.x.cols;

  AffectModel model;
  model.target = target;
  model.lambda = lambda;
  model.feature_mean.resize(p);
  model.feature_std.resize(p);
  model.dropped.assign(p, false);
  for (std::size_t j = 0; j < p; ++j) {
    std::vector<double> col(n);
    for (std::size_t i = 0; i < n; ++i) col[i] = d.x(i, j);
    model.feature_mean[j] = mean(col);
    model.feature_std[j] = stddev(col);
    if (model.feature_std[j] <= 0.0) {
      model.dropped[j] = true;
      model.feature_std[j] = 1.0;
    }
  }

  Matrix z(n, p);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < p; ++j)
      z(i, j) = model.dropped[j]
                    ? 0.0
                    : (d.x(i, j) - model.feature_mean[j]) / model.feature_std[j];

  model.bias = mean(y);
  Matrix gram(p, p);
  std::vector<double> rhs(p, 0.0);
  for (std::size_t a = 0; a < p; ++a) {
    for (std::size_t b = a; b < p; ++b) {
      double s = 0.0;
      for (std::size_t i = 0; i < n; ++i) s += z(i, a) * z(i, b);
      gram(a, b) = gram(b, a) = s;
    }
    gram(a, a) += std::max(lambda, 1e-12);  // keep dropped columns solvable
    for (std::size_t i = 0; i < n; ++i) rhs[a] += z(i, a) * (y[i] - model.bias);
  }
  model.weights = solve_spd(std::move(gram), std::move(rhs));
  for (std::size_t j = 0; j < p; ++j)
    if (model.dropped[j]) model.weights[j] = 0.0;
  return model;
}

inline double predict_one(const AffectModel& model, const FeatureVector& fv,
                          bool clip = true) {
  double score = model.bias;
  for (std::size_t j = 0; j < FeatureVector::kCount; ++j) {
    if (model.dropped[j]) continue;
    double v = fv.values[j];
    if (fv.missing_f0 && FeatureVector::is_f0_feature(j)) v = model.feature_mean[j];
    score += model.weights[j] * (v - model.feature_mean[j]) / model.feature_std[j];
  }
  if (clip) score = std::clamp(score, -1.0, 1.0);
  return score;
}

inline std::map<std::string, double> predict_affect(
    const AffectModel& model, const std::map<std::string, FeatureVector>& features,
    bool clip = true) {
  if (features.empty()) throw TooFewPoints("no features to predict on");
  std::map<std::string, double> out;
  for (const auto& [id, fv] : features) out[id] = predict_one(model, fv, clip);
  return out;
}

inline double concordance_correlation(const std::vector<double>& pred,
                                      const std::vector<double>& truth) {
  const double mx = mean(pred), my = mean(truth);
  const double sx = stddev(pred), sy = stddev(truth);
  const double rho = pearson(pred, truth);
  const double denom = sx * sx + sy * sy + (mx - my) * (mx - my);
  return denom > 0.0 ? 2.0 * rho * sx * sy / denom : 0.0;
}

// Seeded shuffled k-fold; per fold fit on the rest, predict held-out,
// metrics pooled over all held-out predictions.
inline AffectMetrics evaluate_affect(
    const std::map<std::string, FeatureVector>& features,
    const std::map<std::string, AffectLabel>& labels, AffectTarget target,
    double lambda, std::size_t folds, std::uint64_t seed, bool clip = true) {
  std::vector<std::string> ids;
  for (const auto& [id, _] : features)
    if (labels.count(id)) ids.push_back(id);
  if (ids.size() < folds * 2) throw TooFewPoints("need at least 2 samples per fold");

  // Fisher-Yates with the shared deterministic PRNG
  Xoshiro256 rng(seed);
  for (std::size_t i = ids.size(); i > 1; --i)
    std::swap(ids[i - 1], ids[rng.bounded(i)]);

  std::vector<double> pooled_pred, pooled_truth;
  for (std::size_t fold = 0; fold < folds; ++fold) {
    std::map<std::string, FeatureVector> train_f, test_f;
    std::map<std::string, AffectLabel> train_l;
    for (std::size_t i = 0; i < ids.size(); ++i) {
      if (i % folds == fold) {
        test_f.emplace(ids[i], features.at(ids[i]));
      } else {
        train_f.emplace(ids[i], features.at(ids[i]));
        train_l.emplace(ids[i], labels.at(ids[i]));
      }
    }
    const AffectModel model = fit_ridge(train_f, train_l, target, lambda);
    for (const auto& [id, pred] : predict_affect(model, test_f, clip)) {
      pooled_pred.push_back(pred);
      pooled_truth.push_back(target == AffectTarget::valence
                                 ? labels.at(id).valence
                                 : labels.at(id).arousal);
    }
  }

  AffectMetrics m;
  m.pearson = pearson(pooled_pred, pooled_truth);
  m.ccc = concordance_correlation(pooled_pred, pooled_truth);
  double sse = 0.0;
  for (std::size_t i = 0; i < pooled_pred.size(); ++i) {
    const double e = pooled_pred[i] - pooled_truth[i];
    sse += e * e;
  }
  m.rmse = std::sqrt(sse / double(pooled_pred.size()));
  return m;
}

// Labels file: JSON-Lines {"id": ..., "valence": ..., "arousal": ...}
inline std::map<std::string, AffectLabel> load_affect_labels(
    const std::filesystem::path& path) {
  std::map<std::string, AffectLabel> out;
  detail::for_each_jsonl(path, [&](std::size_t line_no, const nlohmann::json& obj) {
    if (!obj.contains("id") || !obj.contains("valence") || !obj.contains("arousal"))
      throw ParseError(line_no, "label line needs id, valence, arousal");
    AffectLabel label;
    label.valence = obj.at("valence").get<double>();
    label.arousal = obj.at("arousal").get<double>();
    if (!std::isfinite(label.valence) || !std::isfinite(label.arousal) ||
        std::fabs(label.valence) > 1.0 || std::fabs(label.arousal) > 1.0)
      throw ParseError(line_no, "labels must be finite and in [-1, 1]");
    const std::string id = obj.at("id").get<std::string>();
    if (out.count(id)) throw DuplicateId(id);
    out.emplace(id, label);
  });
  return out;
}

}  // namespace latentlens

#endif
