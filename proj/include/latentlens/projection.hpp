#ifndef LATENTLENS_PROJECTION_HPP
#define LATENTLENS_PROJECTION_HPP

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <string>
#include <vector>

#include <json.hpp>

#include "latentlens/corpus.hpp"
#include "latentlens/errors.hpp"
#include "latentlens/format.hpp"
#include "latentlens/linalg.hpp"
#include "latentlens/rng.hpp"

namespace latentlens {

struct Projection2D {
  std::vector<std::string> ids;                // ascending lexicographic
  std::vector<std::array<double, 2>> points;   // aligned with ids
  std::string method;                          // "pca" or "umap"
  std::uint64_t seed = 0;                      // umap only
};

struct NeighborGraph {
  std::size_t k = 0;
  std::vector<std::string> ids;  // ascending lexicographic
  // raw k-NN lists: (node index, distance), sorted by distance, ties by id
  std::vector<std::vector<std::pair<std::size_t, double>>> neighbors;
  // filled by fuzzy_membership
  std::vector<double> rho, sigma;
  std::vector<std::vector<double>> directed_weights;  // aligned with neighbors
  struct Edge {
    std::size_t i, j;  // i < j
    double w;          // symmetrized membership in (0, 1]
  };
  std::vector<Edge> edges;
};

namespace detail {

inline std::pair<std::vector<std::string>, Matrix> embedding_matrix(
    const std::map<std::string, Embedding>& embeddings) {
  std::vector<std::string> ids;
  for (const auto& [id, _] : embeddings) ids.push_back(id);
  const std::size_t n = ids.size();
  const std::size_t d = n ? embeddings.begin()->second.vector.size() : 0;
  Matrix x(n, d);
  for (std::size_t i = 0; i < n; ++i) {
    const auto& v = embeddings.at(ids[i]).vector;
    for (std::size_t j = 0; j < d; ++j) x(i, j) = v[j];
  }
  return {std::move(ids), std::move(x)};
}

}  // namespace detail

// Exact PCA to 2-D: mean-centered data on the top-2 covariance eigenvectors
// (cyclic Jacobi). Sign convention: each component's largest-magnitude entry
// is positive.
inline Projection2D pca_project(const std::map<std::string, Embedding>& embeddings) {
  auto [ids, x] = detail::embedding_matrix(embeddings);
  const std::size_t n = x.rows, d = x.cols;
  if (n < 3) throw TooFewPoints("PCA needs at least 3 points");
  if (d < 2) throw TooFewPoints("PCA needs dimension >= 2");

  std::vector<double> center(d, 0.0);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < d; ++j) center[j] += x(i, j);
  for (auto& c : center) c /= double(n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < d; ++j) x(i, j) -= center[j];

  Matrix cov(d, d);
  for (std::size_t a = 0; a < d; ++a)
    for (std::size_t b = a; b < d; ++b) {
      double s = 0.0;
      for (std::size_t i = 0; i < n; ++i) s += x(i, a) * x(i, b);
      cov(a, b) = cov(b, a) = s / double(n);
    }
  double trace = 0.0;
  for (std::size_t a = 0; a < d; ++a) trace += cov(a, a);
  if (trace <= 0.0) throw DegenerateData();

  std::vector<double> eigenvalues;
  Matrix eigenvectors;
  jacobi_eigen_sym(cov, eigenvalues, eigenvectors);

  Projection2D proj;
  proj.method = "pca";
  proj.ids = std::move(ids);
  proj.points.resize(n);
  for (std::size_t comp = 0; comp < 2; ++comp) {
    std::vector<double> axis(d);
    for (std::size_t j = 0; j < d; ++j) axis[j] = eigenvectors(j, comp);
    std::size_t arg = 0;
    for (std::size_t j = 1; j < d; ++j)
      if (std::fabs(axis[j]) > std::fabs(axis[arg])) arg = j;
    if (axis[arg] < 0.0)
      for (auto& v : axis) v = -v;
    for (std::size_t i = 0; i < n; ++i) {
      double s = 0.0;
      for (std::size_t j = 0; j < d; ++j) s += x(i, j) * axis[j];
      proj.points[i][comp] = s;
    }
  }
  return proj;
}

// Exact Euclidean k-NN by full pairwise scan; ties broken by ascending id.
inline NeighborGraph knn_graph(const std::map<std::string, Embedding>& embeddings,
                               std::size_t k = 15) {
  auto [ids, x] = detail::embedding_matrix(embeddings);
  const std::size_t n = x.rows, d = x.cols;
  if (n < 2) throw TooFewPoints("k-NN needs at least 2 points");

  NeighborGraph graph;
  graph.k = k;
  graph.ids = std::move(ids);
  graph.neighbors.resize(n);
  const std::size_t kk = std::min(k, n - 1);
  for (std::size_t i = 0; i < n; ++i) {
    std::vector<std::pair<std::size_t, double>> row;
    row.reserve(n - 1);
    for (std::size_t j = 0; j < n; ++j) {
      if (j == i) continue;
      double s = 0.0;
      for (std::size_t c = 0; c < d; ++c) {
        const double diff = x(i, c) - x(j, c);
        s += diff * diff;
      }
      row.emplace_back(j, std::sqrt(s));
    }
    std::sort(row.begin(), row.end(), [&](const auto& a, const auto& b) {
      if (a.second != b.second) return a.second < b.second;
      return graph.ids[a.first] < graph.ids[b.first];
    });
    row.resize(kk);
    graph.neighbors[i] = std::move(row);
  }
  return graph;
}

// UMAP's fuzzy simplicial set: per-node bandwidth solved by bisection so the
// directed membership mass hits log2(k), then symmetrized w = a + b - a*b.
inline NeighborGraph fuzzy_membership(NeighborGraph graph) {
  const std::size_t n = graph.neighbors.size();
  const double target = std::log2(double(std::min(graph.k, n - 1)));
  graph.rho.resize(n);
  graph.sigma.resize(n);
  graph.directed_weights.resize(n);

  for (std::size_t i = 0; i < n; ++i) {
    const auto& nbrs = graph.neighbors[i];
    graph.rho[i] = nbrs.front().second;
    auto mass = [&](double sigma) {
      double s = 0.0;
      for (const auto& [_, d] : nbrs)
        s += std::exp(-std::max(0.0, d - graph.rho[i]) / sigma);
      return s;
    };
    double lo = 1e-6, hi = 1e4;
    for (int iter = 0; iter < 48; ++iter) {
      const double mid = 0.5 * (lo + hi);
      if (mass(mid) < target)
        lo = mid;
      else
        hi = mid;
    }
    graph.sigma[i] = 0.5 * (lo + hi);
    graph.directed_weights[i].resize(nbrs.size());
    for (std::size_t m = 0; m < nbrs.size(); ++m)
      graph.directed_weights[i][m] =
          std::exp(-std::max(0.0, nbrs[m].second - graph.rho[i]) / graph.sigma[i]);
  }

  std::map<std::pair<std::size_t, std::size_t>, std::pair<double, double>> pair_weights;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t m = 0; m < graph.neighbors[i].size(); ++m) {
      const std::size_t j = graph.neighbors[i][m].first;
      const auto key = std::minmax(i, j);
      auto& entry = pair_weights[{key.first, key.second}];
      (i < j ? entry.first : entry.second) = graph.directed_weights[i][m];
    }
  }
  graph.edges.clear();
  for (const auto& [key, ab] : pair_weights) {
    const double w = ab.first + ab.second - ab.first * ab.second;
    graph.edges.push_back({key.first, key.second, w});
  }
  return graph;
}

namespace detail {

// Least-squares fit of 1/(1 + a d^{2b}) to the min_dist membership curve,
// by damped Gauss-Newton over a dense grid on [0, 3].
inline std::pair<double, double> fit_ab(double min_dist) {
  const std::size_t grid = 300;
  std::vector<double> xs(grid), ys(grid);
  for (std::size_t i = 0; i < grid; ++i) {
    const double d = 3.0 * double(i + 1) / double(grid);
    xs[i] = d;
    ys[i] = d <= min_dist ? 1.0 : std::exp(-(d - min_dist));
  }
  double a = 1.5, b = 1.0;
  double lambda = 1e-3;
  auto sse = [&](double aa, double bb) {
    double s = 0.0;
    for (std::size_t i = 0; i < grid; ++i) {
      const double f = 1.0 / (1.0 + aa * std::pow(xs[i], 2.0 * bb));
      s += (f - ys[i]) * (f - ys[i]);
    }
    return s;
  };
  double current = sse(a, b);
  for (int iter = 0; iter < 200; ++iter) {
    double jtj00 = 0, jtj01 = 0, jtj11 = 0, jtr0 = 0, jtr1 = 0;
    for (std::size_t i = 0; i < grid; ++i) {
      const double p = std::pow(xs[i], 2.0 * b);
      const double denom = 1.0 + a * p;
      const double f = 1.0 / denom;
      const double r = f - ys[i];
      const double dfda = -p / (denom * denom);
      const double dfdb = -2.0 * a * p * std::log(xs[i]) / (denom * denom);
      jtj00 += dfda * dfda;
      jtj01 += dfda * dfdb;
      jtj11 += dfdb * dfdb;
      jtr0 += dfda * r;
      jtr1 += dfdb * r;
    }
    const double d00 = jtj00 * (1.0 + lambda), d11 = jtj11 * (1.0 + lambda);
    const double det = d00 * d11 - jtj01 * jtj01;
    if (std::fabs(det) < 1e-300) break;
    const double da = (-jtr0 * d11 + jtr1 * jtj01) / det;
    const double db = (-jtr1 * d00 + jtr0 * jtj01) / det;
    const double trial = sse(a + da, b + db);
    if (trial < current) {
      a += da;
      b += db;
      current = trial;
      lambda = std::max(lambda * 0.5, 1e-12);
      if (std::fabs(da) + std::fabs(db) < 1e-12) break;
    } else {
      lambda *= 4.0;
      if (lambda > 1e12) break;
    }
  }
  return {a, b};
}

inline double clip4(double v) { return v < -4.0 ? -4.0 : (v > 4.0 ? 4.0 : v); }

}  // namespace detail

// Stochastic gradient layout with the standard UMAP objective. Sequential,
// single deterministic update sequence; all randomness comes from one
// splitmix64-seeded xoshiro256** stream.
inline Projection2D optimize_layout(const NeighborGraph& graph, Projection2D init,
                                    std::size_t epochs = 200, double min_dist = 0.1,
                                    std::uint64_t seed = 0) {
  if (init.ids != graph.ids) throw Error("layout init is not id-aligned with graph");
  if (epochs == 0) return init;
  const auto [a, b] = detail::fit_ab(min_dist);
  const std::size_t n = init.points.size();
  auto& y = init.points;

  double max_w = 0.0;
  for (const auto& e : graph.edges) max_w = std::max(max_w, e.w);
  std::vector<double> epochs_per_sample(graph.edges.size());
  std::vector<double> next_sample(graph.edges.size());
  for (std::size_t e = 0; e < graph.edges.size(); ++e) {
    epochs_per_sample[e] = max_w / graph.edges[e].w;
    next_sample[e] = epochs_per_sample[e];
  }

  Xoshiro256 rng(seed);
  const int n_negative = 5;

  for (std::size_t epoch = 0; epoch < epochs; ++epoch) {
    const double alpha = 1.0 - double(epoch) / double(epochs);
    for (std::size_t e = 0; e < graph.edges.size(); ++e) {
      if (next_sample[e] > double(epoch + 1)) continue;
      next_sample[e] += epochs_per_sample[e];
      const std::size_t i = graph.edges[e].i;
      const std::size_t j = graph.edges[e].j;

      const double dx = y[i][0] - y[j][0];
      const double dy = y[i][1] - y[j][1];
      const double d2 = dx * dx + dy * dy;
      if (d2 > 0.0) {
        const double pd = std::pow(d2, b);
        const double coeff = (-2.0 * a * b * pd / d2) / (1.0 + a * pd);
        const double gx = detail::clip4(coeff * dx) * alpha;
        const double gy = detail::clip4(coeff * dy) * alpha;
        y[i][0] += gx;
        y[i][1] += gy;
        y[j][0] -= gx;
        y[j][1] -= gy;
      }

      for (int neg = 0; neg < n_negative; ++neg) {
        const std::size_t c = std::size_t(rng.bounded(n));
        if (c == i) continue;
        const double nx = y[i][0] - y[c][0];
        const double ny = y[i][1] - y[c][1];
        const double nd2 = nx * nx + ny * ny;
        double gx, gy;
        if (nd2 > 0.0) {
          const double pd = std::pow(nd2, b);
          const double coeff = 2.0 * b / ((0.001 + nd2) * (1.0 + a * pd));
          gx = detail::clip4(coeff * nx) * alpha;
          gy = detail::clip4(coeff * ny) * alpha;
        } else {
          gx = 4.0 * alpha;
          gy = 0.0;
        }
        y[i][0] += gx;
        y[i][1] += gy;
      }
    }
  }
  init.method = "umap";
  init.seed = seed;
  return init;
}

// knn_graph -> fuzzy_membership -> optimize_layout, initialized from PCA
// rescaled to standard deviation 10 per axis.
inline Projection2D umap_project(const std::map<std::string, Embedding>& embeddings,
                                 std::size_t k = 15, double min_dist = 0.1,
                                 std::size_t epochs = 200, std::uint64_t seed = 0) {
  const NeighborGraph graph = fuzzy_membership(knn_graph(embeddings, k));
  Projection2D init = pca_project(embeddings);
  for (int axis = 0; axis < 2; ++axis) {
    std::vector<double> col;
    for (const auto& p : init.points) col.push_back(p[axis]);
    const double sd = stddev(col);
    const double scale = sd > 0.0 ? 10.0 / sd : 1.0;
    for (auto& p : init.points) p[axis] *= scale;
  }
  return optimize_layout(graph, std::move(init), epochs, min_dist, seed);
}

// --- CSV + provenance sidecar, the `reduce` subcommand's output contract ---

inline void write_projection_csv(const std::filesystem::path& path,
                                 const Projection2D& proj) {
  std::ofstream out(path);
  out << "id,x,y\n";
  for (std::size_t i = 0; i < proj.ids.size(); ++i)
    out << proj.ids[i] << ',' << format_double(proj.points[i][0]) << ','
        << format_double(proj.points[i][1]) << '\n';
}

inline Projection2D read_projection_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open " + path.string());
  std::string line;
  if (!std::getline(in, line) || split_csv_line(line).size() != 3)
    throw ParseError("bad projection CSV header");
  Projection2D proj;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const auto cells = split_csv_line(line);
    if (cells.size() != 3) throw ParseError(line_no, "expected id,x,y");
    proj.ids.push_back(cells[0]);
    proj.points.push_back({std::stod(cells[1]), std::stod(cells[2])});
  }
  return proj;
}

inline void write_projection_provenance(const std::filesystem::path& path,
                                        const std::string& method, std::size_t k,
                                        double min_dist, std::size_t epochs,
                                        std::uint64_t seed) {
  nlohmann::json obj;
  obj["method"] = method;
  obj["k"] = k;
  obj["min_dist"] = min_dist;
  obj["epochs"] = epochs;
  obj["seed"] = seed;
  std::ofstream(path) << obj.dump(2) << '\n';
}

}  // namespace latentlens

#endif
