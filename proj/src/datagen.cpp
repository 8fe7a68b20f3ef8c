#include "scgl/datagen.hpp"

#include "scgl/consistency.hpp"
#include "scgl/errors.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/QR>
#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <string>

namespace scgl {

namespace {

struct DisjointSets {
  std::vector<Index> parent;
  explicit DisjointSets(Index count) : parent(static_cast<std::size_t>(count)) {
    std::iota(parent.begin(), parent.end(), Index{0});
  }
  Index find(Index x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  }
  bool unite(Index a, Index b) {
    a = find(a);
    b = find(b);
    if (a == b) return false;
    parent[std::max(a, b)] = std::min(a, b);
    return true;
  }
};

}  // namespace

double default_er_probability(Index nodes, double scale) {
  return std::min(1.0, scale * std::log(static_cast<double>(nodes)) / static_cast<double>(nodes));
}

Eigen::MatrixXd random_rotation(Index n, Rng& rng) {
  if (n == 1) return Eigen::MatrixXd::Identity(1, 1);
  if (n == 2) return planar_rotation(2.0 * std::numbers::pi * rng.uniform());
  Eigen::MatrixXd g(n, n);
  for (Index c = 0; c < n; ++c)
    for (Index r = 0; r < n; ++r) g(r, c) = rng.normal();
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(g);
  Eigen::MatrixXd q = qr.householderQ() * Eigen::MatrixXd::Identity(n, n);
  for (Index c = 0; c < n; ++c)
    if (qr.matrixQR()(c, c) < 0.0) q.col(c) *= -1.0;
  if (q.determinant() < 0.0) q.col(0) *= -1.0;
  return q;
}

GroundTruth sample_er_cg(Index nodes, Index stalk_dim, double p, double w_lo, double w_hi,
                         std::uint64_t seed) {
  if (nodes < 2) throw ArgumentError("sample_er_cg: need v >= 2, got " + std::to_string(nodes));
  if (stalk_dim < 1) throw ArgumentError("sample_er_cg: need n >= 1");
  if (!(p > 0.0 && p <= 1.0)) throw ArgumentError("sample_er_cg: need 0 < p <= 1");
  if (!(w_lo > 0.0 && w_lo < w_hi)) throw ArgumentError("sample_er_cg: need 0 < w_lo < w_hi");

  Rng rng(seed);
  const EdgeIndexMap map(nodes);
  Eigen::VectorXd w = Eigen::VectorXd::Zero(map.size());
  DisjointSets sets(nodes);
  Index components = nodes;
  for (Index k = 0; k < map.size(); ++k) {
    if (rng.uniform() < p) {
      w(k) = rng.uniform(w_lo, w_hi);
      components -= sets.unite(map.first(k), map.second(k));
    }
  }
  int repairs = 0;
  while (components > 1) {
    const auto a = static_cast<Index>(rng.below(static_cast<std::uint64_t>(nodes)));
    const auto b = static_cast<Index>(rng.below(static_cast<std::uint64_t>(nodes)));
    if (sets.find(a) == sets.find(b)) continue;
    w(map.slot(a, b)) = rng.uniform(w_lo, w_hi);
    sets.unite(a, b);
    --components;
    ++repairs;
  }

  std::vector<Eigen::MatrixXd> blocks;
  blocks.reserve(static_cast<std::size_t>(nodes));
  for (Index i = 0; i < nodes; ++i) blocks.push_back(random_rotation(stalk_dim, rng));

  GroundTruth gt;
  gt.bases = NodeBases(std::move(blocks));
  gt.cg = consistent_graph(w, gt.bases);
  gt.laplacian = build_connection_laplacian(gt.cg);
  gt.seed = seed;
  gt.provenance = {{"family", "er"}, {"v", nodes},          {"n", stalk_dim},
                   {"p", p},         {"w_lo", w_lo},        {"w_hi", w_hi},
                   {"seed", seed},   {"repair_edges", repairs}};
  return gt;
}

std::vector<Eigen::Vector3d> fibonacci_sphere(Index count) {
  if (count < 1) throw ArgumentError("fibonacci_sphere: count must be positive");
  const double golden_angle = std::numbers::pi * (3.0 - std::sqrt(5.0));
  std::vector<Eigen::Vector3d> pts;
  pts.reserve(static_cast<std::size_t>(count));
  for (Index i = 0; i < count; ++i) {
    const double z = 1.0 - (2.0 * static_cast<double>(i) + 1.0) / static_cast<double>(count);
    const double r = std::sqrt(std::max(0.0, 1.0 - z * z));
    const double phi = golden_angle * static_cast<double>(i);
    pts.emplace_back(r * std::cos(phi), r * std::sin(phi), z);
    pts.back().normalize();
  }
  return pts;
}

std::vector<std::pair<Index, Index>> knn_graph(const std::vector<Eigen::Vector3d>& points, Index k) {
  const auto count = static_cast<Index>(points.size());
  if (k < 1 || k >= count) {
    throw ArgumentError("knn_graph: need 1 <= k < point count (" + std::to_string(count) + ")");
  }
  std::vector<std::pair<Index, Index>> pairs;
  for (Index i = 0; i < count; ++i) {
    std::vector<Index> order(static_cast<std::size_t>(count));
    std::iota(order.begin(), order.end(), Index{0});
    std::vector<double> dist(static_cast<std::size_t>(count));
    for (Index j = 0; j < count; ++j) dist[j] = (points[j] - points[i]).squaredNorm();
    order.erase(order.begin() + i);
    std::stable_sort(order.begin(), order.end(),
                     [&](Index a, Index b) { return dist[a] < dist[b]; });
    for (Index t = 0; t < k; ++t) pairs.emplace_back(std::max(i, order[t]), std::min(i, order[t]));
  }
  std::sort(pairs.begin(), pairs.end(), [](const auto& a, const auto& b) {
    return a.second != b.second ? a.second < b.second : a.first < b.first;
  });
  pairs.erase(std::unique(pairs.begin(), pairs.end()), pairs.end());
  return pairs;
}

std::vector<TangentFrame> tangent_frames(const std::vector<Eigen::Vector3d>& points,
                                         const std::vector<std::pair<Index, Index>>& pairs) {
  const auto count = static_cast<Index>(points.size());
  std::vector<std::vector<Index>> nbrs(static_cast<std::size_t>(count));
  for (const auto& [i, j] : pairs) {
    nbrs[i].push_back(j);
    nbrs[j].push_back(i);
  }
  std::vector<TangentFrame> frames(static_cast<std::size_t>(count));
  for (Index p = 0; p < count; ++p) {
    const auto& nb = nbrs[p];
    if (nb.size() < 2) {
      throw DomainError("tangent_frames: node " + std::to_string(p + 1) + " has fewer than 2 neighbors");
    }
    const Eigen::Vector3d normal = points[p].normalized();
    Eigen::MatrixXd diffs(static_cast<Index>(nb.size()), 3);
    for (std::size_t t = 0; t < nb.size(); ++t) {
      const Eigen::Vector3d d = points[nb[t]] - points[p];
      diffs.row(static_cast<Index>(t)) = (d - d.dot(normal) * normal).transpose();
    }
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(diffs, Eigen::ComputeFullV);
    const auto& sv = svd.singularValues();
    if (sv.size() < 2 || sv(1) <= 1e-10 * std::max(sv(0), 1e-300)) {
      throw DomainError("tangent_frames: degenerate neighborhood at node " + std::to_string(p + 1));
    }
    TangentFrame f = svd.matrixV().leftCols(2);
    if (f.col(0).cross(f.col(1)).dot(normal) < 0.0) f.col(1) *= -1.0;
    frames[p] = f;
  }
  return frames;
}

std::vector<Edge> vdm_edge_maps(const std::vector<TangentFrame>& frames,
                                const std::vector<std::pair<Index, Index>>& pairs) {
  std::vector<Edge> edges;
  edges.reserve(pairs.size());
  for (const auto& [i, j] : pairs) {
    const Eigen::Matrix2d cross = frames[i].transpose() * frames[j];
    const Eigen::Vector2d sv = Eigen::JacobiSVD<Eigen::Matrix2d>(cross).singularValues();
    if (sv(1) <= 1e-10 * std::max(sv(0), 1e-300)) {
      throw DomainError("vdm_edge_maps: rank-deficient frame product on edge (" +
                        std::to_string(i + 1) + ", " + std::to_string(j + 1) + ")");
    }
    edges.push_back({i, j, 1.0, nearest_special_orthogonal(cross)});
  }
  return edges;
}

GroundTruth spherical_cg(Index count, Index k, std::uint64_t seed, double sync_tol) {
  if (count < 8) throw ArgumentError("spherical_cg: need at least 8 points");
  const auto points = fibonacci_sphere(count);
  const auto pairs = knn_graph(points, k);
  const auto frames = tangent_frames(points, pairs);
  const ConnectionGraph raw(count, 2, vdm_edge_maps(frames, pairs));
  if (connected_components(raw).size() != 1) {
    throw DomainError("spherical_cg: k-NN graph on " + std::to_string(count) +
                      " points is disconnected; increase k");
  }
  const ConnectionLaplacian raw_lap = build_connection_laplacian(raw);

  GroundTruth gt;
  gt.bases = synchronize(raw_lap, sync_tol);
  gt.cg = consistent_graph(raw.weights(), gt.bases);
  gt.laplacian = build_connection_laplacian(gt.cg);
  gt.seed = seed;
  const Eigen::VectorXd raw_eigs =
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(raw_lap.matrix(), Eigen::EigenvaluesOnly).eigenvalues();
  gt.provenance = {{"family", "sphere"},
                   {"count", count},
                   {"k", k},
                   {"n", 2},
                   {"seed", seed},
                   {"sync_tol", sync_tol},
                   {"raw_frustration", raw_eigs(1) / raw_eigs(raw_eigs.size() - 1)}};
  return gt;
}

SignalMatrix sample_signals(const GroundTruth& gt, Index samples, std::uint64_t seed) {
  if (samples < 1) throw ArgumentError("sample_signals: need M >= 1");
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(gt.laplacian.matrix());
  if (eig.info() != Eigen::Success) throw Error("sample_signals: eigendecomposition failed");
  const Eigen::VectorXd& gamma = eig.eigenvalues();
  const double tol = default_zero_tol(gamma);
  Index first = 0;
  while (first < gamma.size() && gamma(first) <= tol) ++first;
  const Index rank = gamma.size() - first;

  Rng rng(seed);
  Eigen::MatrixXd z(rank, samples);
  for (Index c = 0; c < samples; ++c)
    for (Index r = 0; r < rank; ++r) z(r, c) = rng.normal();
  const Eigen::VectorXd scale = gamma.tail(rank).cwiseSqrt().cwiseInverse();
  SignalMatrix out;
  out.x = eig.eigenvectors().rightCols(rank) * scale.asDiagonal() * z;
  out.nodes = gt.laplacian.nodes();
  out.stalk_dim = gt.laplacian.stalk_dim();
  out.seed = seed;
  return out;
}

Index samples_for_ratio(double ratio, Index nodes, Index stalk_dim) {
  if (!(ratio > 0.0)) throw ArgumentError("samples_for_ratio: ratio must be positive");
  return std::max<Index>(1, static_cast<Index>(std::llround(ratio * static_cast<double>(nodes * stalk_dim))));
}

}  // namespace scgl
