#pragma once

#include "scgl/connection_graph.hpp"
#include "scgl/rng.hpp"

#include <Eigen/Dense>
#include <json.hpp>

#include <cstdint>
#include <utility>
#include <vector>

namespace scgl {

struct GroundTruth {
  ConnectionGraph cg;
  ConnectionLaplacian laplacian;
  NodeBases bases;  ///< generative bases; cg maps are O_i^T O_j
  nlohmann::json provenance;
  std::uint64_t seed = 0;
};

struct SignalMatrix {
  Eigen::MatrixXd x;  ///< vn x M, one sample per column
  Index nodes = 0;
  Index stalk_dim = 0;
  std::uint64_t seed = 0;

  Index samples() const { return x.cols(); }
};

/// 1.1 log(v) / v, clipped to 1.
double default_er_probability(Index nodes, double scale = 1.1);

/// Haar-distributed element of SO(n). For n = 2 this is a rotation by an
/// angle drawn from Unif[0, 2pi).
Eigen::MatrixXd random_rotation(Index n, Rng& rng);

/// Erdos-Renyi connection graph with Unif(w_lo, w_hi) weights and random
/// node bases. Disconnected draws are repaired by adding random edges between
/// distinct components until the graph is connected.
GroundTruth sample_er_cg(Index nodes, Index stalk_dim, double p, double w_lo, double w_hi,
                         std::uint64_t seed);

/// Golden-angle Fibonacci lattice on the unit sphere.
std::vector<Eigen::Vector3d> fibonacci_sphere(Index count);

/// Undirected k-NN graph (union of the directed neighbor lists). Distance ties
/// go to the smaller index. Pairs are (i, j) with i > j, sorted by (j, i).
std::vector<std::pair<Index, Index>> knn_graph(const std::vector<Eigen::Vector3d>& points, Index k);

using TangentFrame = Eigen::Matrix<double, 3, 2>;

/// Local PCA tangent frames: neighbor differences with the radial part removed,
/// top two right singular vectors, oriented so (f1 x f2) points outward.
std::vector<TangentFrame> tangent_frames(const std::vector<Eigen::Vector3d>& points,
                                         const std::vector<std::pair<Index, Index>>& pairs);

/// Unit-weight edges with O_ij = nearest SO(2) matrix to F_i^T F_j.
std::vector<Edge> vdm_edge_maps(const std::vector<TangentFrame>& frames,
                                const std::vector<std::pair<Index, Index>>& pairs);

/// Default kernel tolerance for synchronizing the raw sphere Laplacian. Parallel
/// transport on the sphere has holonomy, so the raw Laplacian has no exact
/// kernel and the n-th eigenvalue sits well above round-off.
inline constexpr double kSphereSyncTol = 0.05;

/// Fibonacci lattice -> k-NN -> tangent frames -> VDM maps -> synchronization
/// -> consistent graph with the original unit weights. The lattice is
/// deterministic, so `seed` is only recorded.
GroundTruth spherical_cg(Index count, Index k, std::uint64_t seed, double sync_tol = kSphereSyncTol);

/// M samples from N(0, L^+) by coloring standard normals with U_+ Gamma_+^{-1/2}.
SignalMatrix sample_signals(const GroundTruth& gt, Index samples, std::uint64_t seed);

/// Samples for sampling ratio r: round(r * n * v).
Index samples_for_ratio(double ratio, Index nodes, Index stalk_dim);

}  // namespace scgl
