#pragma once

#include "scgl/connection_graph.hpp"
#include "scgl/datagen.hpp"
#include "scgl/rng.hpp"

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <vector>

namespace scgl::testing {

inline Eigen::MatrixXd random_matrix(Index rows, Index cols, Rng& rng) {
  Eigen::MatrixXd m(rows, cols);
  for (Index c = 0; c < cols; ++c)
    for (Index r = 0; r < rows; ++r) m(r, c) = rng.normal();
  return m;
}

inline Eigen::MatrixXd random_symmetric(Index dim, Rng& rng) {
  const Eigen::MatrixXd a = random_matrix(dim, dim, rng);
  return 0.5 * (a + a.transpose());
}

inline Eigen::MatrixXd random_psd(Index dim, Index rank, Rng& rng) {
  const Eigen::MatrixXd a = random_matrix(dim, rank, rng);
  return a * a.transpose();
}

/// Nonnegative weights with roughly `density` of the pairs switched on.
inline Eigen::VectorXd random_weights(Index nodes, double density, Rng& rng) {
  Eigen::VectorXd w = Eigen::VectorXd::Zero(pair_count(nodes));
  for (Index k = 0; k < w.size(); ++k)
    if (rng.uniform() < density) w(k) = rng.uniform(0.2, 3.0);
  return w;
}

inline NodeBases random_bases(Index nodes, Index n, Rng& rng) {
  std::vector<Eigen::MatrixXd> blocks;
  for (Index i = 0; i < nodes; ++i) blocks.push_back(random_rotation(n, rng));
  return NodeBases(std::move(blocks));
}

/// Weighted combinatorial Laplacian by a direct loop over pairs.
inline Eigen::MatrixXd brute_laplacian(const Eigen::VectorXd& w, Index nodes) {
  Eigen::MatrixXd l = Eigen::MatrixXd::Zero(nodes, nodes);
  Index k = 0;
  for (Index j = 0; j < nodes; ++j) {
    for (Index i = j + 1; i < nodes; ++i, ++k) {
      l(i, j) -= w(k);
      l(j, i) -= w(k);
      l(i, i) += w(k);
      l(j, j) += w(k);
    }
  }
  return l;
}

/// Largest gap between two edge-map sets induced by node bases.
inline double edge_product_gap(const NodeBases& a, const NodeBases& b) {
  double gap = 0.0;
  for (Index i = 0; i < a.nodes(); ++i)
    for (Index j = 0; j < i; ++j) gap = std::max(gap, (a.edge_map(i, j) - b.edge_map(i, j)).norm());
  return gap;
}

/// Per-level spectral cost with the constant ||M_ii||^2 term dropped.
inline double isotonic_cost(double l, double t, Index n, double beta) {
  const double nd = static_cast<double>(n);
  return -nd * std::log(l) + 0.5 * beta * (nd * l * l - 2.0 * l * t);
}

/// Brute-force minimizer of the bounded isotonic spectral problem on a
/// uniform grid over [c1, c2]: dynamic program over nondecreasing sequences.
inline std::vector<double> isotonic_grid_oracle(const Eigen::VectorXd& t, Index n, double beta, double c1,
                                                double c2, int points) {
  std::vector<double> grid(static_cast<std::size_t>(points));
  for (int g = 0; g < points; ++g) grid[static_cast<std::size_t>(g)] = c1 + (c2 - c1) * g / (points - 1);
  const auto m = static_cast<std::size_t>(t.size());
  std::vector<std::vector<int>> arg(m, std::vector<int>(static_cast<std::size_t>(points)));
  std::vector<double> best(static_cast<std::size_t>(points), 0.0);
  std::vector<double> next(best.size());
  for (std::size_t i = 0; i < m; ++i) {
    double run = std::numeric_limits<double>::infinity();
    int run_arg = 0;
    for (int g = 0; g < points; ++g) {
      const auto gs = static_cast<std::size_t>(g);
      if (best[gs] < run) {
        run = best[gs];
        run_arg = g;
      }
      next[gs] = run + isotonic_cost(grid[gs], t(static_cast<Index>(i)), n, beta);
      arg[i][gs] = run_arg;
    }
    best.swap(next);
  }
  int g = static_cast<int>(std::min_element(best.begin(), best.end()) - best.begin());
  std::vector<double> out(m);
  for (std::size_t i = m; i-- > 0;) {
    out[i] = grid[static_cast<std::size_t>(g)];
    g = arg[i][static_cast<std::size_t>(g)];
  }
  return out;
}

/// Random PSD matrix with a kernel of dimension k and the remaining
/// eigenvalues in [0.5, 3].
inline Eigen::MatrixXd random_psd_with_kernel(Index dim, Index k, Rng& rng) {
  const Eigen::MatrixXd q = Eigen::HouseholderQR<Eigen::MatrixXd>(random_matrix(dim, dim, rng)).householderQ();
  Eigen::VectorXd d(dim);
  for (Index i = 0; i < dim; ++i) d(i) = i < k ? 0.0 : rng.uniform(0.5, 3.0);
  return q * d.asDiagonal() * q.transpose();
}

/// (1/T) int_0^T ||exp(-tA) - exp(-tB)||_F^2 dt by composite Simpson, with a
/// finer rule on [0, 100] where the transients live.
inline double heat_quadrature(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b, double horizon) {
  const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> ea(a), eb(b);
  auto heat = [](const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>& es, double t) {
    return Eigen::MatrixXd(es.eigenvectors() * (-t * es.eigenvalues().array()).exp().matrix().asDiagonal() *
                           es.eigenvectors().transpose());
  };
  auto f = [&](double t) { return (heat(ea, t) - heat(eb, t)).squaredNorm(); };
  auto simpson = [&](double lo, double hi, int panels) {
    const double h = (hi - lo) / panels;
    double s = f(lo) + f(hi);
    for (int i = 1; i < panels; ++i) s += (i % 2 ? 4.0 : 2.0) * f(lo + i * h);
    return s * h / 3.0;
  };
  return (simpson(0.0, 100.0, 20000) + simpson(100.0, horizon, 20000)) / horizon;
}

/// Central-difference gradient of a scalar function of a matrix.
inline Eigen::MatrixXd fd_gradient(const std::function<double(const Eigen::MatrixXd&)>& f,
                                   const Eigen::MatrixXd& x, double h = 1e-5) {
  Eigen::MatrixXd g(x.rows(), x.cols());
  for (Index c = 0; c < x.cols(); ++c) {
    for (Index r = 0; r < x.rows(); ++r) {
      Eigen::MatrixXd a = x, b = x;
      a(r, c) += h;
      b(r, c) -= h;
      g(r, c) = (f(a) - f(b)) / (2 * h);
    }
  }
  return g;
}

}  // namespace scgl::testing
