#include "scgl/connection_graph.hpp"

#include "scgl/errors.hpp"
#include "scgl/kernels.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include <cmath>
#include <set>
#include <string>

namespace scgl {

namespace {

double orthogonality_defect(const Eigen::MatrixXd& m) {
  return (m.transpose() * m - Eigen::MatrixXd::Identity(m.cols(), m.cols())).norm();
}

}  // namespace

// --- NodeBases -------------------------------------------------------------

NodeBases::NodeBases(std::vector<Eigen::MatrixXd> blocks) : blocks_(std::move(blocks)) {
  const Index n = stalk_dim();
  for (std::size_t v = 0; v < blocks_.size(); ++v) {
    const auto& b = blocks_[v];
    if (b.rows() != n || b.cols() != n) {
      throw ArgumentError("NodeBases: block " + std::to_string(v) + " is not " + std::to_string(n) +
                          "x" + std::to_string(n));
    }
    if (orthogonality_defect(b) > kOrthogonalityTol) {
      throw ArgumentError("NodeBases: block " + std::to_string(v) + " is not orthogonal");
    }
    if (b.determinant() < 0.0) {
      throw ArgumentError("NodeBases: block " + std::to_string(v) + " has determinant -1");
    }
  }
}

NodeBases NodeBases::identity(Index nodes, Index stalk_dim) {
  return unchecked(std::vector<Eigen::MatrixXd>(static_cast<std::size_t>(nodes),
                                                Eigen::MatrixXd::Identity(stalk_dim, stalk_dim)));
}

NodeBases NodeBases::unchecked(std::vector<Eigen::MatrixXd> blocks) {
  NodeBases out;
  out.blocks_ = std::move(blocks);
  return out;
}

Eigen::MatrixXd NodeBases::dense() const {
  const Index v = nodes();
  const Index n = stalk_dim();
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(v * n, v * n);
  for (Index i = 0; i < v; ++i) out.block(i * n, i * n, n, n) = (*this)[i];
  return out;
}

Eigen::MatrixXd NodeBases::edge_map(Index i, Index j) const {
  return (*this)[i].transpose() * (*this)[j];
}

double NodeBases::max_orthogonality_defect() const {
  double worst = 0.0;
  for (const auto& b : blocks_) worst = std::max(worst, orthogonality_defect(b));
  return worst;
}

double NodeBases::max_determinant_defect() const {
  double worst = 0.0;
  for (const auto& b : blocks_) worst = std::max(worst, std::abs(b.determinant() - 1.0));
  return worst;
}

// --- ConnectionGraph -------------------------------------------------------

ConnectionGraph::ConnectionGraph(Index nodes, Index stalk_dim, std::vector<Edge> edges)
    : nodes_(nodes), stalk_dim_(stalk_dim), edges_(std::move(edges)) {
  if (nodes < 1 || stalk_dim < 1) throw ArgumentError("ConnectionGraph: v and n must be positive");
  std::set<std::pair<Index, Index>> seen;
  for (const auto& e : edges_) {
    const std::string where = "edge (" + std::to_string(e.i) + ", " + std::to_string(e.j) + ")";
    if (e.i <= e.j || e.j < 0 || e.i >= nodes) {
      throw ArgumentError("ConnectionGraph: " + where + " needs v > i > j >= 0");
    }
    if (!seen.emplace(e.i, e.j).second) throw ArgumentError("ConnectionGraph: duplicate " + where);
    if (!(e.weight >= 0.0) || !std::isfinite(e.weight)) {
      throw ArgumentError("ConnectionGraph: " + where + " has invalid weight");
    }
    if (e.map.rows() != stalk_dim || e.map.cols() != stalk_dim) {
      throw ArgumentError("ConnectionGraph: " + where + " map has wrong shape");
    }
    if (orthogonality_defect(e.map) > kOrthogonalityTol) {
      throw ArgumentError("ConnectionGraph: " + where + " map is not orthogonal");
    }
  }
}

Eigen::VectorXd ConnectionGraph::weights() const {
  const EdgeIndexMap map(nodes_);
  Eigen::VectorXd w = Eigen::VectorXd::Zero(map.size());
  for (const auto& e : edges_) w(map.slot(e.i, e.j)) = e.weight;
  return w;
}

std::vector<std::vector<Index>> ConnectionGraph::adjacency() const {
  std::vector<std::vector<Index>> adj(static_cast<std::size_t>(nodes_));
  for (const auto& e : edges_) {
    adj[static_cast<std::size_t>(e.i)].push_back(e.j);
    adj[static_cast<std::size_t>(e.j)].push_back(e.i);
  }
  return adj;
}

// --- ConnectionLaplacian ---------------------------------------------------

ConnectionLaplacian::ConnectionLaplacian(Eigen::MatrixXd matrix, Index nodes, Index stalk_dim)
    : matrix_(std::move(matrix)), nodes_(nodes), stalk_dim_(stalk_dim) {
  if (matrix_.rows() != nodes * stalk_dim || matrix_.cols() != nodes * stalk_dim) {
    throw ArgumentError("ConnectionLaplacian: matrix is not vn x vn");
  }
  const double scale = std::max(1.0, matrix_.cwiseAbs().maxCoeff());
  if ((matrix_ - matrix_.transpose()).cwiseAbs().maxCoeff() > 1e-10 * scale) {
    throw ArgumentError("ConnectionLaplacian: matrix is not symmetric");
  }
  for (Index i = 0; i < nodes; ++i) {
    const auto d = block(i, i);
    const double level = d(0, 0);
    const Eigen::MatrixXd expected = level * Eigen::MatrixXd::Identity(stalk_dim, stalk_dim);
    if (level < -1e-10 * scale || (d - expected).cwiseAbs().maxCoeff() > 1e-10 * scale) {
      throw ArgumentError("ConnectionLaplacian: diagonal block " + std::to_string(i) +
                          " is not a nonnegative multiple of I_n");
    }
  }
  const Eigen::VectorXd eig =
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(matrix_, Eigen::EigenvaluesOnly).eigenvalues();
  if (eig.size() > 0 && eig(0) < -1e-8 * std::max(std::abs(eig(eig.size() - 1)), 1e-300)) {
    throw ArgumentError("ConnectionLaplacian: matrix is not positive semidefinite");
  }
}

ConnectionLaplacian ConnectionLaplacian::unchecked(Eigen::MatrixXd matrix, Index nodes,
                                                   Index stalk_dim) {
  ConnectionLaplacian out;
  out.matrix_ = std::move(matrix);
  out.nodes_ = nodes;
  out.stalk_dim_ = stalk_dim;
  return out;
}

// --- construction ----------------------------------------------------------

ConnectionLaplacian build_connection_laplacian(const ConnectionGraph& graph) {
  const Index v = graph.nodes();
  const Index n = graph.stalk_dim();
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(v * n, v * n);
  Eigen::VectorXd degree = Eigen::VectorXd::Zero(v);
  for (const auto& e : graph.edges()) {
    m.block(e.i * n, e.j * n, n, n) = -e.weight * e.map;
    m.block(e.j * n, e.i * n, n, n) = -e.weight * e.map.transpose();
    degree(e.i) += e.weight;
    degree(e.j) += e.weight;
  }
  for (Index i = 0; i < v; ++i) m.block(i * n, i * n, n, n).diagonal().setConstant(degree(i));
  return ConnectionLaplacian::unchecked(std::move(m), v, n);
}

ConnectionLaplacian assemble_from_bases(const Eigen::VectorXd& weights, const NodeBases& bases) {
  const Index v = bases.nodes();
  const EdgeIndexMap map(v);
  if (weights.size() != map.size()) {
    throw ArgumentError("assemble_from_bases: weight vector has length " +
                        std::to_string(weights.size()) + ", expected " + std::to_string(map.size()));
  }
  if ((weights.array() < 0.0).any()) throw ArgumentError("assemble_from_bases: negative weight");
  Eigen::MatrixXd lap = Eigen::MatrixXd::Zero(v, v);
  for (Index k = 0; k < map.size(); ++k) {
    const Index i = map.first(k);
    const Index j = map.second(k);
    lap(i, j) = lap(j, i) = -weights(k);
    lap(i, i) += weights(k);
    lap(j, j) += weights(k);
  }
  return ConnectionLaplacian::unchecked(kernels::parallel::assemble_connection(lap, bases), v,
                                        bases.stalk_dim());
}

ConnectionGraph consistent_graph(const Eigen::VectorXd& weights, const NodeBases& bases) {
  const EdgeIndexMap map(bases.nodes());
  if (weights.size() != map.size()) throw ArgumentError("consistent_graph: weight length mismatch");
  std::vector<Edge> edges;
  for (Index k = 0; k < map.size(); ++k) {
    if (weights(k) <= 0.0) continue;
    const Index i = map.first(k);
    const Index j = map.second(k);
    edges.push_back({i, j, weights(k), bases.edge_map(i, j)});
  }
  return ConnectionGraph(bases.nodes(), bases.stalk_dim(), std::move(edges));
}

Eigen::MatrixXd nearest_special_orthogonal(const Eigen::MatrixXd& m) {
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(m, Eigen::ComputeFullU | Eigen::ComputeFullV);
  Eigen::MatrixXd u = svd.matrixU();
  const Eigen::MatrixXd& v = svd.matrixV();
  if ((u * v.transpose()).determinant() < 0.0) u.col(u.cols() - 1) *= -1.0;
  return u * v.transpose();
}

Eigen::MatrixXd planar_rotation(double angle) {
  Eigen::MatrixXd r(2, 2);
  r << std::cos(angle), -std::sin(angle), std::sin(angle), std::cos(angle);
  return r;
}

}  // namespace scgl
