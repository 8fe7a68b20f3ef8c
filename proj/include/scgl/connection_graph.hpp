#pragma once

#include "scgl/edge_index.hpp"

#include <Eigen/Dense>

#include <vector>

namespace scgl {

/// Orthogonality tolerance for edge maps and node bases.
inline constexpr double kOrthogonalityTol = 1e-10;

/// One weighted edge of a connection graph. Nodes are 0-based with i > j, and
/// `map` is the n x n orthogonal matrix O_ij placed (scaled by -weight) in the
/// (i, j) block of the connection Laplacian.
struct Edge {
  Index i = 0;
  Index j = 0;
  double weight = 0.0;
  Eigen::MatrixXd map;
};

/// Per-node orthonormal bases O_v in SO(n), i.e. the block-diagonal matrix
/// blkdiag(O_1, ..., O_v).
class NodeBases {
 public:
  NodeBases() = default;
  /// Validates every block (orthogonal to 1e-10, det = +1).
  explicit NodeBases(std::vector<Eigen::MatrixXd> blocks);

  static NodeBases identity(Index nodes, Index stalk_dim);

  /// Wraps blocks without validation. Used on solver iterates whose
  /// feasibility is checked separately at a looser tolerance.
  static NodeBases unchecked(std::vector<Eigen::MatrixXd> blocks);

  Index nodes() const noexcept { return static_cast<Index>(blocks_.size()); }
  Index stalk_dim() const noexcept { return blocks_.empty() ? 0 : blocks_.front().rows(); }

  const Eigen::MatrixXd& operator[](Index v) const { return blocks_[static_cast<std::size_t>(v)]; }
  Eigen::MatrixXd& operator[](Index v) { return blocks_[static_cast<std::size_t>(v)]; }
  const std::vector<Eigen::MatrixXd>& blocks() const noexcept { return blocks_; }

  /// Dense vn x vn block-diagonal matrix.
  Eigen::MatrixXd dense() const;

  /// Edge map O_i^T O_j induced by the bases.
  Eigen::MatrixXd edge_map(Index i, Index j) const;

  /// Largest ||O_v^T O_v - I||_F and largest |det(O_v) - 1| over blocks.
  double max_orthogonality_defect() const;
  double max_determinant_defect() const;

 private:
  std::vector<Eigen::MatrixXd> blocks_;
};

/// Weighted graph with an orthogonal map on every edge.
class ConnectionGraph {
 public:
  ConnectionGraph() = default;
  /// Validates the invariants: i > j >= 0, i < v, unique pairs, weights >= 0,
  /// maps n x n and orthogonal to 1e-10.
  ConnectionGraph(Index nodes, Index stalk_dim, std::vector<Edge> edges);

  Index nodes() const noexcept { return nodes_; }
  Index stalk_dim() const noexcept { return stalk_dim_; }
  const std::vector<Edge>& edges() const noexcept { return edges_; }

  /// Weight vector in EdgeIndexMap order (zeros for non-edges).
  Eigen::VectorXd weights() const;

  /// Adjacency lists of the underlying graph (edges with any weight, incl. 0).
  std::vector<std::vector<Index>> adjacency() const;

 private:
  Index nodes_ = 0;
  Index stalk_dim_ = 0;
  std::vector<Edge> edges_;
};

/// Dense symmetric PSD vn x vn block matrix with v, n bookkeeping.
class ConnectionLaplacian {
 public:
  ConnectionLaplacian() = default;
  /// Validates symmetry (1e-10 relative), PSD (min eig >= -1e-8 ||L||_2) and
  /// diagonal blocks being nonnegative multiples of I_n.
  ConnectionLaplacian(Eigen::MatrixXd matrix, Index nodes, Index stalk_dim);

  static ConnectionLaplacian unchecked(Eigen::MatrixXd matrix, Index nodes, Index stalk_dim);

  const Eigen::MatrixXd& matrix() const noexcept { return matrix_; }
  Index nodes() const noexcept { return nodes_; }
  Index stalk_dim() const noexcept { return stalk_dim_; }
  Index dim() const noexcept { return matrix_.rows(); }

  auto block(Index i, Index j) const {
    return matrix_.block(i * stalk_dim_, j * stalk_dim_, stalk_dim_, stalk_dim_);
  }

 private:
  Eigen::MatrixXd matrix_;
  Index nodes_ = 0;
  Index stalk_dim_ = 0;
};

/// Assembles the connection Laplacian block by block: off-diagonal (i, j),
/// i > j, is -w_ij O_ij, its transpose mirrors it, diagonal i is deg(i) I_n.
ConnectionLaplacian build_connection_laplacian(const ConnectionGraph& graph);

/// O^T (L(w) kron I_n) O for block-diagonal O; edge blocks are -w_ij O_i^T O_j.
ConnectionLaplacian assemble_from_bases(const Eigen::VectorXd& weights, const NodeBases& bases);

/// Consistent connection graph with O_ij = O_i^T O_j on every edge with w_k > 0.
ConnectionGraph consistent_graph(const Eigen::VectorXd& weights, const NodeBases& bases);

/// Nearest matrix in SO(n) in Frobenius norm (SVD, smallest singular
/// direction flipped when the determinant would be negative).
Eigen::MatrixXd nearest_special_orthogonal(const Eigen::MatrixXd& m);

/// 2 x 2 rotation by `angle` (counter-clockwise).
Eigen::MatrixXd planar_rotation(double angle);

}  // namespace scgl
