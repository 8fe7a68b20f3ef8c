#pragma once

#include "scgl/edge_index.hpp"

#include <Eigen/Dense>

namespace scgl {

/// Weighted combinatorial Laplacian D - W (v x v) for weights in EdgeIndexMap order.
Eigen::MatrixXd combinatorial_laplacian(const Eigen::VectorXd& w, Index nodes);

/// Kronecker-structured Laplacian L(w) kron I_n.
/// Throws ArgumentError on a negative weight or a length other than v(v-1)/2.
Eigen::MatrixXd kron_laplacian(const Eigen::VectorXd& w, Index nodes, Index stalk_dim);

/// Adjoint of kron_laplacian under the Frobenius / Euclidean inner products.
Eigen::VectorXd kron_laplacian_adjoint(const Eigen::MatrixXd& y, Index nodes, Index stalk_dim);

/// Lipschitz constant 2nv of the composition adjoint(kron_laplacian(.)).
inline double kron_lipschitz(Index nodes, Index stalk_dim) {
  return 2.0 * static_cast<double>(nodes * stalk_dim);
}

}  // namespace scgl
