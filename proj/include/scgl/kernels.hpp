#pragma once

// Block kernels behind the Kronecker operator pair and the node-basis updates.
//
// Every kernel exists twice with identical signatures:
//   kernels::serial   - plain loops, kept as the reference for tests
//   kernels::parallel - OpenMP over block rows. Each output entry is written
//                       by one thread and reductions go through per-row
//                       partials, so results do not depend on the thread count.
// Library code calls the parallel flavour.

#include "scgl/connection_graph.hpp"
#include "scgl/edge_index.hpp"

#include <Eigen/Dense>

#include <vector>

namespace scgl::kernels {

/// Below this many nodes the parallel kernels stay on the calling thread.
inline constexpr Index kParallelMinNodes = 48;

namespace serial {

/// L(w) kron I_n as a dense vn x vn matrix.
Eigen::MatrixXd kron_laplacian(const Eigen::VectorXd& w, const EdgeIndexMap& map, Index n);

/// k-th entry Tr(Y_ii + Y_jj - Y_ij - Y_ji) over n x n blocks, (i, j) = pair of slot k.
Eigen::VectorXd kron_adjoint(const Eigen::MatrixXd& y, const EdgeIndexMap& map, Index n);

/// Blocks O_i^T X_ij O_j, i.e. O^T X O.
Eigen::MatrixXd conjugate_inner(const NodeBases& bases, const Eigen::MatrixXd& x);

/// Blocks O_i X_ij O_j^T, i.e. O X O^T.
Eigen::MatrixXd conjugate_outer(const NodeBases& bases, const Eigen::MatrixXd& x);

/// Blocks lap_ij O_i^T O_j, i.e. O^T (lap kron I_n) O for a v x v matrix lap.
Eigen::MatrixXd assemble_connection(const Eigen::MatrixXd& lap, const NodeBases& bases);

/// sum_uv lap_uv Tr(O_u A_uv O_v^T) = <lap kron I_n, O A O^T>_F.
double coupled_trace(const Eigen::MatrixXd& lap, const NodeBases& bases, const Eigen::MatrixXd& a);

/// G_u = 2 sum_v lap_uv O_v A_vu: gradient of coupled_trace with respect to
/// the block O_u, for symmetric lap and A.
std::vector<Eigen::MatrixXd> coupled_gradient(const Eigen::MatrixXd& lap, const NodeBases& bases,
                                              const Eigen::MatrixXd& a);

}  // namespace serial

namespace parallel {

Eigen::MatrixXd kron_laplacian(const Eigen::VectorXd& w, const EdgeIndexMap& map, Index n);

Eigen::VectorXd kron_adjoint(const Eigen::MatrixXd& y, const EdgeIndexMap& map, Index n);

Eigen::MatrixXd conjugate_inner(const NodeBases& bases, const Eigen::MatrixXd& x);

Eigen::MatrixXd conjugate_outer(const NodeBases& bases, const Eigen::MatrixXd& x);

Eigen::MatrixXd assemble_connection(const Eigen::MatrixXd& lap, const NodeBases& bases);

double coupled_trace(const Eigen::MatrixXd& lap, const NodeBases& bases, const Eigen::MatrixXd& a);

std::vector<Eigen::MatrixXd> coupled_gradient(const Eigen::MatrixXd& lap, const NodeBases& bases,
                                              const Eigen::MatrixXd& a);

}  // namespace parallel

}  // namespace scgl::kernels
