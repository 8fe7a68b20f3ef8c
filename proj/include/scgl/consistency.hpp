#pragma once

#include "scgl/connection_graph.hpp"

#include <Eigen/Dense>

#include <vector>

namespace scgl {

struct ConsistencyReport {
  bool consistent = false;
  /// Largest ||O_path - O_ij||_F over the fundamental cycles of a BFS tree.
  double max_cycle_defect = 0.0;
  /// Largest |gamma_{kn+r} - lambda_k| between the sorted spectrum of the
  /// connection Laplacian and the sorted spectrum of L, repeated n times.
  double spectral_defect = 0.0;
};

/// Connected components of the graph formed by edges with positive weight,
/// each sorted ascending, ordered by smallest member.
std::vector<std::vector<Index>> connected_components(const ConnectionGraph& graph);

/// Checks that edge maps compose to the identity around every cycle and that
/// the connection spectrum is the combinatorial spectrum with multiplicity n.
/// Throws DisconnectedGraphError (listing the components) if the positively
/// weighted graph is disconnected.
ConsistencyReport check_consistency(const ConnectionGraph& graph, double tol);

/// Recovers node bases from the n lowest eigenvectors of an (approximately)
/// consistent connection Laplacian. Each n x n block of the eigenvector stack
/// is projected onto SO(n); edge maps O_i^T O_j of the result reproduce the
/// input up to the common gauge. Throws SynchronizationError when the n-th
/// smallest eigenvalue exceeds tol * lambda_max.
NodeBases synchronize(const ConnectionLaplacian& laplacian, double tol);

/// Node bases from n global sections stacked as a vn x n matrix: block i is
/// projected onto SO(n) and transposed. The sign of the last section is fixed
/// first so that most blocks have positive determinant.
NodeBases bases_from_sections(Eigen::MatrixXd sections, Index nodes);

/// Sum of log(lambda) over eigenvalues above zero_tol (log of the generalized
/// determinant). Returns -infinity when no eigenvalue exceeds zero_tol and
/// throws DomainError on an eigenvalue below -zero_tol.
double log_gdet(const Eigen::VectorXd& eigenvalues, double zero_tol);

/// 1e-8 * largest eigenvalue: the scale-invariant kernel threshold.
double default_zero_tol(const Eigen::VectorXd& eigenvalues);

}  // namespace scgl
