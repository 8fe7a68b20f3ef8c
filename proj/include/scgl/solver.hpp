#pragma once

// Block-coordinate descent for consistent connection-graph learning:
//
//   min  -n sum_i log(lambda_i) + Tr(S O^T L_K(w) O) + alpha ||w||_1
//        + (beta/2) ||O^T L_K(w) O - U (Lambda kron I_n) U^T||_F^2
//   s.t. w >= 0, U^T U = I, O = blkdiag(O_v), O_v in SO(n),
//        c1 <= lambda_2 <= ... <= lambda_v <= c2
//
// Each outer iteration updates w (majorize-minimize proximal step), O
// (Riemannian gradient descent on SO(n)^v, skipped in KRON mode), U
// (eigenvectors) and lambda (bounded isotonic regression), in that order.

#include "scgl/connection_graph.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace scgl {

enum class Method {
  kScgl,  ///< learn weights and node bases
  kKron,  ///< node bases frozen at the identity
};

const char* method_name(Method m);
Method parse_method(const std::string& name);

/// Starting node bases. kSpectral synchronizes the n lowest-variance
/// directions of S, which span the kernel of the generating Laplacian when the
/// signals are smooth; KRON always starts (and stays) at the identity.
enum class BasisInit { kIdentity, kSpectral };

const char* basis_init_name(BasisInit b);
BasisInit parse_basis_init(const std::string& name);

/// kJoint runs all four block updates from the first iteration. kStaged skips
/// the O-step until the remaining updates have converged, then continues with
/// all blocks. Both are monotone; staged keeps a good initial O from being
/// pulled around while w is still far from sparse.
enum class Schedule { kJoint, kStaged };

const char* schedule_name(Schedule s);
Schedule parse_schedule(const std::string& name);

/// Armijo backtracking controls for the node-basis update.
struct RiemannianStep {
  double initial_step = 1.0;
  double contraction = 0.5;
  double sufficient_decrease = 1e-4;
  int max_backtracks = 30;
  int max_inner_iters = 50;
  double grad_tol = 1e-10;
};

struct Hyperparams {
  double alpha = 0.0;  ///< l1 weight on w
  double beta = 1.0;   ///< consistency penalty
  double c1 = 1e-2;    ///< lower spectral bound
  double c2 = 1e2;     ///< upper spectral bound
  int max_outer_iters = 500;
  double rel_tol = 1e-6;  ///< stop when |f_t - f_{t-1}| < rel_tol * max(|f_{t-1}|, 1)
  RiemannianStep o_step;
  double zero_tol = 1e-8;  ///< relative kernel threshold
  BasisInit init = BasisInit::kIdentity;
  Schedule schedule = Schedule::kJoint;

  /// Throws ConfigError unless alpha >= 0, beta > 0, 0 < c1 <= c2 and all
  /// tolerances and iteration limits are positive.
  void validate() const;
};

/// Settings used for graph recovery experiments: spectral start, staged
/// schedule, beta = 1.25 and a tighter stopping rule.
Hyperparams recovery_hyperparams();

struct SolverState {
  Index nodes = 0;
  Index stalk_dim = 0;
  Eigen::VectorXd weights;      ///< length v(v-1)/2, EdgeIndexMap order
  NodeBases bases;              ///< O
  Eigen::MatrixXd eigvecs;      ///< U, vn x n(v-1)
  Eigen::VectorXd lambda;       ///< (lambda_2, ..., lambda_v)
  Eigen::MatrixXd covariance;   ///< S
  int iteration = 0;
  std::vector<double> objective_history;
};

/// Empirical covariance X X^T / (M - 1) of the columns of X (M >= 2).
Eigen::MatrixXd empirical_covariance(const Eigen::MatrixXd& signals);

/// w = 1, O = I (or spectral bases, see BasisInit), then U and lambda from
/// the eigendecomposition of O^T L_K(1) O.
SolverState initial_state(const Eigen::MatrixXd& covariance, Index nodes, Index stalk_dim,
                          const Hyperparams& hp);

/// Bases from the n smallest eigenvectors of S.
NodeBases spectral_bases(const Eigen::MatrixXd& covariance, Index nodes, Index stalk_dim);

/// U (Lambda kron I_n) U^T.
Eigen::MatrixXd spectral_target(const SolverState& state);

/// The learned connection Laplacian O^T L_K(w) O.
Eigen::MatrixXd connection_estimate(const SolverState& state);

/// Full objective with Psi(w) = sum_k w_k. Throws DomainError if any lambda <= 0.
double objective(const SolverState& state, const Hyperparams& hp);

/// Proximal MM step on w:
///   f = L_K(w) - O [U (Lambda kron I) U^T - S / beta] O^T,
///   w <- max(0, w - L_K*(f) / tau - alpha / (beta tau)),  tau = 2nv.
Eigen::VectorXd update_w(const SolverState& state, const Hyperparams& hp);

/// Dense O-subproblem value Tr(O S O^T K) + (beta/2) ||K - O P O^T||_F^2.
/// O may be any vn x vn matrix.
double o_subproblem_value(const Eigen::MatrixXd& k, const Eigen::MatrixXd& o,
                          const Eigen::MatrixXd& s, const Eigen::MatrixXd& p, double beta);

/// Euclidean gradient of o_subproblem_value with respect to a dense O:
///   G = 2 K O S - 2 beta (K - O P O^T) O P.
Eigen::MatrixXd euclidean_gradient_O(const Eigen::MatrixXd& k, const Eigen::MatrixXd& o,
                                     const Eigen::MatrixXd& s, const Eigen::MatrixXd& p,
                                     double beta);
Eigen::MatrixXd euclidean_gradient_O(const SolverState& state, const Hyperparams& hp);

/// Riemannian gradient on SO(n)^v: block u is O_u skew(O_u^T G_uu).
std::vector<Eigen::MatrixXd> riemannian_gradient_O(const NodeBases& bases,
                                                   const Eigen::MatrixXd& euclidean_grad);

struct BasisUpdate {
  NodeBases bases;
  int iterations = 0;
  bool stalled = false;     ///< backtracking failed before the gradient tolerance
  double grad_norm = 0.0;   ///< Riemannian gradient norm at the returned point
  double value_before = 0.0;
  double value_after = 0.0;
};

/// Riemannian gradient descent with QR retraction and Armijo backtracking on
/// the O-subproblem. The value never increases.
BasisUpdate update_O(const SolverState& state, const Hyperparams& hp);

struct EigUpdate {
  Eigen::MatrixXd eigvecs;      ///< columns n+1..nv of the ascending eigenbasis
  Eigen::VectorXd eigenvalues;  ///< full ascending spectrum of O^T L_K(w) O
  bool kernel_excess = false;   ///< more than n eigenvalues below zero_tol * max(lambda_max, 1)
};

EigUpdate update_U(const SolverState& state, const Hyperparams& hp);

/// Traces of the n x n diagonal blocks of M = U^T O^T L_K(w) O U.
Eigen::VectorXd diagonal_block_traces(const SolverState& state);

/// KKT initialization plus bounded isotonic regression on the spectral levels.
Eigen::VectorXd update_lambda(const SolverState& state, const Hyperparams& hp);

struct FeasibilityReport {
  bool ok = true;
  double min_weight = 0.0;
  double stiefel_defect = 0.0;
  double basis_orthogonality_defect = 0.0;
  double basis_determinant_defect = 0.0;
  bool lambda_sorted = true;
  bool lambda_in_bounds = true;
};

FeasibilityReport check_feasibility(const SolverState& state, const Hyperparams& hp,
                                    double tol = 1e-8);

struct FitResult {
  SolverState state;
  ConnectionLaplacian laplacian;  ///< O^T L_K(w) O
  std::vector<Edge> edges;        ///< O_i^T O_j on edges with w > 0
  std::vector<double> objective_trace;
  bool converged = false;
  int iterations = 0;
  int stall_count = 0;
  int stage_switch = 0;  ///< iteration after which the O-step started (staged schedule)
  bool kernel_excess = false;
  double wall_time_s = 0.0;
};

struct FitOptions {
  /// When set, one line per outer iteration:
  /// iter,objective,rel_change,w_step_norm,o_grad_norm
  std::ostream* trace = nullptr;
};

/// Runs the block-coordinate descent. Throws InputError if S is not square of
/// size vn or not PSD (min eigenvalue < -1e-6 ||S||_2).
FitResult fit(const Eigen::MatrixXd& covariance, Index nodes, Index stalk_dim, const Hyperparams& hp,
              Method method, const FitOptions& options = {});

struct CrossValidation {
  Hyperparams best;
  std::size_t best_index = 0;
  std::vector<double> scores;  ///< mean validation score per grid point
};

/// K-fold cross-validation over (alpha, beta) pairs. Columns of `signals`
/// are shuffled with `seed` and dealt round-robin into folds; a grid point
/// scores the mean over folds of -log gdet(L_hat) + Tr(S_val L_hat). Ties
/// keep the earliest grid point. Throws ConfigError on an empty grid or
/// folds < 2, InputError when there are fewer samples than folds.
CrossValidation cross_validate(const Eigen::MatrixXd& signals, Index nodes, Index stalk_dim,
                               const std::vector<std::pair<double, double>>& grid, int folds,
                               const Hyperparams& base, Method method, std::uint64_t seed);

}  // namespace scgl
