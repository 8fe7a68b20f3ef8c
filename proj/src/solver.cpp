#include "scgl/solver.hpp"

#include "scgl/consistency.hpp"
#include "scgl/errors.hpp"
#include "scgl/isotonic.hpp"
#include "scgl/kernels.hpp"
#include "scgl/kron_operator.hpp"
#include "scgl/rng.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/QR>

#include <chrono>
#include <cmath>
#include <limits>
#include <ostream>
#include <string>

namespace scgl {

namespace {

Eigen::MatrixXd lap_of(const SolverState& state) {
  return kernels::parallel::kron_laplacian(state.weights, EdgeIndexMap(state.nodes), 1);
}

Eigen::MatrixXd skew(const Eigen::MatrixXd& a) { return 0.5 * (a - a.transpose()); }

// QR retraction with a positive diagonal in R. For a base point in SO(n) and a
// tangent step the result stays in SO(n), since det(I + Omega) > 0 for skew Omega.
Eigen::MatrixXd qr_retract(const Eigen::MatrixXd& x) {
  const Index n = x.rows();
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(x);
  Eigen::MatrixXd q = qr.householderQ() * Eigen::MatrixXd::Identity(n, n);
  const auto& r = qr.matrixQR();
  for (Index c = 0; c < n; ++c)
    if (r(c, c) < 0.0) q.col(c) *= -1.0;
  return q;
}

double rel_change(double current, double previous) {
  return std::abs(current - previous) / std::max(std::abs(previous), 1.0);
}

}  // namespace

const char* method_name(Method m) { return m == Method::kScgl ? "scgl" : "kron"; }

Method parse_method(const std::string& name) {
  if (name == "scgl") return Method::kScgl;
  if (name == "kron") return Method::kKron;
  throw ConfigError("unknown method '" + name + "' (expected scgl or kron)");
}

const char* basis_init_name(BasisInit b) { return b == BasisInit::kSpectral ? "spectral" : "identity"; }

BasisInit parse_basis_init(const std::string& name) {
  if (name == "identity") return BasisInit::kIdentity;
  if (name == "spectral") return BasisInit::kSpectral;
  throw ConfigError("unknown basis initialization '" + name + "' (expected identity or spectral)");
}

const char* schedule_name(Schedule s) { return s == Schedule::kStaged ? "staged" : "joint"; }

Schedule parse_schedule(const std::string& name) {
  if (name == "joint") return Schedule::kJoint;
  if (name == "staged") return Schedule::kStaged;
  throw ConfigError("unknown schedule '" + name + "' (expected joint or staged)");
}

Hyperparams recovery_hyperparams() {
  Hyperparams hp;
  hp.beta = 1.25;
  hp.rel_tol = 1e-7;
  hp.max_outer_iters = 20000;
  hp.init = BasisInit::kSpectral;
  hp.schedule = Schedule::kStaged;
  return hp;
}

void Hyperparams::validate() const {
  if (!(alpha >= 0.0)) throw ConfigError("alpha must be >= 0");
  if (!(beta > 0.0)) throw ConfigError("beta must be > 0");
  if (!(c1 > 0.0) || !(c1 <= c2)) throw ConfigError("need 0 < c1 <= c2");
  if (max_outer_iters < 1) throw ConfigError("max_outer_iters must be positive");
  if (!(rel_tol > 0.0) || !(zero_tol > 0.0)) throw ConfigError("tolerances must be positive");
  if (!(o_step.initial_step > 0.0) || !(o_step.contraction > 0.0 && o_step.contraction < 1.0) ||
      !(o_step.sufficient_decrease > 0.0 && o_step.sufficient_decrease < 1.0) ||
      o_step.max_backtracks < 1 || o_step.max_inner_iters < 1 || !(o_step.grad_tol > 0.0)) {
    throw ConfigError("invalid Riemannian step controls");
  }
}

Eigen::MatrixXd empirical_covariance(const Eigen::MatrixXd& signals) {
  if (signals.cols() < 2) throw InputError("empirical_covariance: need at least 2 samples");
  return signals * signals.transpose() / static_cast<double>(signals.cols() - 1);
}

SolverState initial_state(const Eigen::MatrixXd& covariance, Index nodes, Index stalk_dim,
                          const Hyperparams& hp) {
  SolverState state;
  state.nodes = nodes;
  state.stalk_dim = stalk_dim;
  state.weights = Eigen::VectorXd::Ones(pair_count(nodes));
  state.bases = hp.init == BasisInit::kSpectral && stalk_dim > 1
                    ? spectral_bases(covariance, nodes, stalk_dim)
                    : NodeBases::identity(nodes, stalk_dim);
  state.covariance = covariance;
  state.eigvecs = update_U(state, hp).eigvecs;
  state.lambda = update_lambda(state, hp);
  return state;
}

NodeBases spectral_bases(const Eigen::MatrixXd& covariance, Index nodes, Index stalk_dim) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(covariance);
  if (eig.info() != Eigen::Success) throw Error("spectral_bases: eigendecomposition failed");
  return bases_from_sections(eig.eigenvectors().leftCols(stalk_dim), nodes);
}

Eigen::MatrixXd spectral_target(const SolverState& state) {
  const Eigen::VectorXd levels =
      state.lambda.replicate(1, state.stalk_dim).transpose().reshaped();  // each lambda n times
  return state.eigvecs * levels.asDiagonal() * state.eigvecs.transpose();
}

Eigen::MatrixXd connection_estimate(const SolverState& state) {
  return kernels::parallel::assemble_connection(lap_of(state), state.bases);
}

double objective(const SolverState& state, const Hyperparams& hp) {
  if ((state.lambda.array() <= 0.0).any()) throw DomainError("objective: nonpositive lambda");
  const Eigen::MatrixXd lc = connection_estimate(state);
  const Eigen::MatrixXd p = spectral_target(state);
  const double n = static_cast<double>(state.stalk_dim);
  return -n * state.lambda.array().log().sum() + state.covariance.cwiseProduct(lc).sum() +
         hp.alpha * state.weights.sum() + 0.5 * hp.beta * (lc - p).squaredNorm();
}

Eigen::VectorXd update_w(const SolverState& state, const Hyperparams& hp) {
  const Index v = state.nodes;
  const Index n = state.stalk_dim;
  const EdgeIndexMap map(v);
  const double tau = kron_lipschitz(v, n);
  const Eigen::MatrixXd target = spectral_target(state) - state.covariance / hp.beta;
  const Eigen::MatrixXd f = kernels::parallel::kron_laplacian(state.weights, map, n) -
                            kernels::parallel::conjugate_outer(state.bases, target);
  const Eigen::VectorXd z = state.weights - kernels::parallel::kron_adjoint(f, map, n) / tau;
  return (z.array() - hp.alpha / (hp.beta * tau)).max(0.0);
}

double o_subproblem_value(const Eigen::MatrixXd& k, const Eigen::MatrixXd& o,
                          const Eigen::MatrixXd& s, const Eigen::MatrixXd& p, double beta) {
  return (o * s * o.transpose()).cwiseProduct(k).sum() +
         0.5 * beta * (k - o * p * o.transpose()).squaredNorm();
}

Eigen::MatrixXd euclidean_gradient_O(const Eigen::MatrixXd& k, const Eigen::MatrixXd& o,
                                     const Eigen::MatrixXd& s, const Eigen::MatrixXd& p,
                                     double beta) {
  return 2.0 * k * o * s - 2.0 * beta * (k - o * p * o.transpose()) * o * p;
}

Eigen::MatrixXd euclidean_gradient_O(const SolverState& state, const Hyperparams& hp) {
  return euclidean_gradient_O(kron_laplacian(state.weights, state.nodes, state.stalk_dim),
                              state.bases.dense(), state.covariance, spectral_target(state), hp.beta);
}

std::vector<Eigen::MatrixXd> riemannian_gradient_O(const NodeBases& bases,
                                                   const Eigen::MatrixXd& euclidean_grad) {
  const Index n = bases.stalk_dim();
  std::vector<Eigen::MatrixXd> out;
  out.reserve(static_cast<std::size_t>(bases.nodes()));
  for (Index u = 0; u < bases.nodes(); ++u) {
    out.push_back(bases[u] * skew(bases[u].transpose() * euclidean_grad.block(u * n, u * n, n, n)));
  }
  return out;
}

BasisUpdate update_O(const SolverState& state, const Hyperparams& hp) {
  const Index v = state.nodes;
  const Index n = state.stalk_dim;
  const Eigen::MatrixXd lap = lap_of(state);
  const Eigen::MatrixXd p = spectral_target(state);
  // With orthogonal blocks, Tr(O S O^T K) + (beta/2)||K - O P O^T||^2
  //   = <lap kron I, O (S - beta P) O^T> + (beta/2)(n ||lap||^2 + ||P||^2).
  const Eigen::MatrixXd coupling = state.covariance - hp.beta * p;
  const double constant =
      0.5 * hp.beta * (static_cast<double>(n) * lap.squaredNorm() + p.squaredNorm());
  auto value = [&](const NodeBases& b) {
    return kernels::parallel::coupled_trace(lap, b, coupling) + constant;
  };
  auto tangent = [&](const NodeBases& b, double& norm2) {
    auto grad = kernels::parallel::coupled_gradient(lap, b, coupling);
    norm2 = 0.0;
    for (Index u = 0; u < v; ++u) {
      auto& g = grad[static_cast<std::size_t>(u)];
      g = b[u] * skew(b[u].transpose() * g);
      norm2 += g.squaredNorm();
    }
    return grad;
  };

  BasisUpdate out;
  out.bases = state.bases;
  double current = value(out.bases);
  out.value_before = current;
  const auto& ctl = hp.o_step;
  double norm2 = 0.0;
  auto direction = tangent(out.bases, norm2);
  std::vector<Eigen::MatrixXd> candidate(static_cast<std::size_t>(v));
  for (int it = 0; it < ctl.max_inner_iters; ++it) {
    if (std::sqrt(norm2) < ctl.grad_tol) break;
    double step = ctl.initial_step;
    bool accepted = false;
    for (int b = 0; b < ctl.max_backtracks; ++b) {
      for (Index u = 0; u < v; ++u) {
        candidate[static_cast<std::size_t>(u)] =
            qr_retract(out.bases[u] - step * direction[static_cast<std::size_t>(u)]);
      }
      NodeBases trial = NodeBases::unchecked(candidate);
      const double next = value(trial);
      if (next <= current - ctl.sufficient_decrease * step * norm2) {
        out.bases = std::move(trial);
        current = next;
        accepted = true;
        break;
      }
      step *= ctl.contraction;
    }
    if (!accepted) {
      out.stalled = true;
      break;
    }
    ++out.iterations;
    direction = tangent(out.bases, norm2);
  }
  out.grad_norm = std::sqrt(norm2);
  out.value_after = current;
  return out;
}

EigUpdate update_U(const SolverState& state, const Hyperparams& hp) {
  const Index n = state.stalk_dim;
  const Index dim = state.nodes * n;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(connection_estimate(state));
  if (eig.info() != Eigen::Success) throw Error("update_U: eigendecomposition failed");
  EigUpdate out;
  out.eigvecs = eig.eigenvectors().rightCols(dim - n);
  out.eigenvalues = eig.eigenvalues();
  const double threshold = hp.zero_tol * std::max(out.eigenvalues(dim - 1), 1.0);
  out.kernel_excess = dim > n && out.eigenvalues(n) < threshold;
  return out;
}

Eigen::VectorXd diagonal_block_traces(const SolverState& state) {
  const Index n = state.stalk_dim;
  const Eigen::MatrixXd lu = connection_estimate(state) * state.eigvecs;
  Eigen::VectorXd traces = Eigen::VectorXd::Zero(state.nodes - 1);
  for (Index c = 0; c < state.eigvecs.cols(); ++c) traces(c / n) += state.eigvecs.col(c).dot(lu.col(c));
  return traces;
}

Eigen::VectorXd update_lambda(const SolverState& state, const Hyperparams& hp) {
  return bounded_spectral_isotonic(diagonal_block_traces(state), state.stalk_dim, hp.beta, hp.c1,
                                   hp.c2);
}

FeasibilityReport check_feasibility(const SolverState& state, const Hyperparams& hp, double tol) {
  FeasibilityReport r;
  r.min_weight = state.weights.size() ? state.weights.minCoeff() : 0.0;
  const Index k = state.eigvecs.cols();
  r.stiefel_defect =
      (state.eigvecs.transpose() * state.eigvecs - Eigen::MatrixXd::Identity(k, k)).cwiseAbs().maxCoeff();
  r.basis_orthogonality_defect = state.bases.max_orthogonality_defect();
  r.basis_determinant_defect = state.bases.max_determinant_defect();
  for (Index i = 0; i < state.lambda.size(); ++i) {
    if (i > 0 && state.lambda(i) < state.lambda(i - 1)) r.lambda_sorted = false;
    if (state.lambda(i) < hp.c1 || state.lambda(i) > hp.c2) r.lambda_in_bounds = false;
  }
  r.ok = r.min_weight >= 0.0 && r.stiefel_defect <= tol && r.basis_orthogonality_defect <= tol &&
         r.basis_determinant_defect <= tol && r.lambda_sorted && r.lambda_in_bounds;
  return r;
}

FitResult fit(const Eigen::MatrixXd& covariance, Index nodes, Index stalk_dim, const Hyperparams& hp,
              Method method, const FitOptions& options) {
  hp.validate();
  if (nodes < 2 || stalk_dim < 1) throw InputError("fit: need v >= 2 and n >= 1");
  const Index dim = nodes * stalk_dim;
  if (covariance.rows() != dim || covariance.cols() != dim) {
    throw InputError("fit: covariance is " + std::to_string(covariance.rows()) + "x" +
                     std::to_string(covariance.cols()) + ", expected " + std::to_string(dim) + " square");
  }
  const Eigen::VectorXd s_eig =
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(covariance, Eigen::EigenvaluesOnly).eigenvalues();
  const double s_norm = std::max(std::abs(s_eig(0)), std::abs(s_eig(dim - 1)));
  if (s_eig(0) < -1e-6 * s_norm) throw InputError("fit: covariance is not positive semidefinite");

  const auto start = std::chrono::steady_clock::now();
  FitResult result;
  Hyperparams first = hp;
  if (method == Method::kKron) first.init = BasisInit::kIdentity;
  SolverState state = initial_state(covariance, nodes, stalk_dim, first);
  double previous = objective(state, hp);
  state.objective_history.push_back(previous);

  // Staged: the O-step waits until the other blocks have converged.
  const bool learn_bases = method == Method::kScgl;
  bool bases_active = learn_bases && (hp.schedule == Schedule::kJoint || stalk_dim == 1);
  for (int it = 1; it <= hp.max_outer_iters; ++it) {
    const Eigen::VectorXd w_next = update_w(state, hp);
    const double w_step = (w_next - state.weights).norm();
    state.weights = w_next;

    double o_grad = 0.0;
    if (bases_active) {
      BasisUpdate bu = update_O(state, hp);
      state.bases = std::move(bu.bases);
      o_grad = bu.grad_norm;
      result.stall_count += bu.stalled;
    }

    EigUpdate eu = update_U(state, hp);
    state.eigvecs = std::move(eu.eigvecs);
    result.kernel_excess = eu.kernel_excess;
    state.lambda = update_lambda(state, hp);

    const double current = objective(state, hp);
    state.objective_history.push_back(current);
    state.iteration = it;
    const double change = rel_change(current, previous);
    if (options.trace) {
      *options.trace << it << ',' << current << ',' << change << ',' << w_step << ',' << o_grad << '\n';
    }
    previous = current;
    if (change < hp.rel_tol) {
      if (learn_bases && !bases_active) {
        bases_active = true;
        result.stage_switch = it;
        continue;
      }
      result.converged = true;
      break;
    }
  }

  result.iterations = state.iteration;
  result.objective_trace = state.objective_history;
  result.laplacian = ConnectionLaplacian(connection_estimate(state), nodes, stalk_dim);
  const EdgeIndexMap map(nodes);
  for (Index k = 0; k < map.size(); ++k) {
    if (state.weights(k) <= 0.0) continue;
    const Index i = map.first(k);
    const Index j = map.second(k);
    result.edges.push_back({i, j, state.weights(k), state.bases.edge_map(i, j)});
  }
  result.state = std::move(state);
  result.wall_time_s =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return result;
}

CrossValidation cross_validate(const Eigen::MatrixXd& signals, Index nodes, Index stalk_dim,
                               const std::vector<std::pair<double, double>>& grid, int folds,
                               const Hyperparams& base, Method method, std::uint64_t seed) {
  if (grid.empty()) throw ConfigError("cross_validate: empty hyperparameter grid");
  if (folds < 2) throw ConfigError("cross_validate: need at least 2 folds");
  const Index m = signals.cols();
  if (m < folds) throw InputError("cross_validate: fewer samples than folds");

  Rng rng(seed);
  const auto order = rng.permutation(static_cast<std::size_t>(m));
  std::vector<std::vector<Index>> members(static_cast<std::size_t>(folds));
  for (std::size_t t = 0; t < order.size(); ++t) {
    members[t % static_cast<std::size_t>(folds)].push_back(static_cast<Index>(order[t]));
  }
  auto gather = [&](const std::vector<Index>& cols) {
    Eigen::MatrixXd x(signals.rows(), static_cast<Index>(cols.size()));
    for (std::size_t c = 0; c < cols.size(); ++c) x.col(static_cast<Index>(c)) = signals.col(cols[c]);
    return x;
  };
  auto covariance_of = [](const Eigen::MatrixXd& x) {
    return Eigen::MatrixXd(x * x.transpose() / static_cast<double>(std::max<Index>(x.cols() - 1, 1)));
  };

  CrossValidation out;
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t g = 0; g < grid.size(); ++g) {
    Hyperparams hp = base;
    hp.alpha = grid[g].first;
    hp.beta = grid[g].second;
    double total = 0.0;
    for (int f = 0; f < folds; ++f) {
      std::vector<Index> train;
      for (int h = 0; h < folds; ++h)
        if (h != f) train.insert(train.end(), members[h].begin(), members[h].end());
      const FitResult fr = fit(covariance_of(gather(train)), nodes, stalk_dim, hp, method);
      const Eigen::MatrixXd s_val = covariance_of(gather(members[static_cast<std::size_t>(f)]));
      const Eigen::VectorXd eig = Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(
                                      fr.laplacian.matrix(), Eigen::EigenvaluesOnly)
                                      .eigenvalues();
      total += -log_gdet(eig.cwiseMax(0.0), default_zero_tol(eig)) +
               s_val.cwiseProduct(fr.laplacian.matrix()).sum();
    }
    const double score = total / folds;
    out.scores.push_back(score);
    if (score < best) {
      best = score;
      out.best_index = g;
      out.best = hp;
    }
  }
  return out;
}

}  // namespace scgl
