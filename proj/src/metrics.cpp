#include "scgl/metrics.hpp"

#include "scgl/errors.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>
#include <sstream>
#include <vector>

namespace scgl {

namespace {

void require_same_length(const Eigen::VectorXd& a, const Eigen::VectorXd& b, const char* what) {
  if (a.size() != b.size()) {
    throw ArgumentError(std::string(what) + ": length mismatch (" + std::to_string(a.size()) +
                        " vs " + std::to_string(b.size()) + ")");
  }
}

void require_same_shape(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b, const char* what) {
  if (a.rows() != b.rows() || a.cols() != b.cols() || a.rows() != a.cols()) {
    throw ArgumentError(std::string(what) + ": need square matrices of equal size");
  }
}

Eigen::VectorXd spectrum(const Eigen::MatrixXd& m) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(m, Eigen::EigenvaluesOnly);
  if (eig.info() != Eigen::Success) throw Error("eigendecomposition failed");
  return eig.eigenvalues();
}

double kernel_threshold(const Eigen::VectorXd& eigs, double zero_tol) {
  return zero_tol * std::max(eigs.size() ? eigs(eigs.size() - 1) : 0.0, 1.0);
}

Eigen::MatrixXd kernel_basis(const Eigen::MatrixXd& m, double zero_tol, const char* name) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(m);
  if (eig.info() != Eigen::Success) throw Error("eigendecomposition failed");
  const double thr = kernel_threshold(eig.eigenvalues(), zero_tol);
  if (eig.eigenvalues()(0) < -thr) {
    throw ArgumentError(std::string("heat_distance: ") + name + " is not positive semidefinite");
  }
  Index k = 0;
  while (k < eig.eigenvalues().size() && eig.eigenvalues()(k) < thr) ++k;
  return eig.eigenvectors().leftCols(k);
}

}  // namespace

double f1_sparsity(const Eigen::VectorXd& w_hat, const Eigen::VectorXd& w_true, double eps) {
  require_same_length(w_hat, w_true, "f1_sparsity");
  double tp = 0.0, fp = 0.0, fn = 0.0;
  for (Index k = 0; k < w_hat.size(); ++k) {
    const bool predicted = w_hat(k) > eps;
    const bool actual = w_true(k) > 0.0;
    tp += predicted && actual;
    fp += predicted && !actual;
    fn += !predicted && actual;
  }
  if (tp + fp + fn == 0.0) return 1.0;
  return 2.0 * tp / (2.0 * tp + fp + fn);
}

double weight_mse(const Eigen::VectorXd& w_hat, const Eigen::VectorXd& w_true) {
  require_same_length(w_hat, w_true, "weight_mse");
  if (w_hat.size() == 0) return 0.0;
  return (w_hat - w_true).squaredNorm() / static_cast<double>(w_hat.size());
}

double empirical_tv(const Eigen::MatrixXd& laplacian, const Eigen::MatrixXd& signals) {
  if (signals.cols() == 0) throw ArgumentError("empirical_tv: no test signals");
  if (laplacian.rows() != signals.rows() || laplacian.cols() != signals.rows()) {
    throw ArgumentError("empirical_tv: Laplacian is " + std::to_string(laplacian.rows()) + "x" +
                        std::to_string(laplacian.cols()) + " but signals have " +
                        std::to_string(signals.rows()) + " rows");
  }
  return (signals.transpose() * laplacian).cwiseProduct(signals.transpose()).sum() /
         static_cast<double>(signals.cols());
}

double spectral_distance(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
  require_same_shape(a, b, "spectral_distance");
  if (a.rows() == 0) return 0.0;
  return (spectrum(a) - spectrum(b)).cwiseAbs().mean();
}

double heat_distance(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b, double zero_tol) {
  require_same_shape(a, b, "heat_distance");
  const Eigen::MatrixXd va = kernel_basis(a, zero_tol, "first argument");
  const Eigen::MatrixXd vb = kernel_basis(b, zero_tol, "second argument");
  const double overlap = (va.transpose() * vb).squaredNorm();
  return std::max(0.0, static_cast<double>(va.cols() + vb.cols()) - 2.0 * overlap);
}

Index kernel_dimension(const Eigen::MatrixXd& laplacian, double zero_tol) {
  const Eigen::VectorXd eigs = spectrum(laplacian);
  const double thr = kernel_threshold(eigs, zero_tol);
  return static_cast<Index>((eigs.array() < thr).count());
}

EvalReport evaluate(const Eigen::VectorXd& w_hat, const Eigen::MatrixXd& laplacian_hat,
                    const Eigen::VectorXd& w_true, const Eigen::MatrixXd& laplacian_true,
                    const Eigen::MatrixXd& test_signals, double eps, double zero_tol) {
  EvalReport r;
  r.f1 = f1_sparsity(w_hat, w_true, eps);
  r.weight_mse = weight_mse(w_hat, w_true);
  r.empirical_tv = empirical_tv(laplacian_hat, test_signals);
  r.spectral_distance = spectral_distance(laplacian_true, laplacian_hat);
  r.heat_distance = heat_distance(laplacian_true, laplacian_hat, zero_tol);
  r.kernel_dim_est = kernel_dimension(laplacian_hat, zero_tol);
  r.kernel_dim_true = kernel_dimension(laplacian_true, zero_tol);
  return r;
}

const std::string& results_csv_header() {
  static const std::string header =
      "seed,method,family,v,n,M,r,alpha,beta,f1,weight_mse,empirical_tv,spectral_dist,heat_dist,"
      "kernel_dim_est,kernel_dim_true,wall_time_s,failed";
  return header;
}

void write_csv_row(std::ostream& out, const EvalReport& r) {
  std::ostringstream s;
  s.precision(std::numeric_limits<double>::max_digits10);
  s << r.seed << ',' << r.method << ',' << r.family << ',' << r.nodes << ',' << r.stalk_dim << ','
    << r.samples << ',' << r.ratio << ',' << r.alpha << ',' << r.beta << ',' << r.f1 << ','
    << r.weight_mse << ',' << r.empirical_tv << ',' << r.spectral_distance << ',' << r.heat_distance
    << ',' << r.kernel_dim_est << ',' << r.kernel_dim_true << ',' << r.wall_time_s << ','
    << (r.failed ? 1 : 0) << '\n';
  out << s.str();
}

EvalReport parse_csv_row(const std::string& line) {
  std::vector<std::string> f;
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, ',')) f.push_back(cell);
  if (f.size() != 18) {
    throw InputError("results row has " + std::to_string(f.size()) + " fields, expected 18");
  }
  try {
    EvalReport r;
    r.seed = std::stoull(f[0]);
    r.method = f[1];
    r.family = f[2];
    r.nodes = std::stol(f[3]);
    r.stalk_dim = std::stol(f[4]);
    r.samples = std::stol(f[5]);
    r.ratio = std::stod(f[6]);
    r.alpha = std::stod(f[7]);
    r.beta = std::stod(f[8]);
    r.f1 = std::stod(f[9]);
    r.weight_mse = std::stod(f[10]);
    r.empirical_tv = std::stod(f[11]);
    r.spectral_distance = std::stod(f[12]);
    r.heat_distance = std::stod(f[13]);
    r.kernel_dim_est = std::stol(f[14]);
    r.kernel_dim_true = std::stol(f[15]);
    r.wall_time_s = std::stod(f[16]);
    r.failed = f[17] == "1";
    return r;
  } catch (const std::logic_error&) {
    throw InputError("malformed results row: " + line);
  }
}

nlohmann::json to_json(const EvalReport& r) {
  return {{"seed", r.seed},
          {"method", r.method},
          {"family", r.family},
          {"v", r.nodes},
          {"n", r.stalk_dim},
          {"M", r.samples},
          {"r", r.ratio},
          {"alpha", r.alpha},
          {"beta", r.beta},
          {"f1", r.f1},
          {"weight_mse", r.weight_mse},
          {"empirical_tv", r.empirical_tv},
          {"spectral_dist", r.spectral_distance},
          {"heat_dist", r.heat_distance},
          {"kernel_dim_est", r.kernel_dim_est},
          {"kernel_dim_true", r.kernel_dim_true},
          {"wall_time_s", r.wall_time_s},
          {"failed", r.failed}};
}

}  // namespace scgl
