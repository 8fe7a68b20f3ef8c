#pragma once

#include "scgl/connection_graph.hpp"

#include <Eigen/Dense>
#include <json.hpp>

#include <cstdint>
#include <iosfwd>
#include <string>

namespace scgl {

inline constexpr double kDefaultEdgeEps = 1e-4;

/// F1 of the predicted support {w_hat > eps} against {w_true > 0}; 1 when
/// both supports are empty.
double f1_sparsity(const Eigen::VectorXd& w_hat, const Eigen::VectorXd& w_true,
                   double eps = kDefaultEdgeEps);

/// Mean squared difference over all v(v-1)/2 entries.
double weight_mse(const Eigen::VectorXd& w_hat, const Eigen::VectorXd& w_true);

/// M^-1 Tr(L Y Y^T) over the M columns of Y.
double empirical_tv(const Eigen::MatrixXd& laplacian, const Eigen::MatrixXd& signals);

/// Mean absolute difference of the ascending spectra.
double spectral_distance(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b);

/// Long-time average of ||exp(-tA) - exp(-tB)||_F^2, i.e. the squared distance
/// between the kernel projectors of A and B. An eigenvalue counts as kernel
/// when below zero_tol * max(lambda_max, 1). Throws ArgumentError when an
/// input has an eigenvalue below -zero_tol * max(lambda_max, 1).
double heat_distance(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b, double zero_tol = 1e-8);

/// Number of eigenvalues below zero_tol * max(lambda_max, 1).
Index kernel_dimension(const Eigen::MatrixXd& laplacian, double zero_tol = 1e-8);

struct EvalReport {
  std::uint64_t seed = 0;
  std::string method;
  std::string family;
  Index nodes = 0;
  Index stalk_dim = 0;
  Index samples = 0;
  double ratio = 0.0;
  double alpha = 0.0;
  double beta = 0.0;
  double f1 = 0.0;
  double weight_mse = 0.0;
  double empirical_tv = 0.0;
  double spectral_distance = 0.0;
  double heat_distance = 0.0;
  Index kernel_dim_est = 0;
  Index kernel_dim_true = 0;
  double wall_time_s = 0.0;
  bool failed = false;
};

/// Metric part of an EvalReport; bookkeeping fields are left for the caller.
EvalReport evaluate(const Eigen::VectorXd& w_hat, const Eigen::MatrixXd& laplacian_hat,
                    const Eigen::VectorXd& w_true, const Eigen::MatrixXd& laplacian_true,
                    const Eigen::MatrixXd& test_signals, double eps = kDefaultEdgeEps,
                    double zero_tol = 1e-8);

/// Header and row of the results CSV. Columns:
/// seed,method,family,v,n,M,r,alpha,beta,f1,weight_mse,empirical_tv,
/// spectral_dist,heat_dist,kernel_dim_est,kernel_dim_true,wall_time_s,failed
const std::string& results_csv_header();
void write_csv_row(std::ostream& out, const EvalReport& r);
EvalReport parse_csv_row(const std::string& line);

nlohmann::json to_json(const EvalReport& r);

}  // namespace scgl
