#pragma once

#include "scgl/edge_index.hpp"

#include <Eigen/Dense>

namespace scgl {

/// Minimizer over lambda > 0 of  -n log(lambda) + (beta/2)(n lambda^2 - 2 lambda t),
/// i.e. (t + sqrt(t^2 + 4 n^2 / beta)) / (2n).
double spectral_level(double trace, Index stalk_dim, double beta);

/// Solves
///   min  sum_i [ -n log(l_i) + (beta/2) ||M_ii - l_i I_n||_F^2 ]
///   s.t. c1 <= l_1 <= ... <= l_m <= c2
/// given only t_i = Tr(M_ii) (the rest of ||M_ii||^2 is constant).
///
/// Starts from the per-coordinate KKT values, pools adjacent violators
/// (a pooled block takes the KKT value of its mean trace), then clips to
/// [c1, c2]. Throws ConfigError when c1 > c2 or beta <= 0.
Eigen::VectorXd bounded_spectral_isotonic(const Eigen::VectorXd& traces, Index stalk_dim,
                                          double beta, double c1, double c2);

}  // namespace scgl
