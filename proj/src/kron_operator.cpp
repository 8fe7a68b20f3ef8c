#include "scgl/kron_operator.hpp"

#include "scgl/errors.hpp"
#include "scgl/kernels.hpp"

#include <string>

namespace scgl {

namespace {

void check_weights(const Eigen::VectorXd& w, Index nodes, const char* who) {
  if (w.size() != pair_count(nodes)) {
    throw ArgumentError(std::string(who) + ": weight vector has length " + std::to_string(w.size()) +
                        ", expected " + std::to_string(pair_count(nodes)));
  }
  if ((w.array() < 0.0).any()) throw ArgumentError(std::string(who) + ": negative weight");
}

}  // namespace

Eigen::MatrixXd combinatorial_laplacian(const Eigen::VectorXd& w, Index nodes) {
  check_weights(w, nodes, "combinatorial_laplacian");
  return kernels::parallel::kron_laplacian(w, EdgeIndexMap(nodes), 1);
}

Eigen::MatrixXd kron_laplacian(const Eigen::VectorXd& w, Index nodes, Index stalk_dim) {
  check_weights(w, nodes, "kron_laplacian");
  if (stalk_dim < 1) throw ArgumentError("kron_laplacian: stalk dimension must be positive");
  return kernels::parallel::kron_laplacian(w, EdgeIndexMap(nodes), stalk_dim);
}

Eigen::VectorXd kron_laplacian_adjoint(const Eigen::MatrixXd& y, Index nodes, Index stalk_dim) {
  if (y.rows() != nodes * stalk_dim || y.cols() != nodes * stalk_dim) {
    throw ArgumentError("kron_laplacian_adjoint: expected a " + std::to_string(nodes * stalk_dim) +
                        " square matrix, got " + std::to_string(y.rows()) + "x" +
                        std::to_string(y.cols()));
  }
  return kernels::parallel::kron_adjoint(y, EdgeIndexMap(nodes), stalk_dim);
}

}  // namespace scgl
