#include "scgl/kernels.hpp"

namespace scgl::kernels::serial {

Eigen::MatrixXd kron_laplacian(const Eigen::VectorXd& w, const EdgeIndexMap& map, Index n) {
  const Index v = map.nodes();
  Eigen::MatrixXd lap = Eigen::MatrixXd::Zero(v, v);
  for (Index k = 0; k < map.size(); ++k) {
    const Index i = map.first(k);
    const Index j = map.second(k);
    lap(i, j) -= w(k);
    lap(j, i) -= w(k);
    lap(i, i) += w(k);
    lap(j, j) += w(k);
  }
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(v * n, v * n);
  for (Index i = 0; i < v; ++i)
    for (Index j = 0; j < v; ++j)
      for (Index a = 0; a < n; ++a) out(i * n + a, j * n + a) = lap(i, j);
  return out;
}

Eigen::VectorXd kron_adjoint(const Eigen::MatrixXd& y, const EdgeIndexMap& map, Index n) {
  Eigen::VectorXd out(map.size());
  for (Index k = 0; k < map.size(); ++k) {
    const Index i = map.first(k);
    const Index j = map.second(k);
    out(k) = y.block(i * n, i * n, n, n).trace() + y.block(j * n, j * n, n, n).trace() -
             y.block(i * n, j * n, n, n).trace() - y.block(j * n, i * n, n, n).trace();
  }
  return out;
}

Eigen::MatrixXd conjugate_inner(const NodeBases& bases, const Eigen::MatrixXd& x) {
  const Index v = bases.nodes();
  const Index n = bases.stalk_dim();
  Eigen::MatrixXd out(v * n, v * n);
  for (Index i = 0; i < v; ++i)
    for (Index j = 0; j < v; ++j)
      out.block(i * n, j * n, n, n) = bases[i].transpose() * x.block(i * n, j * n, n, n) * bases[j];
  return out;
}

Eigen::MatrixXd conjugate_outer(const NodeBases& bases, const Eigen::MatrixXd& x) {
  const Index v = bases.nodes();
  const Index n = bases.stalk_dim();
  Eigen::MatrixXd out(v * n, v * n);
  for (Index i = 0; i < v; ++i)
    for (Index j = 0; j < v; ++j)
      out.block(i * n, j * n, n, n) = bases[i] * x.block(i * n, j * n, n, n) * bases[j].transpose();
  return out;
}

Eigen::MatrixXd assemble_connection(const Eigen::MatrixXd& lap, const NodeBases& bases) {
  const Index v = bases.nodes();
  const Index n = bases.stalk_dim();
  Eigen::MatrixXd out(v * n, v * n);
  for (Index i = 0; i < v; ++i)
    for (Index j = 0; j < v; ++j)
      out.block(i * n, j * n, n, n) = lap(i, j) * (bases[i].transpose() * bases[j]);
  return out;
}

double coupled_trace(const Eigen::MatrixXd& lap, const NodeBases& bases, const Eigen::MatrixXd& a) {
  const Index v = bases.nodes();
  const Index n = bases.stalk_dim();
  double total = 0.0;
  for (Index u = 0; u < v; ++u)
    for (Index w = 0; w < v; ++w)
      total += lap(u, w) *
               (bases[u] * a.block(u * n, w * n, n, n) * bases[w].transpose()).trace();
  return total;
}

std::vector<Eigen::MatrixXd> coupled_gradient(const Eigen::MatrixXd& lap, const NodeBases& bases,
                                              const Eigen::MatrixXd& a) {
  const Index v = bases.nodes();
  const Index n = bases.stalk_dim();
  std::vector<Eigen::MatrixXd> grad(static_cast<std::size_t>(v), Eigen::MatrixXd::Zero(n, n));
  for (Index u = 0; u < v; ++u)
    for (Index w = 0; w < v; ++w)
      grad[static_cast<std::size_t>(u)] += 2.0 * lap(u, w) * bases[w] * a.block(w * n, u * n, n, n);
  return grad;
}

}  // namespace scgl::kernels::serial
