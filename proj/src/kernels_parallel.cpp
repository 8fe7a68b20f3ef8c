#include "scgl/kernels.hpp"

namespace scgl::kernels::parallel {

namespace {

// Combinatorial Laplacian row by row, so rows can be filled concurrently.
Eigen::MatrixXd combinatorial(const Eigen::VectorXd& w, const EdgeIndexMap& map) {
  const Index v = map.nodes();
  Eigen::MatrixXd lap(v, v);
#pragma omp parallel for schedule(static) if (v >= kParallelMinNodes)
  for (Index i = 0; i < v; ++i) {
    double degree = 0.0;
    for (Index j = 0; j < v; ++j) {
      if (j == i) continue;
      const double wij = w(map.slot(i, j));
      lap(i, j) = -wij;
      degree += wij;
    }
    lap(i, i) = degree;
  }
  return lap;
}

}  // namespace

Eigen::MatrixXd kron_laplacian(const Eigen::VectorXd& w, const EdgeIndexMap& map, Index n) {
  const Index v = map.nodes();
  const Eigen::MatrixXd lap = combinatorial(w, map);
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(v * n, v * n);
#pragma omp parallel for schedule(static) if (v >= kParallelMinNodes)
  for (Index j = 0; j < v; ++j)
    for (Index i = 0; i < v; ++i)
      for (Index a = 0; a < n; ++a) out(i * n + a, j * n + a) = lap(i, j);
  return out;
}

Eigen::VectorXd kron_adjoint(const Eigen::MatrixXd& y, const EdgeIndexMap& map, Index n) {
  const Index v = map.nodes();
  // Block traces first: T_ij = Tr(Y_ij), then one pass over the slots.
  Eigen::MatrixXd traces(v, v);
#pragma omp parallel for schedule(static) if (v >= kParallelMinNodes)
  for (Index j = 0; j < v; ++j)
    for (Index i = 0; i < v; ++i) {
      double t = 0.0;
      for (Index a = 0; a < n; ++a) t += y(i * n + a, j * n + a);
      traces(i, j) = t;
    }
  Eigen::VectorXd out(map.size());
#pragma omp parallel for schedule(static) if (v >= kParallelMinNodes)
  for (Index k = 0; k < map.size(); ++k) {
    const Index i = map.first(k);
    const Index j = map.second(k);
    out(k) = traces(i, i) + traces(j, j) - traces(i, j) - traces(j, i);
  }
  return out;
}

Eigen::MatrixXd conjugate_inner(const NodeBases& bases, const Eigen::MatrixXd& x) {
  const Index v = bases.nodes();
  const Index n = bases.stalk_dim();
  Eigen::MatrixXd out(v * n, v * n);
#pragma omp parallel if (v >= kParallelMinNodes)
  {
    Eigen::MatrixXd tmp(n, n);
#pragma omp for schedule(static)
    for (Index i = 0; i < v; ++i) {
      for (Index j = 0; j < v; ++j) {
        tmp.noalias() = bases[i].transpose() * x.block(i * n, j * n, n, n);
        out.block(i * n, j * n, n, n).noalias() = tmp * bases[j];
      }
    }
  }
  return out;
}

Eigen::MatrixXd conjugate_outer(const NodeBases& bases, const Eigen::MatrixXd& x) {
  const Index v = bases.nodes();
  const Index n = bases.stalk_dim();
  Eigen::MatrixXd out(v * n, v * n);
#pragma omp parallel if (v >= kParallelMinNodes)
  {
    Eigen::MatrixXd tmp(n, n);
#pragma omp for schedule(static)
    for (Index i = 0; i < v; ++i) {
      for (Index j = 0; j < v; ++j) {
        tmp.noalias() = bases[i] * x.block(i * n, j * n, n, n);
        out.block(i * n, j * n, n, n).noalias() = tmp * bases[j].transpose();
      }
    }
  }
  return out;
}

Eigen::MatrixXd assemble_connection(const Eigen::MatrixXd& lap, const NodeBases& bases) {
  const Index v = bases.nodes();
  const Index n = bases.stalk_dim();
  Eigen::MatrixXd out(v * n, v * n);
#pragma omp parallel for schedule(static) if (v >= kParallelMinNodes)
  for (Index i = 0; i < v; ++i) {
    for (Index j = 0; j < v; ++j) {
      auto blk = out.block(i * n, j * n, n, n);
      if (lap(i, j) == 0.0) {
        blk.setZero();
      } else if (i == j) {
        blk.setIdentity();
        blk *= lap(i, i);
      } else {
        blk.noalias() = bases[i].transpose() * bases[j];
        blk *= lap(i, j);
      }
    }
  }
  return out;
}

double coupled_trace(const Eigen::MatrixXd& lap, const NodeBases& bases, const Eigen::MatrixXd& a) {
  const Index v = bases.nodes();
  const Index n = bases.stalk_dim();
  Eigen::VectorXd row_sums(v);
#pragma omp parallel if (v >= kParallelMinNodes)
  {
    Eigen::MatrixXd tmp(n, n);
#pragma omp for schedule(static)
    for (Index u = 0; u < v; ++u) {
      double s = 0.0;
      for (Index w = 0; w < v; ++w) {
        if (lap(u, w) == 0.0) continue;
        tmp.noalias() = bases[u] * a.block(u * n, w * n, n, n);
        s += lap(u, w) * tmp.cwiseProduct(bases[w]).sum();
      }
      row_sums(u) = s;
    }
  }
  return row_sums.sum();
}

std::vector<Eigen::MatrixXd> coupled_gradient(const Eigen::MatrixXd& lap, const NodeBases& bases,
                                              const Eigen::MatrixXd& a) {
  const Index v = bases.nodes();
  const Index n = bases.stalk_dim();
  std::vector<Eigen::MatrixXd> grad(static_cast<std::size_t>(v));
#pragma omp parallel if (v >= kParallelMinNodes)
  {
    Eigen::MatrixXd acc(n, n);
#pragma omp for schedule(static)
    for (Index u = 0; u < v; ++u) {
      acc.setZero();
      for (Index w = 0; w < v; ++w) {
        if (lap(u, w) == 0.0) continue;
        acc.noalias() += (2.0 * lap(u, w)) * bases[w] * a.block(w * n, u * n, n, n);
      }
      grad[static_cast<std::size_t>(u)] = acc;
    }
  }
  return grad;
}

}  // namespace scgl::kernels::parallel
