#include "scgl/kernels.hpp"
#include "scgl/kron_operator.hpp"
#include "test_util.hpp"

#include <gtest/gtest.h>
#include <omp.h>

using namespace scgl;
using scgl::testing::random_bases;
using scgl::testing::random_matrix;
using scgl::testing::random_symmetric;

namespace {

struct Instance {
  Index v, n;
  Eigen::VectorXd w;
  NodeBases bases;
  Eigen::MatrixXd x, a, lap;
};

Instance make(Index v, Index n, std::uint64_t seed) {
  Rng rng(seed);
  Instance in{v, n, scgl::testing::random_weights(v, 0.4, rng), random_bases(v, n, rng),
              random_matrix(v * n, v * n, rng), random_symmetric(v * n, rng), {}};
  in.lap = combinatorial_laplacian(in.w, v);
  return in;
}

// Sizes on both sides of the parallel threshold.
const Index kSizes[] = {3, 9, kernels::kParallelMinNodes + 5};

}  // namespace

TEST(Kernels, SerialMatchesDenseReference) {
  for (Index v : kSizes) {
    for (Index n : {1, 2, 3}) {
      const auto in = make(v, n, 100 + v * 10 + n);
      const EdgeIndexMap map(v);
      const Eigen::MatrixXd o = in.bases.dense();
      const Eigen::MatrixXd k = kron_laplacian(in.w, v, n);
      EXPECT_LT((kernels::serial::kron_laplacian(in.w, map, n) - k).cwiseAbs().maxCoeff(), 1e-13);
      EXPECT_LT((kernels::serial::conjugate_inner(in.bases, in.x) - o.transpose() * in.x * o).cwiseAbs().maxCoeff(),
                1e-12);
      EXPECT_LT((kernels::serial::conjugate_outer(in.bases, in.x) - o * in.x * o.transpose()).cwiseAbs().maxCoeff(),
                1e-12);
      EXPECT_LT((kernels::serial::assemble_connection(in.lap, in.bases) - o.transpose() * k * o).cwiseAbs().maxCoeff(),
                1e-12);
      const double trace = k.cwiseProduct(o * in.a * o.transpose()).sum();
      EXPECT_NEAR(kernels::serial::coupled_trace(in.lap, in.bases, in.a), trace, 1e-10 * std::max(1.0, std::abs(trace)));
      // Block-diagonal part of the dense gradient 2 K O A.
      const Eigen::MatrixXd dense_grad = 2.0 * k * o * in.a;
      const auto grad = kernels::serial::coupled_gradient(in.lap, in.bases, in.a);
      for (Index u = 0; u < v; ++u) {
        EXPECT_LT((grad[static_cast<std::size_t>(u)] - dense_grad.block(u * n, u * n, n, n)).cwiseAbs().maxCoeff(),
                  1e-10);
      }
    }
  }
}

struct Outputs {
  Eigen::MatrixXd kron, inner, outer, connection;
  Eigen::VectorXd adjoint;
  double trace = 0.0;
  std::vector<Eigen::MatrixXd> grad;
};

template <typename Backend>
Outputs run_kernels(const Instance& in) {
  const EdgeIndexMap map(in.v);
  return {Backend::kron_laplacian(in.w, map, in.n),
          Backend::conjugate_inner(in.bases, in.x),
          Backend::conjugate_outer(in.bases, in.x),
          Backend::assemble_connection(in.lap, in.bases),
          Backend::kron_adjoint(in.x, map, in.n),
          Backend::coupled_trace(in.lap, in.bases, in.a),
          Backend::coupled_gradient(in.lap, in.bases, in.a)};
}

struct SerialBackend {
  static auto kron_laplacian(const Eigen::VectorXd& w, const EdgeIndexMap& m, Index n) { return kernels::serial::kron_laplacian(w, m, n); }
  static auto kron_adjoint(const Eigen::MatrixXd& y, const EdgeIndexMap& m, Index n) { return kernels::serial::kron_adjoint(y, m, n); }
  static auto conjugate_inner(const NodeBases& b, const Eigen::MatrixXd& x) { return kernels::serial::conjugate_inner(b, x); }
  static auto conjugate_outer(const NodeBases& b, const Eigen::MatrixXd& x) { return kernels::serial::conjugate_outer(b, x); }
  static auto assemble_connection(const Eigen::MatrixXd& l, const NodeBases& b) { return kernels::serial::assemble_connection(l, b); }
  static auto coupled_trace(const Eigen::MatrixXd& l, const NodeBases& b, const Eigen::MatrixXd& a) { return kernels::serial::coupled_trace(l, b, a); }
  static auto coupled_gradient(const Eigen::MatrixXd& l, const NodeBases& b, const Eigen::MatrixXd& a) { return kernels::serial::coupled_gradient(l, b, a); }
};

struct ParallelBackend {
  static auto kron_laplacian(const Eigen::VectorXd& w, const EdgeIndexMap& m, Index n) { return kernels::parallel::kron_laplacian(w, m, n); }
  static auto kron_adjoint(const Eigen::MatrixXd& y, const EdgeIndexMap& m, Index n) { return kernels::parallel::kron_adjoint(y, m, n); }
  static auto conjugate_inner(const NodeBases& b, const Eigen::MatrixXd& x) { return kernels::parallel::conjugate_inner(b, x); }
  static auto conjugate_outer(const NodeBases& b, const Eigen::MatrixXd& x) { return kernels::parallel::conjugate_outer(b, x); }
  static auto assemble_connection(const Eigen::MatrixXd& l, const NodeBases& b) { return kernels::parallel::assemble_connection(l, b); }
  static auto coupled_trace(const Eigen::MatrixXd& l, const NodeBases& b, const Eigen::MatrixXd& a) { return kernels::parallel::coupled_trace(l, b, a); }
  static auto coupled_gradient(const Eigen::MatrixXd& l, const NodeBases& b, const Eigen::MatrixXd& a) { return kernels::parallel::coupled_gradient(l, b, a); }
};

double max_gap(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) { return (a - b).cwiseAbs().maxCoeff(); }

// The parallel kernels skip zero weights and sum in a different order, so
// they agree with the serial reference to round-off, and with themselves
// bit for bit whatever the thread count.
TEST(Kernels, ParallelMatchesSerialReference) {
  for (Index v : kSizes) {
    for (Index n : {1, 2, 3}) {
      const auto in = make(v, n, 7 + v + n);
      const auto s = run_kernels<SerialBackend>(in);
      const auto p = run_kernels<ParallelBackend>(in);
      EXPECT_EQ(p.kron, s.kron);
      EXPECT_EQ(p.adjoint, s.adjoint);
      EXPECT_LT(max_gap(p.inner, s.inner), 1e-12);
      EXPECT_LT(max_gap(p.outer, s.outer), 1e-12);
      EXPECT_LT(max_gap(p.connection, s.connection), 1e-12);
      EXPECT_NEAR(p.trace, s.trace, 1e-11 * std::max(1.0, std::abs(s.trace)));
      for (std::size_t u = 0; u < s.grad.size(); ++u) EXPECT_LT(max_gap(p.grad[u], s.grad[u]), 1e-11);
    }
  }
}

TEST(Kernels, ParallelIsBitIdenticalAcrossThreadCounts) {
  const int saved = omp_get_max_threads();
  for (Index v : kSizes) {
    for (Index n : {1, 2, 3}) {
      const auto in = make(v, n, 7 + v + n);
      omp_set_num_threads(1);
      const auto ref = run_kernels<ParallelBackend>(in);
      for (int threads : {2, 3, 4}) {
        omp_set_num_threads(threads);
        const auto p = run_kernels<ParallelBackend>(in);
        EXPECT_EQ(p.kron, ref.kron);
        EXPECT_EQ(p.adjoint, ref.adjoint);
        EXPECT_EQ(p.inner, ref.inner);
        EXPECT_EQ(p.outer, ref.outer);
        EXPECT_EQ(p.connection, ref.connection);
        EXPECT_EQ(p.trace, ref.trace);
        for (std::size_t u = 0; u < ref.grad.size(); ++u) EXPECT_EQ(p.grad[u], ref.grad[u]);
      }
    }
  }
  omp_set_num_threads(saved);
}

TEST(Kernels, AdjointAgreesWithOperator) {
  for (Index v : kSizes) {
    const auto in = make(v, 2, 55 + v);
    const EdgeIndexMap map(v);
    const double lhs = kernels::parallel::kron_laplacian(in.w, map, 2).cwiseProduct(in.x).sum();
    const double rhs = in.w.dot(kernels::parallel::kron_adjoint(in.x, map, 2));
    EXPECT_NEAR(lhs, rhs, 1e-10 * std::max(1.0, std::abs(lhs)));
  }
}
