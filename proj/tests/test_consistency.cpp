#include "scgl/consistency.hpp"
#include "scgl/errors.hpp"
#include "scgl/kron_operator.hpp"
#include "test_util.hpp"

#include <Eigen/Eigenvalues>
#include <gtest/gtest.h>

#include <cmath>
#include <limits>

using namespace scgl;
using scgl::testing::edge_product_gap;
using scgl::testing::random_bases;

namespace {

// Cycle 0-1-2-0 with given maps.
ConnectionGraph triangle(const Eigen::MatrixXd& m10, const Eigen::MatrixXd& m21, const Eigen::MatrixXd& m20) {
  return ConnectionGraph(3, 2, {{1, 0, 1.0, m10}, {2, 1, 1.0, m21}, {2, 0, 1.0, m20}});
}

}  // namespace

TEST(CheckConsistency, ConsistentFromBases) {
  Rng rng(8);
  for (int t = 0; t < 10; ++t) {
    const auto w = scgl::testing::random_weights(8, 1.0, rng);
    const auto g = consistent_graph(w, random_bases(8, 2, rng));
    const auto rep = check_consistency(g, 1e-10);
    EXPECT_TRUE(rep.consistent);
    EXPECT_LT(rep.max_cycle_defect, 1e-12);
    EXPECT_LT(rep.spectral_defect, 1e-10);
  }
}

TEST(CheckConsistency, DetectsHolonomy) {
  // Rotations composing to a nonzero angle around the triangle.
  const auto g = triangle(planar_rotation(0.1), planar_rotation(0.2), planar_rotation(0.5));
  const auto rep = check_consistency(g, 1e-8);
  EXPECT_FALSE(rep.consistent);
  EXPECT_GT(rep.max_cycle_defect, 0.1);
  EXPECT_GT(rep.spectral_defect, 1e-3);
  // Angles that do compose: O_20 = O_21 O_10 under O_ij = O_i^T O_j.
  const auto ok = triangle(planar_rotation(0.1), planar_rotation(0.2), planar_rotation(0.3));
  EXPECT_TRUE(check_consistency(ok, 1e-10).consistent);
}

TEST(CheckConsistency, DisconnectedGraphListsComponents) {
  const Eigen::MatrixXd id = Eigen::MatrixXd::Identity(2, 2);
  const ConnectionGraph g(5, 2, {{1, 0, 1.0, id}, {4, 3, 1.0, id}, {2, 1, 0.0, id}});
  try {
    check_consistency(g, 1e-8);
    FAIL() << "expected DisconnectedGraphError";
  } catch (const DisconnectedGraphError& e) {
    const std::vector<std::vector<long>> expected{{0, 1}, {2}, {3, 4}};
    EXPECT_EQ(e.components(), expected);
  }
}

TEST(CheckConsistency, SpectrumIsCombinatorialSpectrumRepeated) {
  Rng rng(12);
  const Index v = 10, n = 2;
  const auto w = scgl::testing::random_weights(v, 0.5, rng);
  const auto lap = assemble_from_bases(w, random_bases(v, n, rng));
  const Eigen::VectorXd big =
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(lap.matrix(), Eigen::EigenvaluesOnly).eigenvalues();
  const Eigen::VectorXd small =
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(combinatorial_laplacian(w, v), Eigen::EigenvaluesOnly).eigenvalues();
  for (Index k = 0; k < v; ++k)
    for (Index r = 0; r < n; ++r) EXPECT_NEAR(big(k * n + r), small(k), 1e-10);
}

TEST(Synchronize, RecoversEdgeProductsUpToGauge) {
  Rng rng(31);
  for (Index n : {2, 3}) {
    for (int t = 0; t < 5; ++t) {
      const Index v = 12;
      auto w = scgl::testing::random_weights(v, 0.4, rng);
      for (Index i = 1; i < v; ++i) w(EdgeIndexMap(v).slot(i, i - 1)) = 1.0;  // path keeps it connected
      const auto truth = random_bases(v, n, rng);
      const auto rec = synchronize(assemble_from_bases(w, truth), 1e-8);
      EXPECT_LT(edge_product_gap(rec, truth), 1e-8);
      EXPECT_LT(rec.max_determinant_defect(), 1e-10);
      // The result is a common left rotation of the truth.
      const Eigen::MatrixXd g = rec[0] * truth[0].transpose();
      for (Index i = 0; i < v; ++i) EXPECT_LT((rec[i] - g * truth[i]).norm(), 1e-8);
    }
  }
}

TEST(Synchronize, GaugeInvariance) {
  Rng rng(2);
  const Index v = 9, n = 2;
  const auto w = scgl::testing::random_weights(v, 1.0, rng);
  const auto bases = random_bases(v, n, rng);
  std::vector<Eigen::MatrixXd> rotated;
  const Eigen::MatrixXd r = planar_rotation(1.234);
  for (Index i = 0; i < v; ++i) rotated.push_back(r * bases[i]);
  const NodeBases other(rotated);
  const auto a = synchronize(assemble_from_bases(w, bases), 1e-8);
  const auto b = synchronize(assemble_from_bases(w, other), 1e-8);
  EXPECT_LT(edge_product_gap(a, b), 1e-10);
}

TEST(Synchronize, RejectsInconsistentInput) {
  const auto g = triangle(planar_rotation(0.1), planar_rotation(0.2), planar_rotation(2.5));
  EXPECT_THROW(synchronize(build_connection_laplacian(g), 1e-8), SynchronizationError);
}

TEST(LogGdet, SkipsKernel) {
  Eigen::VectorXd e(4);
  e << 0.0, 1e-12, 2.0, 3.0;
  EXPECT_DOUBLE_EQ(log_gdet(e, 1e-9), std::log(6.0));
  EXPECT_EQ(log_gdet(Eigen::VectorXd::Zero(3), 1e-9), -std::numeric_limits<double>::infinity());
  e(0) = -1e-3;
  EXPECT_THROW(log_gdet(e, 1e-9), DomainError);
  EXPECT_DOUBLE_EQ(default_zero_tol(Eigen::Vector3d(0.0, 1.0, 4.0)), 4e-8);
}
