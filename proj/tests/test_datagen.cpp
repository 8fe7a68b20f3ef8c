#include "scgl/consistency.hpp"
#include "scgl/datagen.hpp"
#include "scgl/errors.hpp"
#include "scgl/kron_operator.hpp"
#include "scgl/metrics.hpp"
#include "test_util.hpp"

#include <Eigen/Eigenvalues>
#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <set>

using namespace scgl;

namespace {

Eigen::VectorXd sorted_eigs(const Eigen::MatrixXd& m) {
  return Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(m, Eigen::EigenvaluesOnly).eigenvalues();
}

}  // namespace

TEST(RandomRotation, IsSpecialOrthogonal) {
  Rng rng(4);
  for (Index n : {1, 2, 3, 5}) {
    for (int t = 0; t < 20; ++t) {
      const Eigen::MatrixXd r = random_rotation(n, rng);
      EXPECT_LT((r.transpose() * r - Eigen::MatrixXd::Identity(n, n)).norm(), 1e-12);
      EXPECT_NEAR(r.determinant(), 1.0, 1e-12);
    }
  }
}

TEST(RandomRotation, PlanarAnglesLookUniform) {
  Rng rng(8);
  std::vector<int> bins(8, 0);
  const int draws = 8000;
  for (int t = 0; t < draws; ++t) {
    const Eigen::MatrixXd r = random_rotation(2, rng);
    double a = std::atan2(r(1, 0), r(0, 0));
    if (a < 0) a += 2 * std::numbers::pi;
    ++bins[static_cast<std::size_t>(a / (2 * std::numbers::pi) * 8) % 8];
  }
  // chi-square with 7 dof; 24.3 is the 0.999 quantile
  double chi2 = 0.0;
  for (int b : bins) chi2 += (b - draws / 8.0) * (b - draws / 8.0) / (draws / 8.0);
  EXPECT_LT(chi2, 24.3);
}

TEST(SampleEr, DefaultsAreConsistentAndConnected) {
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    const auto gt = sample_er_cg(30, 2, default_er_probability(30), 0.2, 3.0, seed);
    EXPECT_TRUE(check_consistency(gt.cg, 1e-10).consistent);
    EXPECT_EQ(connected_components(gt.cg).size(), 1u);
    EXPECT_EQ(kernel_dimension(gt.laplacian.matrix()), 2);
    for (const auto& e : gt.cg.edges()) {
      EXPECT_GE(e.weight, 0.2);
      EXPECT_LT(e.weight, 3.0);
    }
  }
  EXPECT_NEAR(default_er_probability(30), 1.1 * std::log(30.0) / 30.0, 1e-15);
  EXPECT_EQ(default_er_probability(3, 5.0), 1.0);
}

TEST(SampleEr, FullProbabilityGivesCompleteGraph) {
  const auto gt = sample_er_cg(9, 3, 1.0, 0.2, 3.0, 5);
  EXPECT_EQ(static_cast<Index>(gt.cg.edges().size()), pair_count(9));
}

TEST(SampleEr, RepairsDisconnectedDraws) {
  // p this small leaves almost every draw disconnected before repair.
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    const auto gt = sample_er_cg(20, 2, 0.01, 0.5, 1.0, seed);
    EXPECT_EQ(connected_components(gt.cg).size(), 1u);
    EXPECT_GT(gt.provenance.at("repair_edges").get<int>(), 0);
    for (const auto& e : gt.cg.edges()) {
      EXPECT_GE(e.weight, 0.5);
      EXPECT_LT(e.weight, 1.0);
    }
  }
}

TEST(SampleEr, IsDeterministicAndValidates) {
  const auto a = sample_er_cg(12, 2, 0.4, 0.2, 3.0, 99);
  const auto b = sample_er_cg(12, 2, 0.4, 0.2, 3.0, 99);
  EXPECT_EQ(a.laplacian.matrix(), b.laplacian.matrix());
  const auto c = sample_er_cg(12, 2, 0.4, 0.2, 3.0, 100);
  EXPECT_NE(a.laplacian.matrix(), c.laplacian.matrix());
  EXPECT_THROW(sample_er_cg(1, 2, 0.5, 0.2, 3.0, 1), ArgumentError);
  EXPECT_THROW(sample_er_cg(5, 2, 0.0, 0.2, 3.0, 1), ArgumentError);
  EXPECT_THROW(sample_er_cg(5, 2, 0.5, 3.0, 0.2, 1), ArgumentError);
}

TEST(Fibonacci, UnitDistinctQuasiUniform) {
  const auto pts = fibonacci_sphere(50);
  ASSERT_EQ(pts.size(), 50u);
  std::vector<double> nearest;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    EXPECT_NEAR(pts[i].norm(), 1.0, 1e-12);
    double best = 10.0;
    for (std::size_t j = 0; j < pts.size(); ++j)
      if (j != i) best = std::min(best, (pts[i] - pts[j]).norm());
    EXPECT_GT(best, 0.0);
    nearest.push_back(best);
  }
  const Eigen::Map<Eigen::VectorXd> d(nearest.data(), static_cast<Index>(nearest.size()));
  const double mean = d.mean();
  const double sd = std::sqrt((d.array() - mean).square().sum() / (d.size() - 1));
  EXPECT_LT(sd / mean, 0.5);
}

TEST(Knn, TetrahedronGivesCompleteGraph) {
  const double s = 1.0 / std::sqrt(3.0);
  const std::vector<Eigen::Vector3d> tet{{s, s, s}, {s, -s, -s}, {-s, s, -s}, {-s, -s, s}};
  const auto pairs = knn_graph(tet, 3);
  const std::vector<std::pair<Index, Index>> expected{{1, 0}, {2, 0}, {3, 0}, {2, 1}, {3, 1}, {3, 2}};
  EXPECT_EQ(pairs, expected);
}

TEST(Knn, OneNeighborIsSymmetrized) {
  // Points at angles 0, 0.1, 0.3 on a great circle: 0 <-> 1 mutual, 2 -> 1.
  auto on_circle = [](double a) { return Eigen::Vector3d(std::cos(a), std::sin(a), 0.0); };
  const auto pairs = knn_graph({on_circle(0.0), on_circle(0.1), on_circle(0.3)}, 1);
  const std::vector<std::pair<Index, Index>> expected{{1, 0}, {2, 1}};
  EXPECT_EQ(pairs, expected);
}

TEST(Knn, TiesGoToTheSmallerIndex) {
  // Node 0 is equidistant from 1 and 2; nodes 3 and 4 sit next to 1 and 2 so
  // neither of those lists node 0 itself.
  const std::vector<Eigen::Vector3d> pts{{1, 0, 0},
                                         {0, 1, 0},
                                         {0, -1, 0},
                                         Eigen::Vector3d(-0.1, 1, 0).normalized(),
                                         Eigen::Vector3d(-0.1, -1, 0).normalized()};
  const auto pairs = knn_graph(pts, 1);
  const std::vector<std::pair<Index, Index>> expected{{1, 0}, {3, 1}, {4, 2}};
  EXPECT_EQ(pairs, expected);
}

TEST(TangentFrames, OrthonormalTangentAndOutward) {
  const auto pts = fibonacci_sphere(50);
  const auto pairs = knn_graph(pts, 4);
  const auto frames = tangent_frames(pts, pairs);
  for (std::size_t i = 0; i < pts.size(); ++i) {
    const auto& f = frames[i];
    EXPECT_LT((f.transpose() * f - Eigen::Matrix2d::Identity()).norm(), 1e-10);
    EXPECT_LT((f.transpose() * pts[i]).norm(), 1e-10);
    EXPECT_GT(f.col(0).cross(f.col(1)).dot(pts[i]), 0.0);
  }
  // No global frame: some pair of far-apart nodes has very different frames.
  EXPECT_GT((frames.front() - frames.back()).norm(), 0.5);
}

TEST(TangentFrames, NorthPoleFrameSpansTheEquatorialPlane) {
  std::vector<Eigen::Vector3d> pts{{0, 0, 1}};
  const double z = std::cos(0.3), r = std::sin(0.3);
  for (int k = 0; k < 4; ++k) {
    const double a = k * std::numbers::pi / 2;
    pts.emplace_back(r * std::cos(a), r * std::sin(a), z);
  }
  const auto frames = tangent_frames(pts, {{1, 0}, {2, 0}, {3, 0}, {4, 0}, {2, 1}, {3, 2}, {4, 3}, {4, 1}});
  EXPECT_LT(frames[0].row(2).norm(), 1e-12);
}

TEST(TangentFrames, DegenerateNeighborhoodNamesTheNode) {
  const std::vector<Eigen::Vector3d> pts{{1, 0, 0}, {0, 1, 0}, {0, 0, 1}};
  try {
    tangent_frames(pts, {{1, 0}, {2, 1}});
    FAIL() << "expected an error";
  } catch (const Error& e) {
    EXPECT_NE(std::string(e.what()).find("node 1"), std::string::npos) << e.what();
  }
}

TEST(VdmMaps, IdenticalAndRotatedFrames) {
  TangentFrame f;
  f << 1, 0, 0, 1, 0, 0;
  const double theta = 0.7;
  const Eigen::Matrix2d rot = planar_rotation(theta);
  const TangentFrame g = f * rot;
  const auto edges = vdm_edge_maps({f, f, g}, {{1, 0}, {2, 0}});
  EXPECT_LT((edges[0].map - Eigen::Matrix2d::Identity()).norm(), 1e-12);
  EXPECT_LT((edges[1].map - rot.transpose()).norm(), 1e-10);
  for (const auto& e : edges) {
    EXPECT_EQ(e.weight, 1.0);
    EXPECT_NEAR(e.map.determinant(), 1.0, 1e-12);
  }
}

TEST(Sphere, PipelineGivesConsistentGraphWithTwoDimensionalKernel) {
  const auto gt = spherical_cg(50, 4, 1);
  EXPECT_EQ(gt.cg.nodes(), 50);
  const auto report = check_consistency(gt.cg, 1e-8);
  EXPECT_TRUE(report.consistent);
  EXPECT_EQ(kernel_dimension(gt.laplacian.matrix()), 2);
  const Eigen::MatrixXd lap = combinatorial_laplacian(gt.cg.weights(), 50);
  const Eigen::VectorXd base = sorted_eigs(lap);
  const Eigen::VectorXd full = sorted_eigs(gt.laplacian.matrix());
  for (Index i = 0; i < 50; ++i) {
    EXPECT_NEAR(full(2 * i), base(i), 1e-9);
    EXPECT_NEAR(full(2 * i + 1), base(i), 1e-9);
  }
  const auto again = spherical_cg(50, 4, 1);
  ASSERT_EQ(again.cg.edges().size(), gt.cg.edges().size());
  for (std::size_t e = 0; e < gt.cg.edges().size(); ++e) {
    EXPECT_EQ(again.cg.edges()[e].i, gt.cg.edges()[e].i);
    EXPECT_EQ(again.cg.edges()[e].map, gt.cg.edges()[e].map);
  }
}

TEST(Signals, CovarianceMatchesPseudoInverse) {
  const auto gt = sample_er_cg(5, 2, 0.7, 0.2, 3.0, 17);
  const Index m = 100000;
  const auto x = sample_signals(gt, m, 18).x;
  const Eigen::MatrixXd pinv = gt.laplacian.matrix().completeOrthogonalDecomposition().pseudoInverse();
  const Eigen::MatrixXd s = x * x.transpose() / static_cast<double>(m);
  int outside = 0;
  for (Index r = 0; r < 10; ++r) {
    for (Index c = 0; c < 10; ++c) {
      // Var(x_r x_c) = C_rr C_cc + C_rc^2 for a zero-mean Gaussian.
      const double se = std::sqrt((pinv(r, r) * pinv(c, c) + pinv(r, c) * pinv(r, c)) / m);
      if (std::abs(s(r, c) - pinv(r, c)) > 5 * se + 1e-12) ++outside;
    }
  }
  EXPECT_EQ(outside, 0);
}

TEST(Signals, OrthogonalToKernelAndTvApproachesRank) {
  const auto gt = sample_er_cg(30, 2, default_er_probability(30), 0.2, 3.0, 3);
  const auto sig = sample_signals(gt, 20000, 4);
  const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(gt.laplacian.matrix());
  const Eigen::MatrixXd kernel = es.eigenvectors().leftCols(2);
  EXPECT_LT((kernel.transpose() * sig.x).cwiseAbs().maxCoeff(), 1e-8);
  // TV is a mean of M chi-square(58) draws: sd sqrt(116 / M) ~ 0.08.
  EXPECT_NEAR(empirical_tv(gt.laplacian.matrix(), sig.x), 58.0, 0.5);
  EXPECT_EQ(sig.samples(), 20000);
}

TEST(Signals, SampleRatiosMatchTheRegimes) {
  EXPECT_EQ(samples_for_ratio(1.5, 30, 2), 90);
  EXPECT_EQ(samples_for_ratio(5, 30, 2), 300);
  EXPECT_EQ(samples_for_ratio(15, 30, 2), 900);
  const auto gt = sample_er_cg(6, 2, 0.5, 0.2, 3.0, 2);
  EXPECT_EQ(sample_signals(gt, 10, 3).x, sample_signals(gt, 10, 3).x);
}
