#include "scgl/errors.hpp"
#include "scgl/kron_operator.hpp"
#include "scgl/metrics.hpp"
#include "test_util.hpp"

#include <Eigen/Eigenvalues>
#include <gtest/gtest.h>

#include <sstream>

using namespace scgl;

using scgl::testing::heat_quadrature;
using scgl::testing::random_psd_with_kernel;

TEST(F1, Examples) {
  Eigen::VectorXd w(3);
  w << 1, 0, 2;
  EXPECT_EQ(f1_sparsity(w, w), 1.0);
  EXPECT_NEAR(f1_sparsity(Eigen::Vector2d(1, 0), Eigen::Vector2d(1, 1)), 2.0 / 3.0, 1e-15);
  EXPECT_EQ(f1_sparsity(Eigen::Vector3d(1e-5, 0, 0), w), 0.0);
  EXPECT_EQ(f1_sparsity(Eigen::Vector3d::Zero(), Eigen::Vector3d::Zero()), 1.0);
  EXPECT_EQ(f1_sparsity(Eigen::Vector3d(0.5, 0, 0), w, 0.6), 0.0);
}

TEST(WeightMse, Examples) {
  Rng rng(1);
  const Eigen::VectorXd w = scgl::testing::random_weights(8, 0.5, rng);
  EXPECT_EQ(weight_mse(w, w), 0.0);
  EXPECT_DOUBLE_EQ(weight_mse(Eigen::Vector2d(1, 1), Eigen::Vector2d(1, 0)), 0.5);
  EXPECT_NEAR(weight_mse(2 * w, w), w.squaredNorm() / static_cast<double>(w.size()), 1e-14);
}

TEST(EmpiricalTv, Examples) {
  Eigen::Matrix2d l;
  l << 1, -1, -1, 1;
  EXPECT_EQ(empirical_tv(l, Eigen::Vector2d(1, 1)), 0.0);
  EXPECT_EQ(empirical_tv(l, Eigen::Vector2d(1, -1)), 4.0);
  Eigen::Matrix<double, 2, 2> y;
  y << 1, 1, 1, -1;
  EXPECT_EQ(empirical_tv(l, y), 2.0);
  EXPECT_THROW(empirical_tv(l, Eigen::MatrixXd(2, 0)), ArgumentError);
  EXPECT_THROW(empirical_tv(l, Eigen::MatrixXd::Ones(3, 2)), ArgumentError);
}

TEST(SpectralDistance, ExamplesAndConjugationInvariance) {
  EXPECT_EQ(spectral_distance(Eigen::Vector2d(0, 2).asDiagonal(), Eigen::Vector2d(0, 4).asDiagonal()), 1.0);
  Rng rng(2);
  const Eigen::MatrixXd a = scgl::testing::random_symmetric(6, rng);
  const Eigen::MatrixXd b = scgl::testing::random_symmetric(6, rng);
  EXPECT_NEAR(spectral_distance(a, a), 0.0, 1e-14);
  const Eigen::MatrixXd q = Eigen::HouseholderQR<Eigen::MatrixXd>(scgl::testing::random_matrix(6, 6, rng)).householderQ();
  EXPECT_NEAR(spectral_distance(q * a * q.transpose(), q * b * q.transpose()), spectral_distance(a, b), 1e-12);
  EXPECT_NEAR(spectral_distance(a, b), spectral_distance(b, a), 1e-15);
}

TEST(HeatDistance, Examples) {
  const double c = 1.7;
  EXPECT_NEAR(heat_distance(Eigen::Vector2d(0, c).asDiagonal(), Eigen::Vector2d(c, 0).asDiagonal()), 2.0, 1e-12);
  Rng rng(3);
  const Eigen::MatrixXd a = random_psd_with_kernel(5, 2, rng);
  EXPECT_NEAR(heat_distance(a, a), 0.0, 1e-12);
  Eigen::Matrix2d bad;
  bad << -1, 0, 0, 1;
  EXPECT_THROW(heat_distance(bad, Eigen::Matrix2d::Identity()), ArgumentError);
}

TEST(HeatDistance, MatchesQuadrature) {
  Rng rng(5);
  for (int t = 0; t < 20; ++t) {
    const Eigen::MatrixXd a = random_psd_with_kernel(4, static_cast<Index>(rng.below(3)), rng);
    const Eigen::MatrixXd b = random_psd_with_kernel(4, static_cast<Index>(rng.below(3)), rng);
    EXPECT_NEAR(heat_distance(a, b), heat_quadrature(a, b, 1e4), 1e-2);
    EXPECT_NEAR(heat_distance(a, b), heat_distance(b, a), 1e-12);
  }
}

TEST(HeatDistance, TriangleInequalityOnProjectors) {
  // sqrt(xi) is the Frobenius distance between kernel projectors.
  Rng rng(6);
  for (int t = 0; t < 20; ++t) {
    const auto a = random_psd_with_kernel(5, 2, rng);
    const auto b = random_psd_with_kernel(5, 1, rng);
    const auto c = random_psd_with_kernel(5, 3, rng);
    EXPECT_LE(std::sqrt(heat_distance(a, c)), std::sqrt(heat_distance(a, b)) + std::sqrt(heat_distance(b, c)) + 1e-12);
  }
}

TEST(KernelDimension, Examples) {
  Rng rng(7);
  Eigen::VectorXd w = scgl::testing::random_weights(6, 1.0, rng);
  EXPECT_EQ(kernel_dimension(kron_laplacian(w, 6, 2)), 2);
  EXPECT_EQ(kernel_dimension(Eigen::MatrixXd::Zero(5, 5)), 5);
  // two components: {0,1,2} and {3,4,5}
  const EdgeIndexMap map(6);
  w.setZero();
  w(map.slot(1, 0)) = w(map.slot(2, 1)) = w(map.slot(4, 3)) = w(map.slot(5, 3)) = 1.0;
  EXPECT_EQ(kernel_dimension(kron_laplacian(w, 6, 2)), 4);
}

TEST(Evaluate, ReportsAllMetrics) {
  const auto gt = sample_er_cg(6, 2, 0.6, 0.2, 3.0, 1);
  const auto test = sample_signals(gt, 500, 2).x;
  const Eigen::VectorXd w = gt.cg.weights();
  const auto r = evaluate(w, gt.laplacian.matrix(), w, gt.laplacian.matrix(), test);
  EXPECT_EQ(r.f1, 1.0);
  EXPECT_EQ(r.weight_mse, 0.0);
  EXPECT_NEAR(r.spectral_distance, 0.0, 1e-14);
  EXPECT_NEAR(r.heat_distance, 0.0, 1e-10);
  EXPECT_EQ(r.kernel_dim_est, 2);
  EXPECT_EQ(r.kernel_dim_true, 2);
  EXPECT_NEAR(r.empirical_tv, 10.0, 1.0);
}

TEST(ResultsCsv, RoundTripsRows) {
  EvalReport r;
  r.seed = 12345678901234ull;
  r.method = "scgl";
  r.family = "er";
  r.nodes = 30;
  r.stalk_dim = 2;
  r.samples = 900;
  r.ratio = 15;
  r.beta = 1.5;
  r.f1 = 0.1 + 0.2;
  r.weight_mse = 1.0 / 3.0;
  r.empirical_tv = 57.123456789;
  r.spectral_distance = 1e-17;
  r.heat_distance = 2;
  r.kernel_dim_est = 2;
  r.kernel_dim_true = 2;
  r.wall_time_s = 3.25;
  r.failed = true;
  std::ostringstream out;
  write_csv_row(out, r);
  const std::string line = out.str();
  ASSERT_EQ(line.back(), '\n');
  EXPECT_EQ(std::count(line.begin(), line.end(), ','), std::count(results_csv_header().begin(), results_csv_header().end(), ','));
  const auto back = parse_csv_row(line.substr(0, line.size() - 1));
  EXPECT_EQ(back.seed, r.seed);
  EXPECT_EQ(back.method, r.method);
  EXPECT_EQ(back.f1, r.f1);
  EXPECT_EQ(back.weight_mse, r.weight_mse);
  EXPECT_EQ(back.spectral_distance, r.spectral_distance);
  EXPECT_EQ(back.samples, 900);
  EXPECT_TRUE(back.failed);
  EXPECT_EQ(to_json(r).at("f1").get<double>(), r.f1);
  EXPECT_THROW(parse_csv_row("1,2,3"), InputError);
}
