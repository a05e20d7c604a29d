#include "cpf/errors.hpp"
#include "cpf/gain_affine.hpp"
#include "cpf/rng.hpp"
#include "cpf/stats.hpp"

#include <doctest.h>

#include <cmath>

using namespace cpf;

namespace {

Mat gaussian_positions(int n, const Vec& mean, const Mat& cov, std::uint64_t seed) {
  const int d = static_cast<int>(mean.size());
  Mat L = Eigen::LLT<Mat>(cov).matrixL();
  Mat X(n, d);
  for (int i = 0; i < n; ++i) {
    Rng rng(derive_seed(seed, streams::generic, i));
    Vec z(d);
    for (int c = 0; c < d; ++c) z[c] = rng.normal();
    X.row(i) = (mean + L * z).transpose();
  }
  return X;
}

Mat random_spd(int d, std::uint64_t seed, double diag_boost = 0.5) {
  Rng rng(derive_seed(seed, streams::generic));
  Mat A(d, d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) A(i, j) = rng.normal();
  return Mat(A * A.transpose() + diag_boost * Mat::Identity(d, d));
}

}  // namespace

TEST_CASE("lyapunov solve with identity covariance halves C") {
  Mat C(3, 3);
  C << 1.0, 2.0, -1.0, 2.0, 0.5, 0.0, -1.0, 0.0, 3.0;
  Mat K = solve_lyapunov(Mat::Identity(3, 3), C);
  CHECK((K - 0.5 * C).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("lyapunov solve hand-checked 2x2") {
  Mat sigma(2, 2);
  sigma << 1.0, 0.0, 0.0, 2.0;
  Mat C(2, 2);
  C << 2.0, 3.0, 3.0, 8.0;
  Mat K = solve_lyapunov(sigma, C);
  Mat expected(2, 2);
  expected << 1.0, 1.0, 1.0, 2.0;
  CHECK((K - expected).cwiseAbs().maxCoeff() < 1e-12);
  CHECK((sigma * K + K * sigma - C).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("lyapunov solution is PD when C = Sigma H Sigma with H PD") {
  Mat sigma = random_spd(5, 1);
  Mat H = random_spd(5, 2);
  Mat C = sigma * H * sigma;
  C = 0.5 * (C + C.transpose());
  Mat K = solve_lyapunov(sigma, C);
  CHECK((K - K.transpose()).cwiseAbs().maxCoeff() < 1e-10 * K.cwiseAbs().maxCoeff());
  Eigen::SelfAdjointEigenSolver<Mat> es(K);
  CHECK(es.eigenvalues().minCoeff() > 0.0);
  CHECK((sigma * K + K * sigma - C).cwiseAbs().maxCoeff() <
        1e-8 * C.cwiseAbs().maxCoeff());
}

TEST_CASE("lyapunov rejects a singular covariance") {
  Mat sigma = Mat::Zero(2, 2);
  sigma(0, 0) = 1.0;
  CHECK_THROWS_AS(solve_lyapunov(sigma, Mat::Identity(2, 2)), Error);
}

TEST_CASE("affine gain vanishes for a constant objective") {
  ObjectiveSpec flat;
  flat.dim = 1;
  flat.eval = [](const Vec&) { return 3.25; };
  Mat X = gaussian_positions(200, Vec::Zero(1), Mat::Identity(1, 1), 11);
  Ensemble ens = Ensemble::from_positions(X, flat);
  auto [gain, law] = affine_gain(ens, 1.0);
  CHECK(gain.controls.cwiseAbs().maxCoeff() < 1e-12);
  CHECK(law.K.cwiseAbs().maxCoeff() < 1e-12);
  CHECK(law.b.cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("affine gain recovers u = -x/2 for the standard quadratic case") {
  // rho = N(0,1), h = x^2/2: K solves 2K = E[x^2(h - hhat)] = 1, b = 0
  auto obj = objective_quadratic(Mat::Identity(1, 1), Vec::Zero(1));
  const int n = 100000;
  Mat X = gaussian_positions(n, Vec::Zero(1), Mat::Identity(1, 1), 12);
  Ensemble ens = Ensemble::from_positions(X, obj);
  auto [gain, law] = affine_gain(ens, 1.0);
  CHECK(law.K(0, 0) == doctest::Approx(0.5).epsilon(0.03));
  CHECK(std::abs(law.b[0]) < 0.02);
}

TEST_CASE("affine gain matches the closed-form b and Lyapunov data") {
  // b -> Sigma H (m - xbar), Sigma K + K Sigma -> Sigma H Sigma
  const int n = 100000;
  Vec mean(2);
  mean << 0.7, -0.4;
  Mat cov(2, 2);
  cov << 1.0, 0.3, 0.3, 0.8;
  Mat H(2, 2);
  H << 2.0, 0.4, 0.4, 1.0;
  Vec xbar(2);
  xbar << -0.5, 0.2;
  auto obj = objective_quadratic(H, xbar, 1.0);

  Mat X = gaussian_positions(n, mean, cov, 13);
  Ensemble ens = Ensemble::from_positions(X, obj);
  auto [gain, law] = affine_gain(ens, 1.0);

  Vec b_exact = cov * H * (mean - xbar);
  Mat C_exact = cov * H * cov;
  Mat C_from_K = law.K * empirical_cov(ens) + empirical_cov(ens) * law.K;
  CHECK((law.b - b_exact).norm() < 0.05 * b_exact.norm());
  CHECK((C_from_K - C_exact).cwiseAbs().maxCoeff() < 0.05 * C_exact.cwiseAbs().maxCoeff());
}

TEST_CASE("affine gain is translation equivariant") {
  auto obj = objective_quadratic(Mat::Identity(2, 2), Vec::Zero(2));
  Mat X = gaussian_positions(500, Vec::Zero(2), Mat::Identity(2, 2), 14);
  Ensemble ens = Ensemble::from_positions(X, obj);
  auto [g1, law1] = affine_gain(ens, 1.0);

  Vec shift(2);
  shift << 2.0, -1.0;
  // h shifted the same way, so the cached h(X^i) values are unchanged
  ObjectiveSpec shifted = objective_quadratic(Mat::Identity(2, 2), shift);
  Ensemble ens2 = Ensemble::from_positions(Mat(X.rowwise() + shift.transpose()), shifted);
  auto [g2, law2] = affine_gain(ens2, 1.0);

  CHECK((law1.K - law2.K).cwiseAbs().maxCoeff() < 1e-9);
  CHECK((law1.m + shift - law2.m).norm() < 1e-9);
  CHECK((g1.controls - g2.controls).cwiseAbs().maxCoeff() < 1e-8);
}

TEST_CASE("adding a constant to h leaves the gain unchanged") {
  auto obj = objective_quadratic(Mat::Identity(1, 1), Vec::Zero(1), 0.0);
  auto obj_shift = objective_quadratic(Mat::Identity(1, 1), Vec::Zero(1), 42.0);
  Mat X = gaussian_positions(500, Vec::Ones(1), Mat::Identity(1, 1), 15);
  auto [g1, law1] = affine_gain(Ensemble::from_positions(X, obj), 1.0);
  auto [g2, law2] = affine_gain(Ensemble::from_positions(X, obj_shift), 1.0);
  CHECK((g1.controls - g2.controls).cwiseAbs().maxCoeff() < 1e-10);
  CHECK((law1.b - law2.b).norm() < 1e-10);
}

TEST_CASE("affine gain converges to the exact Poisson solution (Lemma data)") {
  // 1-D Gaussian/quadratic: exact law u(x) = -(x - 0)/2 with true moments
  auto obj = objective_quadratic(Mat::Identity(1, 1), Vec::Zero(1));
  const int n = 100000;
  Mat X = gaussian_positions(n, Vec::Zero(1), Mat::Identity(1, 1), 16);
  Ensemble ens = Ensemble::from_positions(X, obj);
  auto [gain, law] = affine_gain(ens, 1.0);
  double rel_rms_num = 0.0, rel_rms_den = 0.0;
  for (int i = 0; i < n; ++i) {
    const double exact = -0.5 * X(i, 0);
    rel_rms_num += std::pow(gain.controls(i, 0) - exact, 2);
    rel_rms_den += exact * exact;
  }
  CHECK(std::sqrt(rel_rms_num / rel_rms_den) < 0.03);
}

TEST_CASE("affine gain needs enough particles") {
  auto obj = objective_quadratic(Mat::Identity(3, 3), Vec::Zero(3));
  Mat X = gaussian_positions(4, Vec::Zero(3), Mat::Identity(3, 3), 17);
  Ensemble ens = Ensemble::from_positions(X, obj);
  CHECK_THROWS_AS(affine_gain(ens, 1.0), Error);
}
