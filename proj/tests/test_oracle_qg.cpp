#include "cpf/gain_affine.hpp"
#include "cpf/oracle_qg.hpp"
#include "cpf/rng.hpp"

#include <doctest.h>

#include <cmath>

using namespace cpf;

namespace {

const Mat I1 = Mat::Identity(1, 1);

Mat gaussian_positions(int n, double mean, double sigma, std::uint64_t seed) {
  Mat X(n, 1);
  for (int i = 0; i < n; ++i) {
    Rng rng(derive_seed(seed, streams::generic, i));
    X(i, 0) = mean + sigma * rng.normal();
  }
  return X;
}

}  // namespace

TEST_CASE("qg_exact at t = 0 returns the prior") {
  GaussianMoments mom = qg_exact(0.0, Vec::Ones(1), I1, I1, Vec::Zero(1), 1.0);
  CHECK(mom.mean[0] == doctest::Approx(1.0));
  CHECK(mom.cov(0, 0) == doctest::Approx(1.0));
}

TEST_CASE("qg_exact hand-evaluated at t = 5") {
  // S_5 = 1/5 + 1 = 6/5, m_5 = 1 - 5/6 = 1/6, Sigma_5 = 1 - 5/6 = 1/6
  GaussianMoments mom = qg_exact(5.0, Vec::Ones(1), I1, I1, Vec::Zero(1), 1.0);
  CHECK(mom.mean[0] == doctest::Approx(1.0 / 6.0).epsilon(1e-12));
  CHECK(mom.cov(0, 0) == doctest::Approx(1.0 / 6.0).epsilon(1e-12));
}

TEST_CASE("qg_exact long-time limit collapses onto xbar") {
  Vec xbar(2);
  xbar << 0.3, -0.7;
  Mat H(2, 2);
  H << 2.0, 0.3, 0.3, 1.0;
  Mat Sigma0(2, 2);
  Sigma0 << 1.0, 0.2, 0.2, 0.5;
  GaussianMoments mom = qg_exact(1e6, Vec::Ones(2), Sigma0, H, xbar, 1.0);
  CHECK((mom.mean - xbar).norm() < 1e-5);
  CHECK(mom.cov.cwiseAbs().maxCoeff() < 1e-5);
}

TEST_CASE("qg_ode_rhs equilibria") {
  Vec xbar = Vec::Constant(1, 0.4);
  QGState at_xbar{{xbar, I1}, 0.0};
  auto [dm, dS] = qg_ode_rhs(at_xbar, I1, xbar, 1.0);
  CHECK(dm.norm() == doctest::Approx(0.0));

  QGState degenerate{{Vec::Ones(1), Mat::Zero(1, 1)}, 0.0};
  auto [dm2, dS2] = qg_ode_rhs(degenerate, I1, xbar, 1.0);
  CHECK(dm2.norm() == doctest::Approx(0.0));
  CHECK(dS2.cwiseAbs().maxCoeff() == doctest::Approx(0.0));
}

TEST_CASE("Euler integration of the moment ODEs matches the explicit solution") {
  const double dt = 1e-4;
  QGState state{{Vec::Ones(1), I1}, 0.0};
  for (int k = 0; k < 50000; ++k) {
    auto [dm, dS] = qg_ode_rhs(state, I1, Vec::Zero(1), 1.0);
    state.moments.mean += dt * dm;
    state.moments.cov += dt * dS;
    state.t += dt;
  }
  GaussianMoments exact = qg_exact(5.0, Vec::Ones(1), I1, I1, Vec::Zero(1), 1.0);
  CHECK(std::abs(state.moments.mean[0] - exact.mean[0]) < 1e-3);
  CHECK(std::abs(state.moments.cov(0, 0) - exact.cov(0, 0)) < 1e-3);
}

TEST_CASE("MC moment right-hand side: constant objective gives zero drift") {
  ObjectiveSpec flat;
  flat.dim = 1;
  flat.eval = [](const Vec&) { return 2.0; };
  Ensemble ens = Ensemble::from_positions(gaussian_positions(500, 0.0, 1.0, 41), flat);
  auto [dm, dS] = qg_moment_rhs_mc(ens, 1.0);
  CHECK(dm.norm() < 1e-12);
  CHECK(dS.cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("MC moment right-hand side matches the closed form within 3%") {
  auto obj = objective_quadratic(I1, Vec::Zero(1));
  const int n = 100000;
  Ensemble ens = Ensemble::from_positions(gaussian_positions(n, 1.0, 1.0, 42), obj);
  auto [dm_mc, dS_mc] = qg_moment_rhs_mc(ens, 1.0);

  QGState state{{Vec::Ones(1), I1}, 0.0};
  auto [dm, dS] = qg_ode_rhs(state, I1, Vec::Zero(1), 1.0);
  CHECK(dm_mc[0] == doctest::Approx(dm[0]).epsilon(0.03));
  CHECK(dS_mc(0, 0) == doctest::Approx(dS(0, 0)).epsilon(0.03));
}

TEST_CASE("MC dm equals -beta b from the affine-gain statistics exactly") {
  auto obj = objective_quadratic(I1, Vec::Zero(1));
  Ensemble ens = Ensemble::from_positions(gaussian_positions(2000, 0.5, 1.2, 43), obj);
  auto [dm, dS] = qg_moment_rhs_mc(ens, 1.7);
  auto [gain, law] = affine_gain(ens, 1.7);
  CHECK(dm[0] == doctest::Approx(-1.7 * law.b[0]).epsilon(1e-13));
}

TEST_CASE("Sigma_t stays symmetric PD and the h-objective descends") {
  Mat H(2, 2);
  H << 2.0, 0.4, 0.4, 1.0;
  Vec xbar(2);
  xbar << -0.5, 0.2;
  Mat Sigma0(2, 2);
  Sigma0 << 1.0, 0.3, 0.3, 0.8;
  Vec m0(2);
  m0 << 1.0, 1.0;

  double prev = std::numeric_limits<double>::infinity();
  for (double t : {0.0, 0.01, 0.1, 0.5, 1.0, 2.0, 5.0, 20.0, 100.0}) {
    GaussianMoments mom = qg_exact(t, m0, Sigma0, H, xbar, 1.0);
    Eigen::SelfAdjointEigenSolver<Mat> es(mom.cov);
    CHECK(es.eigenvalues().minCoeff() > 0.0);
    CHECK((mom.cov - mom.cov.transpose()).cwiseAbs().maxCoeff() < 1e-14);
    // hhat along the exact flow: (m-xbar)^T H (m-xbar)/2 + tr(H Sigma)/2
    Vec d = mom.mean - xbar;
    const double hhat = 0.5 * d.dot(H * d) + 0.5 * (H * mom.cov).trace();
    CHECK(hhat <= prev + 1e-12);
    prev = hhat;
  }
}

TEST_CASE("scalar reduction matches the 1-D closed form used for the tracking line") {
  // d=1 reduction of the matrix solution: m_t = (m0 + beta t H xbar S0...) check
  // against the direct conjugate-posterior formulas for h = H x^2 / 2
  const double m0 = 1.0, S0 = 1.0, H = 1.0, beta = 1.0;
  for (double t : {0.1, 1.0, 2.5, 5.0}) {
    GaussianMoments mom =
        qg_exact(t, Vec::Constant(1, m0), Mat::Constant(1, 1, S0), Mat::Constant(1, 1, H),
                 Vec::Zero(1), beta);
    // posterior of N(m0, S0) under exp(-beta H x^2 t / 2): precision adds
    const double prec = 1.0 / S0 + beta * H * t;
    CHECK(mom.cov(0, 0) == doctest::Approx(1.0 / prec).epsilon(1e-12));
    CHECK(mom.mean[0] == doctest::Approx((m0 / S0) / prec).epsilon(1e-12));
  }
}
