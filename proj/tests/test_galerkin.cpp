#include "cpf/errors.hpp"
#include "cpf/gain_affine.hpp"
#include "cpf/gain_galerkin.hpp"
#include "cpf/rng.hpp"

#include <doctest.h>

#include <cmath>

using namespace cpf;

namespace {

Mat gaussian_positions(int n, double mean, double sigma, std::uint64_t seed) {
  Mat X(n, 1);
  for (int i = 0; i < n; ++i) {
    Rng rng(derive_seed(seed, streams::generic, i));
    X(i, 0) = mean + sigma * rng.normal();
  }
  return X;
}

ObjectiveSpec half_x_squared() {
  return objective_quadratic(Mat::Identity(1, 1), Vec::Zero(1));
}

}  // namespace

TEST_CASE("assemble: A is exactly 1 for the linear basis in 1-D") {
  auto obj = half_x_squared();
  Ensemble ens = Ensemble::from_positions(gaussian_positions(50, 0.5, 1.5, 1), obj);
  BasisSet lin = poly_quadratic_basis(1);
  lin.funcs.resize(1);
  lin.grads.resize(1);
  lin.labels.resize(1);
  auto [A, b] = assemble(ens, lin);
  CHECK(A(0, 0) == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("assemble: b estimates E[x (h - hhat)] = E[x^2] = 1 for h = x") {
  ObjectiveSpec ident;
  ident.dim = 1;
  ident.eval = [](const Vec& x) { return x[0]; };
  Ensemble ens = Ensemble::from_positions(gaussian_positions(100000, 0.0, 1.0, 2), ident);
  BasisSet lin = poly_quadratic_basis(1);
  lin.funcs.resize(1);
  lin.grads.resize(1);
  auto [A, b] = assemble(ens, lin);
  CHECK(b[0] == doctest::Approx(1.0).epsilon(0.02));
}

TEST_CASE("assemble: constant h makes b vanish") {
  ObjectiveSpec flat;
  flat.dim = 1;
  flat.eval = [](const Vec&) { return -2.0; };
  Ensemble ens = Ensemble::from_positions(gaussian_positions(300, 1.0, 2.0, 3), flat);
  auto [A, b] = assemble(ens, poly_quadratic_basis(1));
  CHECK(b.cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("assemble: A is symmetric PSD for any ensemble and basis") {
  auto dw = objective_double_well();
  Ensemble ens = Ensemble::from_positions(gaussian_positions(400, 0.0, 2.0, 4), dw);
  for (const BasisSet& basis :
       {poly_quadratic_basis(1), fourier_basis(10.0), hermite_basis(4, {Vec::Zero(1), Mat::Identity(1, 1)})}) {
    auto [A, b] = assemble(ens, basis);
    CHECK((A - A.transpose()).cwiseAbs().maxCoeff() < 1e-12 * A.cwiseAbs().maxCoeff());
    Eigen::SelfAdjointEigenSolver<Mat> es(A);
    CHECK(es.eigenvalues().minCoeff() > -1e-12 * A.trace());
  }
}

TEST_CASE("solve_coefficients basics") {
  Vec b(2);
  b << 0.3, -0.8;
  GalerkinSolution id = solve_coefficients(Mat::Identity(2, 2), b, 0.0);
  CHECK((id.coeffs - b).norm() < 1e-14);

  Mat A(2, 2);
  A << 2.0, 1.0, 1.0, 2.0;
  Vec ones = Vec::Ones(2);
  GalerkinSolution sol = solve_coefficients(A, ones, 0.0);
  CHECK(sol.coeffs[0] == doctest::Approx(1.0 / 3.0).epsilon(1e-12));
  CHECK(sol.coeffs[1] == doctest::Approx(1.0 / 3.0).epsilon(1e-12));
  CHECK(sol.residual < 1e-12);
  CHECK(sol.cond_estimate == doctest::Approx(3.0).epsilon(1e-9));
}

TEST_CASE("solve_coefficients flags an ill-conditioned system") {
  Mat A(2, 2);
  A << 1.0, 0.0, 0.0, 1e-14;
  Vec b(2);
  b << 1.0, 0.0;
  CHECK_THROWS_AS(solve_coefficients(A, b, 0.0), Error);
  // a ridge makes it solvable
  CHECK_NOTHROW(solve_coefficients(A, b, 1e-8));
}

TEST_CASE("linear basis gives the constant control -beta b") {
  auto obj = half_x_squared();
  Ensemble ens = Ensemble::from_positions(gaussian_positions(500, 1.0, 1.0, 5), obj);
  BasisSet lin = poly_quadratic_basis(1);
  lin.funcs.resize(1);
  lin.grads.resize(1);
  auto [A, b] = assemble(ens, lin);
  GainSamples gain = galerkin_gain(ens, lin, 2.0, 0.0);
  for (int i = 0; i < ens.count(); ++i)
    CHECK(gain.controls(i, 0) == doctest::Approx(-2.0 * b[0]).epsilon(1e-12));
}

TEST_CASE("quadratic-polynomial Galerkin reproduces the affine gain to 1e-8") {
  auto check_dim = [](int d, std::uint64_t seed) {
    Mat H = Mat::Identity(d, d);
    auto obj = objective_quadratic(H, Vec::Zero(d));
    Mat X(800, d);
    for (int i = 0; i < 800; ++i) {
      Rng rng(derive_seed(seed, streams::generic, i));
      for (int c = 0; c < d; ++c) X(i, c) = 0.4 + 1.1 * rng.normal();
    }
    Ensemble ens = Ensemble::from_positions(X, obj);
    auto [affine, law] = affine_gain(ens, 1.0);
    GainSamples galerkin = galerkin_gain(ens, poly_quadratic_basis(d), 1.0, 0.0);
    CHECK((affine.controls - galerkin.controls).cwiseAbs().maxCoeff() < 1e-8);
  };
  check_dim(1, 6);
  check_dim(2, 7);
  check_dim(3, 8);
}

TEST_CASE("quadratic-polynomial Galerkin matches affine on non-Gaussian samples too") {
  auto dw = objective_double_well();
  Mat X(600, 1);
  for (int i = 0; i < 600; ++i) {
    Rng rng(derive_seed(9, streams::generic, i));
    X(i, 0) = (i % 2 == 0 ? -2.0 : 2.0) + 0.6 * rng.normal();
  }
  Ensemble ens = Ensemble::from_positions(X, dw);
  auto [affine, law] = affine_gain(ens, 1.0);
  GainSamples galerkin = galerkin_gain(ens, poly_quadratic_basis(1), 1.0, 0.0);
  CHECK((affine.controls - galerkin.controls).cwiseAbs().maxCoeff() < 1e-8);
}

TEST_CASE("single-basis {h} reproduces the scaled gradient-descent form") {
  auto dw = objective_double_well();
  Ensemble ens = Ensemble::from_positions(gaussian_positions(400, 0.0, 1.5, 10), dw);
  const double beta = 1.3;
  GainSamples gain = galerkin_gain(ens, objective_basis(dw), beta, 0.0);

  double num = 0.0, den = 0.0;
  for (int i = 0; i < ens.count(); ++i) {
    const double hc = ens.h_values[i] - ens.h_values.mean();
    num += hc * hc;
    den += std::pow(dw.grad(ens.positions.row(i).transpose())[0], 2);
  }
  for (int i = 0; i < ens.count(); ++i) {
    const double expected =
        -beta * (num / den) * dw.grad(ens.positions.row(i).transpose())[0];
    CHECK(gain.controls(i, 0) == doctest::Approx(expected).epsilon(1e-10));
  }
}

TEST_CASE("adding a constant to h leaves coefficients and gain unchanged") {
  auto obj = half_x_squared();
  auto shifted = objective_quadratic(Mat::Identity(1, 1), Vec::Zero(1), 17.0);
  Mat X = gaussian_positions(300, 0.5, 1.0, 11);
  GainSamples g1 = galerkin_gain(Ensemble::from_positions(X, obj), fourier_basis(10.0), 1.0);
  GainSamples g2 = galerkin_gain(Ensemble::from_positions(X, shifted), fourier_basis(10.0), 1.0);
  CHECK((g1.controls - g2.controls).cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("hermite basis: eigen-relations under the standard Gaussian") {
  // <grad psi_k, grad psi_l> = lambda_k delta_kl with lambda_k = k,
  // <psi_k, psi_l> = delta_kl; checked by Monte-Carlo quadrature
  GaussianMoments std_mom{Vec::Zero(1), Mat::Identity(1, 1)};
  BasisSet basis = hermite_basis(3, std_mom);
  const int n = 100000;
  Mat X = gaussian_positions(n, 0.0, 1.0, 12);

  Mat gram = Mat::Zero(3, 3), gram_grad = Mat::Zero(3, 3);
  for (int i = 0; i < n; ++i) {
    Vec x = X.row(i).transpose();
    for (int k = 0; k < 3; ++k)
      for (int l = 0; l < 3; ++l) {
        gram(k, l) += basis.funcs[k](x) * basis.funcs[l](x) / n;
        gram_grad(k, l) += basis.grads[k](x).dot(basis.grads[l](x)) / n;
      }
  }
  CHECK(gram_grad(0, 0) == doctest::Approx(1.0).epsilon(0.03));
  CHECK(gram_grad(1, 1) == doctest::Approx(2.0).epsilon(0.03));
  CHECK(gram_grad(2, 2) == doctest::Approx(3.0).epsilon(0.05));
  CHECK(std::abs(gram_grad(0, 1)) < 0.03);
  for (int k = 0; k < 3; ++k)
    for (int l = 0; l < 3; ++l) {
      if (k == l) {
        CHECK(gram(k, l) == doctest::Approx(1.0).epsilon(0.05));
      } else {
        CHECK(std::abs(gram(k, l)) < 0.05);
      }
    }
  CHECK(basis.funcs[0](Vec::Constant(1, 0.7)) == doctest::Approx(0.7));
}

TEST_CASE("hermite recurrence") {
  CHECK(hermite_he(0, 1.3) == doctest::Approx(1.0));
  CHECK(hermite_he(1, 1.3) == doctest::Approx(1.3));
  CHECK(hermite_he(2, 1.3) == doctest::Approx(1.3 * 1.3 - 1.0));
  CHECK(hermite_he(3, 1.3) == doctest::Approx(std::pow(1.3, 3) - 3.0 * 1.3));
}
