#pragma once

#include "cpf/gain_galerkin.hpp"  // BasisSet
#include "cpf/types.hpp"

#include <cstdint>
#include <utility>

namespace cpf {

// Parametrized density family rho(x; theta), theta in R^M.  score is the
// gradient of log_density in theta.  fisher_analytic / grad_e_analytic are
// optional closed-form overrides for the Monte-Carlo estimators.
struct ParametricFamily {
  int dim_theta = 0;
  int dim_x = 0;
  std::function<double(const Vec& x, const Vec& theta)> log_density;
  std::function<Vec(const Vec& x, const Vec& theta)> score;
  std::function<Mat(const Vec& theta, int n, std::uint64_t seed)> sampler;  // N x d positions
  std::function<Mat(const Vec& theta)> fisher_analytic;
  std::function<Vec(const Vec& theta, const ObjectiveSpec&)> grad_e_analytic;
};

// G = (1/N) sum_i score(X^i) score(X^i)^T over X^i ~ rho(.; theta).
// Throws singular_fisher below the PD floor.
Mat fisher_mc(const ParametricFamily& fam, const Vec& theta, int n, std::uint64_t seed);

// grad e = (1/N) sum_i h(X^i) score(X^i).
Vec grad_e_mc(const ParametricFamily& fam, const Vec& theta, const ObjectiveSpec& objective,
              int n, std::uint64_t seed);

struct NaturalGradState {
  Vec theta;
  double t = 0.0;
};

// Euler step of d theta/dt = -beta G^{-1} grad e.  Analytic G / grad e are
// used when the family provides them; otherwise both are estimated from one
// shared sample draw (common random numbers within the step).
NaturalGradState natural_grad_step(const NaturalGradState& state, const ParametricFamily& fam,
                                   const ObjectiveSpec& objective, double beta, double dt,
                                   int n, std::uint64_t seed);

// Gaussian family in d dimensions, theta = (m, vech(Sigma)) with analytic Fisher.
ParametricFamily gaussian_family(int dim);
Vec gaussian_theta(const GaussianMoments& moments);
GaussianMoments gaussian_moments(const Vec& theta, int dim);

// Exponential family rho(x; theta) = exp(theta . psi(x)) / Z(theta) on a
// truncated 1-D interval, Z by Gauss-Legendre quadrature.
struct QuadratureGrid {
  double lo = -10.0;
  double hi = 10.0;
  int n_nodes = 200;
};
ParametricFamily exponential_family(const BasisSet& psi, const QuadratureGrid& domain);

// Gauss-Legendre nodes/weights on [lo, hi] (exposed for tests).
std::pair<Vec, Vec> gauss_legendre(int n, double lo, double hi);

}  // namespace cpf
