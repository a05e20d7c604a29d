#pragma once

#include "cpf/types.hpp"

#include <utility>
#include <vector>

namespace cpf {

// Differentiable basis functions psi_k with their gradients.
struct BasisSet {
  std::vector<std::function<double(const Vec&)>> funcs;
  std::vector<std::function<Vec(const Vec&)>> grads;
  std::vector<std::string> labels;

  int size() const { return static_cast<int>(funcs.size()); }
};

struct GalerkinSolution {
  Vec coeffs;
  Mat A;
  Vec b;
  double cond_estimate = 0.0;
  double residual = 0.0;  // ||A c - b|| after regularization
};

// A_lk = (1/N) sum_i grad psi_l(X^i) . grad psi_k(X^i)
// b_k  = (1/N) sum_i psi_k(X^i) (h(X^i) - hhat)
std::pair<Mat, Vec> assemble(const Ensemble& ens, const BasisSet& basis);

// c = (A + ridge I)^{-1} b.  Throws ill_conditioned when cond > 1e12 and no
// ridge was supplied.
GalerkinSolution solve_coefficients(const Mat& A, const Vec& b, double ridge = 0.0);

// u^i = -beta sum_k c_k grad psi_k(X^i)
GainSamples galerkin_gain(const Ensemble& ens, const BasisSet& basis, double beta,
                          double ridge = 0.0);

// Shipped bases -------------------------------------------------------------

// {x_l} and {x_l x_k, l <= k}: quadratic polynomials, reproduces the affine law.
BasisSet poly_quadratic_basis(int dim);

// 1-D span{x, cos(2 pi x / P), sin(2 pi x / P)}.
BasisSet fourier_basis(double period = 10.0);

// Single basis function {h}; needs the objective's analytic gradient.
BasisSet objective_basis(const ObjectiveSpec& objective);

// 1-D probabilists' Hermite functions psi_k(x) = He_k((x-m)/sigma)/sqrt(k!),
// k = 1..M: the orthonormal eigenfunctions of the weighted Laplacian for a
// Gaussian density, eigenvalue k/sigma^2.
BasisSet hermite_basis(int M, const GaussianMoments& moments);

// He_k(z) and its derivative k He_{k-1}(z), exposed for tests.
double hermite_he(int k, double z);

}  // namespace cpf
