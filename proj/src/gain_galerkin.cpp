#include "cpf/gain_galerkin.hpp"

#include "cpf/errors.hpp"
#include "cpf/stats.hpp"

#include <cmath>
#include <limits>

namespace cpf {

std::pair<Mat, Vec> assemble(const Ensemble& ens, const BasisSet& basis) {
  const int n = ens.count();
  const int m = basis.size();
  HStats hs = h_stats(ens);

  Mat A = Mat::Zero(m, m);
  Vec b = Vec::Zero(m);
  std::vector<Vec> grads(m);
  for (int i = 0; i < n; ++i) {
    Vec x = ens.positions.row(i).transpose();
    for (int k = 0; k < m; ++k) {
      grads[k] = basis.grads[k](x);
      b[k] += basis.funcs[k](x) * hs.centered[i];
    }
    for (int l = 0; l < m; ++l)
      for (int k = l; k < m; ++k) A(l, k) += grads[l].dot(grads[k]);
  }
  A /= static_cast<double>(n);
  b /= static_cast<double>(n);
  A = A.selfadjointView<Eigen::Upper>();
  return {std::move(A), std::move(b)};
}

GalerkinSolution solve_coefficients(const Mat& A, const Vec& b, double ridge) {
  GalerkinSolution sol;
  sol.A = A;
  sol.b = b;

  Eigen::SelfAdjointEigenSolver<Mat> es(A);
  const double lam_max = es.eigenvalues().maxCoeff();
  const double lam_min = es.eigenvalues().minCoeff();
  sol.cond_estimate =
      lam_min > 0.0 ? lam_max / lam_min : std::numeric_limits<double>::infinity();
  if (ridge == 0.0 && sol.cond_estimate > 1e12)
    throw Error(ErrorCode::ill_conditioned,
                "galerkin: basis Gram matrix condition estimate " +
                    std::to_string(sol.cond_estimate) + "; set a ridge or change basis");

  Mat Areg = A + ridge * Mat::Identity(A.rows(), A.cols());
  sol.coeffs = Eigen::LDLT<Mat>(Areg).solve(b);
  sol.residual = (A * sol.coeffs - b).norm();
  return sol;
}

GainSamples galerkin_gain(const Ensemble& ens, const BasisSet& basis, double beta,
                          double ridge) {
  auto [A, b] = assemble(ens, basis);
  GalerkinSolution sol = solve_coefficients(A, b, ridge);

  const int n = ens.count();
  const int d = ens.dim();
  const int m = basis.size();
  GainSamples gain;
  gain.controls = Mat::Zero(n, d);
  for (int i = 0; i < n; ++i) {
    Vec x = ens.positions.row(i).transpose();
    Vec u = Vec::Zero(d);
    for (int k = 0; k < m; ++k) u += sol.coeffs[k] * basis.grads[k](x);
    gain.controls.row(i) = -beta * u.transpose();
  }
  return gain;
}

BasisSet poly_quadratic_basis(int dim) {
  BasisSet basis;
  for (int l = 0; l < dim; ++l) {
    basis.funcs.push_back([l](const Vec& x) { return x[l]; });
    basis.grads.push_back([l, dim](const Vec&) {
      Vec g = Vec::Zero(dim);
      g[l] = 1.0;
      return g;
    });
    basis.labels.push_back("x_" + std::to_string(l + 1));
  }
  for (int l = 0; l < dim; ++l)
    for (int k = l; k < dim; ++k) {
      basis.funcs.push_back([l, k](const Vec& x) { return x[l] * x[k]; });
      basis.grads.push_back([l, k, dim](const Vec& x) {
        Vec g = Vec::Zero(dim);
        g[l] += x[k];
        g[k] += x[l];
        return g;
      });
      basis.labels.push_back("x_" + std::to_string(l + 1) + " x_" + std::to_string(k + 1));
    }
  return basis;
}

BasisSet fourier_basis(double period) {
  const double w = 2.0 * M_PI / period;
  BasisSet basis;
  basis.funcs = {[](const Vec& x) { return x[0]; },
                 [w](const Vec& x) { return std::cos(w * x[0]); },
                 [w](const Vec& x) { return std::sin(w * x[0]); }};
  basis.grads = {[](const Vec&) { return Vec::Ones(1); },
                 [w](const Vec& x) { return Vec::Constant(1, -w * std::sin(w * x[0])); },
                 [w](const Vec& x) { return Vec::Constant(1, w * std::cos(w * x[0])); }};
  basis.labels = {"x", "cos(2pi x/P)", "sin(2pi x/P)"};
  return basis;
}

BasisSet objective_basis(const ObjectiveSpec& objective) {
  if (!objective.has_grad())
    throw Error(ErrorCode::config_invalid, "objective basis requires an analytic gradient");
  BasisSet basis;
  basis.funcs = {objective.eval};
  basis.grads = {objective.grad};
  basis.labels = {"h"};
  return basis;
}

double hermite_he(int k, double z) {
  // He_0 = 1, He_1 = z, He_{k+1} = z He_k - k He_{k-1}
  double prev = 1.0, cur = z;
  if (k == 0) return prev;
  for (int j = 1; j < k; ++j) {
    double next = z * cur - j * prev;
    prev = cur;
    cur = next;
  }
  return cur;
}

BasisSet hermite_basis(int M, const GaussianMoments& moments) {
  if (moments.mean.size() != 1)
    throw Error(ErrorCode::config_invalid, "hermite basis is 1-D only");
  const double m = moments.mean[0];
  const double sigma = std::sqrt(moments.cov(0, 0));

  BasisSet basis;
  for (int k = 1; k <= M; ++k) {
    double norm = 1.0;
    for (int j = 2; j <= k; ++j) norm *= j;
    norm = std::sqrt(norm);  // sqrt(k!)
    basis.funcs.push_back(
        [k, m, sigma, norm](const Vec& x) { return hermite_he(k, (x[0] - m) / sigma) / norm; });
    basis.grads.push_back([k, m, sigma, norm](const Vec& x) {
      const double z = (x[0] - m) / sigma;
      return Vec::Constant(1, k * hermite_he(k - 1, z) / (sigma * norm));
    });
    basis.labels.push_back("He_" + std::to_string(k));
  }
  return basis;
}

}  // namespace cpf
