#include "cpf/gain_kernel.hpp"

#include "cpf/errors.hpp"
#include "cpf/simd.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

namespace cpf {

KernelOperator build_operator(const Ensemble& ens, double epsilon) {
  if (!(epsilon > 0.0))
    throw Error(ErrorCode::config_invalid, "kernel gain: epsilon must be > 0");
  const int n = ens.count();
  const int d = ens.dim();
  const auto& k = simd::kernels();

  KernelOperator op;
  op.epsilon = epsilon;
  op.positions = ens.positions;
  op.T.resize(n, n);

  // g rows: squared distances accumulated per dimension, then exp(-. /4eps)
  RowMat& g = op.T;  // built in place, normalized below
  std::vector<double> sq(n);
  for (int i = 0; i < n; ++i) {
    double* row = g.data() + static_cast<std::ptrdiff_t>(i) * n;
    std::fill(sq.begin(), sq.end(), 0.0);
    for (int c = 0; c < d; ++c)
      k.sq_dist_accum(op.positions.col(c).data(), op.positions(i, c), sq.data(), n);
    k.exp_scale(sq.data(), -1.0 / (4.0 * epsilon), row, n);
  }

  Vec deg(n);
  for (int i = 0; i < n; ++i) {
    deg[i] = k.sum(g.data() + static_cast<std::ptrdiff_t>(i) * n, n);
    if (!(deg[i] > 0.0) || !std::isfinite(deg[i]))
      throw Error(ErrorCode::bandwidth_underflow,
                  "kernel gain: row " + std::to_string(i) +
                      " of the Gaussian kernel underflowed; epsilon too small");
  }
  Vec inv_sqrt_deg = deg.array().rsqrt();

  // k_ij = g_ij / (sqrt(deg_i) sqrt(deg_j)), then row-normalize to T
  for (int i = 0; i < n; ++i) {
    double* row = g.data() + static_cast<std::ptrdiff_t>(i) * n;
    const double si = inv_sqrt_deg[i];
    for (int j = 0; j < n; ++j) row[j] *= si * inv_sqrt_deg[j];
    const double row_sum = k.sum(row, n);
    const double inv = 1.0 / row_sum;
    for (int j = 0; j < n; ++j) row[j] *= inv;
  }
  return op;
}

PotentialVector fixed_point(const KernelOperator& op, const Vec& h_centered, double epsilon,
                            int max_sweeps, const Vec& phi_init, double residual_tol) {
  const int n = static_cast<int>(op.T.rows());
  const auto& k = simd::kernels();

  PotentialVector out;
  out.phi = phi_init;
  Vec next(n);
  for (int sweep = 0; sweep < max_sweeps; ++sweep) {
    for (int i = 0; i < n; ++i)
      next[i] = k.dot(op.T.data() + static_cast<std::ptrdiff_t>(i) * n, out.phi.data(), n) +
                epsilon * h_centered[i];
    next.array() -= next.mean();
    out.residual = (next - out.phi).cwiseAbs().maxCoeff();
    out.phi.swap(next);
    ++out.iterations_run;
    if (residual_tol > 0.0 && out.residual < residual_tol) break;
  }
  return out;
}

GainSamples kernel_gain(const KernelOperator& op, const PotentialVector& phi,
                        const Vec& h_centered, double beta, double epsilon) {
  const int n = static_cast<int>(op.T.rows());
  const int d = static_cast<int>(op.positions.cols());
  const auto& k = simd::kernels();

  Vec w = phi.phi + epsilon * h_centered;

  GainSamples gain;
  gain.controls.resize(n, d);
  const double scale = -beta / (2.0 * epsilon);
  for (int i = 0; i < n; ++i) {
    const double* row = op.T.data() + static_cast<std::ptrdiff_t>(i) * n;
    const double s0 = k.dot(row, w.data(), n);  // sum_j T_ij w_j
    for (int c = 0; c < d; ++c) {
      const double* xc = op.positions.col(c).data();
      const double sx = k.dot3(row, w.data(), xc, n);  // sum_j T_ij w_j X^j_c
      const double xb = k.dot(row, xc, n);             // sum_k T_ik X^k_c
      gain.controls(i, c) = scale * (sx - s0 * xb);
    }
  }
  return gain;
}

}  // namespace cpf
