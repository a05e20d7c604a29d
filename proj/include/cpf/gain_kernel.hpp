#pragma once

#include "cpf/types.hpp"

namespace cpf {

// Row-stochastic diffusion-map operator built from the ensemble:
//   g_ij = exp(-|X^i-X^j|^2 / 4 eps)
//   k_ij = g_ij / (sqrt(sum_l g_il) sqrt(sum_l g_jl))
//   T_ij = k_ij / sum_l k_il
struct KernelOperator {
  RowMat T;       // N x N, rows sum to 1
  double epsilon; // kernel bandwidth
  Mat positions;  // copy of the N x d positions used for the build
};

KernelOperator build_operator(const Ensemble& ens, double epsilon);

// Fixed-point iterate Phi_i ~ phi(X^i), mean-zero after every sweep.
struct PotentialVector {
  Vec phi;
  int iterations_run = 0;
  double residual = 0.0;  // max_i |change| over the last sweep
};

// Successive approximation of Phi = T Phi + eps (h - hhat): up to max_sweeps
// of the update followed by mean subtraction.  A positive residual_tol exits
// early once the sup-norm change falls below it; non-convergence is reported
// through the residual, never as an error.
PotentialVector fixed_point(const KernelOperator& op, const Vec& h_centered, double epsilon,
                            int max_sweeps, const Vec& phi_init, double residual_tol = 0.0);

// u^i = (-beta / 2 eps) sum_j T_ij (Phi_j + eps (h_j - hhat)) (X^j - sum_k T_ik X^k)
GainSamples kernel_gain(const KernelOperator& op, const PotentialVector& phi,
                        const Vec& h_centered, double beta, double epsilon);

}  // namespace cpf
