#pragma once

#include "cpf/types.hpp"

#include <utility>

namespace cpf {

// Closed-form quadratic-Gaussian filter: with h(x) = 1/2 (x-xbar)^T H (x-xbar) + c
// and a Gaussian prior N(m0, Sigma0), the posterior stays Gaussian with
//   S_t     = (1/(beta t)) H^{-1} + Sigma0
//   m_t     = m0 + Sigma0 S_t^{-1} (xbar - m0)
//   Sigma_t = Sigma0 - Sigma0 S_t^{-1} Sigma0
// At t = 0 the prior is returned unchanged.
GaussianMoments qg_exact(double t, const Vec& m0, const Mat& Sigma0, const Mat& H,
                         const Vec& xbar, double beta);

struct QGState {
  GaussianMoments moments;
  double t = 0.0;
};

// Moment ODE right-hand side: dm = beta Sigma H (xbar - m), dSigma = -beta Sigma H Sigma.
std::pair<Vec, Mat> qg_ode_rhs(const QGState& state, const Mat& H, const Vec& xbar,
                               double beta);

// Monte-Carlo version of the same right-hand side from an ensemble:
//   dm     = -beta (1/N) sum_i X^i (h_i - hhat)
//   dSigma = -beta (1/N) sum_i (X^i - m)(X^i - m)^T (h_i - hhat)
std::pair<Vec, Mat> qg_moment_rhs_mc(const Ensemble& ens, double beta);

}  // namespace cpf
