#pragma once

#include "cpf/types.hpp"

#include <utility>

namespace cpf {

// Affine control law u(x) = -beta K (x - m) - beta b fitted from the ensemble.
struct AffineGain {
  Mat K;  // symmetric gain matrix
  Vec b;  // affine constant
  Vec m;  // ensemble mean the law was built around
};

// Solves Sigma K + K Sigma = C for symmetric K via the eigendecomposition of
// Sigma: K = Q [ (Q^T C Q)_{ij} / (lam_i + lam_j) ] Q^T.  Unique because
// Sigma is positive definite.  Throws singular_covariance when the smallest
// eigenvalue of Sigma is <= eps_pd.
Mat solve_lyapunov(const Mat& Sigma, const Mat& C, double eps_pd = 1e-10);

// One evaluation of the affine gain: empirical moments, b and C statistics,
// the Lyapunov solve, then u^i = -beta K (X^i - m) - beta b.
std::pair<GainSamples, AffineGain> affine_gain(const Ensemble& ens, double beta,
                                               double eps_pd = 1e-10);

}  // namespace cpf
