#include "cpf/gain_affine.hpp"

#include "cpf/errors.hpp"
#include "cpf/stats.hpp"

namespace cpf {

Mat solve_lyapunov(const Mat& Sigma, const Mat& C, double eps_pd) {
  Eigen::SelfAdjointEigenSolver<Mat> es(Sigma);
  const Vec& lam = es.eigenvalues();
  if (lam.minCoeff() <= eps_pd)
    throw Error(ErrorCode::singular_covariance,
                "solve_lyapunov: covariance eigenvalue " + std::to_string(lam.minCoeff()) +
                    " below PD threshold");
  const Mat& Q = es.eigenvectors();
  Mat Ct = Q.transpose() * C * Q;
  for (int i = 0; i < Ct.rows(); ++i)
    for (int j = 0; j < Ct.cols(); ++j) Ct(i, j) /= lam[i] + lam[j];
  Mat K = Q * Ct * Q.transpose();
  return 0.5 * (K + K.transpose());
}

std::pair<GainSamples, AffineGain> affine_gain(const Ensemble& ens, double beta,
                                               double eps_pd) {
  const int n = ens.count();
  const int d = ens.dim();
  if (n < d + 2)
    throw Error(ErrorCode::degenerate_ensemble,
                "affine_gain: need at least d+2 particles to estimate the covariance");

  Vec m = empirical_mean(ens);
  Mat centered = ens.positions.rowwise() - m.transpose();
  Mat sigma = (centered.transpose() * centered) / static_cast<double>(n);
  sigma = 0.5 * (sigma + sigma.transpose());

  HStats hs = h_stats(ens);
  Vec b = (ens.positions.transpose() * hs.centered) / static_cast<double>(n);
  Mat C = (centered.transpose() * hs.centered.asDiagonal() * centered) / static_cast<double>(n);
  C = 0.5 * (C + C.transpose());

  Mat K = solve_lyapunov(sigma, C, eps_pd);

  GainSamples gain;
  gain.controls.resize(n, d);
  gain.controls = -beta * (centered * K.transpose());
  gain.controls.rowwise() -= beta * b.transpose();
  return {std::move(gain), AffineGain{std::move(K), std::move(b), std::move(m)}};
}

}  // namespace cpf
