#include "cpf/oracle_qg.hpp"

#include "cpf/errors.hpp"
#include "cpf/stats.hpp"

namespace cpf {

GaussianMoments qg_exact(double t, const Vec& m0, const Mat& Sigma0, const Mat& H,
                         const Vec& xbar, double beta) {
  if (t < 0.0) throw Error(ErrorCode::config_invalid, "qg_exact: t must be >= 0");
  if (t == 0.0) return {m0, Sigma0};

  const int d = static_cast<int>(m0.size());
  Eigen::LLT<Mat> lltH(H);
  if (lltH.info() != Eigen::Success)
    throw Error(ErrorCode::not_symmetric_pd, "qg_exact: H is not positive definite");
  Mat Hinv = lltH.solve(Mat::Identity(d, d));

  Mat St = Hinv / (beta * t) + Sigma0;
  Eigen::LLT<Mat> lltS(St);
  Mat StInvSigma0 = lltS.solve(Sigma0);  // S_t^{-1} Sigma0

  GaussianMoments out;
  out.mean = m0 + Sigma0 * lltS.solve(xbar - m0);
  out.cov = Sigma0 - Sigma0 * StInvSigma0;
  out.cov = 0.5 * (out.cov + out.cov.transpose());
  return out;
}

std::pair<Vec, Mat> qg_ode_rhs(const QGState& state, const Mat& H, const Vec& xbar,
                               double beta) {
  const Mat& sigma = state.moments.cov;
  Vec dm = beta * sigma * H * (xbar - state.moments.mean);
  Mat dSigma = -beta * sigma * H * sigma;
  dSigma = 0.5 * (dSigma + dSigma.transpose());
  return {std::move(dm), std::move(dSigma)};
}

std::pair<Vec, Mat> qg_moment_rhs_mc(const Ensemble& ens, double beta) {
  const int n = ens.count();
  HStats hs = h_stats(ens);
  Vec m = empirical_mean(ens);
  Mat centered = ens.positions.rowwise() - m.transpose();

  Vec dm = -beta * (ens.positions.transpose() * hs.centered) / static_cast<double>(n);
  Mat dSigma =
      -beta * (centered.transpose() * hs.centered.asDiagonal() * centered) / static_cast<double>(n);
  dSigma = 0.5 * (dSigma + dSigma.transpose());
  return {std::move(dm), std::move(dSigma)};
}

}  // namespace cpf
