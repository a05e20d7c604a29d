#include "cpf/stats.hpp"

#include "cpf/errors.hpp"

namespace cpf {

Vec empirical_mean(const Ensemble& ens) {
  return ens.positions.colwise().mean().transpose();
}

Mat empirical_cov(const Ensemble& ens, bool require_pd) {
  const int n = ens.count();
  Mat centered = ens.positions.rowwise() - ens.positions.colwise().mean();
  Mat cov = (centered.transpose() * centered) / static_cast<double>(n);
  cov = 0.5 * (cov + cov.transpose());  // purge round-off asymmetry
  if (require_pd && cov.trace() <= 0.0)
    throw Error(ErrorCode::degenerate_ensemble,
                "empirical_cov: all positions identical, covariance is singular");
  return cov;
}

HStats h_stats(const Ensemble& ens) {
  HStats out;
  out.hhat = ens.h_values.mean();
  out.centered = ens.h_values.array() - out.hhat;
  return out;
}

}  // namespace cpf
