#pragma once

#include "cpf/types.hpp"

namespace cpf {

// m^(N) = (1/N) sum_i X^i
Vec empirical_mean(const Ensemble& ens);

// Sigma^(N) = (1/N) sum_i (X^i - m)(X^i - m)^T  (1/N normalization, not 1/(N-1)).
// With require_pd, throws degenerate_ensemble when all positions coincide.
Mat empirical_cov(const Ensemble& ens, bool require_pd = false);

struct HStats {
  double hhat;   // (1/N) sum_i h(X^i)
  Vec centered;  // h(X^i) - hhat, sums to zero
};
HStats h_stats(const Ensemble& ens);

}  // namespace cpf
