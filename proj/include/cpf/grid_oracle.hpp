#pragma once

#include "cpf/types.hpp"

#include <array>
#include <cstdint>
#include <vector>

namespace cpf {

// Density on a uniform 1-D grid, trapezoid-normalized to unit mass.
struct GridDensity {
  double x_min = -8.0;
  double x_max = 8.0;
  Vec values;  // one per node, >= 0

  int n_nodes() const { return static_cast<int>(values.size()); }
  double spacing() const { return (x_max - x_min) / (n_nodes() - 1); }
  double node(int i) const { return x_min + i * spacing(); }

  double trapezoid(const Vec& f) const;  // integral of f against dx
  void normalize();                      // divide by trapezoid mass
  double mean() const;
  double hhat(const ObjectiveSpec& objective) const;
  Vec cdf() const;  // trapezoid cumulative, clamped to [0,1]

  static GridDensity gaussian(double m, double var, double x_min = -8.0, double x_max = 8.0,
                              int n_nodes = 4001);
  // components: (weight, mean, sigma)
  static GridDensity gaussian_mixture(const std::vector<std::array<double, 3>>& components,
                                      double x_min = -8.0, double x_max = 8.0,
                                      int n_nodes = 4001);
};

// p*(x,t) proportional to p0(x) exp(-beta h(x) t), renormalized; computed with a
// max-shift in the exponent so large beta*h*t never underflows everything.
GridDensity posterior_exact(const GridDensity& prior, const ObjectiveSpec& objective,
                            double beta, double t);

// One multiplicative Bayes update rho <- rho exp(-beta h dt) / Z.
GridDensity bayes_recursion_step(const GridDensity& rho, const ObjectiveSpec& objective,
                                 double beta, double dt);

// -beta (h - hhat) rho, the replicator right-hand side; integrates to zero.
Vec replicator_rhs(const GridDensity& rho, const ObjectiveSpec& objective, double beta);

// Finite-difference solve of -(rho phi')' = (h - hhat) rho with zero-flux ends,
// mean-zero phi; u = -beta phi'.
struct PoissonSolution {
  Vec phi;
  Vec u;
};
PoissonSolution poisson_grid_solve(const GridDensity& rho, const ObjectiveSpec& objective,
                                   double beta);

// Weighted particles for the importance-sampling baseline.
struct WeightedEnsemble {
  Vec positions;
  Vec weights;  // >= 0, sum to 1
};

// Importance weights w^i proportional to (old weight) * exp(-beta h(X^i) dt),
// normalized to sum 1.
Vec sisr_weights(const WeightedEnsemble& we, const ObjectiveSpec& objective, double beta,
                 double dt);

// sisr_weights followed by a multinomial resample of N particles; output
// weights are uniform.  The resampling draw is order-canonical (inverse CDF
// over positions sorted by value) so permuting the input ensemble leaves the
// output unchanged.
WeightedEnsemble sisr_step(const WeightedEnsemble& we, const ObjectiveSpec& objective,
                           double beta, double dt, std::uint64_t seed);

// Kolmogorov-Smirnov distance between a sample and a grid density's CDF.
double ks_distance(Vec samples, const GridDensity& density);

}  // namespace cpf
