#include "cpf/grid_oracle.hpp"

#include "cpf/errors.hpp"
#include "cpf/rng.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace cpf {

double GridDensity::trapezoid(const Vec& f) const {
  const double dx = spacing();
  return dx * (f.sum() - 0.5 * (f[0] + f[n_nodes() - 1]));
}

void GridDensity::normalize() {
  const double mass = trapezoid(values);
  if (!(mass > 0.0))
    throw Error(ErrorCode::singular_system, "grid density: zero mass, cannot normalize");
  values /= mass;
}

double GridDensity::mean() const {
  Vec xrho(n_nodes());
  for (int i = 0; i < n_nodes(); ++i) xrho[i] = node(i) * values[i];
  return trapezoid(xrho) / trapezoid(values);
}

double GridDensity::hhat(const ObjectiveSpec& objective) const {
  Vec hrho(n_nodes());
  for (int i = 0; i < n_nodes(); ++i)
    hrho[i] = objective.eval(Vec::Constant(1, node(i))) * values[i];
  return trapezoid(hrho) / trapezoid(values);
}

Vec GridDensity::cdf() const {
  const int n = n_nodes();
  const double dx = spacing();
  Vec F(n);
  F[0] = 0.0;
  for (int i = 1; i < n; ++i) F[i] = F[i - 1] + 0.5 * dx * (values[i - 1] + values[i]);
  const double total = F[n - 1];
  if (total > 0.0) F /= total;
  return F;
}

GridDensity GridDensity::gaussian(double m, double var, double x_min, double x_max,
                                  int n_nodes) {
  GridDensity g;
  g.x_min = x_min;
  g.x_max = x_max;
  g.values.resize(n_nodes);
  for (int i = 0; i < n_nodes; ++i) {
    const double z = g.node(i) - m;
    g.values[i] = std::exp(-0.5 * z * z / var);
  }
  g.normalize();
  return g;
}

GridDensity GridDensity::gaussian_mixture(const std::vector<std::array<double, 3>>& components,
                                          double x_min, double x_max, int n_nodes) {
  GridDensity g;
  g.x_min = x_min;
  g.x_max = x_max;
  g.values = Vec::Zero(n_nodes);
  for (const auto& [w, m, sigma] : components) {
    for (int i = 0; i < n_nodes; ++i) {
      const double z = (g.node(i) - m) / sigma;
      g.values[i] += w / sigma * std::exp(-0.5 * z * z);
    }
  }
  g.normalize();
  return g;
}

GridDensity posterior_exact(const GridDensity& prior, const ObjectiveSpec& objective,
                            double beta, double t) {
  if (t < 0.0) throw Error(ErrorCode::config_invalid, "posterior_exact: t must be >= 0");
  const int n = prior.n_nodes();
  GridDensity out = prior;
  if (t == 0.0) return out;

  Vec logv(n);
  for (int i = 0; i < n; ++i) {
    const double p0 = prior.values[i];
    const double lh = -beta * objective.eval(Vec::Constant(1, prior.node(i))) * t;
    logv[i] = p0 > 0.0 ? std::log(p0) + lh : -std::numeric_limits<double>::infinity();
  }
  const double shift = logv.maxCoeff();
  for (int i = 0; i < n; ++i) out.values[i] = std::exp(logv[i] - shift);
  out.normalize();
  return out;
}

GridDensity bayes_recursion_step(const GridDensity& rho, const ObjectiveSpec& objective,
                                 double beta, double dt) {
  if (!(dt > 0.0)) throw Error(ErrorCode::config_invalid, "bayes_recursion_step: dt must be > 0");
  const int n = rho.n_nodes();
  Vec expo(n);
  for (int i = 0; i < n; ++i) expo[i] = -beta * objective.eval(Vec::Constant(1, rho.node(i))) * dt;
  const double shift = expo.maxCoeff();

  GridDensity out = rho;
  for (int i = 0; i < n; ++i) out.values[i] = rho.values[i] * std::exp(expo[i] - shift);
  out.normalize();
  return out;
}

Vec replicator_rhs(const GridDensity& rho, const ObjectiveSpec& objective, double beta) {
  const int n = rho.n_nodes();
  const double hhat = rho.hhat(objective);
  Vec rhs(n);
  for (int i = 0; i < n; ++i)
    rhs[i] = -beta * (objective.eval(Vec::Constant(1, rho.node(i))) - hhat) * rho.values[i];
  return rhs;
}

PoissonSolution poisson_grid_solve(const GridDensity& rho, const ObjectiveSpec& objective,
                                   double beta) {
  const int n = rho.n_nodes();
  const double dx = rho.spacing();
  for (int i = 1; i + 1 < n; ++i)
    if (!(rho.values[i] > 0.0))
      throw Error(ErrorCode::singular_system,
                  "poisson_grid_solve: density underflows to zero at interior node " +
                      std::to_string(i));

  const double hhat = rho.hhat(objective);
  Vec f(n);  // cell-integrated right-hand side, half cells at the ends
  for (int i = 0; i < n; ++i) {
    const double w = (i == 0 || i == n - 1) ? 0.5 * dx : dx;
    f[i] = w * (objective.eval(Vec::Constant(1, rho.node(i))) - hhat) * rho.values[i];
  }

  // Zero-flux finite-volume scheme; pin phi_0 = 0, drop the (dependent) first
  // equation, Thomas-solve the rest, then recenter to the rho-weighted mean.
  Vec rho_half(n - 1);
  for (int i = 0; i < n - 1; ++i) rho_half[i] = 0.5 * (rho.values[i] + rho.values[i + 1]) / dx;

  Vec diag(n - 1), sub(n - 1), sup(n - 1), rhs(n - 1);
  for (int r = 0; r < n - 1; ++r) {
    const int i = r + 1;  // grid node
    const double left = rho_half[i - 1];
    const double right = (i < n - 1) ? rho_half[i] : 0.0;
    diag[r] = left + right;
    sub[r] = -left;   // coefficient of phi_{i-1}
    sup[r] = -right;  // coefficient of phi_{i+1}
    rhs[r] = f[i];
  }
  // phi_0 = 0 removes the first sub-diagonal entry from the system
  for (int r = 1; r < n - 1; ++r) {
    const double w = sub[r] / diag[r - 1];
    diag[r] -= w * sup[r - 1];
    rhs[r] -= w * rhs[r - 1];
  }
  Vec phi(n);
  phi[0] = 0.0;
  phi[n - 1] = rhs[n - 2] / diag[n - 2];
  for (int r = n - 3; r >= 0; --r) phi[r + 1] = (rhs[r] - sup[r] * phi[r + 2]) / diag[r];

  Vec phirho = phi.cwiseProduct(rho.values);
  const double mean_phi = rho.trapezoid(phirho) / rho.trapezoid(rho.values);
  phi.array() -= mean_phi;

  Vec u(n);
  u[0] = -beta * (-3.0 * phi[0] + 4.0 * phi[1] - phi[2]) / (2.0 * dx);
  for (int i = 1; i + 1 < n; ++i) u[i] = -beta * (phi[i + 1] - phi[i - 1]) / (2.0 * dx);
  u[n - 1] = -beta * (3.0 * phi[n - 1] - 4.0 * phi[n - 2] + phi[n - 3]) / (2.0 * dx);
  return {std::move(phi), std::move(u)};
}

Vec sisr_weights(const WeightedEnsemble& we, const ObjectiveSpec& objective, double beta,
                 double dt) {
  const int n = static_cast<int>(we.positions.size());
  Vec expo(n);
  for (int i = 0; i < n; ++i)
    expo[i] = -beta * objective.eval(Vec::Constant(1, we.positions[i])) * dt;
  const double shift = expo.maxCoeff();
  Vec w(n);
  for (int i = 0; i < n; ++i) w[i] = we.weights[i] * std::exp(expo[i] - shift);
  w /= w.sum();
  return w;
}

WeightedEnsemble sisr_step(const WeightedEnsemble& we, const ObjectiveSpec& objective,
                           double beta, double dt, std::uint64_t seed) {
  if (!(dt > 0.0)) throw Error(ErrorCode::config_invalid, "sisr_step: dt must be > 0");
  const int n = static_cast<int>(we.positions.size());
  Vec w = sisr_weights(we, objective, beta, dt);

  // order-canonical multinomial: inverse CDF over positions sorted by value,
  // one derived uniform per output slot
  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](int a, int b) {
    return we.positions[a] < we.positions[b] ||
           (we.positions[a] == we.positions[b] && w[a] < w[b]);
  });
  Vec cum(n);
  double acc = 0.0;
  for (int r = 0; r < n; ++r) {
    acc += w[order[r]];
    cum[r] = acc;
  }
  cum[n - 1] = 1.0;

  WeightedEnsemble out;
  out.positions.resize(n);
  out.weights = Vec::Constant(n, 1.0 / n);
  for (int k = 0; k < n; ++k) {
    Rng rng(derive_seed(seed, streams::resample, static_cast<std::uint64_t>(k)));
    const double u = rng.uniform01();
    const int r = static_cast<int>(
        std::lower_bound(cum.data(), cum.data() + n, u) - cum.data());
    out.positions[k] = we.positions[order[std::min(r, n - 1)]];
  }
  return out;
}

double ks_distance(Vec samples, const GridDensity& density) {
  std::sort(samples.data(), samples.data() + samples.size());
  const Vec F = density.cdf();
  const int n = static_cast<int>(samples.size());
  const double dx = density.spacing();
  double ks = 0.0;
  for (int i = 0; i < n; ++i) {
    const double x = samples[i];
    double Fx;
    if (x <= density.x_min) {
      Fx = 0.0;
    } else if (x >= density.x_max) {
      Fx = 1.0;
    } else {
      const double p = (x - density.x_min) / dx;
      const int j = static_cast<int>(p);
      const double frac = p - j;
      Fx = F[j] + frac * (F[j + 1] - F[j]);
    }
    ks = std::max(ks, std::max(std::abs((i + 1.0) / n - Fx), std::abs(i * 1.0 / n - Fx)));
  }
  return ks;
}

}  // namespace cpf
