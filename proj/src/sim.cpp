#include "cpf/sim.hpp"

#include "cpf/errors.hpp"
#include "cpf/gain_affine.hpp"
#include "cpf/gain_galerkin.hpp"
#include "cpf/gain_kernel.hpp"
#include "cpf/oracle_qg.hpp"
#include "cpf/rng.hpp"
#include "cpf/stats.hpp"

#include <cmath>

namespace cpf {

int Initializer::dim() const {
  if (const auto* g = std::get_if<Gaussian>(&kind)) return static_cast<int>(g->mean.size());
  return 1;
}

GridDensity Initializer::grid_density(double x_min, double x_max, int n_nodes) const {
  if (const auto* g = std::get_if<Gaussian>(&kind)) {
    if (g->mean.size() != 1)
      throw Error(ErrorCode::oracle_unavailable, "grid density needs a 1-D initializer");
    return GridDensity::gaussian(g->mean[0], g->cov(0, 0), x_min, x_max, n_nodes);
  }
  const auto& mix = std::get<std::vector<MixtureComponent>>(kind);
  std::vector<std::array<double, 3>> comps;
  for (const auto& c : mix) comps.push_back({c.weight, c.mean, c.sigma});
  return GridDensity::gaussian_mixture(comps, x_min, x_max, n_nodes);
}

Mat sample_initializer(const Initializer& init, int n, std::uint64_t seed) {
  if (const auto* g = std::get_if<Initializer::Gaussian>(&init.kind)) {
    const int d = static_cast<int>(g->mean.size());
    Eigen::LLT<Mat> llt(g->cov);
    if (llt.info() != Eigen::Success)
      throw Error(ErrorCode::config_invalid, "initializer covariance is not PD");
    Mat L = llt.matrixL();
    Mat X(n, d);
    for (int i = 0; i < n; ++i) {
      Rng rng(derive_seed(seed, streams::init, static_cast<std::uint64_t>(i)));
      Vec z(d);
      for (int c = 0; c < d; ++c) z[c] = rng.normal();
      X.row(i) = (g->mean + L * z).transpose();
    }
    return X;
  }

  const auto& mix = std::get<std::vector<Initializer::MixtureComponent>>(init.kind);
  double wsum = 0.0;
  for (const auto& c : mix) {
    if (c.weight < 0.0)
      throw Error(ErrorCode::config_invalid, "initializer mixture weight is negative");
    wsum += c.weight;
  }
  if (std::abs(wsum - 1.0) > 1e-9)
    throw Error(ErrorCode::config_invalid, "initializer mixture weights must sum to 1");

  Mat X(n, 1);
  for (int i = 0; i < n; ++i) {
    Rng rng(derive_seed(seed, streams::init, static_cast<std::uint64_t>(i)));
    const double u = rng.uniform01();
    double acc = 0.0;
    const Initializer::MixtureComponent* pick = &mix.back();
    for (const auto& c : mix) {
      acc += c.weight;
      if (u < acc) {
        pick = &c;
        break;
      }
    }
    X(i, 0) = pick->mean + pick->sigma * rng.normal();
  }
  return X;
}

std::uint64_t replicate_seed(std::uint64_t master, int replicate) {
  return derive_seed(master, streams::replicate, static_cast<std::uint64_t>(replicate));
}

namespace {

void log_state(TrajectoryLog& log, double t, const Ensemble& ens) {
  log.times.push_back(t);
  log.hhat.push_back(ens.h_values.mean());
  log.mean.push_back(empirical_mean(ens));
  log.cov_trace.push_back(empirical_cov(ens).trace());
}

void check_finite(const Mat& X, int step) {
  const int n = static_cast<int>(X.rows());
  for (int i = 0; i < n; ++i)
    if (!X.row(i).allFinite())
      throw Error(ErrorCode::non_finite_position,
                  "non-finite position at step " + std::to_string(step) + ", particle " +
                      std::to_string(i));
}

BasisSet basis_for(const SimConfig& config, const ObjectiveSpec& objective, int dim) {
  const auto& p = config.method_params;
  if (p.basis == "poly2") return poly_quadratic_basis(dim);
  if (p.basis == "fourier") {
    if (dim != 1)
      throw Error(ErrorCode::config_invalid, "fourier basis is 1-D only");
    return fourier_basis(p.fourier_period);
  }
  if (p.basis == "objective") return objective_basis(objective);
  if (p.basis == "hermite") {
    GaussianMoments mom{Vec::Constant(1, p.hermite_mean),
                        Mat::Constant(1, 1, p.hermite_sigma * p.hermite_sigma)};
    return hermite_basis(p.hermite_order, mom);
  }
  throw Error(ErrorCode::config_invalid, "unknown basis '" + p.basis + "'");
}

}  // namespace

TrajectoryLog run_from(const SimConfig& config, const ObjectiveSpec& objective,
                       Mat initial_positions) {
  const int n = static_cast<int>(initial_positions.rows());
  const int d = static_cast<int>(initial_positions.cols());
  const int n_steps = config.n_steps();
  const auto& params = config.method_params;
  const GainMethod method = config.gain_method;

  if (method == GainMethod::gradient_descent && !objective.has_grad())
    throw Error(ErrorCode::config_invalid,
                "gradient_descent backend needs an objective gradient");
  if (method == GainMethod::sisr && d != 1)
    throw Error(ErrorCode::config_invalid, "sisr backend is 1-D only");

  Ensemble ens = Ensemble::from_positions(std::move(initial_positions), objective);

  BasisSet basis;
  if (method == GainMethod::galerkin) basis = basis_for(config, objective, d);

  TrajectoryLog log;
  log_state(log, 0.0, ens);

  Vec phi_prev = Vec::Zero(n);  // kernel warm start across steps
  bool frozen = false;

  const bool static_backend =
      method != GainMethod::gradient_descent && config.beta == 0.0;

  for (int step = 1; step <= n_steps; ++step) {
    const double t = step * config.dt;

    if (!static_backend && !frozen) {
      if (method == GainMethod::sisr) {
        WeightedEnsemble we{ens.positions.col(0), Vec::Constant(n, 1.0 / n)};
        WeightedEnsemble next =
            sisr_step(we, objective, config.beta, config.dt,
                      derive_seed(config.seed, streams::resample,
                                  static_cast<std::uint64_t>(step)));
        ens.positions.col(0) = next.positions;
        ens.refresh_h(objective);
      } else {
        GainSamples gain;
        switch (method) {
          case GainMethod::affine: {
            if (empirical_cov(ens).trace() < params.collapse_trace) {
              frozen = true;
              log.early_stop_step = step;
              break;
            }
            gain = affine_gain(ens, config.beta, params.eps_pd).first;
            break;
          }
          case GainMethod::galerkin: {
            auto [A, b] = assemble(ens, basis);
            const double ridge =
                params.ridge + params.ridge_rel * A.trace() / basis.size();
            GalerkinSolution sol = solve_coefficients(A, b, ridge);
            gain.controls = Mat::Zero(n, d);
            for (int i = 0; i < n; ++i) {
              Vec x = ens.positions.row(i).transpose();
              Vec u = Vec::Zero(d);
              for (int k = 0; k < basis.size(); ++k)
                u += sol.coeffs[k] * basis.grads[k](x);
              gain.controls.row(i) = -config.beta * u.transpose();
            }
            break;
          }
          case GainMethod::kernel: {
            KernelOperator op = build_operator(ens, params.epsilon);
            HStats hs = h_stats(ens);
            PotentialVector phi = fixed_point(op, hs.centered, params.epsilon,
                                              params.sweeps, phi_prev, params.residual_tol);
            phi_prev = phi.phi;
            gain = kernel_gain(op, phi, hs.centered, config.beta, params.epsilon);
            break;
          }
          case GainMethod::gradient_descent: {
            gain.controls.resize(n, d);
            for (int i = 0; i < n; ++i)
              gain.controls.row(i) = -objective.grad(ens.positions.row(i).transpose());
            break;
          }
          default: break;
        }

        if (!frozen) {
          Mat move = config.dt * gain.controls;
          const double max_move = move.cwiseAbs().maxCoeff();
          if (max_move > params.clip_threshold) {
            log.flagged_steps.push_back(step);
            if (params.clip_hard) {
              for (int i = 0; i < n; ++i) {
                const double mi = move.row(i).cwiseAbs().maxCoeff();
                if (mi > params.clip_threshold)
                  move.row(i) *= params.clip_threshold / mi;
              }
            }
          }
          ens.positions += move;
          check_finite(ens.positions, step);
          ens.refresh_h(objective);
        }
      }
    }

    log_state(log, t, ens);
    if (params.snapshot_stride > 0 && step % params.snapshot_stride == 0 && step != n_steps)
      log.snapshots.emplace_back(t, ens.positions);
  }

  log.snapshots.emplace_back(n_steps * config.dt, ens.positions);
  return log;
}

TrajectoryLog run(const SimConfig& config, const ObjectiveSpec& objective,
                  const Initializer& init) {
  return run_from(config, objective,
                  sample_initializer(init, config.n_particles, config.seed));
}

McReport mc_variance_study(const SimConfig& config, const McGrid& grid, int replicates,
                           const std::function<ObjectiveSpec(int dim)>& objective_for,
                           const std::function<Initializer(int dim)>& init_for) {
  if (replicates < 2)
    throw Error(ErrorCode::config_invalid,
                "config field 'replicates' must be >= 2 for a variance");

  McReport report;
  report.grid = grid;
  report.replicates = replicates;

  for (int value : grid.values) {
    SimConfig cfg = config;
    int dim = 1;
    if (grid.kind == McGrid::Kind::particles) {
      cfg.n_particles = value;
    } else {
      dim = value;
    }
    ObjectiveSpec objective = objective_for(dim);
    Initializer init = init_for(dim);

    Mat finals(replicates, dim);
    for (int j = 0; j < replicates; ++j) {
      cfg.seed = replicate_seed(config.seed, j);
      TrajectoryLog log = run(cfg, objective, init);
      finals.row(j) = log.mean.back().transpose();
    }
    Vec mbar = finals.colwise().mean().transpose();
    double var = 0.0;
    for (int j = 0; j < replicates; ++j)
      var += (finals.row(j).transpose() - mbar).squaredNorm();
    report.mc_var.push_back(var / replicates);
  }
  return report;
}

OracleReport compare_to_oracle(const TrajectoryLog& log, const SimConfig& config,
                               const ObjectiveSpec& objective, const Initializer& init) {
  OracleReport report;
  const int d = log.dim();

  const auto* gauss = std::get_if<Initializer::Gaussian>(&init.kind);
  const bool qg_ok = objective.quadratic.has_value() && gauss != nullptr;
  const bool grid_ok = d == 1;
  if (!qg_ok && !grid_ok)
    throw Error(ErrorCode::oracle_unavailable,
                "no oracle applies: objective is not quadratic-Gaussian and d > 1");
  report.qg_available = qg_ok;
  report.grid_available = grid_ok;
  report.times = log.times;

  if (qg_ok) {
    const auto& q = *objective.quadratic;
    for (std::size_t k = 0; k < log.times.size(); ++k) {
      GaussianMoments mom =
          qg_exact(log.times[k], gauss->mean, gauss->cov, q.H, q.xbar, config.beta);
      report.mean_err.push_back((log.mean[k] - mom.mean).norm());
      report.cov_err.push_back(std::abs(log.cov_trace[k] - mom.cov.trace()));
    }
  }

  if (grid_ok) {
    GridDensity prior = init.grid_density();
    for (const auto& [t, positions] : log.snapshots) {
      GridDensity post = posterior_exact(prior, objective, config.beta, t);
      report.ks.emplace_back(t, ks_distance(positions.col(0), post));
    }
  }
  return report;
}

}  // namespace cpf
