#pragma once

#include "cpf/grid_oracle.hpp"
#include "cpf/types.hpp"

#include <array>
#include <cstdint>
#include <functional>
#include <variant>
#include <vector>

namespace cpf {

// Initial ensemble distribution.
struct Initializer {
  struct Gaussian {
    Vec mean;
    Mat cov;
  };
  struct MixtureComponent {
    double weight;
    double mean;
    double sigma;
  };
  std::variant<Gaussian, std::vector<MixtureComponent>> kind;

  int dim() const;
  // GridDensity of this initializer (1-D only), for the grid oracles.
  GridDensity grid_density(double x_min = -8.0, double x_max = 8.0, int n_nodes = 4001) const;
};

// Per-particle streams derived from (seed, init, i): particle i's draw does
// not depend on N.
Mat sample_initializer(const Initializer& init, int n, std::uint64_t seed);

struct TrajectoryLog {
  std::vector<double> times;
  std::vector<double> hhat;
  std::vector<Vec> mean;
  std::vector<double> cov_trace;
  std::vector<std::pair<double, Mat>> snapshots;  // (t, positions); final always kept
  std::vector<int> flagged_steps;                 // |dt u| exceeded clip_threshold
  int early_stop_step = -1;                       // affine variance collapse, -1 if none

  int dim() const { return mean.empty() ? 0 : static_cast<int>(mean.front().size()); }
};

// Euler integration of dX/dt = u with the configured gain backend; SISR
// replaces the move by weighting + resampling, gradient descent uses
// u = -grad h.  Logs (t, hhat, mean, tr cov) at every step including t = 0.
TrajectoryLog run(const SimConfig& config, const ObjectiveSpec& objective,
                  const Initializer& init);

// Same, but from explicit initial positions (tests use this directly).
TrajectoryLog run_from(const SimConfig& config, const ObjectiveSpec& objective,
                       Mat initial_positions);

std::uint64_t replicate_seed(std::uint64_t master, int replicate);

struct McGrid {
  enum class Kind { particles, dimension } kind = Kind::particles;
  std::vector<int> values;
};

struct McReport {
  McGrid grid;
  std::vector<double> mc_var;  // (1/J) sum_j |m_T,j - mbar|^2 per grid value
  int replicates = 0;
};

// J independent seeded runs per grid value; factories rebuild the objective
// and initializer when the grid sweeps the dimension.
McReport mc_variance_study(const SimConfig& config, const McGrid& grid, int replicates,
                           const std::function<ObjectiveSpec(int dim)>& objective_for,
                           const std::function<Initializer(int dim)>& init_for);

struct OracleReport {
  bool qg_available = false;
  bool grid_available = false;
  std::vector<double> times;
  std::vector<double> mean_err;  // |m_t^(N) - m_t|
  std::vector<double> cov_err;   // Frobenius |Sigma trace err| proxy: |tr S^(N) - tr S_t|
  std::vector<std::pair<double, double>> ks;  // (t, KS vs grid posterior) per snapshot
};

// Errors of a trajectory against the applicable analytic oracles.  Throws
// oracle_unavailable when the objective is not quadratic-Gaussian and d > 1.
OracleReport compare_to_oracle(const TrajectoryLog& log, const SimConfig& config,
                               const ObjectiveSpec& objective, const Initializer& init);

}  // namespace cpf
