#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <functional>
#include <optional>
#include <string>

namespace cpf {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;
using RowMat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

// Objective h: R^d -> R, with an optional analytic gradient and, when h is
// quadratic, its explicit (H, xbar, c) structure for the closed-form oracles.
struct ObjectiveSpec {
  struct Quadratic {
    Mat H;
    Vec xbar;
    double c = 0.0;
  };

  int dim = 0;
  std::function<double(const Vec&)> eval;
  std::function<Vec(const Vec&)> grad;  // empty when no analytic gradient
  std::optional<Quadratic> quadratic;

  bool has_grad() const { return static_cast<bool>(grad); }
};

// h(x) = (x-2)^2 (x+2)^2 - x/2, the 1-D double-well benchmark.
ObjectiveSpec objective_double_well();

// h(x) = 1/2 (x-xbar)^T H (x-xbar) + c.  Throws not_symmetric_pd if H fails
// a Cholesky factorization.
ObjectiveSpec objective_quadratic(const Mat& H, const Vec& xbar, double c = 0.0);

// Particle ensemble: N positions in R^d plus cached objective values.
// h_values[i] == eval(positions.row(i)) is refreshed after every move, so
// gain backends never re-evaluate h.
struct Ensemble {
  Mat positions;  // N x d
  Vec h_values;   // N

  int count() const { return static_cast<int>(positions.rows()); }
  int dim() const { return static_cast<int>(positions.cols()); }

  static Ensemble from_positions(Mat X, const ObjectiveSpec& objective);
  void refresh_h(const ObjectiveSpec& objective);
};

struct GaussianMoments {
  Vec mean;
  Mat cov;
};

// Per-particle control vectors u^i, one row per particle.
struct GainSamples {
  Mat controls;  // N x d
};

enum class GainMethod { affine, galerkin, kernel, gradient_descent, sisr };

const char* gain_method_name(GainMethod m);
std::optional<GainMethod> gain_method_from_name(const std::string& name);

// Per-method knobs; defaults follow the experiments' settings where the
// source fixes one (epsilon = 0.5, Fourier period 10).
struct MethodParams {
  // kernel backend
  double epsilon = 0.5;
  int sweeps = 100;
  double residual_tol = 1e-9;
  // galerkin backend
  std::string basis = "poly2";  // poly2 | fourier | objective | hermite
  double ridge = 0.0;
  double ridge_rel = 0.0;  // effective ridge += ridge_rel * trace(A)/M
  double fourier_period = 10.0;
  int hermite_order = 3;
  double hermite_mean = 0.0;
  double hermite_sigma = 1.0;
  // affine backend
  double eps_pd = 1e-10;
  double collapse_trace = 1e-8;  // freeze particles below this spread
  // step guard
  double clip_threshold = 1.0;
  bool clip_hard = false;
  // logging
  int snapshot_stride = 0;  // 0: final snapshot only
};

struct SimConfig {
  double beta = 1.0;
  double dt = 0.01;
  double t_final = 5.0;
  int n_particles = 500;
  std::uint64_t seed = 0;
  GainMethod gain_method = GainMethod::affine;
  MethodParams method_params;

  int n_steps() const;
  // Throws config_invalid naming the offending field.
  void validate() const;
};

}  // namespace cpf
