#include "cpf/types.hpp"

#include "cpf/errors.hpp"

#include <cmath>

namespace cpf {

ObjectiveSpec objective_double_well() {
  ObjectiveSpec spec;
  spec.dim = 1;
  spec.eval = [](const Vec& x) {
    const double v = x[0];
    const double a = v - 2.0, b = v + 2.0;
    return a * a * b * b - 0.5 * v;
  };
  spec.grad = [](const Vec& x) {
    const double v = x[0];
    Vec g(1);
    g[0] = 4.0 * v * (v * v - 4.0) - 0.5;
    return g;
  };
  return spec;
}

ObjectiveSpec objective_quadratic(const Mat& H, const Vec& xbar, double c) {
  if (H.rows() != H.cols() || H.rows() != xbar.size())
    throw Error(ErrorCode::config_invalid, "quadratic objective: H/xbar dimension mismatch");
  if (!H.isApprox(H.transpose(), 1e-12))
    throw Error(ErrorCode::not_symmetric_pd, "quadratic objective: H is not symmetric");
  Eigen::LLT<Mat> llt(H);
  if (llt.info() != Eigen::Success)
    throw Error(ErrorCode::not_symmetric_pd, "quadratic objective: H is not positive definite");

  ObjectiveSpec spec;
  spec.dim = static_cast<int>(H.rows());
  Mat Hc = H;
  Vec xc = xbar;
  spec.eval = [Hc, xc, c](const Vec& x) {
    Vec d = x - xc;
    return 0.5 * d.dot(Hc * d) + c;
  };
  spec.grad = [Hc, xc](const Vec& x) { return Vec(Hc * (x - xc)); };
  spec.quadratic = ObjectiveSpec::Quadratic{H, xbar, c};
  return spec;
}

Ensemble Ensemble::from_positions(Mat X, const ObjectiveSpec& objective) {
  Ensemble ens;
  ens.positions = std::move(X);
  ens.refresh_h(objective);
  return ens;
}

void Ensemble::refresh_h(const ObjectiveSpec& objective) {
  const int n = count();
  h_values.resize(n);
  for (int i = 0; i < n; ++i) h_values[i] = objective.eval(positions.row(i).transpose());
}

const char* gain_method_name(GainMethod m) {
  switch (m) {
    case GainMethod::affine: return "affine";
    case GainMethod::galerkin: return "galerkin";
    case GainMethod::kernel: return "kernel";
    case GainMethod::gradient_descent: return "gradient_descent";
    case GainMethod::sisr: return "sisr";
  }
  return "?";
}

std::optional<GainMethod> gain_method_from_name(const std::string& name) {
  if (name == "affine") return GainMethod::affine;
  if (name == "galerkin") return GainMethod::galerkin;
  if (name == "kernel") return GainMethod::kernel;
  if (name == "gradient_descent") return GainMethod::gradient_descent;
  if (name == "sisr") return GainMethod::sisr;
  return std::nullopt;
}

int SimConfig::n_steps() const { return static_cast<int>(std::llround(t_final / dt)); }

void SimConfig::validate() const {
  if (!(beta > 0.0)) throw Error(ErrorCode::config_invalid, "config field 'beta' must be > 0");
  if (!(dt > 0.0)) throw Error(ErrorCode::config_invalid, "config field 'dt' must be > 0");
  if (!(t_final > 0.0))
    throw Error(ErrorCode::config_invalid, "config field 't_final' must be > 0");
  if (!(dt < t_final))
    throw Error(ErrorCode::config_invalid, "config field 'dt' must be < t_final");
  if (n_particles < 2)
    throw Error(ErrorCode::config_invalid, "config field 'n_particles' must be >= 2");
  if (n_steps() < 1) throw Error(ErrorCode::config_invalid, "config field 'dt': zero steps");
}

}  // namespace cpf
