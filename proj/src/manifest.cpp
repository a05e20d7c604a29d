#include "cpf/manifest.hpp"

#include "cpf/errors.hpp"

#include <cstdio>
#include <fstream>

namespace cpf {

using nlohmann::json;

namespace {

const json& require(const json& j, const char* field, const char* scope) {
  auto it = j.find(field);
  if (it == j.end())
    throw Error(ErrorCode::config_invalid,
                std::string(scope) + " field '" + field + "' is missing");
  return *it;
}

double number(const json& j, const char* field, const char* scope) {
  const json& v = require(j, field, scope);
  if (!v.is_number())
    throw Error(ErrorCode::config_invalid,
                std::string(scope) + " field '" + field + "' must be a number");
  return v.get<double>();
}

// scalar -> constant vector, array -> vector
Vec vec_field(const json& v, int dim, const char* field) {
  if (v.is_number()) return Vec::Constant(dim, v.get<double>());
  if (!v.is_array() || static_cast<int>(v.size()) != dim)
    throw Error(ErrorCode::config_invalid,
                std::string("field '") + field + "' must be a scalar or length-" +
                    std::to_string(dim) + " array");
  Vec out(dim);
  for (int i = 0; i < dim; ++i) out[i] = v[i].get<double>();
  return out;
}

// scalar -> scalar * identity, nested array -> matrix
Mat mat_field(const json& v, int dim, const char* field) {
  if (v.is_number()) return v.get<double>() * Mat::Identity(dim, dim);
  if (!v.is_array() || static_cast<int>(v.size()) != dim)
    throw Error(ErrorCode::config_invalid,
                std::string("field '") + field + "' must be a scalar or " +
                    std::to_string(dim) + "x" + std::to_string(dim) + " matrix");
  Mat out(dim, dim);
  for (int i = 0; i < dim; ++i) {
    if (!v[i].is_array() || static_cast<int>(v[i].size()) != dim)
      throw Error(ErrorCode::config_invalid,
                  std::string("field '") + field + "' row " + std::to_string(i) +
                      " has wrong length");
    for (int j = 0; j < dim; ++j) out(i, j) = v[i][j].get<double>();
  }
  return out;
}

MethodParams parse_method_params(const json& cfg) {
  MethodParams p;
  if (!cfg.contains("method_params")) return p;
  const json& mp = cfg["method_params"];
  if (mp.contains("epsilon")) p.epsilon = mp["epsilon"].get<double>();
  if (mp.contains("sweeps")) p.sweeps = mp["sweeps"].get<int>();
  if (mp.contains("residual_tol")) p.residual_tol = mp["residual_tol"].get<double>();
  if (mp.contains("basis")) p.basis = mp["basis"].get<std::string>();
  if (mp.contains("ridge")) p.ridge = mp["ridge"].get<double>();
  if (mp.contains("ridge_rel")) p.ridge_rel = mp["ridge_rel"].get<double>();
  if (mp.contains("fourier_period")) p.fourier_period = mp["fourier_period"].get<double>();
  if (mp.contains("hermite_order")) p.hermite_order = mp["hermite_order"].get<int>();
  if (mp.contains("hermite_mean")) p.hermite_mean = mp["hermite_mean"].get<double>();
  if (mp.contains("hermite_sigma")) p.hermite_sigma = mp["hermite_sigma"].get<double>();
  if (mp.contains("eps_pd")) p.eps_pd = mp["eps_pd"].get<double>();
  if (mp.contains("collapse_trace")) p.collapse_trace = mp["collapse_trace"].get<double>();
  if (mp.contains("clip_threshold")) p.clip_threshold = mp["clip_threshold"].get<double>();
  if (mp.contains("clip_hard")) p.clip_hard = mp["clip_hard"].get<bool>();
  if (mp.contains("snapshot_stride")) p.snapshot_stride = mp["snapshot_stride"].get<int>();
  return p;
}

}  // namespace

ObjectiveSpec RunManifest::objective_for(int dim) const {
  const json& obj = raw.at("objective");
  const std::string name = obj.at("name").get<std::string>();
  if (name == "double_well") {
    if (dim != 1)
      throw Error(ErrorCode::config_invalid, "objective 'double_well' is 1-D only");
    return objective_double_well();
  }
  if (name == "quadratic") {
    Mat H = obj.contains("H") ? mat_field(obj["H"], dim, "objective.H") : Mat::Identity(dim, dim);
    Vec xbar = obj.contains("xbar") ? vec_field(obj["xbar"], dim, "objective.xbar")
                                    : Vec::Zero(dim);
    double c = obj.contains("c") ? obj["c"].get<double>() : 0.0;
    return objective_quadratic(H, xbar, c);
  }
  throw Error(ErrorCode::config_invalid, "objective field 'name' unknown: '" + name + "'");
}

Initializer RunManifest::init_for(int dim) const {
  const json& ji = raw.at("init");
  const std::string kind = require(ji, "kind", "init").get<std::string>();
  Initializer init;
  if (kind == "gaussian") {
    Initializer::Gaussian g;
    g.mean = vec_field(require(ji, "mean", "init"), dim, "init.mean");
    g.cov = mat_field(require(ji, "cov", "init"), dim, "init.cov");
    init.kind = std::move(g);
    return init;
  }
  if (kind == "gaussian_mixture") {
    if (dim != 1)
      throw Error(ErrorCode::config_invalid, "init 'gaussian_mixture' is 1-D only");
    std::vector<Initializer::MixtureComponent> comps;
    for (const auto& c : require(ji, "components", "init")) {
      comps.push_back({number(c, "weight", "init.components"),
                       number(c, "mean", "init.components"),
                       number(c, "sigma", "init.components")});
    }
    init.kind = std::move(comps);
    return init;
  }
  throw Error(ErrorCode::config_invalid, "init field 'kind' unknown: '" + kind + "'");
}

RunManifest load_manifest(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::config_invalid, "cannot open manifest '" + path + "'");
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw Error(ErrorCode::config_invalid, std::string("manifest parse error: ") + e.what());
  }

  RunManifest m;
  m.raw = j;
  m.schema_version = j.contains("schema_version") ? j["schema_version"].get<int>() : kSchemaVersion;
  if (m.schema_version != kSchemaVersion)
    throw Error(ErrorCode::config_invalid,
                "field 'schema_version' must be " + std::to_string(kSchemaVersion));

  const json& cfg = require(j, "config", "manifest");
  m.config.beta = number(cfg, "beta", "config");
  m.config.dt = number(cfg, "dt", "config");
  m.config.t_final = number(cfg, "t_final", "config");
  m.config.n_particles = static_cast<int>(number(cfg, "n_particles", "config"));
  m.config.seed = require(cfg, "seed", "config").get<std::uint64_t>();
  const std::string method = require(cfg, "gain_method", "config").get<std::string>();
  auto gm = gain_method_from_name(method);
  if (!gm)
    throw Error(ErrorCode::config_invalid,
                "config field 'gain_method' unknown: '" + method + "'");
  m.config.gain_method = *gm;
  m.config.method_params = parse_method_params(cfg);
  m.config.validate();

  const json& obj = require(j, "objective", "manifest");
  require(obj, "name", "objective");
  int dim = 1;
  if (obj.contains("dim")) dim = obj["dim"].get<int>();
  m.objective_name = obj["name"].get<std::string>();
  m.objective = m.objective_for(dim);

  require(j, "init", "manifest");
  m.init = m.init_for(dim);

  if (j.contains("mc")) {
    const json& mc = j["mc"];
    const std::string gk = require(mc, "grid_kind", "mc").get<std::string>();
    if (gk == "particles") {
      m.mc_grid.kind = McGrid::Kind::particles;
    } else if (gk == "dimension") {
      m.mc_grid.kind = McGrid::Kind::dimension;
    } else {
      throw Error(ErrorCode::config_invalid, "mc field 'grid_kind' unknown: '" + gk + "'");
    }
    for (const auto& v : require(mc, "grid", "mc")) m.mc_grid.values.push_back(v.get<int>());
    m.replicates = static_cast<int>(number(mc, "replicates", "mc"));
  }

  if (j.contains("outputs")) {
    const json& out = j["outputs"];
    if (out.contains("trajectory")) m.outputs.trajectory = out["trajectory"].get<std::string>();
    if (out.contains("snapshots")) m.outputs.snapshots = out["snapshots"].get<std::string>();
    if (out.contains("sidecar")) m.outputs.sidecar = out["sidecar"].get<std::string>();
    if (out.contains("report")) m.outputs.report = out["report"].get<std::string>();
  }
  return m;
}

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

void write_trajectory_csv(const std::string& path, const TrajectoryLog& log) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::config_invalid, "cannot write '" + path + "'");
  const int d = log.dim();
  out << "t,hhat";
  for (int c = 1; c <= d; ++c) out << ",mean_" << c;
  out << ",cov_trace\n";
  for (std::size_t k = 0; k < log.times.size(); ++k) {
    out << format_double(log.times[k]) << ',' << format_double(log.hhat[k]);
    for (int c = 0; c < d; ++c) out << ',' << format_double(log.mean[k][c]);
    out << ',' << format_double(log.cov_trace[k]) << '\n';
  }
}

void write_snapshots_csv(const std::string& path, const TrajectoryLog& log) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::config_invalid, "cannot write '" + path + "'");
  const int d = log.dim();
  out << "t,particle_id";
  for (int c = 1; c <= d; ++c) out << ",x_" << c;
  out << '\n';
  for (const auto& [t, X] : log.snapshots) {
    const int n = static_cast<int>(X.rows());
    for (int i = 0; i < n; ++i) {
      out << format_double(t) << ',' << i;
      for (int c = 0; c < d; ++c) out << ',' << format_double(X(i, c));
      out << '\n';
    }
  }
}

void write_mc_csv(const std::string& path, const McReport& report) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::config_invalid, "cannot write '" + path + "'");
  out << "N_or_d,mc_var,J\n";
  for (std::size_t k = 0; k < report.mc_var.size(); ++k)
    out << report.grid.values[k] << ',' << format_double(report.mc_var[k]) << ','
        << report.replicates << '\n';
}

void write_sidecar_json(const std::string& path, const RunManifest& manifest,
                        const TrajectoryLog* log) {
  json side = manifest.raw;
  side["schema_version"] = manifest.schema_version;
  side["config"]["seed"] = manifest.config.seed;  // resolved (CLI may override)
  side["resolved"] = {{"gain_method", gain_method_name(manifest.config.gain_method)},
                      {"n_steps", manifest.config.n_steps()}};
  if (log != nullptr) {
    side["diagnostics"] = {{"flagged_steps", log->flagged_steps},
                           {"early_stop_step", log->early_stop_step}};
  }
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::config_invalid, "cannot write '" + path + "'");
  out << side.dump(2) << '\n';
}

}  // namespace cpf
