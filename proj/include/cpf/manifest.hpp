#pragma once

#include "cpf/sim.hpp"
#include "cpf/types.hpp"

#include <json.hpp>

#include <string>

namespace cpf {

inline constexpr int kSchemaVersion = 1;

// Parsed run manifest (JSON file).  load_manifest throws config_invalid with
// a message naming the offending field.
struct RunManifest {
  SimConfig config;
  std::string objective_name;
  ObjectiveSpec objective;
  Initializer init;
  McGrid mc_grid;           // mc-variance only
  int replicates = 0;       // mc-variance only
  struct Outputs {
    std::string trajectory = "trajectory.csv";
    std::string snapshots;  // empty: not written
    std::string sidecar = "run.json";
    std::string report = "report.csv";  // mc-variance / compare
  } outputs;
  int schema_version = kSchemaVersion;
  nlohmann::json raw;  // parsed manifest, echoed into the sidecar

  // dimension-parametrized rebuilds for the mc-variance d sweep
  ObjectiveSpec objective_for(int dim) const;
  Initializer init_for(int dim) const;
};

RunManifest load_manifest(const std::string& path);

void write_trajectory_csv(const std::string& path, const TrajectoryLog& log);
void write_snapshots_csv(const std::string& path, const TrajectoryLog& log);
void write_mc_csv(const std::string& path, const McReport& report);
void write_sidecar_json(const std::string& path, const RunManifest& manifest,
                        const TrajectoryLog* log);

// 17-significant-digit decimal form (round-trips exactly).
std::string format_double(double v);

}  // namespace cpf
