#pragma once
// Run configuration, read from JSON. Every section is optional; unknown keys
// are rejected.

#include <optional>
#include <string>
#include <vector>

#include "beamstab/coefficient.hpp"
#include "beamstab/dynamics.hpp"
#include "beamstab/stability.hpp"

namespace beamstab {

struct CoefficientConfig {
  std::string family = "power_law";  // power_law | power_law_times_smooth
  double alpha = 0.5;
  double c = 0.0;
};

struct MeshConfig {
  int n_elements = 128;
  double grading = 2.0;
};

struct TimeConfig {
  double dt = 1e-3;
  double t_end = 20.0;
  int snapshot_stride = 10;
};

struct InitialConfig {
  InitialProfile y0 = InitialProfile::X2OneMinusX2;
  InitialProfile y1 = InitialProfile::Zero;
  double y0_amplitude = 1.0;
  double y1_amplitude = 1.0;
};

struct HardyConfig {
  int mesh = 512;
  int coarse_mesh = 256;
};

struct OutputConfig {
  std::string directory = "runs";
  std::string label = "run";
};

struct StaticConfig {
  double lambda = 1.0;
  double mu = 0.0;
};

struct SweepConfig {
  std::vector<double> alpha;
  std::vector<double> beta;
  std::vector<double> gamma;
};

struct ChecksConfig {
  /// Continue past t_end to max(t_end, 3M) with growing steps for the decay check.
  bool extend = true;
  std::vector<double> integral_s = {0.1, 1.0};
  double observability_s = 0.1;
  double observability_T = 2.0;
};

struct RunConfig {
  CoefficientConfig coefficient;
  double beta = 0.0;
  double gamma = 0.0;
  MeshConfig mesh;
  TimeConfig time;
  InitialConfig initial;
  DeltaPolicy delta_policy = DeltaPolicy::Scan;
  std::optional<double> eps0;
  HardyConfig hardy;
  OutputConfig output;
  StaticConfig statics;
  SweepConfig sweep;
  ChecksConfig checks;
};

/// Throws ConfigError with the offending key, value or parse position.
RunConfig parse_config_text(const std::string& text);
RunConfig parse_config(const std::string& path);

/// Resolved configuration as pretty JSON (for the run manifest).
std::string to_json(const RunConfig& cfg);

/// Range checks shared by the parser and programmatic callers.
void validate(const RunConfig& cfg);

DegeneracyCoefficient make_coefficient(const CoefficientConfig& c);

}  // namespace beamstab
