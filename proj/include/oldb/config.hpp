#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "oldb/solver.hpp"

namespace oldb {

// Simulation configuration in INI form:
//
//   [grid]        dim, points
//   [physics]     b, mu, K1, K2
//   [integrator]  dt, t_end, cfl, nonlinear, split
//   [initial]     kind, amplitude, stress_amplitude, k_min, k_max, decay,
//                 epsilon, envelope_width, file, seed
//   [output]      interval, lebesgue_p, snapshots
//
// Missing keys keep their defaults; unknown sections or keys are rejected.
struct RunConfig {
  SimConfig sim;
  bool write_snapshots = false;  // final state as a binary snapshot
};

// Parse INI text. Overrides have the form "section.key=value" and are applied
// after the file contents.
RunConfig parse_config(const std::string& text, const std::vector<std::string>& overrides = {});
RunConfig load_config(const std::filesystem::path& path, const std::vector<std::string>& overrides = {});

// Effective configuration as INI text; parse_config(to_ini(c)) reproduces c.
std::string to_ini(const RunConfig& config);

}  // namespace oldb
