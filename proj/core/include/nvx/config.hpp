// Experiment configuration: strict INI-style grammar with positioned
// diagnostics, shipped presets, and a canonical fingerprint of the resolved
// physics parameters.
#pragma once

#include "nvx/crossrelax.hpp"
#include "nvx/geometry.hpp"
#include "nvx/hamiltonian.hpp"
#include "nvx/lockin.hpp"
#include "nvx/rates.hpp"

#include <optional>
#include <string>
#include <vector>

namespace nvx {

struct GridSpec {
  double start;
  double stop;
  double step;

  // Inclusive uniform grid; values straddling zero snap to exact 0.
  std::vector<double> points() const;
};

struct PowerGridSpec {
  double start_mw;
  double stop_mw;
  int count;
};

struct ExperimentConfig {
  std::string sample_name = "custom";
  Isotope iso = Isotope::n14;
  double nv_ppm = 3.8;

  PhysicalConstants constants;

  double b_par_mt = 1.24;
  GridSpec b_par_grid{-1.52, 1.52, 0.04};
  GridSpec b_perp_grid{-1.52, 1.52, 0.04};
  Vec3 background_mt = Vec3::Zero();
  double gap_tolerance_mhz = 1.0;

  CrossRelaxConfig crossrelax;
  RateModelParams rates;
  LockinConfig lockin;
  PowerGridSpec power_grid{0.1, 50.0, 61};

  std::string out_format = "csv";
  std::string out_dir = ".";
  int workers = 0;  // 0: resolve from NVX_WORKERS, else 1

  // Canonical "section.key = value" lines, defaults expanded, sorted.
  std::vector<std::string> canonical;
  // SHA-256 over the physics-bearing canonical lines ([run]/[output]
  // excluded, so worker count and emit format do not change identity).
  std::string fingerprint;
};

// The source name, when given, prefixes parse and validation diagnostics.
ExperimentConfig parse_config(const std::string& text,
                              const std::string& source_name = "");

// Preset, config file, or both (file keys override preset keys).
ExperimentConfig load_config(const std::optional<std::string>& preset_name,
                             const std::optional<std::string>& config_path);

std::vector<std::string> preset_names();
std::string preset_text(const std::string& name);

std::string read_file(const std::string& path);
std::string sha256_hex(const std::string& data);

}  // namespace nvx
