// Sweep engine: dispatches a configured experiment to the physics modules
// and emits the result as CSV or a self-contained SVG rendering.
#pragma once

#include "nvx/config.hpp"

#include <optional>
#include <string>
#include <vector>

namespace nvx {

enum class Command {
  odmr_map,
  degeneracies,
  contrast_map,
  linecut,
  lia_scan,
  power_sweep,
  degeneracy_angles,
};

const char* name(Command cmd);
Command command_from_name(const std::string& s);
std::vector<std::string> command_names();

struct SweepResult {
  std::string kind;         // command name, doubles as the output basename
  std::string fingerprint;  // hash of the physics-bearing config lines
  std::vector<std::string> header;  // echoed config lines, defaults expanded

  std::vector<std::string> columns;
  std::vector<std::vector<std::string>> rows;  // cells pre-rendered

  // Rendering payloads; the CSV path uses only the rows above.
  struct MapPayload {
    std::vector<double> x;       // b_perp
    std::vector<double> y;       // b_par
    std::vector<double> values;  // row-major, y outer
  };
  struct Series {
    std::string label;
    std::vector<double> x;
    std::vector<double> y;
    bool markers = false;  // points instead of a polyline
  };
  std::optional<MapPayload> map;
  std::vector<Series> series;
  std::string x_label;
  std::string y_label;
  std::string value_label;  // colorbar caption for map renderings
  bool log_x = false;
  bool percent_y = false;  // render y (or map values) as percent
};

// Effective worker count: config if positive, else NVX_WORKERS, else 1.
int resolve_workers(const ExperimentConfig& cfg);

SweepResult run(const ExperimentConfig& cfg, Command cmd);

std::string emit_csv_string(const SweepResult& result);
std::string emit_svg_string(const SweepResult& result);

// Writes <out_dir>/<kind>.<format> and returns the path.
std::string emit(const SweepResult& result, const std::string& format,
                 const std::string& out_dir);

}  // namespace nvx
