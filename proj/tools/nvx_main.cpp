#include "nvx/error.hpp"
#include "nvx/format.hpp"
#include "nvx/sweep.hpp"

#include <CLI11.hpp>

#include <iostream>
#include <optional>
#include <string>

namespace {

// Keeps the echoed header lines in step with command-line overrides.
void set_canonical(nvx::ExperimentConfig& cfg, const std::string& key,
                   const std::string& value) {
  const std::string prefix = key + " = ";
  for (std::string& line : cfg.canonical)
    if (line.rfind(prefix, 0) == 0) line = prefix + value;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"NV ensemble photoluminescence-contrast simulator"};
  app.require_subcommand(0, 1);

  bool list_presets = false;
  app.add_flag("--list-presets", list_presets,
               "print shipped preset names and exit");

  std::string config_path, preset, out_dir, format;
  int workers = -1;
  const std::pair<const char*, const char*> commands[] = {
      {"odmr-map", "spin-transition frequencies across the transverse scan"},
      {"degeneracies", "crossings and near-degeneracies between lines"},
      {"contrast-map", "cross-relaxation contrast over both coil axes"},
      {"linecut", "contrast along the transverse axis at fixed B_par"},
      {"lia-scan", "lock-in demodulated contrast derivative"},
      {"power-sweep", "photoluminescence contrast versus pump power"},
      {"degeneracy-angles", "orientation-degenerate polar angles"},
  };
  for (const auto& [name, help] : commands) {
    CLI::App* sub = app.add_subcommand(name, help);
    sub->add_option("--config", config_path, "configuration file");
    sub->add_option("--preset", preset, "shipped preset name");
    sub->add_option("--out", out_dir, "output directory (default: config)");
    sub->add_option("--workers", workers, "worker thread count");
    sub->add_option("--format", format, "output format, csv or svg");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  if (list_presets) {
    for (const std::string& name : nvx::preset_names())
      std::cout << name << "\n";
    return 0;
  }

  const auto subs = app.get_subcommands();
  if (subs.empty()) {
    std::cerr << app.help();
    return 2;
  }

  try {
    std::optional<std::string> preset_opt, config_opt;
    if (!preset.empty()) preset_opt = preset;
    if (!config_path.empty()) config_opt = config_path;
    nvx::ExperimentConfig cfg = nvx::load_config(preset_opt, config_opt);

    if (workers >= 0) {
      cfg.workers = workers;
      set_canonical(cfg, "run.workers", nvx::fmt(workers));
    }
    if (!format.empty()) {
      cfg.out_format = format;
      set_canonical(cfg, "output.format", format);
    }
    if (!out_dir.empty()) {
      cfg.out_dir = out_dir;
      set_canonical(cfg, "output.out_dir", out_dir);
    }

    const nvx::Command cmd = nvx::command_from_name(subs.front()->get_name());
    std::cerr << "nvx: " << nvx::name(cmd) << " [" << cfg.sample_name
              << "], workers=" << nvx::resolve_workers(cfg) << "\n";
    const nvx::SweepResult result = nvx::run(cfg, cmd);
    const std::string path = nvx::emit(result, cfg.out_format, cfg.out_dir);
    std::cerr << "nvx: " << result.rows.size() << " rows, fingerprint "
              << result.fingerprint.substr(0, 12) << "\n";
    std::cout << path << "\n";
    return 0;
  } catch (const nvx::Error& e) {
    std::cerr << "nvx: error: " << e.what() << "\n";
    return e.exit_code();
  }
}
