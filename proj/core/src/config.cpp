#include "nvx/config.hpp"

#include "nvx/error.hpp"
#include "nvx/format.hpp"

#include <openssl/evp.h>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

namespace nvx {

std::vector<double> GridSpec::points() const {
  if (!(step > 0.0)) throw ValidationError("grid step must be positive");
  if (!(start < stop)) throw ValidationError("grid start must precede stop");
  const double q = (stop - start) / step;
  const double rounded = std::round(q);
  const int n =
      (std::abs(q - rounded) < 1e-6 ? static_cast<int>(rounded)
                                    : static_cast<int>(std::floor(q))) +
      1;
  std::vector<double> pts(n);
  for (int i = 0; i < n; ++i) {
    double v = start + i * step;
    if (std::abs(v) < step * 1e-9) v = 0.0;
    pts[i] = v;
  }
  return pts;
}

namespace {

struct RawValue {
  std::string text;
  int line = 0;
  int col = 0;
  bool consumed = false;
  std::string source;
};

using RawMap = std::map<std::string, RawValue>;

const std::vector<std::string> kSections = {
    "sample", "constants", "scan",   "crossrelax",
    "rates",  "lockin",    "output", "run"};

// Grammar: [section] headers, key = value lines, #/; comments, blank lines.
// Duplicate keys within one source are rejected; merging across sources is
// the caller's concern.  The source label is carried into diagnostics.
void parse_into(const std::string& text, RawMap& entries,
                const std::string& source) {
  std::istringstream in(text);
  std::string line;
  std::string section;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const std::size_t cut = line.find_first_of("#;");
    if (cut != std::string::npos) line.resize(cut);

    const std::size_t first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos) continue;
    const std::size_t last = line.find_last_not_of(" \t\r");
    const std::string body = line.substr(first, last - first + 1);
    const int col = static_cast<int>(first) + 1;

    if (body.front() == '[') {
      if (body.back() != ']')
        throw ParseError("unterminated section header", lineno, col, source);
      section = body.substr(1, body.size() - 2);
      if (std::find(kSections.begin(), kSections.end(), section) ==
          kSections.end())
        throw ValidationError("unknown section '" + section + "'", lineno,
                              col, source);
      continue;
    }

    const std::size_t eq = body.find('=');
    if (eq == std::string::npos)
      throw ParseError("expected 'key = value'", lineno, col, source);
    if (section.empty())
      throw ParseError("key outside of any [section]", lineno, col, source);

    std::string key = body.substr(0, eq);
    key.erase(key.find_last_not_of(" \t") + 1);
    if (key.empty()) throw ParseError("empty key", lineno, col, source);

    std::string value = body.substr(eq + 1);
    const std::size_t vfirst = value.find_first_not_of(" \t");
    if (vfirst == std::string::npos)
      throw ParseError("empty value for '" + key + "'", lineno, col, source);
    value = value.substr(vfirst);
    value.erase(value.find_last_not_of(" \t") + 1);

    const std::string full = section + "." + key;
    if (entries.count(full))
      throw ParseError("duplicate key '" + full + "'", lineno, col, source);
    entries[full] = RawValue{value, lineno, col, false, source};
  }
}

class Reader {
 public:
  explicit Reader(RawMap& entries) : entries_(entries) {}

  std::optional<RawValue*> find(const std::string& key) {
    auto it = entries_.find(key);
    if (it == entries_.end()) return std::nullopt;
    it->second.consumed = true;
    return &it->second;
  }

  double number(const std::string& key, double fallback) {
    auto rv = find(key);
    if (!rv) return fallback;
    return parse_number(**rv, key);
  }

  int integer(const std::string& key, int fallback) {
    auto rv = find(key);
    if (!rv) return fallback;
    const double v = parse_number(**rv, key);
    if (std::abs(v - std::round(v)) > 1e-9)
      throw ValidationError("'" + key + "' must be an integer", (*rv)->line,
                            (*rv)->col, (*rv)->source);
    return static_cast<int>(std::llround(v));
  }

  std::string word(const std::string& key, const std::string& fallback) {
    auto rv = find(key);
    if (!rv) return fallback;
    return (*rv)->text;
  }

  std::vector<double> triple(const std::string& key,
                             const std::vector<double>& fallback) {
    auto rv = find(key);
    if (!rv) return fallback;
    std::istringstream in((*rv)->text);
    std::vector<double> vals;
    std::string tok;
    while (in >> tok) {
      RawValue part = **rv;
      part.text = tok;
      vals.push_back(parse_number(part, key));
    }
    if (vals.size() != 3)
      throw ValidationError("'" + key + "' needs exactly 3 numbers",
                            (*rv)->line, (*rv)->col, (*rv)->source);
    return vals;
  }

  void fail(const std::string& key, const std::string& msg) {
    auto it = entries_.find(key);
    if (it != entries_.end())
      throw ValidationError(msg, it->second.line, it->second.col,
                            it->second.source);
    throw ValidationError(msg);
  }

  void reject_unconsumed() const {
    for (const auto& [key, rv] : entries_)
      if (!rv.consumed)
        throw ValidationError("unknown key '" + key + "'", rv.line, rv.col,
                              rv.source);
  }

 private:
  static double parse_number(const RawValue& rv, const std::string& key) {
    double v = 0.0;
    const char* begin = rv.text.data();
    const char* end = begin + rv.text.size();
    auto res = std::from_chars(begin, end, v);
    if (res.ec != std::errc() || res.ptr != end)
      throw ParseError("invalid number '" + rv.text + "' for '" + key + "'",
                       rv.line, rv.col, rv.source);
    return v;
  }

  RawMap& entries_;
};

ExperimentConfig build(RawMap& entries) {
  Reader r(entries);
  ExperimentConfig cfg;

  cfg.sample_name = r.word("sample.name", "custom");
  const std::string iso_name = r.word("sample.isotope", "N14");
  try {
    cfg.iso = isotope_from_name(iso_name);
  } catch (const ValidationError&) {
    r.fail("sample.isotope", "isotope must be N14, N15, or none");
  }
  cfg.nv_ppm = r.number("sample.nv_ppm", 3.8);
  if (!(cfg.nv_ppm >= 0.0)) r.fail("sample.nv_ppm", "nv_ppm must be >= 0");

  const PhysicalConstants iso_defaults = default_constants(cfg.iso);
  cfg.constants.d_mhz = r.number("constants.D", iso_defaults.d_mhz);
  cfg.constants.gamma_e_mhz_per_mt =
      r.number("constants.gamma_e", iso_defaults.gamma_e_mhz_per_mt);
  cfg.constants.a_par_mhz = r.number("constants.A_par", iso_defaults.a_par_mhz);
  cfg.constants.a_perp_mhz =
      r.number("constants.A_perp", iso_defaults.a_perp_mhz);
  cfg.constants.q_mhz = r.number("constants.Q", iso_defaults.q_mhz);
  cfg.constants.d_dd_mhz = r.number("constants.d_dd", iso_defaults.d_dd_mhz);
  if (!(cfg.constants.d_mhz > 0.0)) r.fail("constants.D", "D must be > 0");
  if (!(cfg.constants.gamma_e_mhz_per_mt > 0.0))
    r.fail("constants.gamma_e", "gamma_e must be > 0");
  if (!(cfg.constants.d_dd_mhz >= 0.0))
    r.fail("constants.d_dd", "d_dd must be >= 0");
  if (cfg.iso == Isotope::n15 && cfg.constants.q_mhz != 0.0)
    r.fail("constants.Q", "Q must be 0 for N15 (spin-1/2 nucleus)");

  cfg.b_par_mt = r.number("scan.B_par", 1.24);
  auto grid = [&](const std::string& key, const GridSpec& fallback) {
    const auto v =
        r.triple(key, {fallback.start, fallback.stop, fallback.step});
    GridSpec g{v[0], v[1], v[2]};
    if (!(g.step > 0.0)) r.fail(key, "grid step must be positive");
    if (!(g.start < g.stop)) r.fail(key, "grid start must precede stop");
    return g;
  };
  cfg.b_par_grid = grid("scan.B_par_grid", cfg.b_par_grid);
  cfg.b_perp_grid = grid("scan.B_perp_grid", cfg.b_perp_grid);
  const auto bg = r.triple("scan.background", {0.0, 0.0, 0.0});
  cfg.background_mt = Vec3(bg[0], bg[1], bg[2]);
  cfg.gap_tolerance_mhz = r.number("scan.gap_tolerance", 1.0);
  if (!(cfg.gap_tolerance_mhz > 0.0))
    r.fail("scan.gap_tolerance", "gap tolerance must be positive");

  cfg.crossrelax.iso = cfg.iso;
  cfg.crossrelax.d_dd_mhz = cfg.constants.d_dd_mhz;
  cfg.crossrelax.dipole_directions = r.integer("crossrelax.dipole_directions", 32);
  if (cfg.crossrelax.dipole_directions < 1)
    r.fail("crossrelax.dipole_directions", "dipole_directions must be >= 1");
  const std::string scale = r.word("crossrelax.contrast_scale", "normalized");
  if (scale == "normalized") {
    cfg.crossrelax.scale = ContrastScale::normalized_to_max;
  } else if (scale == "absolute") {
    cfg.crossrelax.scale = ContrastScale::absolute;
  } else {
    r.fail("crossrelax.contrast_scale",
           "contrast_scale must be 'normalized' or 'absolute'");
  }
  cfg.crossrelax.absolute_scale = r.number("crossrelax.absolute_scale", 1.0);
  if (!(cfg.crossrelax.absolute_scale > 0.0))
    r.fail("crossrelax.absolute_scale", "absolute_scale must be > 0");

  cfg.rates.pump_per_mw = r.number("rates.pump_per_mW", 0.1);
  cfg.rates.k_rad = r.number("rates.k_rad", 65.0);
  cfg.rates.k_isc_pm1 = r.number("rates.k_isc_pm1", 80.0);
  cfg.rates.k_isc_0 = r.number("rates.k_isc_0", 11.0);
  cfg.rates.k_s0 = r.number("rates.k_s0", 3.3);
  cfg.rates.k_spm1 = r.number("rates.k_spm1", 1.1);
  cfg.rates.gamma_g_off = r.number("rates.gamma_g_off", 2e-4);
  cfg.rates.gamma_e_off = r.number("rates.gamma_e_off", 0.0);
  cfg.rates.c_dd_g = r.number("rates.c_dd_g", 0.02);
  cfg.rates.c_dd_e = r.number("rates.c_dd_e", 0.02);
  cfg.rates.nv_ppm = cfg.nv_ppm;
  const std::pair<const char*, double> rate_values[] = {
      {"rates.pump_per_mW", cfg.rates.pump_per_mw},
      {"rates.k_rad", cfg.rates.k_rad},
      {"rates.k_isc_pm1", cfg.rates.k_isc_pm1},
      {"rates.k_isc_0", cfg.rates.k_isc_0},
      {"rates.k_s0", cfg.rates.k_s0},
      {"rates.k_spm1", cfg.rates.k_spm1},
      {"rates.gamma_g_off", cfg.rates.gamma_g_off},
      {"rates.gamma_e_off", cfg.rates.gamma_e_off},
      {"rates.c_dd_g", cfg.rates.c_dd_g},
      {"rates.c_dd_e", cfg.rates.c_dd_e}};
  for (const auto& [key, v] : rate_values)
    if (!(v >= 0.0)) r.fail(key, "rate parameters must be >= 0");
  if (!(cfg.rates.k_isc_pm1 > cfg.rates.k_isc_0))
    r.fail("rates.k_isc_pm1", "k_isc_pm1 must exceed k_isc_0");
  const auto pg = r.triple("rates.power_grid", {0.1, 50.0, 61.0});
  if (std::abs(pg[2] - std::round(pg[2])) > 1e-9)
    r.fail("rates.power_grid", "power_grid count must be an integer");
  cfg.power_grid = {pg[0], pg[1], static_cast<int>(std::llround(pg[2]))};
  if (!(cfg.power_grid.start_mw > 0.0) ||
      !(cfg.power_grid.stop_mw > cfg.power_grid.start_mw) ||
      cfg.power_grid.count < 3)
    r.fail("rates.power_grid", "power_grid needs 0 < start < stop, count >= 3");

  cfg.lockin.mod_amplitude_mt = r.number("lockin.mod_amplitude", 0.01);
  cfg.lockin.phase_samples = r.integer("lockin.phase_samples", 64);
  cfg.lockin.harmonic = r.integer("lockin.harmonic", 1);
  if (!(cfg.lockin.mod_amplitude_mt > 0.0))
    r.fail("lockin.mod_amplitude", "mod_amplitude must be > 0");
  if (cfg.lockin.phase_samples < 8)
    r.fail("lockin.phase_samples", "phase_samples must be >= 8");
  if (cfg.lockin.harmonic < 1) r.fail("lockin.harmonic", "harmonic must be >= 1");

  cfg.out_format = r.word("output.format", "csv");
  if (cfg.out_format != "csv" && cfg.out_format != "svg")
    r.fail("output.format", "format must be 'csv' or 'svg'");
  cfg.out_dir = r.word("output.out_dir", ".");
  cfg.workers = r.integer("run.workers", 0);
  if (cfg.workers < 0) r.fail("run.workers", "workers must be >= 0");

  r.reject_unconsumed();

  // Canonical form and fingerprint.
  auto triple_text = [](double a, double b, double c) {
    return fmt(a) + " " + fmt(b) + " " + fmt(c);
  };
  const std::vector<std::pair<std::string, std::string>> lines = {
      {"sample.name", cfg.sample_name},
      {"sample.isotope", name(cfg.iso)},
      {"sample.nv_ppm", fmt(cfg.nv_ppm)},
      {"constants.D", fmt(cfg.constants.d_mhz)},
      {"constants.gamma_e", fmt(cfg.constants.gamma_e_mhz_per_mt)},
      {"constants.A_par", fmt(cfg.constants.a_par_mhz)},
      {"constants.A_perp", fmt(cfg.constants.a_perp_mhz)},
      {"constants.Q", fmt(cfg.constants.q_mhz)},
      {"constants.d_dd", fmt(cfg.constants.d_dd_mhz)},
      {"scan.B_par", fmt(cfg.b_par_mt)},
      {"scan.B_par_grid", triple_text(cfg.b_par_grid.start, cfg.b_par_grid.stop,
                                      cfg.b_par_grid.step)},
      {"scan.B_perp_grid",
       triple_text(cfg.b_perp_grid.start, cfg.b_perp_grid.stop,
                   cfg.b_perp_grid.step)},
      {"scan.background", triple_text(cfg.background_mt.x(),
                                      cfg.background_mt.y(),
                                      cfg.background_mt.z())},
      {"scan.gap_tolerance", fmt(cfg.gap_tolerance_mhz)},
      {"crossrelax.dipole_directions", fmt(cfg.crossrelax.dipole_directions)},
      {"crossrelax.contrast_scale",
       cfg.crossrelax.scale == ContrastScale::normalized_to_max ? "normalized"
                                                                : "absolute"},
      {"crossrelax.absolute_scale", fmt(cfg.crossrelax.absolute_scale)},
      {"rates.pump_per_mW", fmt(cfg.rates.pump_per_mw)},
      {"rates.k_rad", fmt(cfg.rates.k_rad)},
      {"rates.k_isc_pm1", fmt(cfg.rates.k_isc_pm1)},
      {"rates.k_isc_0", fmt(cfg.rates.k_isc_0)},
      {"rates.k_s0", fmt(cfg.rates.k_s0)},
      {"rates.k_spm1", fmt(cfg.rates.k_spm1)},
      {"rates.gamma_g_off", fmt(cfg.rates.gamma_g_off)},
      {"rates.gamma_e_off", fmt(cfg.rates.gamma_e_off)},
      {"rates.c_dd_g", fmt(cfg.rates.c_dd_g)},
      {"rates.c_dd_e", fmt(cfg.rates.c_dd_e)},
      {"rates.power_grid",
       triple_text(cfg.power_grid.start_mw, cfg.power_grid.stop_mw,
                   cfg.power_grid.count)},
      {"lockin.mod_amplitude", fmt(cfg.lockin.mod_amplitude_mt)},
      {"lockin.phase_samples", fmt(cfg.lockin.phase_samples)},
      {"lockin.harmonic", fmt(cfg.lockin.harmonic)},
      {"output.format", cfg.out_format},
      {"output.out_dir", cfg.out_dir},
      {"run.workers", fmt(cfg.workers)},
  };
  std::vector<std::pair<std::string, std::string>> sorted = lines;
  std::sort(sorted.begin(), sorted.end());
  std::string hashed;
  for (const auto& [key, value] : sorted) {
    cfg.canonical.push_back(key + " = " + value);
    if (key.rfind("run.", 0) == 0 || key.rfind("output.", 0) == 0) continue;
    hashed += key + " = " + value + "\n";
  }
  cfg.fingerprint = sha256_hex(hashed);
  return cfg;
}

}  // namespace

ExperimentConfig parse_config(const std::string& text,
                              const std::string& source_name) {
  RawMap entries;
  parse_into(text, entries, source_name);
  return build(entries);
}

ExperimentConfig load_config(const std::optional<std::string>& preset_name,
                             const std::optional<std::string>& config_path) {
  if (!preset_name && !config_path)
    throw ValidationError("need a preset, a config file, or both");
  RawMap entries;
  if (preset_name)
    parse_into(preset_text(*preset_name), entries,
               "preset '" + *preset_name + "'");
  if (config_path) {
    RawMap file_entries;
    parse_into(read_file(*config_path), file_entries, *config_path);
    for (auto& [key, rv] : file_entries) entries[key] = rv;
  }
  return build(entries);
}

namespace {

const std::map<std::string, std::string> kPresets = {
    {"S1-14N",
     "[sample]\n"
     "name = S1-14N\n"
     "isotope = N14\n"
     "nv_ppm = 3.8\n"},
    {"S2-15N",
     "[sample]\n"
     "name = S2-15N\n"
     "isotope = N15\n"
     "nv_ppm = 3.8\n"},
    {"S3-14N",
     "[sample]\n"
     "name = S3-14N\n"
     "isotope = N14\n"
     "nv_ppm = 3.8\n"},
    {"S4-14N",
     "[sample]\n"
     "name = S4-14N\n"
     "isotope = N14\n"
     "nv_ppm = 2\n"},
    {"S5-14N",
     "[sample]\n"
     "name = S5-14N\n"
     "isotope = N14\n"
     "nv_ppm = 0.3\n"},
    {"fig2-map",
     "[sample]\n"
     "name = S1-14N\n"
     "isotope = N14\n"
     "nv_ppm = 3.8\n"
     "[scan]\n"
     "B_par_grid = -1.5 1.5 0.02\n"
     "B_perp_grid = -1.5 1.5 0.02\n"
     "[crossrelax]\n"
     "dipole_directions = 32\n"},
    {"fig2-map-fast",
     "[sample]\n"
     "name = electron-only\n"
     "isotope = none\n"
     "nv_ppm = 3.8\n"
     "[constants]\n"
     "d_dd = 0.25\n"
     "[scan]\n"
     "B_par_grid = -1.52 1.52 0.04\n"
     "B_perp_grid = -1.52 1.52 0.04\n"
     "[crossrelax]\n"
     "dipole_directions = 8\n"},
    {"fig3b-14N",
     "[sample]\n"
     "name = S1-14N\n"
     "isotope = N14\n"
     "nv_ppm = 3.8\n"
     "[scan]\n"
     "B_par = 1.24\n"
     "B_perp_grid = 0.75 1.30 0.002\n"
     "[crossrelax]\n"
     "dipole_directions = 64\n"},
    {"fig3b-15N",
     "[sample]\n"
     "name = S2-15N\n"
     "isotope = N15\n"
     "nv_ppm = 3.8\n"
     "[scan]\n"
     "B_par = 1.24\n"
     "B_perp_grid = 0.75 1.30 0.002\n"
     "[crossrelax]\n"
     "dipole_directions = 64\n"},
    {"fig4-lia",
     "[sample]\n"
     "name = S2-15N\n"
     "isotope = N15\n"
     "nv_ppm = 3.8\n"
     "[scan]\n"
     "B_par = 1.24\n"
     "B_perp_grid = 0.30 1.30 0.002\n"
     "[crossrelax]\n"
     "dipole_directions = 64\n"
     "[lockin]\n"
     "mod_amplitude = 0.01\n"
     "phase_samples = 64\n"
     "harmonic = 1\n"},
    {"fig4c-odmr",
     "[sample]\n"
     "name = S2-15N\n"
     "isotope = N15\n"
     "nv_ppm = 3.8\n"
     "[scan]\n"
     "B_par = 1.24\n"
     "B_perp_grid = 0.30 1.30 0.005\n"
     "gap_tolerance = 1.0\n"},
    {"fig5-power",
     "[sample]\n"
     "name = S3-14N\n"
     "isotope = N14\n"
     "nv_ppm = 3.8\n"
     "[rates]\n"
     "power_grid = 0.1 50 61\n"},
};

}  // namespace

std::vector<std::string> preset_names() {
  std::vector<std::string> names;
  for (const auto& [name, text] : kPresets) names.push_back(name);
  return names;
}

std::string preset_text(const std::string& name) {
  auto it = kPresets.find(name);
  if (it == kPresets.end()) {
    std::string known;
    for (const auto& n : preset_names()) known += (known.empty() ? "" : ", ") + n;
    throw ValidationError("unknown preset '" + name + "' (available: " + known +
                          ")");
  }
  return it->second;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  if (in.bad()) throw IoError("failed reading '" + path + "'");
  return buf.str();
}

std::string sha256_hex(const std::string& data) {
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(data.data(), data.size(), md, &len, EVP_sha256(), nullptr) !=
      1)
    throw NumericError("digest computation failed");
  static const char* hex = "0123456789abcdef";
  std::string out;
  out.reserve(2 * len);
  for (unsigned int i = 0; i < len; ++i) {
    out.push_back(hex[md[i] >> 4]);
    out.push_back(hex[md[i] & 0xf]);
  }
  return out;
}

}  // namespace nvx
