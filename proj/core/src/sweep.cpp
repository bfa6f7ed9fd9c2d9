#include "nvx/sweep.hpp"

#include "nvx/error.hpp"
#include "nvx/format.hpp"
#include "nvx/lockin.hpp"
#include "nvx/rates.hpp"
#include "nvx/spectra.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <limits>
#include <map>
#include <tuple>

namespace nvx {

namespace {

const std::vector<std::pair<Command, const char*>> kCommands = {
    {Command::odmr_map, "odmr-map"},
    {Command::degeneracies, "degeneracies"},
    {Command::contrast_map, "contrast-map"},
    {Command::linecut, "linecut"},
    {Command::lia_scan, "lia-scan"},
    {Command::power_sweep, "power-sweep"},
    {Command::degeneracy_angles, "degeneracy-angles"},
};

std::string join(const std::vector<std::string>& parts, const char* sep) {
  std::string out;
  for (std::size_t i = 0; i < parts.size(); ++i) {
    if (i) out += sep;
    out += parts[i];
  }
  return out;
}

}  // namespace

const char* name(Command cmd) {
  for (const auto& [c, n] : kCommands)
    if (c == cmd) return n;
  return "?";
}

Command command_from_name(const std::string& s) {
  for (const auto& [c, n] : kCommands)
    if (s == n) return c;
  throw ValidationError("unknown command '" + s + "'");
}

std::vector<std::string> command_names() {
  std::vector<std::string> names;
  for (const auto& [c, n] : kCommands) names.push_back(n);
  return names;
}

int resolve_workers(const ExperimentConfig& cfg) {
  if (cfg.workers > 0) return cfg.workers;
  if (const char* env = std::getenv("NVX_WORKERS")) {
    int v = 0;
    const char* end = env + std::strlen(env);
    auto res = std::from_chars(env, end, v);
    if (res.ec != std::errc() || res.ptr != end || v < 1)
      throw ValidationError("NVX_WORKERS must be a positive integer, got '" +
                            std::string(env) + "'");
    return v;
  }
  return 1;
}

namespace {

void run_odmr(const ExperimentConfig& cfg, SweepResult& res) {
  const std::vector<Orientation> os(all_orientations.begin(),
                                    all_orientations.end());
  const OdmrScan scan = odmr_map(os, cfg.b_par_mt, cfg.b_perp_grid.points(),
                                 cfg.constants, cfg.iso, cfg.background_mt);
  res.columns = {"B_par_mT", "B_perp_mT", "orientation",
                 "branch",   "mI",        "freq_MHz"};
  using SeriesKey = std::tuple<int, int, double, double>;
  std::map<SeriesKey, std::size_t> series_index;
  for (std::size_t i = 0; i < scan.b_perp_grid_mt.size(); ++i) {
    for (const TransitionLine& l : scan.rows[i]) {
      res.rows.push_back({fmt(cfg.b_par_mt), fmt(scan.b_perp_grid_mt[i]),
                          name(l.orientation), name(l.branch),
                          fmt(l.mi_upper), fmt(l.freq_mhz)});
      const SeriesKey key{static_cast<int>(l.orientation),
                          static_cast<int>(l.branch), l.mi_upper, l.mi_lower};
      auto [it, fresh] = series_index.try_emplace(key, res.series.size());
      if (fresh) {
        std::string label =
            std::string(name(l.orientation)) + "." + name(l.branch);
        if (cfg.iso != Isotope::none) {
          label += ".mI=" + fmt(l.mi_upper);
          if (l.mi_upper != l.mi_lower) label += "/" + fmt(l.mi_lower);
        }
        res.series.push_back({label, {}, {}, false});
      }
      res.series[it->second].x.push_back(scan.b_perp_grid_mt[i]);
      res.series[it->second].y.push_back(l.freq_mhz);
    }
  }
  res.x_label = "B_perp (mT)";
  res.y_label = "frequency (MHz)";
}

void run_degeneracies(const ExperimentConfig& cfg, SweepResult& res) {
  const std::vector<Orientation> os(all_orientations.begin(),
                                    all_orientations.end());
  const OdmrScan scan = odmr_map(os, cfg.b_par_mt, cfg.b_perp_grid.points(),
                                 cfg.constants, cfg.iso, cfg.background_mt);
  const auto events = find_degeneracies(scan, cfg.gap_tolerance_mhz);
  res.columns = {"B_perp_mT", "participants", "min_gap_MHz", "multiplicity"};
  SweepResult::Series markers{"events", {}, {}, true};
  for (const DegeneracyEvent& e : events) {
    res.rows.push_back({fmt(e.b_perp_mt), join(e.participants, ";"),
                        fmt(e.min_gap_mhz), fmt(e.multiplicity)});
    markers.x.push_back(e.b_perp_mt);
    markers.y.push_back(e.freq_mhz);
  }
  res.series.push_back(std::move(markers));
  res.x_label = "B_perp (mT)";
  res.y_label = "frequency (MHz)";
}

void run_map(const ExperimentConfig& cfg, SweepResult& res, int workers) {
  const auto bp = cfg.b_par_grid.points();
  const auto bq = cfg.b_perp_grid.points();
  const ContrastMap m = contrast_map(bp, bq, cfg.crossrelax, cfg.constants,
                                     workers, cfg.background_mt);
  res.columns = {"B_par_mT", "B_perp_mT", "contrast"};
  for (std::size_t i = 0; i < bp.size(); ++i)
    for (std::size_t j = 0; j < bq.size(); ++j)
      res.rows.push_back(
          {fmt(bp[i]), fmt(bq[j]), fmt(m.values[i * bq.size() + j])});
  res.map = SweepResult::MapPayload{bq, bp, m.values};
  res.x_label = "B_perp (mT)";
  res.y_label = "B_par (mT)";
  res.value_label = "contrast (%)";
  res.percent_y = true;
}

void run_linecut(const ExperimentConfig& cfg, SweepResult& res, int workers) {
  const auto bq = cfg.b_perp_grid.points();
  const auto values = linecut(cfg.b_par_mt, bq, cfg.crossrelax, cfg.constants,
                              workers, cfg.background_mt);
  res.columns = {"B_perp_mT", "contrast"};
  SweepResult::Series line{"contrast", bq, values, false};
  for (std::size_t j = 0; j < bq.size(); ++j)
    res.rows.push_back({fmt(bq[j]), fmt(values[j])});
  res.series.push_back(std::move(line));
  res.x_label = "B_perp (mT)";
  res.y_label = "contrast (%)";
  res.percent_y = true;
}

void run_lia(const ExperimentConfig& cfg, SweepResult& res, int workers) {
  const auto bq = cfg.b_perp_grid.points();
  const auto xs = lia_scan(cfg.b_par_mt, bq, cfg.crossrelax, cfg.constants,
                           cfg.lockin, true, workers, cfg.background_mt);
  res.columns = {"B_perp_mT", "X_normalized"};
  for (std::size_t j = 0; j < bq.size(); ++j)
    res.rows.push_back({fmt(bq[j]), fmt(xs[j])});
  res.series.push_back({"X", bq, xs, false});
  res.x_label = "B_perp (mT)";
  res.y_label = "X (% of max)";
  res.percent_y = true;
}

void run_power(const ExperimentConfig& cfg, SweepResult& res) {
  const auto powers =
      log_power_grid(cfg.power_grid.start_mw, cfg.power_grid.stop_mw,
                     cfg.power_grid.count);
  const auto curve = contrast_vs_power(cfg.rates, powers);
  res.columns = {"power_mW", "contrast", "PL_on", "PL_off"};
  SweepResult::Series line{"contrast", {}, {}, false};
  for (const PowerPoint& p : curve) {
    res.rows.push_back(
        {fmt(p.power_mw), fmt(p.contrast), fmt(p.pl_on), fmt(p.pl_off)});
    line.x.push_back(p.power_mw);
    line.y.push_back(p.contrast);
  }
  res.series.push_back(std::move(line));
  res.x_label = "power (mW)";
  res.y_label = "contrast (%)";
  res.log_x = true;
  res.percent_y = true;
}

void run_angles(SweepResult& res) {
  res.columns = {"theta_deg", "kind", "participants"};
  SweepResult::Series markers{"angles", {}, {}, true};
  for (const DegeneracyAngle& a : degeneracy_angles()) {
    std::vector<std::string> names;
    for (Orientation o : a.participants) names.push_back(name(o));
    res.rows.push_back({fmt(a.theta_deg), name(a.kind), join(names, "+")});
    markers.x.push_back(a.theta_deg);
    markers.y.push_back(static_cast<double>(a.participants.size()));
  }
  res.series.push_back(std::move(markers));
  res.x_label = "theta (deg)";
  res.y_label = "participants";
}

}  // namespace

SweepResult run(const ExperimentConfig& cfg, Command cmd) {
  SweepResult res;
  res.kind = name(cmd);
  res.fingerprint = cfg.fingerprint;
  res.header = cfg.canonical;
  const int workers = resolve_workers(cfg);
  switch (cmd) {
    case Command::odmr_map: run_odmr(cfg, res); break;
    case Command::degeneracies: run_degeneracies(cfg, res); break;
    case Command::contrast_map: run_map(cfg, res, workers); break;
    case Command::linecut: run_linecut(cfg, res, workers); break;
    case Command::lia_scan: run_lia(cfg, res, workers); break;
    case Command::power_sweep: run_power(cfg, res); break;
    case Command::degeneracy_angles: run_angles(res); break;
  }
  return res;
}

std::string emit_csv_string(const SweepResult& result) {
  std::string out;
  out += "# nvx " + result.kind + "\n";
  out += "# fingerprint = " + result.fingerprint + "\n";
  for (const std::string& line : result.header) out += "# " + line + "\n";
  out += join(result.columns, ",") + "\n";
  for (const auto& row : result.rows) out += join(row, ",") + "\n";
  return out;
}

namespace {

// Pixel-space mapping of one plot frame.
struct Frame {
  double x0, y0, w, h;
  double xmin, xmax, ymin, ymax;
  bool logx = false;

  double px(double x) const {
    const double t = logx ? (std::log10(x) - std::log10(xmin)) /
                                (std::log10(xmax) - std::log10(xmin))
                          : (x - xmin) / (xmax - xmin);
    return x0 + t * w;
  }
  double py(double y) const { return y0 + h - (y - ymin) / (ymax - ymin) * h; }
};

std::string px_num(double v) { return fmt(std::round(v * 100.0) / 100.0); }

std::string tick_num(double v) { return fmt(std::round(v * 1e9) / 1e9); }

std::string xml_escape(const std::string& s) {
  std::string out;
  for (char ch : s) {
    switch (ch) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      default: out += ch;
    }
  }
  return out;
}

double nice_step(double span) {
  const double raw = span / 6.0;
  const double mag = std::pow(10.0, std::floor(std::log10(raw)));
  const double frac = raw / mag;
  const double unit = frac < 1.5 ? 1.0 : frac < 3.5 ? 2.0 : frac < 7.5 ? 5.0
                                                                       : 10.0;
  return unit * mag;
}

std::vector<double> linear_ticks(double lo, double hi) {
  std::vector<double> out;
  if (!(hi > lo)) return out;
  const double step = nice_step(hi - lo);
  for (double v = std::ceil(lo / step) * step; v <= hi + step * 1e-9;
       v += step) {
    if (std::abs(v) < step * 1e-9) v = 0.0;
    out.push_back(v);
  }
  return out;
}

std::vector<double> decade_ticks(double lo, double hi) {
  std::vector<double> out;
  for (int k = static_cast<int>(std::ceil(std::log10(lo) - 1e-9));
       std::pow(10.0, k) <= hi * (1 + 1e-9); ++k)
    out.push_back(std::pow(10.0, k));
  return out;
}

const char* kSeriesColors[] = {"#4569b2", "#c24f38", "#3d8f5f", "#8a5fb0",
                               "#b58a2e", "#3f8fa8", "#a84f77", "#6b6b6b"};

std::string heat_color(double t) {
  static const double stops[5][3] = {{68, 1, 84},
                                     {59, 82, 139},
                                     {33, 145, 140},
                                     {94, 201, 98},
                                     {253, 231, 37}};
  t = std::clamp(t, 0.0, 1.0) * 4.0;
  const int i = std::min(3, static_cast<int>(t));
  const double f = t - i;
  char buf[8];
  std::string out = "#";
  for (int c = 0; c < 3; ++c) {
    const int v = static_cast<int>(
        std::lround(stops[i][c] + f * (stops[i + 1][c] - stops[i][c])));
    std::snprintf(buf, sizeof buf, "%02x", v);
    out += buf;
  }
  return out;
}

void draw_axes(std::string& svg, const Frame& f, const std::string& x_label,
               const std::string& y_label) {
  const auto xticks =
      f.logx ? decade_ticks(f.xmin, f.xmax) : linear_ticks(f.xmin, f.xmax);
  const auto yticks = linear_ticks(f.ymin, f.ymax);
  for (double v : xticks) {
    const double x = f.px(v);
    svg += "<line x1='" + px_num(x) + "' y1='" + px_num(f.y0) + "' x2='" +
           px_num(x) + "' y2='" + px_num(f.y0 + f.h) +
           "' stroke='#dddddd' stroke-width='1'/>\n";
    svg += "<text x='" + px_num(x) + "' y='" + px_num(f.y0 + f.h + 18) +
           "' font-size='12' text-anchor='middle' fill='#333333'>" +
           tick_num(v) + "</text>\n";
  }
  for (double v : yticks) {
    const double y = f.py(v);
    svg += "<line x1='" + px_num(f.x0) + "' y1='" + px_num(y) + "' x2='" +
           px_num(f.x0 + f.w) + "' y2='" + px_num(y) +
           "' stroke='#dddddd' stroke-width='1'/>\n";
    svg += "<text x='" + px_num(f.x0 - 8) + "' y='" + px_num(y + 4) +
           "' font-size='12' text-anchor='end' fill='#333333'>" + tick_num(v) +
           "</text>\n";
  }
  svg += "<rect x='" + px_num(f.x0) + "' y='" + px_num(f.y0) + "' width='" +
         px_num(f.w) + "' height='" + px_num(f.h) +
         "' fill='none' stroke='#333333' stroke-width='1'/>\n";
  svg += "<text x='" + px_num(f.x0 + f.w / 2) + "' y='" +
         px_num(f.y0 + f.h + 42) +
         "' font-size='14' text-anchor='middle' fill='#111111'>" +
         xml_escape(x_label) + "</text>\n";
  svg += "<text transform='translate(" + px_num(f.x0 - 52) + "," +
         px_num(f.y0 + f.h / 2) +
         ") rotate(-90)' font-size='14' text-anchor='middle' "
         "fill='#111111'>" +
         xml_escape(y_label) + "</text>\n";
}

void draw_heatmap(std::string& svg, const SweepResult& result, Frame& f) {
  const auto& m = *result.map;
  const double scale = result.percent_y ? 100.0 : 1.0;
  const double dx = m.x.size() > 1 ? m.x[1] - m.x[0] : 1.0;
  const double dy = m.y.size() > 1 ? m.y[1] - m.y[0] : 1.0;
  f.xmin = m.x.front() - dx / 2;
  f.xmax = m.x.back() + dx / 2;
  f.ymin = m.y.front() - dy / 2;
  f.ymax = m.y.back() + dy / 2;

  double vmin = std::numeric_limits<double>::infinity();
  double vmax = -vmin;
  for (double v : m.values) {
    vmin = std::min(vmin, v);
    vmax = std::max(vmax, v);
  }
  const double span = vmax > vmin ? vmax - vmin : 1.0;

  const double cw = f.w / m.x.size() + 0.5;
  const double ch = f.h / m.y.size() + 0.5;
  for (std::size_t i = 0; i < m.y.size(); ++i) {
    for (std::size_t j = 0; j < m.x.size(); ++j) {
      const double t = (m.values[i * m.x.size() + j] - vmin) / span;
      svg += "<rect x='" + px_num(f.px(m.x[j] - dx / 2)) + "' y='" +
             px_num(f.py(m.y[i] + dy / 2)) + "' width='" + px_num(cw) +
             "' height='" + px_num(ch) + "' fill='" + heat_color(t) + "'/>\n";
    }
  }

  const double bx = f.x0 + f.w + 24;
  const int steps = 64;
  for (int s = 0; s < steps; ++s) {
    const double t = (s + 0.5) / steps;
    svg += "<rect x='" + px_num(bx) + "' y='" +
           px_num(f.y0 + f.h * (1.0 - static_cast<double>(s + 1) / steps)) +
           "' width='16' height='" + px_num(f.h / steps + 0.5) + "' fill='" +
           heat_color(t) + "'/>\n";
  }
  svg += "<rect x='" + px_num(bx) + "' y='" + px_num(f.y0) +
         "' width='16' height='" + px_num(f.h) +
         "' fill='none' stroke='#333333'/>\n";
  const std::pair<double, double> bar_labels[] = {
      {vmin, f.y0 + f.h}, {(vmin + vmax) / 2, f.y0 + f.h / 2}, {vmax, f.y0}};
  for (const auto& [v, y] : bar_labels)
    svg += "<text x='" + px_num(bx + 22) + "' y='" + px_num(y + 4) +
           "' font-size='12' fill='#333333'>" +
           tick_num(std::round(v * scale * 1e6) / 1e6) + "</text>\n";
  svg += "<text transform='translate(" + px_num(bx + 64) + "," +
         px_num(f.y0 + f.h / 2) +
         ") rotate(-90)' font-size='13' text-anchor='middle' "
         "fill='#111111'>" +
         xml_escape(result.value_label) + "</text>\n";
}

void draw_series(std::string& svg, const SweepResult& result, const Frame& f) {
  const double scale = result.percent_y ? 100.0 : 1.0;
  for (std::size_t s = 0; s < result.series.size(); ++s) {
    const auto& ser = result.series[s];
    const char* color = kSeriesColors[s % std::size(kSeriesColors)];
    if (ser.markers) {
      for (std::size_t i = 0; i < ser.x.size(); ++i)
        svg += "<circle cx='" + px_num(f.px(ser.x[i])) + "' cy='" +
               px_num(f.py(ser.y[i] * scale)) + "' r='3.5' fill='" + color +
               "'/>\n";
    } else if (!ser.x.empty()) {
      std::string pts;
      for (std::size_t i = 0; i < ser.x.size(); ++i)
        pts += px_num(f.px(ser.x[i])) + "," + px_num(f.py(ser.y[i] * scale)) +
               " ";
      svg += "<polyline points='" + pts +
             "' fill='none' stroke-width='1.5' stroke='" + color + "'/>\n";
    }
  }
  if (result.series.size() > 1 && result.series.size() <= 8) {
    for (std::size_t s = 0; s < result.series.size(); ++s) {
      const double y = f.y0 + 14 + 16 * s;
      svg += "<line x1='" + px_num(f.x0 + f.w - 150) + "' y1='" + px_num(y) +
             "' x2='" + px_num(f.x0 + f.w - 130) + "' y2='" + px_num(y) +
             "' stroke-width='2' stroke='" +
             kSeriesColors[s % std::size(kSeriesColors)] + "'/>\n";
      svg += "<text x='" + px_num(f.x0 + f.w - 124) + "' y='" + px_num(y + 4) +
             "' font-size='11' fill='#333333'>" +
             xml_escape(result.series[s].label) + "</text>\n";
    }
  }
}

void series_range(const SweepResult& result, Frame& f) {
  const double scale = result.percent_y ? 100.0 : 1.0;
  double xmin = std::numeric_limits<double>::infinity();
  double xmax = -xmin, ymin = xmin, ymax = -xmin;
  for (const auto& ser : result.series) {
    for (double v : ser.x) {
      xmin = std::min(xmin, v);
      xmax = std::max(xmax, v);
    }
    for (double v : ser.y) {
      ymin = std::min(ymin, v * scale);
      ymax = std::max(ymax, v * scale);
    }
  }
  if (!(xmax >= xmin)) {
    xmin = 0;
    xmax = 1;
    ymin = 0;
    ymax = 1;
  }
  if (xmax == xmin) {
    xmin -= 0.5;
    xmax += 0.5;
  }
  if (ymax == ymin) {
    ymin -= 0.5;
    ymax += 0.5;
  }
  const double ypad = (ymax - ymin) * 0.06;
  f.ymin = ymin - ypad;
  f.ymax = ymax + ypad;
  if (f.logx) {
    f.xmin = xmin;
    f.xmax = xmax;
  } else {
    const double xpad = (xmax - xmin) * 0.02;
    f.xmin = xmin - xpad;
    f.xmax = xmax + xpad;
  }
}

}  // namespace

std::string emit_svg_string(const SweepResult& result) {
  const bool heat = result.map.has_value();
  const double width = 840, height = 600;
  Frame f;
  f.x0 = 78;
  f.y0 = 46;
  f.w = width - f.x0 - (heat ? 150 : 30);
  f.h = height - f.y0 - 70;
  f.logx = result.log_x;

  std::string svg;
  svg += "<svg xmlns='http://www.w3.org/2000/svg' width='" + fmt(width) +
         "' height='" + fmt(height) + "' viewBox='0 0 " + fmt(width) + " " +
         fmt(height) + "'>\n";
  svg += "<rect width='100%' height='100%' fill='#ffffff'/>\n";
  svg += "<text x='" + px_num(f.x0) +
         "' y='24' font-size='16' fill='#111111' font-family='sans-serif'>" +
         xml_escape(result.kind) + "</text>\n";
  svg += "<text x='" + px_num(width - 30) +
         "' y='24' font-size='11' fill='#888888' text-anchor='end' "
         "font-family='monospace'>" +
         result.fingerprint.substr(0, 12) + "</text>\n";
  svg += "<g font-family='sans-serif'>\n";

  if (heat) {
    draw_heatmap(svg, result, f);
    draw_axes(svg, f, result.x_label, result.y_label);
  } else {
    series_range(result, f);
    draw_axes(svg, f, result.x_label, result.y_label);
    draw_series(svg, result, f);
  }

  svg += "</g>\n</svg>\n";
  return svg;
}

std::string emit(const SweepResult& result, const std::string& format,
                 const std::string& out_dir) {
  if (format != "csv" && format != "svg")
    throw ValidationError("format must be 'csv' or 'svg', got '" + format +
                          "'");
  const auto path =
      (std::filesystem::path(out_dir) / (result.kind + "." + format)).string();
  const std::string body =
      format == "csv" ? emit_csv_string(result) : emit_svg_string(result);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  out << body;
  out.flush();
  if (!out) throw IoError("failed writing '" + path + "'");
  return path;
}

}  // namespace nvx
