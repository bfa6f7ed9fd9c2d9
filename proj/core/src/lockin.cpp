#include "nvx/lockin.hpp"

#include "nvx/error.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace nvx {

namespace {

void validate(const LockinConfig& cfg) {
  if (!(cfg.mod_amplitude_mt > 0.0))
    throw ValidationError("modulation amplitude must be positive");
  if (cfg.phase_samples < 8)
    throw ValidationError("demodulation needs >= 8 phase samples");
  if (cfg.harmonic < 1) throw ValidationError("harmonic must be >= 1");
}

}  // namespace

Quadrature demodulate(const std::function<double(double)>& curve, double b0_mt,
                      const LockinConfig& cfg) {
  validate(cfg);
  const int n = cfg.phase_samples;
  double x = 0.0, y = 0.0;
  for (int j = 0; j < n; ++j) {
    const double phase = 2.0 * std::numbers::pi * j / n;
    const double value = curve(b0_mt + cfg.mod_amplitude_mt * std::sin(phase));
    x += value * std::sin(cfg.harmonic * phase);
    y += value * std::cos(cfg.harmonic * phase);
  }
  return {2.0 * x / n, 2.0 * y / n};
}

CubicInterpolant::CubicInterpolant(double x0, double step,
                                   std::vector<double> values)
    : x0_(x0), step_(step), v_(std::move(values)) {
  if (v_.size() < 2) throw ValidationError("interpolant needs >= 2 samples");
  if (!(step > 0.0)) throw ValidationError("interpolant needs positive step");
}

double CubicInterpolant::operator()(double x) const {
  const int last = static_cast<int>(v_.size()) - 1;
  double u = (x - x0_) / step_;
  u = std::clamp(u, 0.0, static_cast<double>(last));
  int i = std::min(static_cast<int>(u), last - 1);
  const double t = u - i;
  const double p0 = v_[std::max(i - 1, 0)];
  const double p1 = v_[i];
  const double p2 = v_[i + 1];
  const double p3 = v_[std::min(i + 2, last)];
  return 0.5 * ((2.0 * p1) + (-p0 + p2) * t +
                (2.0 * p0 - 5.0 * p1 + 4.0 * p2 - p3) * t * t +
                (-p0 + 3.0 * p1 - 3.0 * p2 + p3) * t * t * t);
}

std::vector<double> lia_scan(double b_par_mt,
                             const std::vector<double>& b_perp_grid_mt,
                             const CrossRelaxConfig& cr_cfg,
                             const PhysicalConstants& c,
                             const LockinConfig& lockin, bool normalize,
                             int workers, const Vec3& background_mt) {
  validate(lockin);
  if (b_perp_grid_mt.size() < 2)
    throw ValidationError("demodulated scan needs >= 2 grid points");
  const double step = b_perp_grid_mt[1] - b_perp_grid_mt[0];
  if (!(step > 0.0))
    throw ValidationError("demodulated scan needs an ascending grid");
  for (std::size_t i = 1; i < b_perp_grid_mt.size(); ++i)
    if (std::abs(b_perp_grid_mt[i] - b_perp_grid_mt[i - 1] - step) >
        1e-9 * std::max(1.0, std::abs(step)))
      throw ValidationError("demodulated scan needs a uniform grid");

  // Pad so every modulated sample lands inside the dense linecut.
  const int pad = static_cast<int>(
                      std::ceil(lockin.mod_amplitude_mt / step)) + 2;
  std::vector<double> dense_grid;
  dense_grid.reserve(b_perp_grid_mt.size() + 2 * pad);
  for (int i = pad; i >= 1; --i)
    dense_grid.push_back(b_perp_grid_mt.front() - i * step);
  dense_grid.insert(dense_grid.end(), b_perp_grid_mt.begin(),
                    b_perp_grid_mt.end());
  for (int i = 1; i <= pad; ++i)
    dense_grid.push_back(b_perp_grid_mt.back() + i * step);

  // The modulated samples must see the raw curve; normalization of the
  // demodulated output is a separate step.
  CrossRelaxConfig raw_cfg = cr_cfg;
  raw_cfg.scale = ContrastScale::absolute;
  const std::vector<double> dense =
      linecut(b_par_mt, dense_grid, raw_cfg, c, workers, background_mt);
  const CubicInterpolant interp(dense_grid.front(), step, dense);

  std::vector<double> out(b_perp_grid_mt.size());
  for (std::size_t i = 0; i < b_perp_grid_mt.size(); ++i)
    out[i] = demodulate(interp, b_perp_grid_mt[i], lockin).x;

  if (normalize) {
    double peak = 0.0;
    for (double v : out) peak = std::max(peak, std::abs(v));
    if (peak > 0.0)
      for (double& v : out) v /= peak;
  }
  return out;
}

}  // namespace nvx
