#include "nvx/rates.hpp"

#include "nvx/error.hpp"

#include <cmath>

namespace nvx {

namespace {

// Level indices.
constexpr int kG0 = 0, kGp = 1, kGm = 2, kE0 = 3, kEp = 4, kEm = 5, kS = 6;

void add_rate(Mat7& g, int to, int from, double rate) {
  g(to, from) += rate;
  g(from, from) -= rate;
}

void validate(const RateModelParams& p) {
  const double rates[] = {p.pump_per_mw, p.k_rad,        p.k_isc_pm1,
                          p.k_isc_0,     p.k_s0,         p.k_spm1,
                          p.gamma_g_off, p.gamma_e_off,  p.c_dd_g,
                          p.c_dd_e,      p.nv_ppm};
  for (double r : rates)
    if (!(r >= 0.0)) throw ValidationError("rate parameters must be >= 0");
  if (!(p.k_isc_pm1 > p.k_isc_0))
    throw ValidationError(
        "shelving must be stronger from m_s = +-1 than from m_s = 0");
}

}  // namespace

Mat7 rate_matrix(const RateModelParams& p, double power_mw,
                 bool on_resonance) {
  validate(p);
  if (power_mw < 0.0) throw ValidationError("power must be >= 0");

  Mat7 g = Mat7::Zero();
  const double pump = p.pump_per_mw * power_mw;
  add_rate(g, kE0, kG0, pump);
  add_rate(g, kEp, kGp, pump);
  add_rate(g, kEm, kGm, pump);

  add_rate(g, kG0, kE0, p.k_rad);
  add_rate(g, kGp, kEp, p.k_rad);
  add_rate(g, kGm, kEm, p.k_rad);

  add_rate(g, kS, kE0, p.k_isc_0);
  add_rate(g, kS, kEp, p.k_isc_pm1);
  add_rate(g, kS, kEm, p.k_isc_pm1);

  add_rate(g, kG0, kS, p.k_s0);
  add_rate(g, kGp, kS, p.k_spm1);
  add_rate(g, kGm, kS, p.k_spm1);

  const double gamma_g =
      p.gamma_g_off + (on_resonance ? p.c_dd_g * p.nv_ppm : 0.0);
  const double gamma_e =
      p.gamma_e_off + (on_resonance ? p.c_dd_e * p.nv_ppm : 0.0);
  const int ground[] = {kG0, kGp, kGm};
  const int excited[] = {kE0, kEp, kEm};
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      if (i != j) {
        add_rate(g, ground[i], ground[j], gamma_g);
        add_rate(g, excited[i], excited[j], gamma_e);
      }
  return g;
}

Vec7 steady_state(const Mat7& g) {
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(g, Eigen::ComputeFullV);
  const auto& sv = svd.singularValues();
  const double scale = std::max(sv[0], 1e-300);
  if (sv[6] > 1e-9 * scale)
    throw NumericError("rate matrix has no steady state");
  if (sv[5] <= 1e-9 * scale)
    throw NumericError("rate matrix is disconnected: steady state not unique");

  Vec7 n = svd.matrixV().col(6);
  if (n.sum() < 0.0) n = -n;
  for (int i = 0; i < 7; ++i) {
    if (n[i] < -1e-12) throw NumericError("steady state has negative weight");
    if (n[i] < 0.0) n[i] = 0.0;
  }
  n /= n.sum();

  const double residual = (g * n).cwiseAbs().maxCoeff();
  if (residual > 1e-9)
    throw NumericError("steady-state residual too large");
  return n;
}

double pl_rate(const Vec7& n, const RateModelParams& p) {
  return p.k_rad * (n[kE0] + n[kEp] + n[kEm]);
}

std::vector<PowerPoint> contrast_vs_power(
    const RateModelParams& p, const std::vector<double>& powers_mw) {
  std::vector<PowerPoint> curve;
  curve.reserve(powers_mw.size());
  for (double power : powers_mw) {
    const Vec7 n_on = steady_state(rate_matrix(p, power, true));
    const Vec7 n_off = steady_state(rate_matrix(p, power, false));
    PowerPoint pt;
    pt.power_mw = power;
    pt.pl_on = pl_rate(n_on, p);
    pt.pl_off = pl_rate(n_off, p);
    pt.contrast = pt.pl_off > 0.0 ? 1.0 - pt.pl_on / pt.pl_off : 0.0;
    curve.push_back(pt);
  }
  return curve;
}

OptimalPower find_optimal_power(const std::vector<PowerPoint>& curve) {
  if (curve.size() < 3)
    throw ValidationError("power curve needs at least 3 points");
  std::size_t best = 0;
  for (std::size_t i = 1; i < curve.size(); ++i)
    if (curve[i].contrast > curve[best].contrast) best = i;

  OptimalPower opt;
  opt.interior = best > 0 && best + 1 < curve.size();
  if (!opt.interior) {
    opt.power_mw = curve[best].power_mw;
    opt.contrast = curve[best].contrast;
    return opt;
  }

  // Quadratic through the bracketing points; vertex in power.
  const double x0 = curve[best - 1].power_mw, y0 = curve[best - 1].contrast;
  const double x1 = curve[best].power_mw, y1 = curve[best].contrast;
  const double x2 = curve[best + 1].power_mw, y2 = curve[best + 1].contrast;
  const double d01 = (y1 - y0) / (x1 - x0);
  const double d12 = (y2 - y1) / (x2 - x1);
  const double curv = (d12 - d01) / (x2 - x0);
  if (curv >= 0.0) {  // flat or non-concave bracket: keep the grid point
    opt.power_mw = x1;
    opt.contrast = y1;
    return opt;
  }
  const double xv = 0.5 * (x0 + x1 - d01 / curv);
  opt.power_mw = xv;
  opt.contrast = y0 + d01 * (xv - x0) + curv * (xv - x0) * (xv - x1);
  return opt;
}

std::vector<double> log_power_grid(double start_mw, double stop_mw,
                                   int count) {
  if (!(start_mw > 0.0) || !(stop_mw > start_mw))
    throw ValidationError("power grid needs 0 < start < stop");
  if (count < 3) throw ValidationError("power grid needs >= 3 points");
  std::vector<double> powers(count);
  const double lo = std::log10(start_mw), hi = std::log10(stop_mw);
  for (int i = 0; i < count; ++i)
    powers[i] = std::pow(10.0, lo + (hi - lo) * i / (count - 1));
  return powers;
}

}  // namespace nvx
