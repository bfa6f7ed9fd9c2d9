// Seven-level optical rate model {g0, g+, g-, e0, e+, e-, s}: pumping,
// radiative decay, intersystem crossing, singlet relaxation, and
// concentration-dependent intra-manifold spin relaxation.
#pragma once

#include <Eigen/Dense>

#include <vector>

namespace nvx {

using Mat7 = Eigen::Matrix<double, 7, 7>;
using Vec7 = Eigen::Matrix<double, 7, 1>;

struct RateModelParams {
  double pump_per_mw = 0.1;   // MHz of pump rate per mW
  double k_rad = 65.0;        // MHz, e_m -> g_m
  double k_isc_pm1 = 80.0;    // MHz, e_+- -> s; must exceed k_isc_0
  double k_isc_0 = 11.0;      // MHz, e_0 -> s
  double k_s0 = 3.3;          // MHz, s -> g0
  double k_spm1 = 1.1;        // MHz, s -> g+ and s -> g- each
  double gamma_g_off = 2e-4;  // MHz, ground intra-manifold, off resonance
  double gamma_e_off = 0.0;   // MHz, excited intra-manifold, off resonance
  double c_dd_g = 0.02;       // MHz per ppm, resonant ground relaxation
  double c_dd_e = 0.02;       // MHz per ppm, resonant excited relaxation
  double nv_ppm = 3.8;        // NV concentration
};

// Generator of dn/dt = G n.  Columns sum to zero.
Mat7 rate_matrix(const RateModelParams& p, double power_mw, bool on_resonance);

// Kernel direction of the generator, normalized to a probability vector.
// Rejects generators without a one-dimensional kernel.
Vec7 steady_state(const Mat7& g);

// Radiative photon rate of a population vector.
double pl_rate(const Vec7& n, const RateModelParams& p);

struct PowerPoint {
  double power_mw;
  double contrast;  // 1 - PL_on / PL_off
  double pl_on;
  double pl_off;
};

std::vector<PowerPoint> contrast_vs_power(const RateModelParams& p,
                                          const std::vector<double>& powers_mw);

struct OptimalPower {
  double power_mw;
  double contrast;
  bool interior;  // false when the maximum sits on the grid boundary
};

// Parabolic refinement through the three points bracketing the grid argmax;
// ties resolve to the lowest power.
OptimalPower find_optimal_power(const std::vector<PowerPoint>& curve);

// Log-spaced grid from start to stop, inclusive.
std::vector<double> log_power_grid(double start_mw, double stop_mw, int count);

}  // namespace nvx
