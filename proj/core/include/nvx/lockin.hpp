// Software lock-in: harmonic demodulation of a contrast curve under
// sinusoidal field modulation.
#pragma once

#include "nvx/crossrelax.hpp"

#include <functional>
#include <vector>

namespace nvx {

struct LockinConfig {
  double mod_amplitude_mt = 0.01;
  int phase_samples = 64;  // >= 8
  int harmonic = 1;        // >= 1
};

struct Quadrature {
  double x;  // in-phase (sine) component
  double y;  // quadrature (cosine) component
};

// X = (2/N) sum C(b0 + dB sin phi_j) sin(k phi_j), phi_j = 2 pi j / N;
// Y likewise with cos.
Quadrature demodulate(const std::function<double(double)>& curve, double b0_mt,
                      const LockinConfig& cfg);

// Demodulated scan backed by one dense linecut: the linecut is computed on
// the grid padded by the modulation reach, interpolated with a C1 cubic, and
// demodulated at every grid point.  When normalize is set the output is
// X / max|X|.
std::vector<double> lia_scan(double b_par_mt,
                             const std::vector<double>& b_perp_grid_mt,
                             const CrossRelaxConfig& cr_cfg,
                             const PhysicalConstants& c,
                             const LockinConfig& lockin, bool normalize = true,
                             int workers = 1,
                             const Vec3& background_mt = Vec3::Zero());

// Uniform-knot Catmull-Rom interpolant with clamped ends.
class CubicInterpolant {
 public:
  CubicInterpolant(double x0, double step, std::vector<double> values);
  double operator()(double x) const;

 private:
  double x0_;
  double step_;
  std::vector<double> v_;
};

}  // namespace nvx
