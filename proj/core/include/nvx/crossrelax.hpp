// Dipolar cross-relaxation observable: polarization-survival loss of NV
// pairs, averaged over inter-NV directions, and the resulting contrast maps.
#pragma once

#include "nvx/geometry.hpp"
#include "nvx/hamiltonian.hpp"

#include <vector>

namespace nvx {

enum class ContrastScale { normalized_to_max, absolute };

struct CrossRelaxConfig {
  Isotope iso = Isotope::n14;
  double d_dd_mhz = 0.1;
  int dipole_directions = 32;
  ContrastScale scale = ContrastScale::normalized_to_max;
  double absolute_scale = 1.0;  // multiplier used in absolute mode
};

// Mean long-time polarization loss of one oriented pair: one NV starts in
// its m_s = 0-like level, the partner in a +-1-like level, averaged over
// nuclear labels, branch, role, and dipole directions.  0 <= loss <= 1;
// exactly 0 when the coupling vanishes.
double pair_depolarization(Orientation o1, Orientation o2,
                           const FieldPoint& fp, const CrossRelaxConfig& cfg,
                           const PhysicalConstants& c);

// Orientation-pair-weighted loss at one field point (unscaled).  Same-
// orientation pairs carry weight 1/16, cross pairs 2/16.
double contrast_at(const FieldPoint& fp, const CrossRelaxConfig& cfg,
                   const PhysicalConstants& c);

struct ContrastMap {
  std::vector<double> b_par_grid_mt;
  std::vector<double> b_perp_grid_mt;
  std::vector<double> values;  // row-major, b_par outer
};

ContrastMap contrast_map(const std::vector<double>& b_par_grid_mt,
                         const std::vector<double>& b_perp_grid_mt,
                         const CrossRelaxConfig& cfg,
                         const PhysicalConstants& c, int workers = 1,
                         const Vec3& background_mt = Vec3::Zero());

std::vector<double> linecut(double b_par_mt,
                            const std::vector<double>& b_perp_grid_mt,
                            const CrossRelaxConfig& cfg,
                            const PhysicalConstants& c, int workers = 1,
                            const Vec3& background_mt = Vec3::Zero());

// Scale a raw loss curve or map per the config: divide by its maximum, or
// multiply by the absolute factor.
void apply_contrast_scale(std::vector<double>& values,
                          const CrossRelaxConfig& cfg);

}  // namespace nvx
