// Magnetic-resonance observables of the single-NV model: transition lines,
// field scans, and the crossings between lines of an ensemble.
#pragma once

#include "nvx/geometry.hpp"
#include "nvx/hamiltonian.hpp"

#include <string>
#include <vector>

namespace nvx {

enum class Branch { plus, minus };

const char* name(Branch b);

struct TransitionLine {
  Orientation orientation;
  Branch branch;       // sign of the dominant m_s of the upper level
  double mi_upper;     // nuclear label of the upper level
  double mi_lower;     // nuclear label of the lower (m_s = 0) level
  double freq_mhz;     // > 0
  FieldPoint field;
  bool ambiguous;      // either endpoint has dominant weight below 1/2
};

// |m_s = 0> -> |m_s = +-1> lines at one field point.  Lines pair levels of
// equal nuclear label; when an endpoint's character is ambiguous, all label
// pairings are emitted and flagged.
std::vector<TransitionLine> transition_lines(Orientation o,
                                             const FieldPoint& fp,
                                             const PhysicalConstants& c,
                                             Isotope iso);

struct OdmrScan {
  double b_par_mt;
  Vec3 background_mt;
  std::vector<double> b_perp_grid_mt;
  std::vector<Orientation> orientations;
  PhysicalConstants constants;
  Isotope iso;
  // One entry per grid point, lines ordered (orientation, branch, m_I).
  std::vector<std::vector<TransitionLine>> rows;
};

OdmrScan odmr_map(const std::vector<Orientation>& orientations,
                  double b_par_mt, const std::vector<double>& b_perp_grid_mt,
                  const PhysicalConstants& c, Isotope iso,
                  const Vec3& background_mt = Vec3::Zero());

struct DegeneracyEvent {
  double b_perp_mt;
  double min_gap_mhz;
  int multiplicity;                       // line pairs merged into the event
  double freq_mhz;                        // representative crossing frequency
  std::vector<std::string> participants;  // one "lineA&lineB" per pair
};

// Locates crossings and sub-tolerance closest approaches between every pair
// of distinct lines in the scan, refines them against the continuous model
// to 1e-4 mT, and merges events closer than 0.005 mT and 10 MHz.
std::vector<DegeneracyEvent> find_degeneracies(const OdmrScan& scan,
                                               double gap_tolerance_mhz = 1.0);

// First-order spacing, in mT, between hyperfine-split crossing events for a
// nitrogen hyperfine constant a_n (MHz) at angle alpha (radians) between the
// scanned field direction and the relevant NV axis difference.  Grazing
// angles |alpha| >= 90 degrees are rejected.
double hyperfine_spacing_mt(double a_n_mhz, double alpha_rad,
                            const PhysicalConstants& c);

}  // namespace nvx
