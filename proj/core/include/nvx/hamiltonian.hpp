// Ground-state spin Hamiltonians: single NV with optional nitrogen nucleus,
// and dipolar-coupled NV pairs in a shared crystal frame.  Energies in MHz,
// fields in mT.
#pragma once

#include "nvx/geometry.hpp"

#include <Eigen/Dense>

#include <complex>
#include <string>

namespace nvx {

using Mat = Eigen::MatrixXcd;
using Cplx = std::complex<double>;

enum class Isotope { n14, n15, none };

const char* name(Isotope iso);
Isotope isotope_from_name(const std::string& s);

int nuclear_dim(Isotope iso);      // 3, 2, 1
double nuclear_spin(Isotope iso);  // 1, 1/2, 0

struct PhysicalConstants {
  double d_mhz = 2870.0;               // zero-field splitting
  double gamma_e_mhz_per_mt = 28.024;  // electron gyromagnetic ratio
  double a_par_mhz = 0.0;              // axial hyperfine
  double a_perp_mhz = 0.0;             // transverse hyperfine
  double q_mhz = 0.0;                  // nuclear quadrupole
  double d_dd_mhz = 0.1;               // dipolar coupling scale
};

// Hyperfine and quadrupole defaults for the isotope; shared values otherwise.
PhysicalConstants default_constants(Isotope iso);

struct SpinMatrices {
  Mat sx, sy, sz;
};

// s must be 1/2 or 1.  Basis ordered m = +s .. -s.
SpinMatrices spin_matrices(double s);

struct EigenSystem {
  Eigen::VectorXd values;  // MHz, ascending
  Mat vectors;             // orthonormal columns, same order
  // Basis index with the largest |amplitude|^2 per level (ties: lowest
  // index), and that weight.
  Eigen::VectorXi dominant;
  Eigen::VectorXd dominant_weight;
};

// Rejects non-Hermitian input; checks the reconstruction residual.
EigenSystem eigensystem(const Mat& h);

struct LevelLabel {
  double ms;
  double mi;
  bool ambiguous;  // dominant weight below 1/2
};

// Interpretation of a single-NV basis index as (m_s, m_I); basis ordered
// m_s = +1, 0, -1 outer, m_I = +I .. -I inner.
LevelLabel nv_level_label(const EigenSystem& es, int level, Isotope iso);

struct AxisAngle {
  Vec3 axis;     // unit rotation axis
  double angle;  // radians
};

// Rotation carrying the crystal z axis onto the given unit direction.
AxisAngle rotation_to_axis(const Vec3& direction);
Eigen::Matrix3d rotation_matrix(const AxisAngle& aa);

// exp(-i angle axis.J) for spin s.
Mat spin_rotation_operator(const AxisAngle& aa, double s);

// Electron (x) nuclear rotation operator aligning the crystal frame with the
// orientation's local frame.
Mat nv_frame_operator(Orientation o, Isotope iso);

// Single-NV Hamiltonian in the local (axis-aligned) frame; b_mt is the
// crystal-frame field.
Mat single_nv_hamiltonian(Orientation o, const Vec3& b_mt,
                          const PhysicalConstants& c, Isotope iso);

// Two dipolar-coupled NVs in the shared crystal product basis.  n12 is the
// unit inter-NV direction; rejected unless |n12| = 1 within 1e-9.
Mat two_nv_hamiltonian(Orientation o1, Orientation o2, const Vec3& b_mt,
                       const Vec3& n12, const PhysicalConstants& c,
                       Isotope iso);

Mat kron(const Mat& a, const Mat& b);

}  // namespace nvx
