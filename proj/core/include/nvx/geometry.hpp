// Diamond NV geometry: the four bond orientations, coil-frame field
// decomposition, and the angles at which orientation branches become
// magnetically equivalent.
#pragma once

#include <Eigen/Dense>

#include <array>
#include <string>
#include <vector>

namespace nvx {

using Vec3 = Eigen::Vector3d;

enum class Orientation { lambda, phi, chi, kappa };

inline constexpr std::array<Orientation, 4> all_orientations = {
    Orientation::lambda, Orientation::phi, Orientation::chi,
    Orientation::kappa};

const char* name(Orientation o);
Orientation orientation_from_name(const std::string& s);

// Unit vector along the NV symmetry axis, crystal frame.
Vec3 axis(Orientation o);

// Coil axes: B_par drives [1,1,1]/sqrt(3), B_perp drives [-1,1,0]/sqrt(2).
Vec3 b_par_axis();
Vec3 b_perp_axis();

struct FieldPoint {
  double b_par_mt = 0.0;
  double b_perp_mt = 0.0;
  Vec3 background_mt = Vec3::Zero();
};

// Crystal-frame field vector for a coil setting, in mT.
Vec3 resolve_field(const FieldPoint& fp);

struct AxialTransverse {
  double axial_mt;       // signed projection onto the orientation axis
  double transverse_mt;  // >= 0
};

AxialTransverse axial_transverse_projection(const Vec3& b_mt, Orientation o);

// Angle of the coil field in the B_par/B_perp plane, folded to [0, 180).
// Background is ignored.  Undefined (throws) when both coil settings are 0.
double polar_angle_deg(const FieldPoint& fp);

enum class DegeneracyKind { triple_overlap, pair_overlap, transverse_axis };

const char* name(DegeneracyKind k);

struct DegeneracyAngle {
  double theta_deg;  // in [0, 90]
  DegeneracyKind kind;
  std::vector<Orientation> participants;  // sorted in enum order
};

// All polar angles where |axial projections| of distinct orientations
// coincide or an orientation loses its axial component entirely.  Computed
// from the axis dot products.
std::vector<DegeneracyAngle> degeneracy_angles();

// Deterministic spherical Fibonacci set of unit vectors.
std::vector<Vec3> fibonacci_directions(int count);

}  // namespace nvx
