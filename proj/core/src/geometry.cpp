#include "nvx/geometry.hpp"

#include "nvx/error.hpp"

#include <algorithm>
#include <cmath>

namespace nvx {

namespace {

constexpr double kPi = 3.14159265358979323846;

int index_of(Orientation o) { return static_cast<int>(o); }

}  // namespace

const char* name(Orientation o) {
  switch (o) {
    case Orientation::lambda: return "lambda";
    case Orientation::phi: return "phi";
    case Orientation::chi: return "chi";
    case Orientation::kappa: return "kappa";
  }
  return "?";
}

Orientation orientation_from_name(const std::string& s) {
  for (Orientation o : all_orientations)
    if (s == name(o)) return o;
  throw ValidationError("unknown orientation '" + s + "'");
}

Vec3 axis(Orientation o) {
  const double r = 1.0 / std::sqrt(3.0);
  switch (o) {
    case Orientation::lambda: return Vec3(r, r, r);
    case Orientation::phi: return Vec3(-r, -r, r);
    case Orientation::chi: return Vec3(r, -r, -r);
    case Orientation::kappa: return Vec3(-r, r, -r);
  }
  return Vec3::Zero();
}

Vec3 b_par_axis() {
  const double r = 1.0 / std::sqrt(3.0);
  return Vec3(r, r, r);
}

Vec3 b_perp_axis() {
  const double r = 1.0 / std::sqrt(2.0);
  return Vec3(-r, r, 0.0);
}

Vec3 resolve_field(const FieldPoint& fp) {
  return fp.b_par_mt * b_par_axis() + fp.b_perp_mt * b_perp_axis() +
         fp.background_mt;
}

AxialTransverse axial_transverse_projection(const Vec3& b_mt, Orientation o) {
  const Vec3 n = axis(o);
  const double a = b_mt.dot(n);
  return {a, (b_mt - a * n).norm()};
}

double polar_angle_deg(const FieldPoint& fp) {
  if (fp.b_par_mt == 0.0 && fp.b_perp_mt == 0.0)
    throw ValidationError("polar angle undefined at zero coil field");
  double deg = std::atan2(fp.b_perp_mt, fp.b_par_mt) * 180.0 / kPi;
  deg = std::fmod(deg + 360.0, 180.0);
  return deg;
}

const char* name(DegeneracyKind k) {
  switch (k) {
    case DegeneracyKind::triple_overlap: return "triple-overlap";
    case DegeneracyKind::pair_overlap: return "pair-overlap";
    case DegeneracyKind::transverse_axis: return "transverse-axis";
  }
  return "?";
}

std::vector<DegeneracyAngle> degeneracy_angles() {
  // Axial projection of orientation i at polar angle t:
  //   a_i(t) = c_i cos t + s_i sin t
  // with c_i, s_i the axis dot products onto the two coil directions.
  std::array<double, 4> c{}, s{};
  for (Orientation o : all_orientations) {
    c[index_of(o)] = axis(o).dot(b_par_axis());
    s[index_of(o)] = axis(o).dot(b_perp_axis());
  }
  auto axial = [&](int i, double t) {
    return c[i] * std::cos(t) + s[i] * std::sin(t);
  };

  // Candidate angles solve du cos t + dv sin t = 0 within [0, pi/2]:
  // pairwise |a_i| = |a_j| (both relative signs) and single-axis zeros.
  std::vector<double> candidates;
  auto add_root = [&](double du, double dv) {
    const double tol = 1e-12;
    if (std::abs(du) < tol && std::abs(dv) < tol) return;  // identical curves
    double t;
    if (std::abs(dv) < tol) {
      t = kPi / 2.0;
    } else {
      t = std::atan(-du / dv);
    }
    if (t < -1e-12 || t > kPi / 2.0 + 1e-12) return;
    // atan(-0/dv) carries a negative zero; report angles signless.
    candidates.push_back(std::abs(std::clamp(t, 0.0, kPi / 2.0)));
  };

  for (int i = 0; i < 4; ++i) {
    for (int j = i + 1; j < 4; ++j) {
      add_root(c[i] - c[j], s[i] - s[j]);
      add_root(c[i] + c[j], s[i] + s[j]);
    }
    add_root(c[i], s[i]);
  }

  std::sort(candidates.begin(), candidates.end());
  std::vector<double> angles;
  for (double t : candidates)
    if (angles.empty() || t - angles.back() > 1e-9) angles.push_back(t);

  std::vector<DegeneracyAngle> result;
  for (double t : angles) {
    std::vector<Orientation> zeros;
    for (Orientation o : all_orientations)
      if (std::abs(axial(index_of(o), t)) < 1e-12) zeros.push_back(o);

    DegeneracyAngle entry;
    entry.theta_deg = t * 180.0 / kPi;
    if (zeros.size() >= 2) {
      // Shared loss of the axial component outranks any coincidental
      // |a| overlap of the remaining orientations at the same angle.
      entry.kind = DegeneracyKind::pair_overlap;
      entry.participants = zeros;
    } else if (zeros.size() == 1) {
      entry.kind = DegeneracyKind::transverse_axis;
      entry.participants = zeros;
    } else {
      // Group orientations whose |a| coincide.
      std::array<bool, 4> used{};
      std::vector<std::vector<Orientation>> groups;
      for (int i = 0; i < 4; ++i) {
        if (used[i]) continue;
        std::vector<Orientation> g{all_orientations[i]};
        for (int j = i + 1; j < 4; ++j) {
          if (std::abs(std::abs(axial(i, t)) - std::abs(axial(j, t))) < 1e-9) {
            g.push_back(all_orientations[j]);
            used[j] = true;
          }
        }
        if (g.size() >= 2) groups.push_back(std::move(g));
      }
      if (groups.empty()) continue;  // spurious candidate
      std::size_t largest = 0;
      for (const auto& g : groups) largest = std::max(largest, g.size());
      entry.kind = largest >= 3 ? DegeneracyKind::triple_overlap
                                : DegeneracyKind::pair_overlap;
      for (const auto& g : groups)
        if (g.size() == largest || largest < 3)
          entry.participants.insert(entry.participants.end(), g.begin(),
                                    g.end());
    }
    std::sort(entry.participants.begin(), entry.participants.end());
    result.push_back(std::move(entry));
  }
  return result;
}

std::vector<Vec3> fibonacci_directions(int count) {
  if (count < 1) throw ValidationError("direction count must be >= 1");
  std::vector<Vec3> dirs;
  dirs.reserve(count);
  const double golden = kPi * (3.0 - std::sqrt(5.0));
  for (int i = 0; i < count; ++i) {
    const double z = 1.0 - (2.0 * i + 1.0) / count;
    const double r = std::sqrt(std::max(0.0, 1.0 - z * z));
    const double az = golden * i;
    dirs.emplace_back(r * std::cos(az), r * std::sin(az), z);
  }
  return dirs;
}

}  // namespace nvx
