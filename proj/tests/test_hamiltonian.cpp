#include "nvx/error.hpp"
#include "nvx/geometry.hpp"
#include "nvx/hamiltonian.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <complex>
#include <random>
#include <vector>

using namespace nvx;

namespace {

Mat commutator(const Mat& a, const Mat& b) { return a * b - b * a; }

// Deterministic dense Hermitian test matrix.
Mat random_hermitian(int n, unsigned seed) {
  std::mt19937 rng(seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  Mat m(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) m(i, j) = Cplx(u(rng), u(rng));
  return 0.5 * (m + m.adjoint().eval());
}

}  // namespace

TEST_SUITE("hamiltonian") {

TEST_CASE("isotope names, dimensions, and spins") {
  CHECK(nuclear_dim(Isotope::n14) == 3);
  CHECK(nuclear_dim(Isotope::n15) == 2);
  CHECK(nuclear_dim(Isotope::none) == 1);
  CHECK(nuclear_spin(Isotope::n14) == doctest::Approx(1.0));
  CHECK(nuclear_spin(Isotope::n15) == doctest::Approx(0.5));
  for (Isotope iso : {Isotope::n14, Isotope::n15, Isotope::none})
    CHECK(isotope_from_name(name(iso)) == iso);
  CHECK_THROWS_AS(isotope_from_name("C13"), ValidationError);
}

TEST_CASE("isotope constants carry the hyperfine and quadrupole defaults") {
  const auto c14 = default_constants(Isotope::n14);
  CHECK(c14.d_mhz == doctest::Approx(2870.0));
  CHECK(c14.gamma_e_mhz_per_mt == doctest::Approx(28.024));
  CHECK(c14.a_par_mhz == doctest::Approx(-2.14));
  CHECK(c14.a_perp_mhz == doctest::Approx(-2.70));
  CHECK(c14.q_mhz == doctest::Approx(-4.96));
  const auto c15 = default_constants(Isotope::n15);
  CHECK(c15.a_par_mhz == doctest::Approx(3.03));
  CHECK(c15.a_perp_mhz == doctest::Approx(3.65));
  CHECK(c15.q_mhz == doctest::Approx(0.0));
  CHECK(default_constants(Isotope::none).d_dd_mhz == doctest::Approx(0.1));
}

TEST_CASE("spin matrices satisfy the su(2) algebra") {
  for (double s : {0.5, 1.0}) {
    const auto [sx, sy, sz] = spin_matrices(s);
    const Cplx i(0.0, 1.0);
    CHECK((commutator(sx, sy) - i * sz).norm() < 1e-14);
    CHECK((commutator(sy, sz) - i * sx).norm() < 1e-14);
    CHECK((commutator(sz, sx) - i * sy).norm() < 1e-14);
    const Mat s2 = sx * sx + sy * sy + sz * sz;
    const int dim = static_cast<int>(2 * s + 1);
    CHECK((s2 - s * (s + 1) * Mat::Identity(dim, dim)).norm() < 1e-14);
    CHECK((sx - sx.adjoint().eval()).norm() < 1e-15);
  }
  CHECK_THROWS_AS(spin_matrices(1.5), ValidationError);
}

TEST_CASE("spin-1 sz is ordered m = +1, 0, -1") {
  const auto sm = spin_matrices(1.0);
  CHECK(sm.sz(0, 0).real() == doctest::Approx(1.0));
  CHECK(sm.sz(1, 1).real() == doctest::Approx(0.0));
  CHECK(sm.sz(2, 2).real() == doctest::Approx(-1.0));
}

TEST_CASE("eigensystem on known matrices") {
  Mat d = Mat::Zero(3, 3);
  d(0, 0) = 3.0;
  d(1, 1) = 1.0;
  d(2, 2) = 2.0;
  const EigenSystem es = eigensystem(d);
  CHECK(es.values[0] == doctest::Approx(1.0));
  CHECK(es.values[1] == doctest::Approx(2.0));
  CHECK(es.values[2] == doctest::Approx(3.0));
  CHECK(es.dominant[0] == 1);
  CHECK(es.dominant[1] == 2);
  CHECK(es.dominant[2] == 0);
  CHECK(es.dominant_weight[0] == doctest::Approx(1.0));

  Mat x(2, 2);
  x << 0, 1, 1, 0;
  const EigenSystem ex = eigensystem(x);
  CHECK(ex.values[0] == doctest::Approx(-1.0));
  CHECK(ex.values[1] == doctest::Approx(+1.0));
  CHECK(ex.dominant_weight[0] == doctest::Approx(0.5));
  CHECK(ex.dominant[0] == 0);  // tie resolves to the lowest index
}

TEST_CASE("eigensystem reconstructs a dense 81x81 Hermitian matrix") {
  const Mat h = random_hermitian(81, 20260817);
  const EigenSystem es = eigensystem(h);
  const Mat rebuilt =
      es.vectors * es.values.asDiagonal().toDenseMatrix().cast<Cplx>() *
      es.vectors.adjoint();
  CHECK((rebuilt - h).norm() < 1e-10 * h.norm() * 81);
  CHECK((es.vectors.adjoint() * es.vectors - Mat::Identity(81, 81)).norm() <
        1e-12 * 81);
  for (int i = 0; i + 1 < es.values.size(); ++i)
    CHECK(es.values[i] <= es.values[i + 1]);
}

TEST_CASE("eigensystem rejects non-Hermitian input") {
  Mat m(2, 2);
  m << 0, 1, 0, 0;
  CHECK_THROWS_AS(eigensystem(m), NumericError);
}

TEST_CASE("rotation carries z onto the requested axis") {
  for (const Vec3& target :
       {Vec3(0, 0, 1), Vec3(1, 0, 0), Vec3(0, 0, -1),
        Vec3(1, 1, 1).normalized(), Vec3(-1, 1, 0).normalized()}) {
    const AxisAngle aa = rotation_to_axis(target);
    const Eigen::Matrix3d r = rotation_matrix(aa);
    CHECK((r * Vec3(0, 0, 1) - target).norm() < 1e-12);
    CHECK((r * r.transpose() - Eigen::Matrix3d::Identity()).norm() < 1e-12);
  }
}

TEST_CASE("spin rotation operator is unitary and rotates sz correctly") {
  const AxisAngle aa = rotation_to_axis(Vec3(1, 1, 1).normalized());
  for (double s : {0.5, 1.0}) {
    const Mat u = spin_rotation_operator(aa, s);
    const int dim = static_cast<int>(2 * s + 1);
    CHECK((u * u.adjoint() - Mat::Identity(dim, dim)).norm() < 1e-13);
    // U sz U^dag = n.S for the rotation taking z to n.
    const auto sm = spin_matrices(s);
    const Vec3 n = Vec3(1, 1, 1).normalized();
    const Mat ns = n.x() * sm.sx + n.y() * sm.sy + n.z() * sm.sz;
    CHECK((u * sm.sz * u.adjoint() - ns).norm() < 1e-12);
  }
}

TEST_CASE("single NV at zero field: electron-only levels at 0, D, D") {
  const auto c = default_constants(Isotope::none);
  for (Orientation o : all_orientations) {
    const EigenSystem es =
        eigensystem(single_nv_hamiltonian(o, Vec3::Zero(), c, Isotope::none));
    CHECK(es.values[0] == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(es.values[1] == doctest::Approx(2870.0));
    CHECK(es.values[2] == doctest::Approx(2870.0));
  }
}

TEST_CASE("aligned field splits the branches by 2 gamma B") {
  const auto c = default_constants(Isotope::none);
  const Vec3 b = 1.5 * axis(Orientation::lambda);
  const EigenSystem es = eigensystem(
      single_nv_hamiltonian(Orientation::lambda, b, c, Isotope::none));
  // m_s = 0 at ~0; branches at D -+ gamma B (axial field, no mixing).
  CHECK(es.values[0] == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(es.values[2] - es.values[1] ==
        doctest::Approx(2 * 28.024 * 1.5).epsilon(1e-9));
}

TEST_CASE("level labels carry dominant spin character") {
  const auto c = default_constants(Isotope::n15);
  const Vec3 b = 1.24 * axis(Orientation::lambda);
  const EigenSystem es = eigensystem(
      single_nv_hamiltonian(Orientation::lambda, b, c, Isotope::n15));
  int count_ms[3] = {0, 0, 0};
  for (int level = 0; level < 6; ++level) {
    const LevelLabel l = nv_level_label(es, level, Isotope::n15);
    CHECK(!l.ambiguous);  // axial field: labels are sharp
    CHECK(std::abs(l.mi) == doctest::Approx(0.5));
    ++count_ms[static_cast<int>(std::lround(l.ms)) + 1];
  }
  CHECK(count_ms[0] == 2);
  CHECK(count_ms[1] == 2);
  CHECK(count_ms[2] == 2);
}

TEST_CASE("crystal-frame Hamiltonians of all orientations share the zero-field"
          " spectrum") {
  const auto c = default_constants(Isotope::n14);
  const EigenSystem ref = eigensystem(
      single_nv_hamiltonian(Orientation::lambda, Vec3::Zero(), c,
                            Isotope::n14));
  for (Orientation o :
       {Orientation::phi, Orientation::chi, Orientation::kappa}) {
    const EigenSystem es =
        eigensystem(single_nv_hamiltonian(o, Vec3::Zero(), c, Isotope::n14));
    CHECK((es.values - ref.values).cwiseAbs().maxCoeff() < 1e-9);
  }
}

TEST_CASE("axis-permuting crystal rotation swaps orientation spectra") {
  // diag(-1,-1,1) maps lambda <-> phi and chi <-> kappa.
  const auto c = default_constants(Isotope::n14);
  const Vec3 b(0.4, -0.9, 0.3);
  const Vec3 b_rot(-b.x(), -b.y(), b.z());
  const std::pair<Orientation, Orientation> swaps[] = {
      {Orientation::lambda, Orientation::phi},
      {Orientation::chi, Orientation::kappa}};
  for (const auto& [o1, o2] : swaps) {
    const auto e1 =
        eigensystem(single_nv_hamiltonian(o1, b, c, Isotope::n14)).values;
    const auto e2 =
        eigensystem(single_nv_hamiltonian(o2, b_rot, c, Isotope::n14)).values;
    CHECK((e1 - e2).cwiseAbs().maxCoeff() < 1e-6);
  }
}

TEST_CASE("two NV Hamiltonian is Hermitian and decouples at d_dd = 0") {
  auto c = default_constants(Isotope::n15);
  c.d_dd_mhz = 0.0;
  const Vec3 b = resolve_field({1.24, 0.9});
  const Mat h = two_nv_hamiltonian(Orientation::lambda, Orientation::chi, b,
                                   axis(Orientation::lambda), c, Isotope::n15);
  REQUIRE(h.rows() == 36);
  CHECK((h - h.adjoint().eval()).norm() < 1e-10);
  // Pair spectrum = all pairwise sums of the single spectra.
  const auto e1 =
      eigensystem(single_nv_hamiltonian(Orientation::lambda, b, c,
                                        Isotope::n15)).values;
  const auto e2 =
      eigensystem(single_nv_hamiltonian(Orientation::chi, b, c,
                                        Isotope::n15)).values;
  std::vector<double> sums;
  for (int i = 0; i < e1.size(); ++i)
    for (int j = 0; j < e2.size(); ++j) sums.push_back(e1[i] + e2[j]);
  std::sort(sums.begin(), sums.end());
  const auto ep = eigensystem(h).values;
  for (int k = 0; k < ep.size(); ++k)
    CHECK(ep[k] == doctest::Approx(sums[k]).epsilon(1e-8).scale(1000));
}

TEST_CASE("dipolar matrix element between exchanged levels equals d_dd") {
  // n12 along z: the flip-flop term couples |0,+1> and |+1,0> with
  // amplitude d_dd exactly (electron-only, zero field).
  auto c = default_constants(Isotope::none);
  c.d_dd_mhz = 0.35;
  const Mat h =
      two_nv_hamiltonian(Orientation::lambda, Orientation::lambda,
                         Vec3::Zero(), Vec3(0, 0, 1), c, Isotope::none);
  // Basis row = 3 e1 + e2 with e ordered +1, 0, -1.
  const int row_0p = 3 * 1 + 0;  // |0, +1>
  const int row_p0 = 3 * 0 + 1;  // |+1, 0>
  CHECK(std::abs(h(row_0p, row_p0)) == doctest::Approx(0.35).epsilon(1e-12));
}

TEST_CASE("resonant flip-flop splitting grows linearly in d_dd") {
  auto c = default_constants(Isotope::none);
  const Vec3 b = resolve_field({0.8, 0.0});
  // Identical orientations leave |0,-1> and |-1,0> exactly degenerate; the
  // dipolar flip-flop splits that pair at first order.  (The smallest gap of
  // the full spectrum is the double-quantum one and scales quadratically.)
  const auto single = eigensystem(
      single_nv_hamiltonian(Orientation::lambda, b, c, Isotope::none));
  double e0 = 0.0, em = 0.0;
  for (int k = 0; k < 3; ++k) {
    const auto l = nv_level_label(single, k, Isotope::none);
    if (l.ms == 0.0) e0 = single.values[k];
    if (l.ms == -1.0) em = single.values[k];
  }
  const double target = e0 + em;
  auto pair_split = [&](double d) {
    auto cc = c;
    cc.d_dd_mhz = d;
    const auto v =
        eigensystem(two_nv_hamiltonian(Orientation::lambda,
                                       Orientation::lambda, b,
                                       axis(Orientation::chi), cc,
                                       Isotope::none)).values;
    std::vector<double> near(v.data(), v.data() + v.size());
    std::sort(near.begin(), near.end(), [&](double a, double b2) {
      return std::abs(a - target) < std::abs(b2 - target);
    });
    return std::abs(near[0] - near[1]);
  };
  const double g1 = pair_split(0.1);
  const double g2 = pair_split(0.2);
  CHECK(g2 / g1 == doctest::Approx(2.0).epsilon(1e-2));
}

TEST_CASE("two NV rejects a non-unit inter-NV direction") {
  const auto c = default_constants(Isotope::none);
  CHECK_THROWS_AS(
      two_nv_hamiltonian(Orientation::lambda, Orientation::chi, Vec3::Zero(),
                         Vec3(0, 0, 1.1), c, Isotope::none),
      ValidationError);
}

}  // TEST_SUITE
