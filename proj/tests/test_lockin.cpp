#include "nvx/error.hpp"
#include "nvx/lockin.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <vector>

using namespace nvx;

namespace {

std::vector<double> grid(double start, double stop, double step) {
  std::vector<double> g;
  for (double v = start; v <= stop + step / 2; v += step) g.push_back(v);
  return g;
}

}  // namespace

TEST_SUITE("lockin") {

TEST_CASE("constant input demodulates to zero") {
  LockinConfig cfg;
  const auto q = demodulate([](double) { return 7.3; }, 0.5, cfg);
  CHECK(std::abs(q.x) < 1e-13);
  CHECK(std::abs(q.y) < 1e-13);
}

TEST_CASE("linear input: X recovers slope times amplitude") {
  LockinConfig cfg;
  cfg.mod_amplitude_mt = 0.02;
  const double slope = -3.7;
  const auto q =
      demodulate([&](double b) { return 1.0 + slope * (b - 0.4); }, 0.4, cfg);
  CHECK(q.x == doctest::Approx(slope * 0.02).epsilon(1e-12));
  CHECK(std::abs(q.y) < 1e-13);
}

TEST_CASE("quadratic input lands in the second harmonic") {
  LockinConfig cfg;
  cfg.mod_amplitude_mt = 0.05;
  const auto curve = [](double b) { return b * b; };

  const double b0 = 0.8;
  const auto first = demodulate(curve, b0, cfg);
  CHECK(first.x == doctest::Approx(2 * b0 * 0.05).epsilon(1e-10));
  CHECK(std::abs(first.y) < 1e-12);

  cfg.harmonic = 2;
  const auto second = demodulate(curve, b0, cfg);
  CHECK(std::abs(second.x) < 1e-12);
  CHECK(second.y == doctest::Approx(-0.05 * 0.05 / 2).epsilon(1e-10));
}

TEST_CASE("X is antisymmetric around a symmetric peak") {
  LockinConfig cfg;
  cfg.mod_amplitude_mt = 0.01;
  const double center = 1.0, sigma = 0.05;
  const auto curve = [&](double b) {
    return std::exp(-(b - center) * (b - center) / (2 * sigma * sigma));
  };
  for (double t : {0.01, 0.03, 0.08}) {
    const auto right = demodulate(curve, center + t, cfg);
    const auto left = demodulate(curve, center - t, cfg);
    CHECK(right.x == doctest::Approx(-left.x).epsilon(1e-9));
  }
  CHECK(std::abs(demodulate(curve, center, cfg).x) < 1e-13);
}

TEST_CASE("small-amplitude X approaches the derivative") {
  const double center = 1.0, sigma = 0.05;
  const auto curve = [&](double b) {
    return std::exp(-(b - center) * (b - center) / (2 * sigma * sigma));
  };
  const double b0 = 1.03;
  const double exact = curve(b0) * (center - b0) / (sigma * sigma);
  // X / dB = C'(b0) + O(dB^2), so the error drops fourfold per halving.
  double prev_err = 0.0;
  for (double amp : {0.02, 0.01, 0.005}) {
    LockinConfig cfg;
    cfg.mod_amplitude_mt = amp;
    const auto q = demodulate(curve, b0, cfg);
    const double err = std::abs(q.x / amp - exact);
    if (prev_err > 0.0) CHECK(err < 0.3 * prev_err);
    prev_err = err;
  }
  CHECK(prev_err < 0.005 * std::abs(exact));
}

TEST_CASE("cubic interpolant passes through its knots and stays C1") {
  const std::vector<double> v{0.3, -0.1, 0.8, 0.5, 0.2, 0.9};
  const CubicInterpolant f(2.0, 0.5, v);
  for (std::size_t i = 0; i < v.size(); ++i)
    CHECK(f(2.0 + 0.5 * i) == doctest::Approx(v[i]).epsilon(1e-14));

  const double h = 1e-7;
  for (std::size_t i = 1; i + 1 < v.size(); ++i) {
    const double k = 2.0 + 0.5 * i;
    const double left = (f(k) - f(k - h)) / h;
    const double right = (f(k + h) - f(k)) / h;
    CHECK(left == doctest::Approx(right).epsilon(1e-5));
  }
}

TEST_CASE("cubic interpolant reproduces quadratics between knots") {
  const auto poly = [](double x) { return 3.0 + 2.0 * x - x * x; };
  std::vector<double> v;
  for (int i = 0; i < 8; ++i) v.push_back(poly(0.25 * i));
  const CubicInterpolant f(0.0, 0.25, v);
  // Interior segments only: clamped ends flatten the boundary slopes.
  for (double x : {0.3, 0.62, 1.0, 1.375, 1.45})
    CHECK(f(x) == doctest::Approx(poly(x)).epsilon(1e-12));
}

TEST_CASE("demodulated scan flips sign where the raw curve peaks") {
  CrossRelaxConfig cr;
  cr.iso = Isotope::none;
  cr.d_dd_mhz = 0.25;
  cr.dipole_directions = 2;
  const auto c = default_constants(Isotope::none);
  const auto g = grid(0.95, 1.07, 0.01);
  LockinConfig lockin;
  lockin.mod_amplitude_mt = 0.01;
  lockin.phase_samples = 16;

  const auto xs = lia_scan(1.24, g, cr, c, lockin);
  REQUIRE(xs.size() == g.size());
  double peak = 0.0;
  for (double x : xs) peak = std::max(peak, std::abs(x));
  CHECK(peak == doctest::Approx(1.0).epsilon(1e-12));

  const auto raw = linecut(1.24, g, cr, c);
  const std::size_t top =
      std::max_element(raw.begin(), raw.end()) - raw.begin();
  bool crossed = false;
  for (std::size_t i = top == 0 ? 0 : top - 1;
       i + 1 < xs.size() && i <= top + 1; ++i)
    if (xs[i] > 0.0 && xs[i + 1] < 0.0) crossed = true;
  CHECK(crossed);

  const auto un = lia_scan(1.24, g, cr, c, lockin, false);
  double scale = 0.0;
  for (double x : un) scale = std::max(scale, std::abs(x));
  for (std::size_t i = 0; i < xs.size(); ++i)
    CHECK(xs[i] == doctest::Approx(un[i] / scale).epsilon(1e-12));
}

TEST_CASE("bad demodulation requests are rejected") {
  CrossRelaxConfig cr;
  cr.iso = Isotope::none;
  const auto c = default_constants(Isotope::none);
  const auto curve = [](double) { return 0.0; };

  LockinConfig cfg;
  cfg.mod_amplitude_mt = 0.0;
  CHECK_THROWS_AS(demodulate(curve, 0.0, cfg), ValidationError);
  cfg.mod_amplitude_mt = 0.01;
  cfg.phase_samples = 7;
  CHECK_THROWS_AS(demodulate(curve, 0.0, cfg), ValidationError);
  cfg.phase_samples = 16;
  cfg.harmonic = 0;
  CHECK_THROWS_AS(demodulate(curve, 0.0, cfg), ValidationError);

  LockinConfig ok;
  CHECK_THROWS_AS(lia_scan(1.24, {1.0}, cr, c, ok), ValidationError);
  CHECK_THROWS_AS(lia_scan(1.24, {1.0, 0.9}, cr, c, ok), ValidationError);
  CHECK_THROWS_AS(lia_scan(1.24, {1.0, 1.01, 1.03}, cr, c, ok),
                  ValidationError);

  CHECK_THROWS_AS(CubicInterpolant(0.0, 0.1, {1.0}), ValidationError);
  CHECK_THROWS_AS(CubicInterpolant(0.0, 0.0, {1.0, 2.0}), ValidationError);
}

}  // TEST_SUITE
