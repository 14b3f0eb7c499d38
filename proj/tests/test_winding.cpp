#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "etk/error.hpp"
#include "etk/winding.hpp"

using etk::Complex;
using etk::FunctionSpec;

namespace {

constexpr double kPi = std::numbers::pi;

etk::ErrorCode code_of(auto&& fn) {
  try {
    fn();
  } catch (const etk::Error& e) {
    return e.code();
  }
  return etk::ErrorCode::Ok;
}

std::vector<Complex> circle(int n, int turns = 1) {
  std::vector<Complex> pts;
  for (int k = 0; k < n * turns; ++k) pts.push_back(std::polar(1.0, 2 * kPi * k / n));
  return pts;
}

}  // namespace

TEST_CASE("winding_number on sampled circles") {
  CHECK(etk::winding_number(circle(256), 0.0) == 1);
  CHECK(etk::winding_number(circle(256), 2.0) == 0);
  CHECK(etk::winding_number(circle(256, 2), 0.0) == 2);
  CHECK(code_of([] { etk::winding_number(circle(256), 1.0); }) == etk::ErrorCode::OnTarget);
  CHECK(code_of([] { etk::winding_number(circle(3), 0.0); }) == etk::ErrorCode::NeedsRefinement);
}

TEST_CASE("count_preimages examples") {
  // e^z = 1 at 0 and +-2 pi i inside |z| < 10
  CHECK(etk::count_preimages(FunctionSpec::exp_affine(1.0), etk::make_disk(0.0, 10.0), 1.0).count == 3);
  CHECK(etk::count_preimages(FunctionSpec::polynomial({0, 0, 1}), etk::make_disk(0.0, 3.0), 4.0).count == 2);
  const auto dbl = etk::count_preimages(FunctionSpec::polynomial({0, 0, 1}), etk::make_disk(0.0, 3.0), 0.0);
  CHECK(dbl.count == 2);
  CHECK(dbl.min_boundary_gap == doctest::Approx(9.0).epsilon(1e-3));
  // z^2 = 4 at z = 2, which lies on the boundary of the disk of radius 2
  CHECK(code_of([] {
          etk::count_preimages(FunctionSpec::polynomial({0, 0, 1}), etk::make_disk(0.0, 2.0), 4.0);
        }) == etk::ErrorCode::BoundaryHit);
  // annulus: z^2 = 2.25 has roots +-1.5 in 1 < |z| < 2; orientation signs of the two contours
  CHECK(etk::count_preimages(FunctionSpec::polynomial({0, 0, 1}), etk::make_annulus(1.0, 2.0), 2.25).count == 2);
  CHECK(etk::count_preimages(FunctionSpec::polynomial({0, 0, 1}), etk::make_annulus(1.0, 2.0), 0.25).count == 0);
  // branch count of e^z = w in |z| < 10: #{k : |log|w| + i(arg w + 2 pi k)| < 10}
  const Complex w(0.3, -1.7);
  int oracle = 0;
  for (int k = -5; k <= 5; ++k)
    if (std::abs(Complex(std::log(std::abs(w)), std::arg(w) + 2 * kPi * k)) < 10.0) ++oracle;
  CHECK(etk::count_preimages(FunctionSpec::exp_affine(1.0), etk::make_disk(0.0, 10.0), w).count == oracle);
}

TEST_CASE("property: polynomial counts equal the degree when the disk holds every root") {
  std::mt19937_64 rng(21);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::uniform_int_distribution<int> deg(1, 8);
  for (int t = 0; t < 200; ++t) {
    const int n = deg(rng);
    std::vector<Complex> c(n + 1);
    for (auto& x : c) x = {u(rng), u(rng)};
    c[n] = std::polar(0.5 + 0.5 * std::abs(u(rng)), kPi * u(rng));
    const Complex w{u(rng), u(rng)};
    // Cauchy bound on the roots of f - w
    double cb = 0.0;
    for (int k = 0; k < n; ++k) cb = std::max(cb, std::abs(k == 0 ? c[0] - w : c[k]) / std::abs(c[n]));
    const auto pc = etk::count_preimages(FunctionSpec::polynomial(c), etk::make_disk(0.0, 1.0 + cb + 0.5), w);
    CHECK(pc.count == n);
  }
}

TEST_CASE("property: finer initial sampling does not change an accepted count") {
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> u(-3.0, 3.0);
  const auto spec = FunctionSpec::exp_affine({0.5, 1.0}, {0.1, 0.0});
  const auto disk = etk::make_disk({0.5, 0.5}, 7.0);
  etk::WindingOptions fine;
  fine.initial_spacing /= 2.0;
  for (int t = 0; t < 40; ++t) {
    const Complex w{u(rng), u(rng)};
    CHECK(etk::count_preimages(spec, disk, w).count == etk::count_preimages(spec, disk, w, fine).count);
  }
}

TEST_CASE("rouche_transfer") {
  const auto cube = FunctionSpec::polynomial({0, 0, 0, 1});
  const auto cert = etk::rouche_transfer(cube, etk::make_disk(0.0, 2.0), 8.0 - 1e-2, 0.0);
  CHECK(cert.count == 3);
  CHECK(cert.margin >= 0.0);
  CHECK(cert.min_sampled_modulus <= 8.0 + 1e-9);
  CHECK(code_of([&] { etk::rouche_transfer(cube, etk::make_disk(0.0, 2.0), 8.5, 0.0); }) ==
        etk::ErrorCode::MarginTooSmall);

  const auto ex = etk::rouche_transfer(FunctionSpec::exp_affine(1.0), etk::make_disk(0.0, 1.0),
                                       std::exp(-1.0) - 1e-2, 0.0);
  CHECK(ex.count == 0);
  // xi = 1 lies outside Delta(0, r) for this r, so it cannot be transferred
  CHECK(code_of([] {
          etk::rouche_transfer(FunctionSpec::exp_affine(1.0), etk::make_disk(0.0, 1.0), std::exp(-1.0) - 1e-2, 1.0);
        }) == etk::ErrorCode::InvalidArgument);
  CHECK(etk::count_preimages(FunctionSpec::exp_affine(1.0), etk::make_disk(0.0, 1.0), 1.0).count == 1);

  // consistency: every w in Delta(0, r) has the certified count
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int t = 0; t < 30; ++t) {
    const Complex w = std::polar(cert.r * std::sqrt(u(rng)) * 0.999, 2 * kPi * u(rng));
    CHECK(etk::count_preimages(cube, etk::make_disk(0.0, 2.0), w).count == cert.count);
  }
}

TEST_CASE("covering_report") {
  SUBCASE("exp over an annulus has at least three branches everywhere") {
    const auto rep = etk::covering_report(FunctionSpec::exp_affine(1.0), etk::make_disk(0.0, 10.0),
                                          etk::make_annulus(1.0, 2.0), 0.2, 3);
    REQUIRE(rep.min_count.has_value());
    CHECK(*rep.min_count >= 3);
    CHECK(rep.failing.empty());
    CHECK(rep.fraction_at_least_N == 1.0);
    CHECK(!rep.points.empty());
  }
  SUBCASE("z^2 on the unit disk fails exactly outside the unit circle") {
    const auto rep = etk::covering_report(FunctionSpec::polynomial({0, 0, 1}), etk::make_disk(0.0, 1.0),
                                          etk::make_disk(0.0, 2.0), 0.25, 1);
    std::vector<long> expected_fail, expected_skip;
    for (const auto& p : rep.points) {
      const double m = std::abs(p.w);
      if (std::abs(m - 1.0) < 1e-9)
        expected_skip.push_back(p.index);
      else if (m > 1.0)
        expected_fail.push_back(p.index);
    }
    CHECK(rep.failing == expected_fail);
    CHECK(rep.skipped == expected_skip);
    for (const auto& p : rep.points)
      if (p.count && std::abs(p.w) < 1.0) CHECK(*p.count == 2);
    // thread count does not change the report
    const auto par = etk::covering_report(FunctionSpec::polynomial({0, 0, 1}), etk::make_disk(0.0, 1.0),
                                          etk::make_disk(0.0, 2.0), 0.25, 1, 3);
    CHECK(par.failing == rep.failing);
    CHECK(etk::to_json(par) == etk::to_json(rep));
  }
  SUBCASE("empty target grid") {
    auto tiny = etk::make_annulus(1.0, 1.0001);
    const auto rep = etk::covering_report(FunctionSpec::exp_affine(1.0), etk::make_disk(0.0, 1.0), tiny, 10.0, 1);
    CHECK(rep.points.empty());
    CHECK_FALSE(rep.min_count.has_value());
  }
}

TEST_CASE("property: disk counts split additively over the annulus between them") {
  const auto spec = FunctionSpec::product({100.0, 1e4, 1e8}, 1e16);
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (double R : {1e3, 1e6}) {
    const auto big = etk::BoundarySampler(spec, etk::make_disk(0.0, 2 * R));
    const auto small = etk::BoundarySampler(spec, etk::make_disk(0.0, R / 2));
    const auto ring = etk::BoundarySampler(spec, etk::make_annulus(R / 2, 2 * R));
    for (int t = 0; t < 20; ++t) {
      const Complex w = std::polar(R / 2 + 1.5 * R * u(rng), 2 * kPi * u(rng));
      CHECK(big.count(w).count - small.count(w).count == ring.count(w).count);
    }
  }
}

TEST_CASE("critical points") {
  // (z^3)' = 3 z^2: a double critical point at 0
  CHECK(etk::count_critical_points(FunctionSpec::polynomial({0, 0, 0, 1}), etk::make_disk(0.0, 1.0)).count == 2);
  CHECK(etk::count_critical_points(FunctionSpec::exp_affine(1.0), etk::make_disk(0.0, 5.0)).count == 0);
}

TEST_CASE("locate_preimages") {
  etk::LocateOptions lo;
  lo.min_radius = 1e-3;
  // e^z = 1 at 2 pi i k
  const auto cl = etk::locate_preimages(FunctionSpec::exp_affine(1.0), 0.0, 10.0, 1.0, lo);
  REQUIRE(cl.size() == 3);
  for (const auto& c : cl) {
    CHECK(c.count == 1);
    CHECK(std::abs(c.center.real()) < 2e-3);
    const double k = c.center.imag() / (2 * kPi);
    CHECK(std::abs(k - std::round(k)) < 1e-3);
  }
  // double root of z^2 at 0 stays one cluster of count 2
  const auto dbl = etk::locate_preimages(FunctionSpec::polynomial({0, 0, 1}), 0.3, 1.0, 0.0, lo);
  REQUIRE(dbl.size() == 1);
  CHECK(dbl[0].count == 2);
  CHECK(std::abs(dbl[0].center) < 3e-3);
  CHECK(etk::locate_preimages(FunctionSpec::exp_affine(1.0), 0.0, 10.0, 0.0, lo).empty());
}
