#include <doctest.h>

#include <cmath>
#include <numbers>

#include "etk/entropy.hpp"
#include "etk/error.hpp"

using etk::Complex;
using etk::FunctionSpec;

namespace {

etk::ErrorCode code_of(auto&& fn) {
  try {
    fn();
  } catch (const etk::Error& e) {
    return e.code();
  }
  return etk::ErrorCode::Ok;
}

etk::CoveringCertificate manual_cert(etk::PlanarDomain V, int N, double R) {
  etk::CoveringCertificate c;
  c.V = std::move(V);
  c.N = N;
  c.R = R;
  return c;
}

FunctionSpec square() { return FunctionSpec::polynomial({0.0, 0.0, 1.0}); }

}  // namespace

TEST_CASE("entropy floor") {
  CHECK(etk::entropy_floor(4, 2, 8) == doctest::Approx(std::log(4.0) - std::log(2.0) / 8).epsilon(1e-12));
  CHECK(etk::entropy_floor(4, 2, 8) == doctest::Approx(1.2996).epsilon(1e-4));
  CHECK(etk::entropy_floor(3, 1, 1) == doctest::Approx(std::log(3.0)));
  CHECK(code_of([] { etk::entropy_floor(0, 1, 1); }) == etk::ErrorCode::InvalidArgument);
}

TEST_CASE("critical data") {
  const auto a = etk::critical_data(FunctionSpec::polynomial({2.0, 0.0, 1.0}), etk::make_disk(0.0, 3.0));
  REQUIRE(a.critical_points.size() == 1);
  CHECK(std::abs(a.critical_points[0].location) < 1e-12);
  CHECK(a.critical_points[0].local_degree == 2);
  CHECK_FALSE(a.critical_points[0].periodic);
  CHECK(a.degree_product == 2);

  const auto b = etk::critical_data(FunctionSpec::exp_affine(1.0), etk::make_disk(0.0, 50.0));
  CHECK(b.critical_points.empty());
  CHECK(b.degree_product == 1);

  const auto c = etk::critical_data(square(), etk::make_disk(0.0, 1.0));
  REQUIRE(c.critical_points.size() == 1);
  CHECK(c.critical_points[0].periodic);
  CHECK(c.critical_points[0].period == 1);
  CHECK(c.degree_product == 1);

  // z^3: one critical point of local degree 3, escaping for z^3 + 2
  const auto d = etk::critical_data(FunctionSpec::polynomial({2.0, 0.0, 0.0, 1.0}), etk::make_disk(0.0, 3.0));
  REQUIRE(d.critical_points.size() == 1);
  CHECK(d.critical_points[0].local_degree == 3);
  CHECK(d.degree_product == 3);

  // critical points outside V are ignored
  CHECK(etk::critical_data(FunctionSpec::polynomial({2.0, 0.0, 1.0}), etk::make_annulus(1.0, 3.0))
            .critical_points.empty());

  // lacunary product: f' has a zero between each pair of neighbouring zeros
  const auto lac = FunctionSpec::product({100.0, 1e4}, 1e32);
  const auto e = etk::critical_data(lac, etk::make_disk(0.0, 2e4));
  REQUIRE(e.critical_points.size() == 1);
  CHECK(std::abs(etk::derivative(lac, e.critical_points[0].location)) <
        1e-6 * std::abs(etk::derivative(lac, 0.0)));
}

TEST_CASE("solve_preimages") {
  SUBCASE("exp closed form") {
    const auto p = etk::solve_preimages(FunctionSpec::exp_affine(1.0), etk::make_disk(0.0, 10.0), 2.0);
    CHECK(p.size() == 3);
    for (const auto& c : p) {
      CHECK(std::abs(std::exp(c.center) - 2.0) < 1e-12);
      CHECK(c.count == 1);
    }
    CHECK(etk::solve_preimages(FunctionSpec::exp_affine(1.0), etk::make_disk(0.0, 10.0), 0.0).empty());
  }
  SUBCASE("polynomial roots with multiplicity") {
    const auto p = etk::solve_preimages(square(), etk::make_disk(0.0, 1.0), 0.0);
    REQUIRE(p.size() == 1);
    CHECK(p[0].count == 2);
    const auto q = etk::solve_preimages(square(), etk::make_disk(0.0, 2.0), Complex(0.0, 1.0));
    REQUIRE(q.size() == 2);
    for (const auto& c : q) CHECK(std::abs(c.center * c.center - Complex(0.0, 1.0)) < 1e-12);
  }
  SUBCASE("lacunary agrees with winding counts") {
    const auto lac = FunctionSpec::product({100.0, 1e4, 1e8}, 1e32);
    const auto V = etk::make_disk(0.0, 3e8);
    const Complex y(5.0, -2.0);
    const auto p = etk::solve_preimages(lac, V, y);
    int total = 0;
    for (const auto& c : p) {
      total += c.count;
      CHECK(std::abs(etk::evaluate(lac, c.center) - y) < 1e-6 * (1.0 + std::abs(y)));
    }
    CHECK(total == etk::count_preimages(lac, V, y).count);
    CHECK(total == 3);
  }
}

TEST_CASE("separated sets") {
  SUBCASE("identity has zero entropy") {
    const auto X = etk::CompactSet::circle(0.0, 1.0, 4096);
    const auto e = etk::entropy_lower_curve(FunctionSpec::polynomial({0.0, 1.0}), X, 6, {0.05, 0.1});
    CHECK(e.h_lower == doctest::Approx(0.0).epsilon(1e-12));
  }
  SUBCASE("z^2 on the unit circle: monotone in delta, growth near log 2") {
    const auto X = etk::CompactSet::circle(0.0, 1.0, 8192);
    const std::vector<double> deltas{0.05, 0.1, 0.2};
    const auto e = etk::entropy_lower_curve(square(), X, 8, deltas);
    for (int n = 1; n <= 8; ++n) {
      CHECK(e.table.at({n, 0.05}) >= e.table.at({n, 0.1}));
      CHECK(e.table.at({n, 0.1}) >= e.table.at({n, 0.2}));
      if (n > 1) CHECK(e.table.at({n, 0.05}) >= e.table.at({n - 1, 0.05}));
    }
    CHECK(e.h_lower >= 0.88 * std::log(2.0));
    CHECK(e.h_lower <= 1.12 * std::log(2.0));
  }
  SUBCASE("invariant under the conjugacy z -> 2z with delta doubled") {
    const auto base = etk::entropy_lower_curve(square(), etk::CompactSet::circle(0.0, 1.0, 4096), 5, {0.1});
    const auto conj = etk::entropy_lower_curve(FunctionSpec::polynomial({0.0, 0.0, 0.5}),
                                               etk::CompactSet::circle(0.0, 2.0, 4096), 5, {0.2});
    CHECK(conj.h_lower == doctest::Approx(base.h_lower).epsilon(1e-9));
  }
  SUBCASE("bad arguments") {
    const auto X = etk::CompactSet::circle(0.0, 1.0, 64);
    CHECK(code_of([&] { etk::entropy_lower_curve(square(), X, 1, {0.1}); }) == etk::ErrorCode::InvalidArgument);
    CHECK(code_of([&] { etk::entropy_lower_curve(square(), X, 3, {0.0}); }) == etk::ErrorCode::InvalidArgument);
  }
}

TEST_CASE("backward orbits") {
  SUBCASE("z^2 on an annulus") {
    etk::BackwardOrbitParams p;
    p.base_point = Complex(1.0, 0.0);
    p.m = 2;
    p.k = 2;
    const auto r = etk::backward_orbit_separated_count(square(), manual_cert(etk::make_annulus(0.5, 2.0), 2, 1.0), p);
    CHECK(r.count == 16);
    CHECK(r.epsilon == doctest::Approx(1.0));
    CHECK(r.degree_product == 1);
    CHECK(r.meets_floor);
    CHECK(r.consistency_mismatches == 0);
    CHECK(r.checked_nodes > 0);
  }
  SUBCASE("exp on A_64, depth 2") {
    etk::BackwardOrbitParams p;
    p.m = 2;
    p.k = 1;
    p.threads = 2;
    const auto cert = manual_cert(etk::build_AR(64.0), 4, 64.0);
    const auto b = etk::certificate_entropy_bound(FunctionSpec::exp_affine(1.0), cert, p);
    CHECK(b.orbits.count == 16);
    CHECK(b.measured == doctest::Approx(std::log(4.0)));
    CHECK(b.floor == doctest::Approx(std::log(4.0)));
    CHECK(b.orbits.consistency_mismatches == 0);
  }
  SUBCASE("node budget") {
    etk::BackwardOrbitParams p;
    p.base_point = Complex(1.0, 0.0);
    p.m = 4;
    p.node_budget = 3;
    CHECK(code_of([&] {
            etk::backward_orbit_separated_count(square(), manual_cert(etk::make_annulus(0.5, 2.0), 2, 1.0), p);
          }) == etk::ErrorCode::EnumerationBudgetExceeded);
  }
  SUBCASE("base point outside V") {
    etk::BackwardOrbitParams p;
    p.base_point = Complex(0.1, 0.0);
    CHECK(code_of([&] {
            etk::backward_orbit_separated_count(square(), manual_cert(etk::make_annulus(0.5, 2.0), 2, 1.0), p);
          }) == etk::ErrorCode::PreconditionViolated);
  }
}
