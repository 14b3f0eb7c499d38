#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "etk/covering.hpp"
#include "etk/error.hpp"

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

std::string message_of(auto&& fn) {
  try {
    fn();
  } catch (const etk::Error& e) {
    return e.what();
  }
  return {};
}

FunctionSpec lacunary() { return FunctionSpec::product({100.0, 1e4, 1e8, 1e16}, 1e32); }

etk::CoveringOptions fixed_d(double d) {
  etk::CoveringOptions o;
  o.d = d;
  return o;
}

bool in_CR(Complex z, double R, double theta) {
  const double r = std::abs(z);
  const double a = std::abs(std::remainder(std::arg(z) - theta, 2 * kPi));
  return r > 2 * R / 3 && r < 1.5 * R && a < 2 * kPi / 3;
}

}  // namespace

TEST_CASE("check_dichotomy_hypotheses") {
  // M = 4R: |M - 2R| / k^N = 2R / k^N < 4R
  CHECK_FALSE(etk::check_dichotomy_hypotheses(1.0, 4e3, 1e3, 5, 1, 0.5));
  CHECK(code_of([] { etk::check_dichotomy_hypotheses(5.0, 5.0, 10.0, 2, 1, 1.0); }) ==
        etk::ErrorCode::PreconditionViolated);

  // small d and large j: all three hold past the reported threshold
  const int j = 40, N = 3;
  const double d = 0.1;
  const auto h0 = etk::check_dichotomy_hypotheses_log(0.0, 1.0, 10.0, j, N, d);
  REQUIRE(std::isfinite(h0.log_threshold_R));
  CHECK(h0.log_k == doctest::Approx(5 * std::exp(0.1)));
  auto at = [&](double x) {
    const double R = std::exp(x);
    return etk::check_dichotomy_hypotheses_log(3 * R, j * x, R, j, N, d);
  };
  CHECK(at(h0.log_threshold_R * 1.05).passed);
  CHECK(at(h0.log_threshold_R * 3).passed);
  CHECK_FALSE(at(h0.log_threshold_R * 0.95).passed);

  // large d: k = exp(5 e^d) makes the third inequality fail at any practical R
  const auto big = etk::check_dichotomy_hypotheses_log(3 * 64.0, 64.0, 64.0, 5, 2, 3.0);
  CHECK_FALSE(big.third);
  CHECK_FALSE(big.passed);
}

TEST_CASE("find_witnesses") {
  SUBCASE("exp") {
    const double R = 60.0;
    const auto w = etk::find_witnesses(FunctionSpec::exp_affine(1.0), R, 2);
    REQUIRE(w.has_value());
    CHECK(std::abs(w->w_M - R) < 1e-6 * R);
    CHECK(w->log_M == doctest::Approx(R));
    CHECK(w->w_m.real() < std::log(3 * R));
    CHECK(w->m < 3 * R);
    CHECK(std::abs(std::abs(w->w_m) - R) < 1e-9 * R);
    CHECK(in_CR(w->w_M, R, w->theta));
    CHECK(in_CR(w->w_m, R, w->theta));
  }
  SUBCASE("polynomials never exceed R^j for j above the degree") {
    CHECK_FALSE(etk::find_witnesses(FunctionSpec::polynomial({1, 2, 0, 1}), 100.0, 4).has_value());
    CHECK_FALSE(etk::choose_j(FunctionSpec::polynomial({1, 2, 0, 1}), 100.0).has_value());
  }
  SUBCASE("lacunary product at the scale of a zero") {
    const auto w = etk::find_witnesses(lacunary(), 1e16, 2);
    REQUIRE(w.has_value());
    CHECK(std::abs(w->w_m - 1e16) < 1e-6 * 1e16);
    CHECK(w->m < 3e16);
    CHECK(etk::choose_j(lacunary(), 1e16, [] {
            etk::CoveringOptions o;
            o.j_min = 2;
            return o;
          }()) == 2);
  }
}

TEST_CASE("run_dichotomy") {
  const auto f = FunctionSpec::exp_affine(1.0);
  const double R = 64.0;
  const auto w = etk::find_witnesses(f, R, 5);
  REQUIRE(w.has_value());
  const auto h = etk::check_dichotomy_hypotheses_log(w->m, w->log_M, R, 5, 2, 6.0);
  const auto out = etk::run_dichotomy(f, R, w->theta, 5, 2, h);
  CHECK(out.covers_fully);
  CHECK(out.scan.min_count.value_or(0) >= 1);

  CHECK(code_of([&] { etk::run_dichotomy(f, R, w->theta, 5, 3, h); }) == etk::ErrorCode::PreconditionViolated);
  auto strict = fixed_d(6.0);
  strict.enforce_hypotheses = true;
  CHECK(code_of([&] { etk::run_dichotomy(f, R, w->theta, 5, 2, h, strict); }) ==
        etk::ErrorCode::PreconditionViolated);

  // exp(z/64) maps D_64 into e^-2 < |w| < e^2, far inside the hole of A_64
  const auto slow = FunctionSpec::exp_affine(1.0 / 64.0);
  const auto hs = etk::check_dichotomy_hypotheses_log(1.0, 2.0, R, 5, 2, 6.0);
  const std::string msg = message_of([&] { etk::run_dichotomy(slow, R, 0.0, 5, 2, hs); });
  CHECK(msg.find("Inconclusive") != std::string::npos);
  CHECK(msg.find("failing grid points") != std::string::npos);
}

TEST_CASE("case1_search") {
  const auto f = FunctionSpec::exp_affine(1.0);
  const double R = 64.0, theta = 0.8;
  SUBCASE("non-recurrent alpha gives D_R minus the small disk") {
    const auto r = etk::case1_search(f, R, theta, 5, 3, Complex(64.0, 0.0), 6.0);
    REQUIRE(r.certificate.has_value());
    CHECK(r.non_recurrent);
    CHECK(r.certificate->case_tag == etk::CaseTag::I);
    CHECK(r.certificate->V.removed_disks.size() == 1);
    CHECK(r.certificate->grid_report.min_count.value_or(0) >= 3);
    CHECK(r.certificate->self_inclusion_evidence.min_count.value_or(0) >= 3);
  }
  SUBCASE("recurrent alpha inside C_R: relocation to a slit domain") {
    // e^alpha = 64 e^(50 i) lies in D_R for theta = 0.8
    const Complex alpha(std::log(64.0), 50.0);
    REQUIRE(etk::contains(etk::build_DR(R, theta), std::exp(alpha)));
    const auto r = etk::case1_search(f, R, theta, 5, 3, alpha, 100.0);
    REQUIRE(r.certificate.has_value());
    CHECK_FALSE(r.non_recurrent);
    CHECK(r.certificate->V.slits.size() == 1);
    CHECK(r.certificate->diameter.has_value());
    CHECK(r.certificate->grid_report.min_count.value_or(0) >= 3);
    CHECK(std::abs(r.certificate->w_m - alpha) >= R / 20);
    CHECK(std::abs(r.certificate->w_M - alpha) >= R / 20);
    const std::string msg = message_of([&] { etk::case1_search(f, R, theta, 5, 3, alpha, 0.01); });
    CHECK(msg.find("CertificationFailed") != std::string::npos);
    CHECK(msg.find("diameter") != std::string::npos);
  }
}

TEST_CASE("sublevel_components") {
  SUBCASE("exp: one component meeting every scanned circle") {
    const double R = 64.0;
    const auto s = etk::sublevel_components(FunctionSpec::exp_affine(1.0), R, R / 200);
    REQUIRE(s.components.size() == 1);
    CHECK(s.gap_radii.empty());
    CHECK(s.components[0].diameter > 3.0 * R);
    bool below = true;
    for (long idx : s.components[0].members) {
      const Complex z = s.lo + s.grid_step * Complex(double(idx % s.nx), double(idx / s.nx));
      below = below && z.real() < std::log(2 * R);
    }
    CHECK(below);
  }
  SUBCASE("z^5: empty set, every circle is a gap") {
    const auto s = etk::sublevel_components(FunctionSpec::polynomial({0, 0, 0, 0, 0, 1}), 64.0, 64.0 / 200);
    CHECK(s.components.empty());
    CHECK(s.gap_radii.size() == s.radii.size());
  }
  SUBCASE("lacunary: a small neighbourhood of the active zero") {
    const auto s = etk::sublevel_components(lacunary(), 1e16, 1e16 / 200);
    CHECK(s.components.size() <= 1);
    CHECK(!s.gap_radii.empty());
  }
  CHECK(code_of([] { etk::sublevel_components(FunctionSpec::exp_affine(1.0), 64.0, 1.0); }) ==
        etk::ErrorCode::PreconditionViolated);
}

TEST_CASE("case2a_certificate") {
  const double R = 1e16;
  // counts match the number of zeros below the disk radius exactly
  for (double r_gap : {0.75 * R, 1.5 * R}) {
    const auto c = etk::case2a_certificate(lacunary(), R, r_gap, 3);
    CHECK(c.case_tag == etk::CaseTag::IIa);
    REQUIRE(c.rouche.has_value());
    const int zeros_below = r_gap > R ? 4 : 3;
    CHECK(c.rouche->count == zeros_below);
    CHECK(c.grid_report.min_count == zeros_below);
    CHECK(c.self_inclusion_evidence.min_count == zeros_below);
  }
  CHECK(etk::case2a_certificate(lacunary(), R, 0.75 * R, 1).rouche->count >= 1);
  CHECK(code_of([&] { etk::case2a_certificate(lacunary(), R, 0.75 * R, 4); }) == etk::ErrorCode::NotEnoughPreimages);
}

TEST_CASE("case2b_certificate") {
  const auto f = FunctionSpec::exp_affine(1.0);
  const double R = 64.0;
  const auto s = etk::sublevel_components(f, R, R / 200);
  SUBCASE("annulus shortcut") {
    const auto m = etk::annulus_minimum(f, R, 4);
    CHECK(m.ell >= 4);
    const auto c = etk::case2b_certificate(f, R, 4, 5, 6.0, s, m);
    CHECK(c.case_tag == etk::CaseTag::IIb);
    CHECK(c.V.id == "A_R");
    CHECK(c.self_inclusion_evidence.min_count.value_or(0) >= 4);
  }
  SUBCASE("full construction with N above the annulus minimum") {
    // ell ~ 30 < N = 40: the slit-annulus path runs and the N-fold check is what fails
    const auto m = etk::annulus_minimum(f, R, 40);
    REQUIRE(m.ell < 40);
    const std::string msg = message_of([&] { etk::case2b_certificate(f, R, 40, 5, 1e3, s, m); });
    CHECK(msg.find("self-covering") != std::string::npos);
    const std::string tight = message_of([&] { etk::case2b_certificate(f, R, 40, 5, 0.01, s, m); });
    CHECK(tight.find("diameter") != std::string::npos);
  }
}

TEST_CASE("find_self_covering_V end to end") {
  SUBCASE("exp, N = 3: case IIb") {
    const auto r = etk::find_self_covering_V(FunctionSpec::exp_affine(1.0), 3, etk::RSchedule::geometric(), fixed_d(6.0));
    REQUIRE(r.certificate.has_value());
    CHECK(r.certificate->case_tag == etk::CaseTag::IIb);
    CHECK(r.certificate->grid_report.min_count.value_or(0) >= 3);
    CHECK(r.certificate->self_inclusion_evidence.min_count.value_or(0) >= 3);
    CHECK(r.certificate->R_bound <= 2 * r.certificate->R);
    // schedule starting past the first success still terminates
    const auto later = etk::find_self_covering_V(FunctionSpec::exp_affine(1.0), 3,
                                                 etk::RSchedule::geometric(2 * r.certificate->R, 2.0, 3), fixed_d(6.0));
    CHECK(later.certificate.has_value());
  }
  SUBCASE("polynomial: budget exhausted with the growth trace") {
    const auto r = etk::find_self_covering_V(FunctionSpec::polynomial({1, 0, 0, 1}),
                                             3, etk::RSchedule::geometric(64, 2, 6), fixed_d(6.0));
    CHECK_FALSE(r.certificate.has_value());
    REQUIRE(r.trace.size() == 6);
    for (const auto& e : r.trace)
      CHECK(e["outcome"].get<std::string>().find("never found") != std::string::npos);
  }
  SUBCASE("lacunary, N = 3: case IIa disk") {
    etk::RSchedule sched{{1e3, 1e6, 1e12, 1e16}};
    auto o = fixed_d(6.0);
    o.j_min = 2;
    const auto r = etk::find_self_covering_V(lacunary(), 3, sched, o);
    REQUIRE(r.certificate.has_value());
    CHECK(r.certificate->case_tag == etk::CaseTag::IIa);
    CHECK(std::holds_alternative<etk::Disk>(r.certificate->V.base));
    const double radius = std::get<etk::Disk>(r.certificate->V.base).radius;
    CHECK(r.certificate->rouche->count == (radius > 1e16 ? 4 : 3));
    CHECK(r.trace.size() == 4);
    const auto again = etk::find_self_covering_V(lacunary(), 3, sched, o);
    CHECK(etk::to_json(*again.certificate).dump() == etk::to_json(*r.certificate).dump());
    CHECK(again.trace.dump() == r.trace.dump());
    CHECK(etk::certificate_svg(*r.certificate).find("<svg") == 0);
  }
}

TEST_CASE("property: random exp certificates hold at doubled resolution") {
  std::mt19937_64 rng(12);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int t = 0; t < 5; ++t) {
    const Complex a = std::polar(0.8 + 0.4 * u(rng), 0.3 * (u(rng) - 0.5));
    const Complex b(u(rng) - 0.5, u(rng) - 0.5);
    const auto f = FunctionSpec::exp_affine(a, b);
    auto o = fixed_d(6.0);
    o.scan_step = 1.0 / 8.0;
    const auto r = etk::find_self_covering_V(f, 2, etk::RSchedule::geometric(64, 2, 3), o);
    REQUIRE(r.certificate.has_value());
    const auto& c = *r.certificate;
    CHECK(c.self_inclusion_evidence.grid_step == doctest::Approx(c.grid_report.grid_step / 2));
    CHECK(c.self_inclusion_evidence.points.size() > 3 * c.grid_report.points.size());
    CHECK(c.self_inclusion_evidence.min_count.value_or(0) >= c.N);
    CHECK(etk::outer_radius(c.V) <= c.R_bound);
  }
}
