// One line per acceptance criterion: "criterion <k>: PASS|FAIL | <detail> (<seconds> s)".
// Usage: etk_acceptance [k ...]   (default: all). Exit status is nonzero if any selected criterion fails.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <numbers>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "etk/covering.hpp"
#include "etk/entropy.hpp"
#include "etk/error.hpp"
#include "etk/hyperbolic.hpp"
#include "etk/report.hpp"
#include "etk/winding.hpp"

using etk::Complex;
using etk::FunctionSpec;

namespace {

constexpr double kPi = std::numbers::pi;

struct Verdict {
  bool pass = false;
  std::string detail;
};

unsigned threads() { return std::max(1u, std::thread::hardware_concurrency()); }

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

FunctionSpec lacunary() { return FunctionSpec::product({100.0, 1e4, 1e8, 1e16}, 1e32); }

// e^z certificates are shared by criteria 5 and 7
std::optional<etk::CoveringCertificate>& exp_cert(int N) {
  static std::optional<etk::CoveringCertificate> c2, c4;
  auto& slot = N == 2 ? c2 : c4;
  if (!slot) {
    etk::CoveringOptions o;
    o.threads = threads();
    slot = etk::find_self_covering_V(FunctionSpec::exp_affine(1.0), N, etk::RSchedule::geometric(), o).certificate;
  }
  return slot;
}

Verdict constants() {
  const double K = etk::HyperbolicConfig::K_hempel(), e5 = etk::HyperbolicConfig::validity_threshold();
  const bool ok = std::abs(K - 4.3768796) <= 1e-6 && std::abs(e5 - 148.4131591) <= 1e-6;
  return {ok, fmt("K_hempel=%.9f threshold=%.9f", K, e5)};
}

Verdict closed_forms() {
  const double e5 = std::exp(5.0);
  double worst = std::abs(etk::radial_distance_lower(e5, std::exp(5.0 * std::numbers::e)) - 0.5);
  for (double d : {0.1, 1.0, 3.0}) worst = std::max(worst, std::abs(etk::radial_distance_lower(e5, etk::k_constant(d)) - d / 2));
  return {worst <= 1e-12, fmt("max deviation %.3g", worst)};
}

Verdict counting_oracles() {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  int exp_bad = 0, poly_bad = 0, rouche_bad = 0;

  const auto ez = FunctionSpec::exp_affine(1.0);
  const auto disk10 = etk::make_disk(0.0, 10.0);
  for (int t = 0; t < 50;) {
    const Complex w = std::polar(std::exp(4.0 * u(rng)), kPi * u(rng));
    int oracle = 0;
    bool near_edge = false;
    for (int k = -3; k <= 3; ++k) {
      const double r = std::abs(std::log(w) + Complex(0.0, 2 * kPi * k));
      oracle += r < 10.0;
      near_edge = near_edge || std::abs(r - 10.0) < 1e-3;
    }
    if (near_edge) continue;
    exp_bad += etk::count_preimages(ez, disk10, w).count != oracle;
    ++t;
  }

  std::uniform_int_distribution<int> deg(1, 6);
  for (int t = 0; t < 200; ++t) {
    const int n = deg(rng);
    std::vector<Complex> c(n + 1);
    for (auto& x : c) x = {u(rng), u(rng)};
    c[n] = std::polar(0.5 + 0.5 * std::abs(u(rng)), kPi * u(rng));
    const Complex w{u(rng), u(rng)};
    double cb = 0.0;
    for (int k = 0; k < n; ++k) cb = std::max(cb, std::abs(k == 0 ? c[0] - w : c[k]) / std::abs(c[n]));
    poly_bad += etk::count_preimages(FunctionSpec::polynomial(c), etk::make_disk(0.0, 1.0 + cb + 0.5), w).count != n;
  }

  // |z^3 + z/2 + 1/5| >= 6.8 on |z| = 2, so every |w| < 5 has the certified count
  const auto cubic = FunctionSpec::polynomial({0.2, 0.5, 0.0, 1.0});
  const auto disk2 = etk::make_disk(0.0, 2.0);
  const auto cert = etk::rouche_transfer(cubic, disk2, 5.0, 0.0);
  for (int t = 0; t < 50; ++t) {
    const Complex w = std::polar(5.0 * std::sqrt(std::abs(u(rng))), kPi * u(rng));
    rouche_bad += etk::count_preimages(cubic, disk2, w).count != cert.count;
  }
  rouche_bad += cert.count != 3;
  return {exp_bad + poly_bad + rouche_bad == 0,
          fmt("exp mismatches %d/50, polynomial %d/200, Rouche %d/50 (certified count %d)", exp_bad, poly_bad,
              rouche_bad, cert.count)};
}

Verdict example_one() {
  const auto cfg = etk::parse_run_config(
      {{"function", etk::to_json(lacunary())}, {"threads", threads()}, {"example", {{"samples", 64}}}});
  const auto r = etk::example_product_report(cfg);
  std::ostringstream d;
  for (const auto& row : r.at("radii"))
    d << "i=" << row["i"].get<int>() << " counts[" << row["disk_count_min"].get<int>() << ","
      << row["disk_count_max"].get<int>() << "] diff[" << row["annulus_diff_min"].get<int>() << ","
      << row["annulus_diff_max"].get<int>() << "]; ";
  const bool ok = r["disk_counts"]["pass"].get<bool>() && r["annulus_difference"]["pass"].get<bool>();
  return {ok, d.str()};
}

Verdict main_construction() {
  std::ostringstream d;
  bool ok = true;
  for (int N : {2, 4}) {
    const auto& c = exp_cert(N);
    if (!c) {
      ok = false;
      d << "exp N=" << N << " no certificate; ";
      continue;
    }
    const int coarse = c->grid_report.min_count.value_or(0);
    const int fine = c->self_inclusion_evidence.min_count.value_or(0);
    const bool refined = std::abs(c->grid_report.grid_step - 2.0 * c->self_inclusion_evidence.grid_step) <
                         1e-9 * c->grid_report.grid_step;
    const bool this_ok = c->case_tag == etk::CaseTag::IIb && coarse >= N && fine >= N && refined;
    ok = ok && this_ok;
    d << "exp N=" << N << " " << etk::to_string(c->case_tag) << " R=" << c->R << " min " << coarse << "/" << fine
      << "; ";
  }
  etk::CoveringOptions o;
  o.j_min = 2;
  o.threads = threads();
  etk::RSchedule s;
  s.radii = {1e3, 1e6, 1e12, 1e16};
  const auto lr = etk::find_self_covering_V(lacunary(), 3, s, o);
  const bool lac_ok = lr.certificate && lr.certificate->case_tag == etk::CaseTag::IIa &&
                      lr.certificate->self_inclusion_evidence.min_count.value_or(0) >= 3;
  ok = ok && lac_ok;
  d << "lacunary N=3 " << (lr.certificate ? etk::to_string(lr.certificate->case_tag) : std::string("none"));
  if (lr.certificate) d << " R=" << lr.certificate->R;
  return {ok, d.str()};
}

Verdict entropy_calibration() {
  std::ostringstream d;
  bool ok = true;
  etk::SeparatedSetOptions so;
  so.threads = threads();
  for (int deg : {2, 3}) {
    std::vector<Complex> c(deg + 1, 0.0);
    c[deg] = 1.0;
    const auto e = etk::entropy_lower_curve(FunctionSpec::polynomial(c), etk::CompactSet::circle(0.0, 1.0), 12, {0.05}, so);
    const double target = 0.88 * std::log(static_cast<double>(deg));
    ok = ok && e.h_lower >= target;
    d << "z^" << deg << " h_lower=" << fmt("%.4f", e.h_lower) << " (>= " << fmt("%.4f", target) << "); ";
  }
  return {ok, d.str()};
}

Verdict orbit_bound() {
  const auto& c = exp_cert(4);
  if (!c) return {false, "no e^z certificate with N=4"};
  etk::BackwardOrbitParams p;
  p.m = 3;
  p.k = 3;
  p.threads = threads();
  const auto b = etk::certificate_entropy_bound(FunctionSpec::exp_affine(1.0), *c, p);
  const bool ok = b.orbits.meets_floor && b.orbits.degree_product == 1 && b.orbits.count >= 262144 &&
                  b.measured >= 0.95 * std::log(4.0);
  return {ok, fmt("count=%llu floor=%.0f D=%ld bound=%.6f (>= %.6f) nodes=%ld mismatches=%ld",
                  static_cast<unsigned long long>(b.orbits.count), b.orbits.floor, b.orbits.degree_product, b.measured,
                  0.95 * std::log(4.0), b.orbits.nodes, b.orbits.consistency_mismatches)};
}

Verdict properties() {
  std::ostringstream d;
  bool ok = true;
  etk::SeparatedSetOptions so;
  so.threads = threads();
  const auto square = FunctionSpec::polynomial({0.0, 0.0, 1.0});

  // separated sets: nonincreasing in delta, nondecreasing in n
  const std::vector<double> deltas{0.02, 0.05, 0.1, 0.2};
  const auto e = etk::entropy_lower_curve(square, etk::CompactSet::circle(0.0, 1.0, 1 << 14), 8, deltas, so);
  int mono_bad = 0;
  for (int n = 1; n <= 8; ++n)
    for (std::size_t i = 0; i < deltas.size(); ++i) {
      if (i + 1 < deltas.size()) mono_bad += e.table.at({n, deltas[i]}) < e.table.at({n, deltas[i + 1]});
      if (n > 1) mono_bad += e.table.at({n, deltas[i]}) < e.table.at({n - 1, deltas[i]});
    }
  ok = ok && mono_bad == 0;
  d << "separated-set monotonicity violations " << mono_bad << "; ";

  // winding counts unchanged by halving the initial spacing
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  const auto spec = FunctionSpec::exp_affine({0.5, 1.0}, {0.1, 0.0});
  const auto disk = etk::make_disk({0.5, 0.5}, 7.0);
  etk::WindingOptions fine;
  fine.initial_spacing /= 2.0;
  int wind_bad = 0;
  for (int t = 0; t < 100; ++t) {
    const Complex w{3 * u(rng), 3 * u(rng)};
    wind_bad += etk::count_preimages(spec, disk, w).count != etk::count_preimages(spec, disk, w, fine).count;
  }
  ok = ok && wind_bad == 0;
  d << "refinement changes " << wind_bad << "/100; ";

  // annulus_AN: r_lower increasing in m, decreasing in M
  int an_bad = 0;
  for (int t = 0; t < 500; ++t) {
    const double dd = 0.1 + 2.0 * std::abs(u(rng));
    const int N = 1 + t % 4;
    const double m1 = std::exp(5.0 * std::abs(u(rng))), m2 = m1 * (1.0 + std::abs(u(rng)) + 1e-3);
    const double M1 = m2 * std::exp(3.0 + 20.0 * std::abs(u(rng))), M2 = M1 * (1.0 + std::abs(u(rng)) + 1e-3);
    an_bad += !(etk::annulus_AN(m1, M1, dd, N).r_lower < etk::annulus_AN(m2, M1, dd, N).r_lower);
    an_bad += !(etk::annulus_AN(m1, M2, dd, N).r_lower < etk::annulus_AN(m1, M1, dd, N).r_lower);
  }
  ok = ok && an_bad == 0;
  d << "annulus_AN violations " << an_bad << "/1000; ";

  // conjugacy z -> 2z: z^2 on |z|=1 with delta matches z^2/2 on |z|=2 with 2 delta
  const auto a = etk::entropy_lower_curve(square, etk::CompactSet::circle(0.0, 1.0, 1 << 13), 8, {0.05, 0.1}, so);
  const auto b = etk::entropy_lower_curve(FunctionSpec::polynomial({0.0, 0.0, 0.5}), etk::CompactSet::circle(0.0, 2.0, 1 << 13),
                                          8, {0.1, 0.2}, so);
  int conj_bad = 0;
  for (int n = 1; n <= 8; ++n)
    for (int i = 0; i < 2; ++i) {
      const double da = i == 0 ? 0.05 : 0.1, db = 2 * da;
      conj_bad += a.table.at({n, da}) != b.table.at({n, db});
    }
  ok = ok && conj_bad == 0;
  d << "conjugacy table mismatches " << conj_bad << "/16; ";

  // 1000 randomized slit domains, each bounded by one contour
  const double R = 50.0, eps = 1.0 / 48.0;
  std::uniform_real_distribution<double> rad(R / 2 + eps * R, 2 * R - eps * R), ang(-kPi, kPi), unit(0.0, 1.0);
  int multi = 0, built = 0, errors = 0;
  while (built < 1000) {
    try {
      if (built % 2 == 0) {
        auto draw = [&] { return std::polar(rad(rng), ang(rng)); };
        const Complex alpha = draw(), z1 = draw(), z2 = draw();
        std::vector<Complex> avoided;
        for (int i = 0; i < built % 5; ++i) avoided.push_back(draw());
        bool fine_sep = std::abs(alpha - z1) >= eps * R && std::abs(alpha - z2) >= eps * R && std::abs(z1 - z2) >= eps * R;
        for (auto x : avoided) fine_sep = fine_sep && std::abs(x - z1) >= eps * R && std::abs(x - z2) >= eps * R;
        if (!fine_sep) continue;
        const auto dom = etk::build_case2_domain(alpha, avoided, eps, R, 6.0, z1, z2);
        multi += etk::boundary_contour(dom, R / 40).size() != 1;
      } else {
        const double theta = 2 * kPi * unit(rng);
        const auto cr = etk::build_CR(R, theta);
        auto sample = [&] {
          for (;;) {
            const Complex z = std::polar(2 * R / 3 + (5 * R / 6) * unit(rng), theta + (4 * kPi / 3) * (unit(rng) - 0.5));
            if (etk::contains(cr, z)) return z;
          }
        };
        const Complex z1 = sample(), z2 = sample();
        const Complex alpha = std::polar(R / 2 + 1.5 * R * unit(rng), 2 * kPi * unit(rng));
        if (std::abs(alpha - z1) < R / 20 || std::abs(alpha - z2) < R / 20) continue;
        const auto dom = etk::build_case1_domain(alpha, R, theta, 6.0, z1, z2).domain;
        multi += etk::boundary_contour(dom, R / 40).size() != 1;
      }
    } catch (const etk::Error&) {
      ++errors;
    }
    ++built;
  }
  ok = ok && multi == 0 && errors == 0;
  d << "slit domains with more than one contour " << multi << "/1000, construction errors " << errors;
  return {ok, d.str()};
}

}  // namespace

int main(int argc, char** argv) {
  const std::vector<std::function<Verdict()>> criteria = {constants,         closed_forms,     counting_oracles,
                                                          example_one,       main_construction, entropy_calibration,
                                                          orbit_bound,       properties};
  std::vector<int> selected;
  for (int i = 1; i < argc; ++i) selected.push_back(std::atoi(argv[i]));
  if (selected.empty())
    for (int k = 1; k <= 8; ++k) selected.push_back(k);
  bool all = true;
  for (int k : selected) {
    if (k < 1 || k > 8) {
      std::printf("criterion %d: unknown\n", k);
      return 2;
    }
    const auto t0 = std::chrono::steady_clock::now();
    Verdict v;
    try {
      v = criteria[k - 1]();
    } catch (const std::exception& e) {
      v = {false, std::string("threw ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::printf("criterion %d: %s | %s (%.1f s)\n", k, v.pass ? "PASS" : "FAIL", v.detail.c_str(), secs);
    std::fflush(stdout);
    all = all && v.pass;
  }
  return all ? 0 : 1;
}
