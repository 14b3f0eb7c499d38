#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <sstream>

#include <boost/geometry.hpp>
#include <boost/geometry/geometries/multi_point.hpp>
#include <boost/geometry/geometries/point_xy.hpp>
#include <boost/geometry/geometries/polygon.hpp>

#include "etk/covering.hpp"
#include "etk/error.hpp"
#include "etk/parallel.hpp"
#include "geometry.hpp"

namespace etk {

using detail::kPi;
using detail::kTwoPi;
using detail::wrap_angle;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Self-covering evidence at step and step / 2; CertificationFailed names the resolution.
void certify(const FunctionSpec& spec, CoveringCertificate& cert, double step, const CoveringOptions& options) {
  cert.grid_report = covering_report(spec, cert.V, cert.V, step, cert.N, options.threads, options.winding);
  if (!cert.grid_report.min_count || *cert.grid_report.min_count < cert.N)
    throw Error(ErrorCode::CertificationFailed,
                "self-covering fails on the coarse grid (" + std::to_string(cert.grid_report.failing.size()) +
                    " points below N)");
  cert.self_inclusion_evidence =
      covering_report(spec, cert.V, cert.V, step / 2.0, cert.N, options.threads, options.winding);
  if (!cert.self_inclusion_evidence.min_count || *cert.self_inclusion_evidence.min_count < cert.N)
    throw Error(ErrorCode::CertificationFailed,
                "self-covering fails on the refined grid (" +
                    std::to_string(cert.self_inclusion_evidence.failing.size()) + " points below N)");
}

double cr_margin(double R, Complex z, double theta) {
  const double r = std::abs(z);
  const double slack = 2.0 * kPi / 3.0 - std::abs(wrap_angle(std::arg(z) - theta));
  if (slack <= 0.0 || r <= 2.0 * R / 3.0 || r >= 1.5 * R) return -1.0;
  const double angular = slack >= kPi / 2.0 ? r : r * std::sin(slack);
  return std::min({r - 2.0 * R / 3.0, 1.5 * R - r, angular});
}

}  // namespace

Case1Result case1_search(const FunctionSpec& spec, double R, double theta, int j, int N, Complex alpha, double d,
                         const CoveringOptions& options, bool widened) {
  if (!(R > 1.0) || N < 1 || j < 1) throw Error(ErrorCode::PreconditionViolated, "case1_search needs R > 1");
  const double half = 0.75 * kPi + (widened ? options.extra_half_angle : 0.0);
  const PlanarDomain dr = build_DR(R, theta, half);
  const double rho = std::pow(R, -0.5 * j);
  Case1Result out;

  // non-recurrence: no sampled point of Delta(alpha, rho) within D_R maps into D_R
  bool recurrent = false;
  const int g = 16;
  for (int a = -g; a <= g && !recurrent; ++a)
    for (int b = -g; b <= g && !recurrent; ++b) {
      const Complex off(static_cast<double>(a) / g, static_cast<double>(b) / g);
      if (std::abs(off) > 1.0) continue;
      const Complex z = alpha + rho * off;
      if (contains(dr, z) && contains(dr, evaluate(spec, z))) recurrent = true;
    }
  for (int k = 0; k < 128 && !recurrent; ++k) {
    const Complex z = alpha + std::polar(rho, kTwoPi * k / 128);
    if (contains(dr, z) && contains(dr, evaluate(spec, z))) recurrent = true;
  }

  CoveringCertificate cert;
  cert.N = N;
  cert.case_tag = CaseTag::I;
  cert.R = R;
  cert.R_bound = 2.0 * R;
  cert.j = j;
  cert.theta = theta;
  cert.alpha = alpha;
  cert.excluded_radius = rho;
  cert.d = d;

  if (!recurrent) {
    out.non_recurrent = true;
    cert.V = dr;
    cert.V.removed_disks.push_back({alpha, rho});
    cert.V.id = "case1_DR_minus_disk";
    cert.construction = "D_R minus Delta(alpha, R^(-j/2)), non-recurrent";
    certify(spec, cert, options.scan_step * R, options);
    out.certificate = std::move(cert);
    return out;
  }

  // relocation: witnesses on |z| = R inside C_R and outside Delta(alpha, R/20)
  const int n = std::max(64, options.circle.samples);
  int best_max = -1, best_min = -1;
  double lmax = -kInf, lmin = kInf;
  for (int k = 0; k < n; ++k) {
    const Complex z = std::polar(R, kTwoPi * k / n);
    if (cr_margin(R, z, theta) <= 0.0 || std::abs(z - alpha) < R / 20.0) continue;
    const double l = log_evaluate(spec, z).real();
    if (l > lmax) lmax = l, best_max = k;
    if (l < lmin) lmin = l, best_min = k;
  }
  if (best_max < 0 || best_max == best_min)
    throw Error(ErrorCode::CertificationFailed, "no witness pair in C_R outside Delta(alpha, R/20)");
  cert.w_M = std::polar(R, kTwoPi * best_max / n);
  cert.w_m = std::polar(R, kTwoPi * best_min / n);
  cert.log_M = lmax;
  cert.m = std::exp(lmin);
  if (!(cert.m < 3.0 * R)) out.note = "relocated w_m has |f| >= 3R at this resolution";

  Case1Domain built;
  try {
    built = build_case1_domain(alpha, R, theta, j, cert.w_m, cert.w_M);
  } catch (const Error& e) {
    throw Error(ErrorCode::CertificationFailed, std::string("case-1 domain: ") + e.what());
  }
  if (built.shape == Case1Shape::DiskTouchesBoundary && !widened) {
    out.escalate = true;
    out.note = "Delta(alpha, R/20) reaches the edge of D_R";
    return out;
  }
  cert.V = built.domain;
  cert.construction = std::string("case-1 domain, shape ") + to_string(built.shape);
  const DiameterEstimate diam = quasihyperbolic_upper(cert.V, cert.w_m, cert.w_M, options.qh);
  cert.diameter = diam;
  if (diam.upper_bound > d / 2.0) {
    std::ostringstream msg;
    msg << "diameter bound: quasihyperbolic upper " << diam.upper_bound << " exceeds d/2 = " << d / 2.0;
    throw Error(ErrorCode::CertificationFailed, msg.str());
  }
  certify(spec, cert, options.scan_step * R, options);
  out.certificate = std::move(cert);
  return out;
}

SublevelSet sublevel_components(const FunctionSpec& spec, double R, double grid_step) {
  if (!(R > 0.0) || !(grid_step > 0.0) || grid_step > R / 200.0 * (1.0 + 1e-12))
    throw Error(ErrorCode::PreconditionViolated, "sublevel grid step must be at most R/200");
  SublevelSet s;
  s.R = R;
  s.threshold = 2.0 * R;
  s.grid_step = grid_step;
  s.lo = Complex(-2.0 * R, -2.0 * R);
  s.nx = s.ny = static_cast<long>(std::floor(4.0 * R / grid_step)) + 1;
  const double log_t = std::log(s.threshold);
  auto point = [&](long idx) { return s.lo + grid_step * Complex(static_cast<double>(idx % s.nx), static_cast<double>(idx / s.nx)); };
  std::vector<char> member(static_cast<std::size_t>(s.nx * s.ny), 0);
  for (long idx = 0; idx < s.nx * s.ny; ++idx) {
    const Complex z = point(idx);
    const double r = std::abs(z);
    if (r <= R / 2.0 || r >= 2.0 * R) continue;
    if (log_evaluate(spec, z).real() < log_t) member[idx] = 1;
  }

  const int K = 96;
  for (int k = 0; k < K; ++k) s.radii.push_back(R / 2.0 + 1.5 * R * (k + 0.5) / K);
  std::vector<bool> any_cross(K, false);
  std::vector<char> seen(member.size(), 0);
  namespace bg = boost::geometry;
  using P = bg::model::d2::point_xy<double>;
  for (long start = 0; start < s.nx * s.ny; ++start) {
    if (!member[start] || seen[start]) continue;
    SublevelComponent comp;
    std::deque<long> queue{start};
    seen[start] = 1;
    while (!queue.empty()) {
      const long idx = queue.front();
      queue.pop_front();
      comp.members.push_back(idx);
      const long i = idx % s.nx, jj = idx / s.nx;
      const long nb[4][2] = {{i - 1, jj}, {i + 1, jj}, {i, jj - 1}, {i, jj + 1}};
      for (const auto& q : nb) {
        if (q[0] < 0 || q[1] < 0 || q[0] >= s.nx || q[1] >= s.ny) continue;
        const long nidx = q[1] * s.nx + q[0];
        if (member[nidx] && !seen[nidx]) {
          seen[nidx] = 1;
          queue.push_back(nidx);
        }
      }
    }
    std::sort(comp.members.begin(), comp.members.end());
    comp.sample = point(comp.members.front());
    // diameter over the convex hull
    bg::model::multi_point<P> mp;
    for (long idx : comp.members) {
      const Complex z = point(idx);
      bg::append(mp, P(z.real(), z.imag()));
    }
    bg::model::polygon<P> hull;
    bg::convex_hull(mp, hull);
    const auto& ring = hull.outer();
    for (std::size_t a = 0; a < ring.size(); ++a)
      for (std::size_t b = a + 1; b < ring.size(); ++b)
        comp.diameter = std::max(comp.diameter, std::hypot(ring[a].x() - ring[b].x(), ring[a].y() - ring[b].y()));
    std::vector<bool> cross(K, false);
    const double half_cell = grid_step / std::sqrt(2.0);
    for (long idx : comp.members) {
      const double r = std::abs(point(idx));
      for (int k = 0; k < K; ++k)
        if (std::abs(r - s.radii[k]) <= half_cell) cross[k] = any_cross[k] = true;
    }
    s.components.push_back(std::move(comp));
    s.crosses.push_back(std::move(cross));
  }
  for (int k = 0; k < K; ++k)
    if (!any_cross[k]) s.gap_radii.push_back(s.radii[k]);
  return s;
}

CoveringCertificate case2a_certificate(const FunctionSpec& spec, double R, double r_gap, int N,
                                       const CoveringOptions& options) {
  if (!(r_gap > R / 2.0) || !(r_gap < 2.0 * R))
    throw Error(ErrorCode::PreconditionViolated, "gap radius must lie in (R/2, 2R)");
  std::optional<Complex> v;
  for (Complex cand : {Complex(0.5, 0.0), Complex(0.0, 0.5), Complex(-0.5, 0.0), Complex(0.0, -0.5)}) {
    if (count_preimages(spec, make_disk(0.0, R / 2.0), cand, options.winding).count >= N) {
      v = cand;
      break;
    }
  }
  if (!v) throw Error(ErrorCode::NotEnoughPreimages, "no scanned value has N preimages in Delta(0, R/2)");
  CoveringCertificate cert;
  cert.N = N;
  cert.case_tag = CaseTag::IIa;
  cert.R = R;
  cert.R_bound = r_gap;
  cert.V = make_disk(0.0, r_gap);
  cert.V.id = "case2a_disk";
  cert.construction = "disk bounded by a circle avoiding W";
  cert.rouche = rouche_transfer(spec, cert.V, 2.0 * R, *v, options.winding);
  if (cert.rouche->count < N)
    throw Error(ErrorCode::NotEnoughPreimages, "transferred count below N");
  certify(spec, cert, options.scan_step * R, options);
  return cert;
}

CoveringCertificate case2b_certificate(const FunctionSpec& spec, double R, int N, int j, double d,
                                       const SublevelSet& sublevel, const AnnulusMinimum& minimum,
                                       const CoveringOptions& options) {
  CoveringCertificate cert;
  cert.N = N;
  cert.case_tag = CaseTag::IIb;
  cert.R = R;
  cert.R_bound = 2.0 * R;
  cert.j = j;
  cert.d = d;
  if (minimum.scan.min_count && *minimum.scan.min_count >= N) {
    cert.V = build_AR(R);
    cert.V.id = "A_R";
    cert.construction = "annulus covers itself N times";
    certify(spec, cert, options.scan_step * R, options);
    return cert;
  }

  const int ell = std::max(1, minimum.ell);
  const double s = R / (2.0 * ell * (ell + 2));
  const SublevelComponent* w0 = nullptr;
  for (const auto& c : sublevel.components)
    if (!w0 || c.diameter > w0->diameter) w0 = &c;
  if (!w0 || w0->diameter < 1.5 * R / ell)
    throw Error(ErrorCode::CertificationFailed, "no component of W with diameter >= 3R/(2 ell)");

  cert.alpha = minimum.alpha;
  cert.excluded_radius = std::pow(R, -0.5 * j);
  LocateOptions lo;
  lo.min_radius = s / 8.0;
  lo.winding = options.winding;
  std::vector<Complex> zeta;
  std::vector<Disk> U{{minimum.alpha, s}};
  for (const auto& c : locate_preimages(spec, 0.0, 2.0 * R, minimum.alpha, lo)) {
    const double r = std::abs(c.center);
    if (r + c.radius <= R / 2.0 || r - c.radius >= 2.0 * R) continue;
    U.push_back({c.center, s + c.radius});
    const double eps_r = R / (2.0 * N * (N + 2));
    if (r >= R / 2.0 + eps_r && r <= 2.0 * R - eps_r) zeta.push_back(c.center);
  }
  auto clearance = [&](Complex z) {
    double c = std::min(std::abs(z) - R / 2.0, 2.0 * R - std::abs(z)) - s;
    for (const auto& u : U) c = std::min(c, std::abs(z - u.center) - u.radius);
    return c;
  };

  double best = 0.0;
  bool have_m = false;
  for (long idx : w0->members) {
    const Complex z = sublevel.lo + sublevel.grid_step * Complex(static_cast<double>(idx % sublevel.nx),
                                                                 static_cast<double>(idx / sublevel.nx));
    const double c = clearance(z);
    if (c > best) best = c, cert.w_m = z, have_m = true;
  }
  if (!have_m) throw Error(ErrorCode::CertificationFailed, "separation: no point of W_0 clears U and the edge of A_R");
  cert.m = std::exp(log_evaluate(spec, cert.w_m).real());

  // w_M: maximum modulus on the best circle that avoids U
  bool have_M = false;
  cert.log_M = -kInf;
  const int K = 64, n = 2048;
  for (int k = 0; k <= K; ++k) {
    const double r = R / 2.0 + s + (1.5 * R - 2.0 * s) * k / K;
    bool meets = false;
    for (const auto& u : U)
      if (std::abs(std::abs(u.center) - r) < u.radius) meets = true;
    if (meets) continue;
    for (int t = 0; t < n; ++t) {
      const Complex z = std::polar(r, kTwoPi * t / n);
      if (std::abs(z - cert.w_m) < s) continue;
      const double l = log_evaluate(spec, z).real();
      if (l > cert.log_M) cert.log_M = l, cert.w_M = z, have_M = true;
    }
  }
  if (!have_M) throw Error(ErrorCode::CertificationFailed, "separation: every scanned circle meets U");

  const double eps = 1.0 / (2.0 * N * (N + 2));
  try {
    cert.V = build_case2_domain(minimum.alpha, zeta, eps, R, j, cert.w_m, cert.w_M);
  } catch (const Error& e) {
    throw Error(ErrorCode::CertificationFailed, std::string("separation: ") + e.what());
  }
  cert.construction = "slit annulus avoiding the preimages of alpha";
  const DiameterEstimate diam = quasihyperbolic_upper(cert.V, cert.w_m, cert.w_M, options.qh);
  cert.diameter = diam;
  if (diam.upper_bound > d / 2.0) {
    std::ostringstream msg;
    msg << "diameter bound: quasihyperbolic upper " << diam.upper_bound << " exceeds d/2 = " << d / 2.0;
    throw Error(ErrorCode::CertificationFailed, msg.str());
  }
  certify(spec, cert, options.scan_step * R, options);
  return cert;
}

}  // namespace etk
