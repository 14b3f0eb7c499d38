#include <cmath>
#include <string>

#include "etk/error.hpp"
#include "etk/plane_domains.hpp"
#include "geometry.hpp"

namespace etk {

using detail::kPi;
using detail::wrap_angle;

namespace {

std::vector<Complex> arc_polyline(double r, double a0, double a1, double max_step) {
  const int n = std::max(2, static_cast<int>(std::ceil(std::abs(a1 - a0) * r / max_step)) + 1);
  std::vector<Complex> pts;
  for (int k = 0; k < n; ++k) pts.push_back(std::polar(r, a0 + (a1 - a0) * k / (n - 1)));
  return pts;
}

double distance_to_closure(const PlanarDomain& d, Complex z) {
  return contains(d, z) ? 0.0 : boundary_distance(d, z);
}

}  // namespace

Case1Domain build_case1_domain(Complex alpha, double R, double theta, double jexp, Complex z1,
                               Complex z2) {
  if (!(R > 1.0)) throw Error(ErrorCode::InvalidArgument, "R must exceed 1");
  const PlanarDomain dr = build_DR(R, theta);
  const PlanarDomain cr = build_CR(R, theta);
  const double big = R / 20.0;
  if (!contains(cr, z1) || !contains(cr, z2))
    throw Error(ErrorCode::WitnessTooClose, "witness points must lie in C_R");
  if (std::abs(z1 - alpha) < big || std::abs(z2 - alpha) < big)
    throw Error(ErrorCode::WitnessTooClose, "witness points within R/20 of alpha");
  const double tiny = std::pow(R, -jexp / 2.0);

  Case1Domain out;
  if (distance_to_closure(dr, alpha) >= big) {
    out.domain = dr;
    out.domain.id = "case1_whole_DR";
    out.shape = Case1Shape::WholeDR;
    return out;
  }
  if (distance_to_closure(cr, alpha) >= big) {
    // Annular sector within R/40 (radially and along arcs) of C_R: a subset of the
    // R/20 tubular neighborhood that keeps Delta(alpha, R^(-j/2)) outside.
    const double pad = R / 40.0;
    const double r_out = 1.5 * R + pad;
    out.domain = make_sector(2.0 * R / 3.0 - pad, r_out, theta, 2.0 * kPi / 3.0 + pad / r_out);
    out.domain.id = "case1_tube_CR";
    if (distance_to_closure(out.domain, alpha) <= tiny) out.domain.removed_disks.push_back({alpha, tiny});
    out.shape = Case1Shape::TubeAroundCR;
    return out;
  }

  PlanarDomain base = dr;
  base.removed_disks.push_back({alpha, big});
  base.slit_halfwidth = default_slit_halfwidth(R);
  base.simply_connected = true;
  base.id = "case1_slit";
  const auto& sector = std::get<AnnularSector>(dr.base);
  if (!contains(dr, alpha) || boundary_distance(dr, alpha) <= big) {
    // The disk already opens D_R to its boundary; no arc needed.
    out.domain = base;
    out.shape = Case1Shape::DiskTouchesBoundary;
    return out;
  }

  const double rho = std::abs(alpha);
  const double phi = std::arg(alpha);
  const double over = 1e-3 * R;
  const double lo_edge = sector.theta_center - sector.half_angle;
  const double hi_edge = sector.theta_center + sector.half_angle;
  const double rel = wrap_angle(phi - sector.theta_center);
  const double phi_c = sector.theta_center + rel;  // alpha's angle on the sector's branch
  struct Candidate {
    Case1Shape shape;
    std::vector<Complex> slit;
  };
  const std::vector<Candidate> candidates = {
      {Case1Shape::SlitRadialOut, {alpha, std::polar(sector.r_out + over, phi)}},
      {Case1Shape::SlitRadialIn, {alpha, std::polar(sector.r_in - over, phi)}},
      {Case1Shape::SlitCircularCcw, arc_polyline(rho, phi_c, hi_edge + over / rho, R / 50.0)},
      {Case1Shape::SlitCircularCw, arc_polyline(rho, phi_c, lo_edge - over / rho, R / 50.0)},
  };
  const double clearance = R / 40.0;
  const Candidate* fallback = nullptr;
  for (const auto& c : candidates) {
    PlanarDomain trial = base;
    trial.slits.push_back(c.slit);
    if (!same_component(trial, z1, z2)) continue;
    const bool clear = detail::point_polyline_distance(z1, c.slit) >= clearance &&
                       detail::point_polyline_distance(z2, c.slit) >= clearance;
    if (clear) {
      out.domain = std::move(trial);
      out.shape = c.shape;
      return out;
    }
    if (!fallback) fallback = &c;
  }
  if (fallback) {
    out.domain = base;
    out.domain.slits.push_back(fallback->slit);
    out.shape = fallback->shape;
    return out;
  }
  throw Error(ErrorCode::WitnessTooClose, "no arc keeps the witness points connected");
}

PlanarDomain build_case2_domain(Complex alpha, const std::vector<Complex>& avoided, double eps,
                                double R, double jexp, Complex z1, Complex z2) {
  if (!(R > 0.0) || !(eps > 0.0) || !(eps < 0.75))
    throw Error(ErrorCode::InvalidArgument, "case-2 domain needs R > 0 and 0 < eps < 3/4");
  const double r_lo = R / 2.0;
  const double r_hi = 2.0 * R;
  const double sep = eps * R;
  const double slack = 1e-12 * R;
  auto in_closed_band = [&](Complex p) {
    const double r = std::abs(p);
    return r >= r_lo + sep - slack && r <= r_hi - sep + slack;
  };
  for (Complex p : {alpha, z1, z2})
    if (!in_closed_band(p))
      throw Error(ErrorCode::SeparationViolated, "point outside the closed annulus A_R(eps)");
  for (Complex x : avoided)
    if (!in_closed_band(x))
      throw Error(ErrorCode::SeparationViolated, "avoided point outside A_R(eps)");
  for (Complex z : {z1, z2}) {
    if (std::abs(alpha - z) < sep - slack)
      throw Error(ErrorCode::SeparationViolated, "alpha closer than eps*R to a witness");
    for (Complex x : avoided)
      if (std::abs(x - z) < sep - slack)
        throw Error(ErrorCode::SeparationViolated, "avoided point closer than eps*R to a witness");
  }

  PlanarDomain d = build_AR(R);
  d.id = "case2";
  d.simply_connected = true;
  d.slit_halfwidth = default_slit_halfwidth(R);
  const double tiny = std::pow(R, -jexp / 2.0);
  d.removed_disks.push_back({alpha, tiny});

  const double clearance = sep / 4.0;
  const double arc_step = std::min(sep / 4.0, R / 50.0);
  auto clear_of_witnesses = [&](const std::vector<Complex>& line) {
    return detail::point_polyline_distance(z1, line) > clearance &&
           detail::point_polyline_distance(z2, line) > clearance;
  };

  // Full radial cut through alpha (possibly after a circular detour) opens the annulus.
  {
    const double rho = std::abs(alpha);
    const double phi = std::arg(alpha);
    const double dphi = clearance / rho;
    bool placed = false;
    for (int k = 0; k <= static_cast<int>(kPi / dphi) && !placed; ++k) {
      for (int sign : {1, -1}) {
        if (k == 0 && sign < 0) continue;
        const double a = phi + sign * k * dphi;
        std::vector<Complex> cut = {std::polar(r_lo, a), std::polar(r_hi, a)};
        if (!clear_of_witnesses(cut)) continue;
        std::vector<Complex> arc;
        if (k > 0) {
          arc = arc_polyline(rho, phi, a, arc_step);
          if (!clear_of_witnesses(arc)) continue;
        }
        d.slits.push_back(cut);
        if (!arc.empty()) d.slits.push_back(arc);
        placed = true;
        break;
      }
    }
    if (!placed) throw Error(ErrorCode::SeparationViolated, "no admissible cut through alpha");
  }

  auto disjoint_from_existing = [&](const std::vector<Complex>& line) {
    for (const auto& s : d.slits)
      for (std::size_t i = 0; i + 1 < line.size(); ++i)
        if (detail::segment_polyline_distance(line[i], line[i + 1], s) <= 4.0 * d.slit_halfwidth)
          return false;
    for (std::size_t i = 0; i + 1 < line.size(); ++i)
      if (detail::point_segment_distance(alpha, line[i], line[i + 1]) <= tiny + 4.0 * d.slit_halfwidth)
        return false;
    return true;
  };

  for (Complex x : avoided) {
    if (!contains(d, x)) continue;  // already excluded by an earlier path
    const double rho = std::abs(x);
    const double phi = std::arg(x);
    const double nearer = (rho - r_lo) <= (r_hi - rho) ? r_lo : r_hi;
    const double farther = nearer == r_lo ? r_hi : r_lo;
    const double dphi = clearance / rho;
    const int detours = static_cast<int>(kPi / dphi);
    // Candidate 0: radial to the nearer boundary, 1: radial to the farther one,
    // then circular detours of growing length (alternating sides) followed by a radial run.
    auto candidate = [&](int idx) -> std::vector<Complex> {
      if (idx == 0) return {x, std::polar(nearer, phi)};
      if (idx == 1) return {x, std::polar(farther, phi)};
      const int k = (idx - 2) / 2 + 1;
      const int sign = (idx % 2 == 0) ? 1 : -1;
      const double a = phi + sign * k * dphi;
      auto path = arc_polyline(rho, phi, a, arc_step);
      path.push_back(std::polar(nearer, a));
      return path;
    };
    bool placed = false;
    for (int idx = 0; idx < 2 + 2 * detours && !placed; ++idx) {
      auto path = candidate(idx);
      if (!clear_of_witnesses(path) || !disjoint_from_existing(path)) continue;
      d.slits.push_back(std::move(path));
      placed = true;
    }
    if (!placed) throw Error(ErrorCode::SeparationViolated, "no admissible path for an avoided point");
  }

  if (!same_component(d, z1, z2))
    throw Error(ErrorCode::SeparationViolated, "witness points ended up in different components");
  return d;
}

}  // namespace etk
