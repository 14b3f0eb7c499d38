#include <boost/geometry.hpp>
#include <boost/geometry/geometries/point_xy.hpp>
#include <boost/geometry/geometries/polygon.hpp>
#include <boost/geometry/geometries/multi_polygon.hpp>

#include <cmath>
#include <deque>

#include "etk/error.hpp"
#include "etk/plane_domains.hpp"
#include "geometry.hpp"

namespace bg = boost::geometry;

namespace etk {

using detail::kPi;
using detail::kTwoPi;

namespace {

using Point = bg::model::d2::point_xy<double>;
using Polygon = bg::model::polygon<Point, /*clockwise=*/false, /*closed=*/true>;
using MultiPolygon = bg::model::multi_polygon<Polygon>;

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

int circle_points(double r, double h, int lo, int hi) {
  const double n = std::ceil(kTwoPi * r / h);
  return static_cast<int>(std::clamp(n, static_cast<double>(lo), static_cast<double>(hi)));
}

// Points along the arc from a0 to a1 (signed sweep), excluding the final point.
void append_arc(std::vector<Complex>& out, Complex c, double r, double a0, double a1, double h) {
  const int n = std::max(1, static_cast<int>(std::ceil(std::abs(a1 - a0) * r / h)));
  for (int k = 0; k < n; ++k) out.push_back(c + std::polar(r, a0 + (a1 - a0) * k / n));
}

void append_segment(std::vector<Complex>& out, Complex a, Complex b, double h) {
  const int n = std::max(1, static_cast<int>(std::ceil(std::abs(b - a) / h)));
  for (int k = 0; k < n; ++k) out.push_back(a + (b - a) * (static_cast<double>(k) / n));
}

std::vector<Contour> analytic_contours(const DomainBase& base, double h) {
  return std::visit(
      overloaded{
          [&](const Disk& d) {
            Contour c;
            append_arc(c.points, d.center, d.radius, 0.0, kTwoPi, h);
            return std::vector<Contour>{c};
          },
          [&](const Annulus& a) {
            Contour outer;
            append_arc(outer.points, {}, a.r_out, 0.0, kTwoPi, h);
            std::vector<Contour> out{outer};
            if (a.r_in > 0.0) {
              Contour inner;
              inner.orientation = -1;
              append_arc(inner.points, {}, a.r_in, 0.0, -kTwoPi, h);
              out.push_back(inner);
            }
            return out;
          },
          [&](const AnnularSector& s) {
            Contour c;
            const double a0 = s.theta_center - s.half_angle;
            const double a1 = s.theta_center + s.half_angle;
            append_arc(c.points, {}, s.r_out, a0, a1, h);
            if (s.r_in > 0.0) {
              append_segment(c.points, std::polar(s.r_out, a1), std::polar(s.r_in, a1), h);
              append_arc(c.points, {}, s.r_in, a1, a0, h);
              append_segment(c.points, std::polar(s.r_in, a0), std::polar(s.r_out, a0), h);
            } else {
              append_segment(c.points, std::polar(s.r_out, a1), Complex{}, h);
              append_segment(c.points, Complex{}, std::polar(s.r_out, a0), h);
            }
            return std::vector<Contour>{c};
          },
      },
      base);
}

Polygon ring_polygon(const std::vector<Complex>& pts) {
  Polygon p;
  for (auto z : pts) bg::append(p.outer(), Point(z.real(), z.imag()));
  bg::append(p.outer(), Point(pts.front().real(), pts.front().imag()));
  bg::correct(p);
  return p;
}

MultiPolygon base_polygon(const DomainBase& base, double h) {
  // Fine polygonization; densified to the requested edge length afterwards.
  auto contours = std::visit(
      overloaded{
          [&](const Disk& d) {
            return analytic_contours(base, kTwoPi * d.radius / circle_points(d.radius, h, 512, 20000));
          },
          [&](const Annulus& a) {
            return analytic_contours(base, kTwoPi * a.r_out / circle_points(a.r_out, h, 1024, 20000));
          },
          [&](const AnnularSector& s) {
            return analytic_contours(base, kTwoPi * s.r_out / circle_points(s.r_out, h, 1024, 20000));
          },
      },
      base);
  Polygon poly = ring_polygon(contours[0].points);
  if (contours.size() > 1) {
    Polygon::ring_type inner;
    for (auto z : contours[1].points) bg::append(inner, Point(z.real(), z.imag()));
    bg::append(inner, Point(contours[1].points.front().real(), contours[1].points.front().imag()));
    poly.inners().push_back(inner);
    bg::correct(poly);
  }
  MultiPolygon mp;
  mp.push_back(poly);
  return mp;
}

// Circumscribed polygon so the removed region covers the true closed disk.
Polygon disk_polygon(const Disk& d, double h) {
  const int n = circle_points(d.radius, h, 64, 4096);
  const double rr = d.radius / std::cos(kPi / n);
  std::vector<Complex> pts;
  for (int k = 0; k < n; ++k) pts.push_back(d.center + std::polar(rr, kTwoPi * k / n));
  return ring_polygon(pts);
}

Polygon segment_polygon(Complex a, Complex b, double hw) {
  Complex dir = b - a;
  const double len = std::abs(dir);
  dir = len > 0 ? dir / len : Complex{1.0, 0.0};
  const Complex nrm = dir * Complex{0.0, 1.0};
  const Complex a2 = a - dir * hw;
  const Complex b2 = b + dir * hw;
  return ring_polygon({a2 - nrm * hw, b2 - nrm * hw, b2 + nrm * hw, a2 + nrm * hw});
}

double base_inner_sagitta(const DomainBase& base, double h) {
  return std::visit(overloaded{
                        [](const Disk&) { return 0.0; },
                        [&](const Annulus& a) {
                          if (a.r_in <= 0) return 0.0;
                          const int n = circle_points(a.r_out, h, 1024, 20000);
                          const double chord = kTwoPi * a.r_out / n;
                          return chord * chord / (8.0 * a.r_in);
                        },
                        [&](const AnnularSector& s) {
                          if (s.r_in <= 0) return 0.0;
                          const int n = circle_points(s.r_out, h, 1024, 20000);
                          const double chord = kTwoPi * s.r_out / n;
                          return chord * chord / (8.0 * s.r_in);
                        },
                    },
                    base);
}

// Extend slit endpoints that end on another boundary piece so the boolean
// difference sees an overlap rather than a touching contact.
std::vector<Complex> extended_slit(const PlanarDomain& domain, std::size_t index, double ext) {
  std::vector<Complex> line = domain.slits[index];
  if (line.size() < 2) return line;
  const double hw = domain.slit_halfwidth;
  auto near_other = [&](Complex p) {
    PlanarDomain base_only{domain.base, {}, {}, 0.0, false, {}};
    if (boundary_distance(base_only, p) <= 2.0 * ext || !contains(base_only, p)) return true;
    for (const auto& d : domain.removed_disks)
      if (std::abs(std::abs(p - d.center) - d.radius) <= 2.0 * ext ||
          std::abs(p - d.center) <= d.radius)
        return true;
    for (std::size_t k = 0; k < domain.slits.size(); ++k)
      if (k != index && detail::point_polyline_distance(p, domain.slits[k]) <= 2.0 * hw + 2.0 * ext)
        return true;
    return false;
  };
  auto extend = [&](Complex p, Complex towards_out) {
    const double len = std::abs(towards_out);
    return len > 0 ? p + towards_out / len * ext : p;
  };
  if (near_other(line.front())) line.front() = extend(line.front(), line[0] - line[1]);
  const std::size_t n = line.size();
  if (near_other(line.back())) line.back() = extend(line.back(), line[n - 1] - line[n - 2]);
  return line;
}

void densify(std::vector<Complex>& pts, double h) {
  std::vector<Complex> out;
  out.reserve(pts.size());
  for (std::size_t i = 0; i < pts.size(); ++i) {
    const Complex a = pts[i];
    const Complex b = pts[(i + 1) % pts.size()];
    append_segment(out, a, b, h);
  }
  pts.swap(out);
}

std::vector<Complex> ring_points(const Polygon::ring_type& ring) {
  std::vector<Complex> pts;
  for (const auto& p : ring) {
    const Complex z{p.x(), p.y()};
    if (pts.empty() || pts.back() != z) pts.push_back(z);
  }
  if (pts.size() > 1 && pts.front() == pts.back()) pts.pop_back();
  return pts;
}

}  // namespace

std::vector<Contour> boundary_contour(const PlanarDomain& domain, double max_edge_length) {
  if (!(max_edge_length > 0.0))
    throw Error(ErrorCode::InvalidArgument, "max_edge_length must be > 0");
  validate(domain);
  if (domain.removed_disks.empty() && domain.slits.empty())
    return analytic_contours(domain.base, max_edge_length);

  const double h = max_edge_length;
  MultiPolygon region = base_polygon(domain.base, h);
  for (const auto& d : domain.removed_disks) {
    MultiPolygon next;
    bg::difference(region, disk_polygon(d, h), next);
    region.swap(next);
  }
  const double ext = 4.0 * domain.slit_halfwidth + 2.0 * base_inner_sagitta(domain.base, h);
  for (std::size_t s = 0; s < domain.slits.size(); ++s) {
    const auto line = extended_slit(domain, s, ext);
    for (std::size_t i = 0; i + 1 < line.size(); ++i) {
      MultiPolygon next;
      bg::difference(region, segment_polygon(line[i], line[i + 1], domain.slit_halfwidth), next);
      region.swap(next);
    }
    if (line.size() == 1) {
      MultiPolygon next;
      bg::difference(region, segment_polygon(line[0], line[0], domain.slit_halfwidth), next);
      region.swap(next);
    }
  }

  std::vector<Contour> out;
  for (const auto& poly : region) {
    if (bg::area(poly) <= 0.0) continue;
    Contour outer{ring_points(poly.outer()), 1};
    if (outer.points.size() < 3) continue;
    densify(outer.points, h);
    out.push_back(std::move(outer));
    for (const auto& inner : poly.inners()) {
      Contour hole{ring_points(inner), -1};
      if (hole.points.size() < 3) continue;
      densify(hole.points, h);
      out.push_back(std::move(hole));
    }
  }
  if (out.empty()) throw Error(ErrorCode::DegenerateDomain, "domain '" + domain.id + "' is empty");
  return out;
}

bool same_component(const PlanarDomain& domain, Complex z1, Complex z2, int cells_per_side) {
  if (!contains(domain, z1) || !contains(domain, z2)) return false;
  if (segment_inside(domain, z1, z2)) return true;
  const BoundingBox box = bounding_box(domain);
  const double w = box.hi.real() - box.lo.real();
  const double hgt = box.hi.imag() - box.lo.imag();
  const double step = std::max(w, hgt) / cells_per_side;
  const int nx = static_cast<int>(std::ceil(w / step)) + 1;
  const int ny = static_cast<int>(std::ceil(hgt / step)) + 1;
  auto center = [&](int i, int j) {
    return box.lo + Complex{(i + 0.5) * step, (j + 0.5) * step};
  };

  // Bounding boxes of the slits (inflated) to skip far-away exact tests.
  struct Box {
    double x0, y0, x1, y1;
  };
  std::vector<Box> slit_boxes;
  for (const auto& s : domain.slits) {
    Box b{1e300, 1e300, -1e300, -1e300};
    for (auto p : s) {
      b.x0 = std::min(b.x0, p.real());
      b.y0 = std::min(b.y0, p.imag());
      b.x1 = std::max(b.x1, p.real());
      b.y1 = std::max(b.y1, p.imag());
    }
    const double pad = 2.0 * step + domain.slit_halfwidth;
    slit_boxes.push_back({b.x0 - pad, b.y0 - pad, b.x1 + pad, b.y1 + pad});
  }
  auto edge_ok = [&](Complex a, Complex b) {
    for (const auto& d : domain.removed_disks)
      if (d.radius > 0.25 * step && detail::point_segment_distance(d.center, a, b) <= d.radius)
        return false;
    for (std::size_t k = 0; k < domain.slits.size(); ++k) {
      const auto& bx = slit_boxes[k];
      if (std::max(a.real(), b.real()) < bx.x0 || std::min(a.real(), b.real()) > bx.x1 ||
          std::max(a.imag(), b.imag()) < bx.y0 || std::min(a.imag(), b.imag()) > bx.y1)
        continue;
      if (detail::segment_polyline_distance(a, b, domain.slits[k]) <= domain.slit_halfwidth)
        return false;
    }
    return true;
  };

  std::vector<char> inside(static_cast<std::size_t>(nx) * ny, 0);
  for (int j = 0; j < ny; ++j)
    for (int i = 0; i < nx; ++i) inside[static_cast<std::size_t>(j) * nx + i] = contains(domain, center(i, j));

  // Seed cells: any inside cell reachable by a straight segment from the point.
  auto seeds_for = [&](Complex z) {
    std::vector<int> seeds;
    const int ci = static_cast<int>(std::floor((z.real() - box.lo.real()) / step));
    const int cj = static_cast<int>(std::floor((z.imag() - box.lo.imag()) / step));
    for (int r = 0; r <= 3 && seeds.empty(); ++r)
      for (int j = cj - r; j <= cj + r; ++j)
        for (int i = ci - r; i <= ci + r; ++i) {
          if (i < 0 || j < 0 || i >= nx || j >= ny) continue;
          if (!inside[static_cast<std::size_t>(j) * nx + i]) continue;
          if (segment_inside(domain, z, center(i, j))) seeds.push_back(j * nx + i);
        }
    return seeds;
  };
  const auto s1 = seeds_for(z1);
  const auto s2 = seeds_for(z2);
  if (s1.empty() || s2.empty()) return false;

  std::vector<char> seen(inside.size(), 0);
  std::deque<int> queue(s1.begin(), s1.end());
  for (int s : s1) seen[s] = 1;
  while (!queue.empty()) {
    const int c = queue.front();
    queue.pop_front();
    const int i = c % nx;
    const int j = c / nx;
    const int di[4] = {1, -1, 0, 0};
    const int dj[4] = {0, 0, 1, -1};
    for (int k = 0; k < 4; ++k) {
      const int ii = i + di[k];
      const int jj = j + dj[k];
      if (ii < 0 || jj < 0 || ii >= nx || jj >= ny) continue;
      const int n = jj * nx + ii;
      if (seen[n] || !inside[n]) continue;
      if (!edge_ok(center(i, j), center(ii, jj))) continue;
      seen[n] = 1;
      queue.push_back(n);
    }
  }
  for (int s : s2)
    if (seen[s]) return true;
  return false;
}

}  // namespace etk
