#include "etk/plane_domains.hpp"

#include <cmath>
#include <iomanip>
#include <limits>
#include <sstream>

#include "etk/error.hpp"
#include "geometry.hpp"

namespace etk {

using detail::kPi;
using detail::wrap_angle;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

std::pair<Complex, Complex> sector_edge(const AnnularSector& s, double sign) {
  const double a = s.theta_center + sign * s.half_angle;
  return {std::polar(s.r_in, a), std::polar(s.r_out, a)};
}

bool base_contains(const DomainBase& base, Complex z) {
  return std::visit(overloaded{
                        [&](const Disk& d) { return std::abs(z - d.center) < d.radius; },
                        [&](const Annulus& a) {
                          const double r = std::abs(z);
                          return r > a.r_in && r < a.r_out;
                        },
                        [&](const AnnularSector& s) {
                          const double r = std::abs(z);
                          if (!(r > s.r_in && r < s.r_out)) return false;
                          return std::abs(wrap_angle(std::arg(z) - s.theta_center)) < s.half_angle;
                        },
                    },
                    base);
}

double base_distance(const DomainBase& base, Complex z) {
  return std::visit(
      overloaded{
          [&](const Disk& d) { return std::abs(d.radius - std::abs(z - d.center)); },
          [&](const Annulus& a) {
            const double r = std::abs(z);
            return std::min(std::abs(r - a.r_in), std::abs(r - a.r_out));
          },
          [&](const AnnularSector& s) {
            const auto [a0, a1] = sector_edge(s, -1.0);
            const auto [b0, b1] = sector_edge(s, +1.0);
            double d = std::min(detail::point_segment_distance(z, a0, a1),
                                detail::point_segment_distance(z, b0, b1));
            if (std::abs(wrap_angle(std::arg(z) - s.theta_center)) < s.half_angle) {
              const double r = std::abs(z);
              d = std::min({d, std::abs(r - s.r_in), std::abs(r - s.r_out)});
            }
            return d;
          },
      },
      base);
}

}  // namespace

void validate(const PlanarDomain& domain) {
  std::visit(overloaded{
                 [](const Disk& d) {
                   if (!(d.radius > 0.0))
                     throw Error(ErrorCode::InvalidArgument, "disk radius must be > 0");
                 },
                 [](const Annulus& a) {
                   if (!(a.r_in >= 0.0 && a.r_in < a.r_out))
                     throw Error(ErrorCode::InvalidArgument, "annulus needs 0 <= r_in < r_out");
                 },
                 [](const AnnularSector& s) {
                   if (!(s.r_in >= 0.0 && s.r_in < s.r_out))
                     throw Error(ErrorCode::InvalidArgument, "sector needs 0 <= r_in < r_out");
                   if (!(s.half_angle > 0.0 && s.half_angle < kPi))
                     throw Error(ErrorCode::InvalidArgument, "sector half_angle must lie in (0, pi)");
                 },
             },
             domain.base);
  for (const auto& d : domain.removed_disks)
    if (!(d.radius > 0.0)) throw Error(ErrorCode::InvalidArgument, "removed disk radius <= 0");
  if (!domain.slits.empty() && !(domain.slit_halfwidth > 0.0))
    throw Error(ErrorCode::InvalidArgument, "slit_halfwidth must be > 0");
  for (const auto& s : domain.slits)
    if (s.empty()) throw Error(ErrorCode::InvalidArgument, "empty slit polyline");
}

PlanarDomain make_disk(Complex center, double radius) {
  PlanarDomain d{Disk{center, radius}, {}, {}, 0.0, true, "disk"};
  validate(d);
  return d;
}

PlanarDomain make_annulus(double r_in, double r_out) {
  PlanarDomain d{Annulus{r_in, r_out}, {}, {}, 0.0, false, "annulus"};
  validate(d);
  return d;
}

PlanarDomain make_sector(double r_in, double r_out, double theta_center, double half_angle) {
  PlanarDomain d{AnnularSector{r_in, r_out, theta_center, half_angle}, {}, {}, 0.0, true, "sector"};
  validate(d);
  return d;
}

PlanarDomain build_AR(double R) {
  PlanarDomain d = make_annulus(R / 2.0, 2.0 * R);
  d.id = "A_R";
  return d;
}

PlanarDomain build_DR(double R, double theta, double half_angle) {
  if (half_angle <= 0.0) half_angle = 3.0 * kPi / 4.0;
  PlanarDomain d = make_sector(R / 2.0 + 1.0 / 9.0, 2.0 * R - 1.0 / 9.0, theta, half_angle);
  d.id = "D_R";
  return d;
}

PlanarDomain build_CR(double R, double theta) {
  PlanarDomain d = make_sector(2.0 * R / 3.0, 1.5 * R, theta, 2.0 * kPi / 3.0);
  d.id = "C_R";
  return d;
}

double default_slit_halfwidth(double R) { return R * 1e-6; }

bool contains(const PlanarDomain& domain, Complex z) {
  if (!base_contains(domain.base, z)) return false;
  for (const auto& d : domain.removed_disks)
    if (std::abs(z - d.center) <= d.radius) return false;
  for (const auto& s : domain.slits)
    if (detail::point_polyline_distance(z, s) <= domain.slit_halfwidth) return false;
  return true;
}

double boundary_distance(const PlanarDomain& domain, Complex z) {
  double d = base_distance(domain.base, z);
  for (const auto& disk : domain.removed_disks)
    d = std::min(d, std::abs(std::abs(z - disk.center) - disk.radius));
  for (const auto& s : domain.slits)
    d = std::min(d, std::abs(detail::point_polyline_distance(z, s) - domain.slit_halfwidth));
  return d;
}

BoundingBox bounding_box(const PlanarDomain& domain) {
  return std::visit(
      overloaded{
          [](const Disk& d) {
            const Complex r{d.radius, d.radius};
            return BoundingBox{d.center - r, d.center + r};
          },
          [](const Annulus& a) {
            return BoundingBox{Complex{-a.r_out, -a.r_out}, Complex{a.r_out, a.r_out}};
          },
          [](const AnnularSector& s) {
            std::vector<Complex> pts;
            for (double sign : {-1.0, 1.0}) {
              const auto [p, q] = sector_edge(s, sign);
              pts.push_back(p);
              pts.push_back(q);
            }
            for (int k = 0; k < 4; ++k) {
              const double a = k * kPi / 2.0;
              if (std::abs(wrap_angle(a - s.theta_center)) < s.half_angle)
                pts.push_back(std::polar(s.r_out, a));
            }
            double x0 = kInf, y0 = kInf, x1 = -kInf, y1 = -kInf;
            for (auto p : pts) {
              x0 = std::min(x0, p.real());
              y0 = std::min(y0, p.imag());
              x1 = std::max(x1, p.real());
              y1 = std::max(y1, p.imag());
            }
            return BoundingBox{{x0, y0}, {x1, y1}};
          },
      },
      domain.base);
}

double outer_radius(const PlanarDomain& domain) {
  return std::visit(overloaded{
                        [](const Disk& d) { return std::abs(d.center) + d.radius; },
                        [](const Annulus& a) { return a.r_out; },
                        [](const AnnularSector& s) { return s.r_out; },
                    },
                    domain.base);
}

bool segment_inside(const PlanarDomain& domain, Complex a, Complex b) {
  if (!contains(domain, a) || !contains(domain, b)) return false;
  for (const auto& d : domain.removed_disks)
    if (detail::point_segment_distance(d.center, a, b) <= d.radius) return false;
  for (const auto& s : domain.slits)
    if (detail::segment_polyline_distance(a, b, s) <= domain.slit_halfwidth) return false;
  return std::visit(overloaded{
                        [](const Disk&) { return true; },
                        [&](const Annulus& an) {
                          return detail::point_segment_distance(Complex{}, a, b) > an.r_in;
                        },
                        [&](const AnnularSector& s) {
                          if (detail::point_segment_distance(Complex{}, a, b) <= s.r_in)
                            return false;
                          for (double sign : {-1.0, 1.0}) {
                            const auto [p, q] = sector_edge(s, sign);
                            if (detail::segment_segment_distance(a, b, p, q) == 0.0) return false;
                          }
                          return true;
                        },
                    },
                    domain.base);
}

const char* to_string(Case1Shape shape) {
  switch (shape) {
    case Case1Shape::WholeDR: return "whole_DR";
    case Case1Shape::TubeAroundCR: return "tube_around_CR";
    case Case1Shape::SlitRadialOut: return "slit_radial_out";
    case Case1Shape::SlitRadialIn: return "slit_radial_in";
    case Case1Shape::SlitCircularCcw: return "slit_circular_ccw";
    case Case1Shape::SlitCircularCw: return "slit_circular_cw";
    case Case1Shape::DiskTouchesBoundary: return "disk_touches_boundary";
  }
  return "unknown";
}

nlohmann::json to_json(const PlanarDomain& domain) {
  nlohmann::json j;
  j["id"] = domain.id;
  j["base"] = std::visit(overloaded{
                             [](const Disk& d) {
                               return nlohmann::json{{"kind", "disk"},
                                                     {"center", complex_to_json(d.center)},
                                                     {"radius", d.radius}};
                             },
                             [](const Annulus& a) {
                               return nlohmann::json{
                                   {"kind", "annulus"}, {"r_in", a.r_in}, {"r_out", a.r_out}};
                             },
                             [](const AnnularSector& s) {
                               return nlohmann::json{{"kind", "sector"},
                                                     {"r_in", s.r_in},
                                                     {"r_out", s.r_out},
                                                     {"theta_center", s.theta_center},
                                                     {"half_angle", s.half_angle}};
                             },
                         },
                         domain.base);
  j["removed_disks"] = nlohmann::json::array();
  for (const auto& d : domain.removed_disks)
    j["removed_disks"].push_back({{"center", complex_to_json(d.center)}, {"radius", d.radius}});
  j["slits"] = nlohmann::json::array();
  for (const auto& s : domain.slits) {
    nlohmann::json line = nlohmann::json::array();
    for (auto p : s) line.push_back(complex_to_json(p));
    j["slits"].push_back(line);
  }
  j["slit_halfwidth"] = domain.slit_halfwidth;
  j["simply_connected"] = domain.simply_connected;
  return j;
}

PlanarDomain domain_from_json(const nlohmann::json& j) {
  try {
    PlanarDomain d;
    const auto& b = j.at("base");
    const std::string kind = b.at("kind").get<std::string>();
    if (kind == "disk")
      d.base = Disk{complex_from_json(b.at("center")), b.at("radius").get<double>()};
    else if (kind == "annulus")
      d.base = Annulus{b.at("r_in").get<double>(), b.at("r_out").get<double>()};
    else if (kind == "sector")
      d.base = AnnularSector{b.at("r_in").get<double>(), b.at("r_out").get<double>(),
                             b.at("theta_center").get<double>(), b.at("half_angle").get<double>()};
    else
      throw Error(ErrorCode::ParseError, "unknown domain base kind '" + kind + "'");
    for (const auto& e : j.value("removed_disks", nlohmann::json::array()))
      d.removed_disks.push_back(Disk{complex_from_json(e.at("center")), e.at("radius").get<double>()});
    for (const auto& s : j.value("slits", nlohmann::json::array())) {
      std::vector<Complex> line;
      for (const auto& p : s) line.push_back(complex_from_json(p));
      d.slits.push_back(std::move(line));
    }
    d.slit_halfwidth = j.value("slit_halfwidth", 0.0);
    d.simply_connected = j.value("simply_connected", false);
    d.id = j.value("id", std::string{});
    validate(d);
    return d;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::ParseError, std::string("domain JSON: ") + e.what());
  }
}

std::string contours_to_csv(const std::vector<Contour>& contours) {
  std::ostringstream os;
  os << std::setprecision(17);
  os << "contour,orientation,index,x,y\n";
  for (std::size_t c = 0; c < contours.size(); ++c)
    for (std::size_t i = 0; i < contours[c].points.size(); ++i)
      os << c << ',' << contours[c].orientation << ',' << i << ',' << contours[c].points[i].real()
         << ',' << contours[c].points[i].imag() << '\n';
  return os.str();
}

std::string contour_svg_path(const Contour& contour) {
  std::ostringstream os;
  os << std::setprecision(10);
  for (std::size_t i = 0; i < contour.points.size(); ++i)
    os << (i == 0 ? "M" : " L") << contour.points[i].real() << ' ' << contour.points[i].imag();
  os << " Z";
  return os.str();
}

}  // namespace etk
