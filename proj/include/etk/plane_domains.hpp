#pragma once

#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

#include "etk/function_model.hpp"

namespace etk {

struct Disk {
  Complex center;
  double radius = 0.0;
};

/// {r_in < |z| < r_out}
struct Annulus {
  double r_in = 0.0;
  double r_out = 0.0;
};

/// {r_in < |z| < r_out, |Arg z - theta_center| < half_angle}
struct AnnularSector {
  double r_in = 0.0;
  double r_out = 0.0;
  double theta_center = 0.0;
  double half_angle = 0.0;
};

using DomainBase = std::variant<Disk, Annulus, AnnularSector>;

/// Open base region minus closed disks minus closed thickened polylines.
struct PlanarDomain {
  DomainBase base;
  std::vector<Disk> removed_disks;
  std::vector<std::vector<Complex>> slits;
  double slit_halfwidth = 0.0;
  bool simply_connected = false;
  std::string id;
};

struct Contour {
  std::vector<Complex> points;  // closed implicitly: last connects to first
  int orientation = 1;          // +1 counterclockwise, -1 clockwise
};

struct BoundingBox {
  Complex lo;
  Complex hi;
};

/// Throws InvalidArgument when a base invariant fails (r_in < r_out, half angle in (0, pi)).
void validate(const PlanarDomain& domain);

PlanarDomain make_disk(Complex center, double radius);
PlanarDomain make_annulus(double r_in, double r_out);
PlanarDomain make_sector(double r_in, double r_out, double theta_center, double half_angle);

/// {R/2 < |z| < 2R}
PlanarDomain build_AR(double R);
/// {R/2 + 1/9 < |z| < 2R - 1/9, |Arg z - theta| < half_angle}; half_angle defaults to 3 pi / 4.
PlanarDomain build_DR(double R, double theta, double half_angle = 0.0);
/// {2R/3 < |z| < 3R/2, |Arg z - theta| < 2 pi / 3}
PlanarDomain build_CR(double R, double theta);

double default_slit_halfwidth(double R);

bool contains(const PlanarDomain& domain, Complex z);
/// Euclidean distance to the boundary; exact for interior points.
double boundary_distance(const PlanarDomain& domain, Complex z);
BoundingBox bounding_box(const PlanarDomain& domain);
/// Largest |z| over the closure.
double outer_radius(const PlanarDomain& domain);

/// True when the straight segment a-b stays inside the domain (sampled against the
/// base, exact against removed disks and slits).
bool segment_inside(const PlanarDomain& domain, Complex a, Complex b);

/// Oriented boundary polylines: outer boundary counterclockwise, holes clockwise.
/// Throws DegenerateDomain when the region is empty.
std::vector<Contour> boundary_contour(const PlanarDomain& domain, double max_edge_length);

/// Coarse rasterized connectivity test between two member points; edges between
/// raster cells may not cross slits or removed disks.
bool same_component(const PlanarDomain& domain, Complex z1, Complex z2, int cells_per_side = 120);

enum class Case1Shape { WholeDR, TubeAroundCR, SlitRadialOut, SlitRadialIn, SlitCircularCcw,
                        SlitCircularCw, DiskTouchesBoundary };
const char* to_string(Case1Shape shape);

struct Case1Domain {
  PlanarDomain domain;
  Case1Shape shape = Case1Shape::WholeDR;
};

/// Simply connected D in D_R \ Delta(alpha, R^(-j/2)) containing z1, z2, following the
/// three-way split on how Delta(alpha, R/20) meets D_R and C_R.
Case1Domain build_case1_domain(Complex alpha, double R, double theta, double jexp, Complex z1,
                               Complex z2);

/// Simply connected D in A_R containing z1, z2, avoiding the listed points and the disk
/// Delta(alpha, R^(-jexp/2)). eps is dimensionless: separations are measured in units of R.
PlanarDomain build_case2_domain(Complex alpha, const std::vector<Complex>& avoided, double eps,
                                double R, double jexp, Complex z1, Complex z2);

nlohmann::json to_json(const PlanarDomain& domain);
PlanarDomain domain_from_json(const nlohmann::json& j);

std::string contours_to_csv(const std::vector<Contour>& contours);
/// SVG path data ("M x y L ... Z") in plane coordinates; y is not flipped here.
std::string contour_svg_path(const Contour& contour);

}  // namespace etk
