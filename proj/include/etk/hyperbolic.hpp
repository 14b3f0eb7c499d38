#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "etk/plane_domains.hpp"

namespace etk {

/// Fixed constants. Distances use curvature -4: the unit disk has density 1/(1 - |z|^2).
struct HyperbolicConfig {
  static constexpr int curvature_normalization = -4;
  /// Gamma(1/4)^4 / (4 pi^2)
  static double K_hempel();
  /// e^5; the density lower bound below is only claimed beyond this modulus.
  static double validity_threshold();
};

struct DiameterEstimate {
  std::string domain_id;
  std::string subset_id;
  double upper_bound = 0.0;
  std::vector<Complex> path_witness;
};

/// Lower bound 1/(2|z| ln|z|) for the density of C \ {0, 1}; BelowThreshold if |z| <= e^5.
double omega01_density_lower(Complex z);

/// (1/2)(ln ln s2 - ln ln s1): lower bound for the distance between |z| = s1 and |z| = s2.
double radial_distance_lower(double s1, double s2);

/// exp(5 e^d). radial_distance_lower(e^5, k(d)) = d/2.
double k_constant(double d);

/// |alpha|^((e^d - 1)/e^d) * M^(1/e^d); HypothesisFailed unless M > k(d) |alpha|.
double lemma2_floor(double alpha_mod, double M, double d);

struct AnnulusAN {
  double r_lower = 0.0;
  double r_upper = 0.0;
  Complex center;
  bool empty = false;  // r_lower >= r_upper
};

/// Radii of the covered annulus A_N, optionally recentred at alpha.
/// Requires 0 <= m < M, N >= 1, d > 0 (e^d = 1 makes the lower radius undefined).
AnnulusAN annulus_AN(double m, double M, double d, int N, std::optional<Complex> alpha = std::nullopt);

struct QuasiHyperbolicOptions {
  int grid = 96;            // nodes per side of the bounding box at the first attempt
  int max_grid = 768;       // resolution is doubled up to this when no grid path exists
  int smoothing_window = 48;
  double rel_tol = 1e-9;    // adaptive quadrature tolerance along the final path
};

/// Upper bound for the hyperbolic distance between z1 and z2 in a simply connected domain:
/// the integral of 1/boundary_distance along the cheapest grid path found, then shortened
/// by straight shortcuts. NotSimplyConnected, Disconnected.
DiameterEstimate quasihyperbolic_upper(const PlanarDomain& domain, Complex z1, Complex z2,
                                       const QuasiHyperbolicOptions& options = {});

/// Integral of 1/boundary_distance along a polyline (adaptive Simpson per segment).
double quasihyperbolic_length(const PlanarDomain& domain, const std::vector<Complex>& path,
                              double rel_tol = 1e-9);

enum class DScenario { Case1, Case2 };

struct MeasureDParams {
  std::uint64_t seed = 1;
  double jexp = 6.0;
  double eps = 1.0 / 48.0;  // case 2 separation, in units of R
  int avoided = 0;          // case 2: number of avoided points
  unsigned threads = 1;
  QuasiHyperbolicOptions qh;
};

struct MeasureDResult {
  double d_half = 0.0;                  // max over trials
  std::vector<double> per_trial;
  int worst_trial = -1;
  DiameterEstimate worst;
  PlanarDomain worst_domain;
};

/// Empirical d/2: the largest quasihyperbolic upper bound between the witness points over
/// random admissible configurations. Trial i draws from stream_seed(seed, i), so the result
/// does not depend on the thread count.
MeasureDResult measure_d_constant(double R, int trials, DScenario scenario, const MeasureDParams& params);

nlohmann::json to_json(const DiameterEstimate& e);

}  // namespace etk
