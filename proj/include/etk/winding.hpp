#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "etk/function_model.hpp"
#include "etk/plane_domains.hpp"

namespace etk {

struct PreimageCount {
  Complex target;
  std::string domain_id;
  int count = 0;
  double min_boundary_gap = 0.0;  // min over boundary samples of |f(z) - target|
  int refinement_depth = 0;
  long samples = 0;
};

/// Argument increments of a closed polyline about w, summed and divided by 2 pi.
/// OnTarget if a point equals w; NeedsRefinement if a step turns by more than pi/2.
int winding_number(const std::vector<Complex>& image_points, Complex w);

struct WindingOptions {
  /// Initial boundary spacing as a fraction of the smaller of the outer radius and half the bounding box.
  double initial_spacing = 2.0 * 3.141592653589793 / 1024.0;
  double max_arg_step = 1.5707963267948966;  // pi/2
  double max_log_modulus_step = 1.0;
  long edge_budget = 1L << 20;                // per contour
  int max_depth = 40;
};

/// Any holomorphic map given through a logarithm of its value (as log_evaluate does).
using LogMap = std::function<Complex(Complex)>;

/// Boundary of a domain with the map pre-sampled finely enough that log g turns slowly
/// along every edge. Reused across targets; read-only after construction.
class BoundarySampler {
 public:
  BoundarySampler(LogMap log_map, const PlanarDomain& domain, const WindingOptions& options = {});
  BoundarySampler(const FunctionSpec& spec, const PlanarDomain& domain, const WindingOptions& options = {});

  /// Zeros of g - w inside the domain, with multiplicity. BoundaryHit, RefinementBudgetExceeded.
  PreimageCount count(Complex w) const;

  struct Sample {
    Complex z;
    Complex log_value;
  };
  const std::vector<std::vector<Sample>>& contours() const noexcept { return contours_; }
  const std::string& domain_id() const noexcept { return domain_id_; }
  const LogMap& log_map() const noexcept { return log_map_; }
  const WindingOptions& options() const noexcept { return options_; }
  int base_depth() const noexcept { return base_depth_; }

 private:
  void build(const PlanarDomain& domain);

  LogMap log_map_;
  WindingOptions options_;
  std::string domain_id_;
  std::vector<std::vector<Sample>> contours_;
  int base_depth_ = 0;
};

PreimageCount count_preimages(const FunctionSpec& spec, const PlanarDomain& domain, Complex w,
                              const WindingOptions& options = {});

/// Number of critical points (zeros of f') in the domain.
PreimageCount count_critical_points(const FunctionSpec& spec, const PlanarDomain& domain,
                                    const WindingOptions& options = {});

struct PreimageCluster {
  Complex center;
  double radius = 0.0;
  int count = 0;  // zeros of g - w in Delta(center, radius)
};

struct LocateOptions {
  double min_radius = 0.0;  // stop subdividing below this disk radius
  long budget = 1L << 16;   // disk counts
  WindingOptions winding;
};

/// Zeros of g - w inside the square |Re(z - c)|, |Im(z - c)| <= half_side, found by
/// quadtree subdivision with winding counts on circumscribed disks. Overlapping leaves are
/// merged into clusters. SubdivisionBudgetExceeded.
std::vector<PreimageCluster> locate_preimages(const LogMap& log_map, Complex c, double half_side, Complex w,
                                              const LocateOptions& options);
std::vector<PreimageCluster> locate_preimages(const FunctionSpec& spec, Complex c, double half_side, Complex w,
                                              const LocateOptions& options);

struct RoucheCertificate {
  int count = 0;
  double r = 0.0;
  Complex xi;
  double min_sampled_modulus = 0.0;
  double certified_lower = 0.0;  // sampled minimum minus the derivative slack
  double margin = 0.0;           // certified_lower - r
  long edges = 0;
  std::string method;
};

/// Checks |f| >= r on the boundary (sampled, with a derivative slack per edge) and returns the
/// count of preimages of xi, which then holds for every w with |w| < r. MarginTooSmall.
RoucheCertificate rouche_transfer(const FunctionSpec& spec, const PlanarDomain& domain, double r,
                                  Complex xi, const WindingOptions& options = {});

struct CoveringGridPoint {
  long index = 0;
  Complex w;
  std::optional<int> count;  // empty when the boundary hit w (skipped)
};

struct CoveringGridReport {
  std::string source_id;
  std::string target_id;
  double grid_step = 0.0;
  int N = 0;
  std::vector<CoveringGridPoint> points;
  std::optional<int> min_count;
  std::vector<long> failing;  // grid indices with count < N, ascending
  std::vector<long> skipped;
  double fraction_at_least_N = 0.0;  // over evaluated (non-skipped) points
};

/// Counts preimages in source for every grid point lo + step*(i, j) of the target interior.
CoveringGridReport covering_report(const FunctionSpec& spec, const PlanarDomain& source,
                                   const PlanarDomain& target, double grid_step, int N,
                                   unsigned threads = 1, const WindingOptions& options = {});

nlohmann::json to_json(const PreimageCount& c);
nlohmann::json to_json(const RoucheCertificate& c);
nlohmann::json to_json(const CoveringGridReport& r);
std::string covering_report_csv(const CoveringGridReport& r);
std::string covering_report_svg(const CoveringGridReport& r);

}  // namespace etk
