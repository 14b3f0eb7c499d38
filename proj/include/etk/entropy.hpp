#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "etk/covering.hpp"
#include "etk/function_model.hpp"
#include "etk/plane_domains.hpp"

namespace etk {

/// The compact set X: a circle (analytic membership), a point cloud (membership within a
/// tolerance of some cloud point) or the closure of a planar region (seeded on a grid).
struct CompactSet {
  enum class Kind { Circle, Cloud, Region };
  Kind kind = Kind::Circle;
  std::string id;
  // circle
  Complex center;
  double radius = 1.0;
  long circle_seeds = 1L << 17;
  // cloud
  std::vector<Complex> cloud;
  // region
  PlanarDomain region;
  double seed_step = 0.0;
  /// Membership slack: | |z - c| - r | for circles, nearest-point distance for clouds.
  double tolerance = 1e-9;

  static CompactSet circle(Complex c, double r, long seeds = 1L << 17, double tol = 1e-9);
  static CompactSet points(std::vector<Complex> cloud, double tol, std::string id = "cloud");
  static CompactSet closure(const PlanarDomain& region, double seed_step);
};

nlohmann::json to_json(const CompactSet& x);
CompactSet compact_set_from_json(const nlohmann::json& j);

struct SeparatedSetOptions {
  unsigned threads = 1;
};

/// Greedy (n, delta)-separated packing over the seeds of X in seed order; returns the number kept.
long separated_set_lower(const FunctionSpec& spec, const CompactSet& X, int n, double delta,
                         const SeparatedSetOptions& options = {});

struct EntropyEstimate {
  std::string compact_set_id;
  std::vector<int> n_values;
  std::vector<double> deltas;  // ascending
  /// K_lower(n, delta): greedy count made nonincreasing in delta by a running max over delta' >= delta.
  std::map<std::pair<int, double>, long> table;
  std::map<std::pair<int, double>, long> raw;
  /// n -> (1/n) log K_lower(n, smallest delta)
  std::vector<std::pair<int, double>> curve;
  /// n -> max over delta of (log K_lower(n, delta) - log K_lower(1, delta)) / (n - 1), n >= 2
  std::vector<std::pair<int, double>> growth;
  double h_lower = 0.0;  // max of growth, clipped at 0
  int best_n = 0;
  double best_delta = 0.0;
};

/// InvalidArgument unless n_max >= 2 and every delta > 0.
EntropyEstimate entropy_lower_curve(const FunctionSpec& spec, const CompactSet& X, int n_max,
                                    std::vector<double> deltas, const SeparatedSetOptions& options = {});

struct CriticalPoint {
  Complex location;
  int local_degree = 2;
  bool periodic = false;
  int period = 0;  // 0 when not periodic within the budget
};

struct CriticalData {
  std::vector<CriticalPoint> critical_points;
  long degree_product = 1;  // over the non-periodic ones
};

struct CriticalOptions {
  int period_budget = 64;
  double return_tol = 1e-9;  // relative to 1 + |c|
};

/// Zeros of f' in V with local degrees and a periodicity test.
CriticalData critical_data(const FunctionSpec& spec, const PlanarDomain& V, const CriticalOptions& options = {});

/// Preimages of y in V with multiplicities: exact branches for ExpAffine, polynomial roots
/// (Aberth iteration) for polynomial, Taylor and product models.
std::vector<PreimageCluster> solve_preimages(const FunctionSpec& spec, const PlanarDomain& V, Complex y);

struct BackwardOrbitParams {
  std::optional<Complex> base_point;  // default: first admissible Halton point of V'
  int m = 1;                          // depth per block
  int k = 1;                          // blocks
  double epsilon = 0.0;               // 0: half the smallest gap between depth-1 preimages
  double critical_shield = 0.0;       // 0: halving search from R/10
  std::vector<Disk> superattracting_exclusion;
  int branch_cap = 0;                 // children kept per node; 0 means the certificate's N
  long node_budget = 1L << 22;
  int consistency_depth = 1;          // nodes at depth <= this are cross-checked by winding counts
  unsigned threads = 1;
};

struct BackwardOrbitResult {
  std::uint64_t count = 0;  // epsilon-separated backward orbits of length k m
  Complex base_point;
  double epsilon = 0.0;
  double critical_shield = 0.0;
  long degree_product = 1;
  int N = 0;
  double floor = 0.0;       // (N^m / degree_product)^k
  bool meets_floor = false;
  long nodes = 0;
  long checked_nodes = 0;
  long consistency_mismatches = 0;
  std::vector<Disk> exclusion;
};

/// EnumerationBudgetExceeded; PreconditionViolated if the shield cannot be verified.
BackwardOrbitResult backward_orbit_separated_count(const FunctionSpec& spec, const CoveringCertificate& cert,
                                                   const BackwardOrbitParams& params);

struct EntropyBound {
  double measured = 0.0;  // (1 / (k m)) log count
  double floor = 0.0;     // log N - (1/m) log degree_product
  BackwardOrbitResult orbits;
};

EntropyBound certificate_entropy_bound(const FunctionSpec& spec, const CoveringCertificate& cert,
                                       const BackwardOrbitParams& params);

/// log N - (1/m) log degree_product
double entropy_floor(int N, long degree_product, int m);

nlohmann::json to_json(const EntropyEstimate& e);
std::string entropy_csv(const EntropyEstimate& e);
std::string entropy_curve_svg(const EntropyEstimate& e);
nlohmann::json to_json(const CriticalData& c);
nlohmann::json to_json(const BackwardOrbitResult& r);
nlohmann::json to_json(const EntropyBound& b);

}  // namespace etk
