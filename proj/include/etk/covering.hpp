#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "etk/function_model.hpp"
#include "etk/hyperbolic.hpp"
#include "etk/plane_domains.hpp"
#include "etk/winding.hpp"

namespace etk {

struct CoveringOptions {
  /// Working d (the hyperbolic diameter constant). 0 means: measure it with measure_d_constant.
  double d = 0.0;
  int d_trials = 12;
  std::uint64_t seed = 0;
  /// When false the dichotomy hypotheses are evaluated and recorded but do not gate the search;
  /// the grid certificates carry the evidence.
  bool enforce_hypotheses = false;
  /// Advisory j: largest integer with M(R) > R^j, clipped to j_max, rejected below j_min.
  int j_min = 5;
  int j_max = 5;
  double scan_step = 1.0 / 12.0;       // A_R scans and certificates, in units of R
  double sublevel_step = 1.0 / 200.0;  // rasterization of W, in units of R
  int theta_samples = 720;
  double extra_half_angle = 0.39269908169872414;  // pi/8 widening of D_R, used once
  unsigned threads = 1;
  WindingOptions winding;
  CircleScanOptions circle;
  QuasiHyperbolicOptions qh;
};

struct HypothesisReport {
  double R = 0.0;
  int j = 0;
  int N = 0;
  double d = 0.0;
  double log_k = 0.0;
  bool first = false;   // |M - 2R| / k^N > 4R
  bool second = false;  // ((m + 2R)^(e^d) / |M - 2R|)^(1/(e^d - 1)) < R^(-j/2)
  bool third = false;   // k^N < R^(j/2)
  bool passed = false;
  /// ln of the smallest R (same j, N, d, with m = 3R and M = R^j) at which all three hold,
  /// from the leading-order inequalities; +inf if none.
  double log_threshold_R = 0.0;
};

/// Both displayed inequalities plus k^N < R^(j/2), all in log space. log_M = ln M.
/// PreconditionViolated unless 0 <= m < M and R > 1, N >= 1, d > 0.
HypothesisReport check_dichotomy_hypotheses_log(double m, double log_M, double R, int j, int N, double d);
bool check_dichotomy_hypotheses(double m, double M, double R, int j, int N, double d);

struct Witnesses {
  double R = 0.0;
  int j = 0;
  Complex w_M;
  double log_M = 0.0;
  Complex w_m;
  double m = 0.0;
  double theta = 0.0;
  /// Separation goals: two near-maximal points (>= 0.9 M) at least R/10 apart and from the edge of C_R.
  bool separation_goal_met = false;
  Complex second_max;
};

/// Witnesses on |z| = R for a given j (>= 1). nullopt is the NotFound value.
std::optional<Witnesses> find_witnesses(const FunctionSpec& spec, double R, int j, const CoveringOptions& options = {});

/// j per the options rule, or nullopt when M(R) <= R^j_min.
std::optional<int> choose_j(const FunctionSpec& spec, double R, const CoveringOptions& options = {});

struct DichotomyOutcome {
  double R = 0.0;
  double theta = 0.0;
  int j = 0;
  double half_angle = 0.0;
  bool covers_fully = false;
  Complex alpha;
  int verified_N = 0;
  double excluded_radius = 0.0;
  CoveringGridReport scan;                    // counts in D_R over the A_R grid
  std::optional<CoveringGridReport> cover;    // N-fold check of A_R minus the excluded disk
};

/// PreconditionViolated if the hypotheses were not evaluated for (R, j, N) or, when enforced,
/// failed. Inconclusive when an omitted-value candidate cannot be confirmed.
DichotomyOutcome run_dichotomy(const FunctionSpec& spec, double R, double theta, int j, int N,
                               const HypothesisReport& hypotheses, const CoveringOptions& options = {},
                               double half_angle = 0.0);

enum class CaseTag { I, IIa, IIb };
const char* to_string(CaseTag tag);

struct CoveringCertificate {
  PlanarDomain V;
  int N = 0;
  CaseTag case_tag = CaseTag::IIb;
  double R = 0.0;
  double R_bound = 0.0;  // V lies in Delta(0, R_bound)
  int j = 0;
  double theta = 0.0;
  Complex w_m, w_M;
  double m = 0.0;
  double log_M = 0.0;
  std::optional<Complex> alpha;
  double excluded_radius = 0.0;
  std::string construction;  // which branch produced V
  CoveringGridReport grid_report;            // coarse
  CoveringGridReport self_inclusion_evidence;  // refined (half step)
  std::optional<RoucheCertificate> rouche;
  std::optional<DiameterEstimate> diameter;
  double d = 0.0;
};

struct Case1Result {
  std::optional<CoveringCertificate> certificate;
  bool escalate = false;  // Delta(alpha, R/20) reaches the edge of D_R: widen once and retry
  bool non_recurrent = false;
  std::string note;
};

/// CertificationFailed with the failing constraint named.
Case1Result case1_search(const FunctionSpec& spec, double R, double theta, int j, int N, Complex alpha,
                         double d, const CoveringOptions& options = {}, bool widened = false);

struct SublevelComponent {
  std::vector<long> members;  // grid indices j * nx + i
  double diameter = 0.0;
  Complex sample;             // a member point
};

struct SublevelSet {
  double R = 0.0;
  double threshold = 0.0;
  double grid_step = 0.0;
  Complex lo;
  long nx = 0, ny = 0;
  std::vector<SublevelComponent> components;
  std::vector<double> radii;                  // scanned circles
  std::vector<std::vector<bool>> crosses;     // crosses[c][k]: component c meets |z| = radii[k]
  std::vector<double> gap_radii;              // scanned radii met by no component
};

/// PreconditionViolated if grid_step > R/200.
SublevelSet sublevel_components(const FunctionSpec& spec, double R, double grid_step);

/// NotEnoughPreimages, MarginTooSmall.
CoveringCertificate case2a_certificate(const FunctionSpec& spec, double R, double r_gap, int N,
                                       const CoveringOptions& options = {});

struct AnnulusMinimum {
  int ell = 0;
  Complex alpha;
  CoveringGridReport scan;  // counts in A_R over the A_R grid
};

/// Grid minimization of preimage counts in A_R; ties by smallest |z|, then smallest angle.
AnnulusMinimum annulus_minimum(const FunctionSpec& spec, double R, int N, const CoveringOptions& options = {});

/// A minimum count >= N over A_R gives the shortcut V = A_R (ell = 0 in the proof's terms).
/// CertificationFailed.
CoveringCertificate case2b_certificate(const FunctionSpec& spec, double R, int N, int j, double d,
                                       const SublevelSet& sublevel, const AnnulusMinimum& minimum,
                                       const CoveringOptions& options = {});

struct RSchedule {
  std::vector<double> radii;
  static RSchedule geometric(double R0 = 64.0, double ratio = 2.0, int steps = 20);
};

struct SearchResult {
  std::optional<CoveringCertificate> certificate;  // empty: BudgetExhausted
  nlohmann::json trace;                            // one entry per schedule radius visited
  double d = 0.0;
};

SearchResult find_self_covering_V(const FunctionSpec& spec, int N, const RSchedule& schedule,
                                  const CoveringOptions& options = {});

/// The working d: options.d if positive, else 2 * max of the measured case-1 d/2 and the
/// case-2 d/2 with N - 1 avoided points (R = 1000, options.d_trials each).
double working_d(const CoveringOptions& options, int N);

nlohmann::json to_json(const HypothesisReport& h);
nlohmann::json to_json(const Witnesses& w);
nlohmann::json to_json(const DichotomyOutcome& o);
nlohmann::json to_json(const SublevelSet& s);
nlohmann::json to_json(const CoveringCertificate& c);
std::string certificate_svg(const CoveringCertificate& c);

}  // namespace etk
