#include "etk/covering.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

#include "etk/error.hpp"
#include "etk/parallel.hpp"
#include "geometry.hpp"

namespace etk {

using detail::kPi;
using detail::kTwoPi;
using detail::wrap_angle;

namespace {

constexpr double kCRHalf = 2.0 * kPi / 3.0;
constexpr double kInf = std::numeric_limits<double>::infinity();

// ln(M - 2R) for M given by its log; -inf if M <= 2R
double log_M_minus_2R(double log_M, double R) {
  const double t = std::log(2.0 * R) - log_M;
  if (t >= 0.0) return -kInf;
  return log_M + std::log1p(-std::exp(t));
}

// Euclidean distance from a point of |z| = R to the edge of C_R (theta)
double cr_margin(double R, double phi, double theta) {
  const double slack = kCRHalf - std::abs(wrap_angle(phi - theta));
  if (slack <= 0.0) return -1.0;
  const double angular = slack >= kPi / 2.0 ? R : R * std::sin(slack);
  return std::min(R / 3.0, angular);
}

double log_modulus(const FunctionSpec& spec, Complex z) { return log_evaluate(spec, z).real(); }

}  // namespace

const char* to_string(CaseTag tag) {
  switch (tag) {
    case CaseTag::I: return "I";
    case CaseTag::IIa: return "IIa";
    case CaseTag::IIb: return "IIb";
  }
  return "?";
}

HypothesisReport check_dichotomy_hypotheses_log(double m, double log_M, double R, int j, int N, double d) {
  if (!(R > 1.0) || N < 1 || j < 1 || !(d > 0.0) || !(m >= 0.0) || !std::isfinite(m))
    throw Error(ErrorCode::PreconditionViolated, "hypothesis check needs R > 1, N, j >= 1, d > 0, m >= 0");
  if (!(std::log(m) < log_M)) throw Error(ErrorCode::PreconditionViolated, "hypothesis check needs m < M");
  HypothesisReport h;
  h.R = R;
  h.j = j;
  h.N = N;
  h.d = d;
  const double E = std::exp(d);
  h.log_k = 5.0 * E;
  const double x = std::log(R);
  const double lmr = log_M_minus_2R(log_M, R);
  h.first = lmr - N * h.log_k > std::log(4.0 * R);
  h.second = (E * std::log(m + 2.0 * R) - lmr) / (E - 1.0) < -0.5 * j * x;
  h.third = N * h.log_k < 0.5 * j * x;
  h.passed = h.first && h.second && h.third;
  // leading order with m = 3R, M = R^j
  double need = 2.0 * N * h.log_k / j;
  need = std::max(need, j > 1 ? (N * h.log_k + std::log(4.0)) / (j - 1) : kInf);
  const double c = E * (1.0 + 0.5 * j) - 1.5 * j;
  need = std::max(need, c < 0.0 ? E * std::log(5.0) / -c : kInf);
  h.log_threshold_R = need;
  return h;
}

bool check_dichotomy_hypotheses(double m, double M, double R, int j, int N, double d) {
  if (!(M > 0.0)) throw Error(ErrorCode::PreconditionViolated, "M must be positive");
  return check_dichotomy_hypotheses_log(m, std::log(M), R, j, N, d).passed;
}

std::optional<int> choose_j(const FunctionSpec& spec, double R, const CoveringOptions& options) {
  const double log_M = max_modulus_on_circle(spec, R, options.circle).log_modulus;
  const double ratio = log_M / std::log(R);
  int j = static_cast<int>(std::floor(ratio));
  if (j == ratio) --j;  // M > R^j is strict
  j = std::min(j, options.j_max);
  if (j < std::max(1, options.j_min)) return std::nullopt;
  return j;
}

std::optional<Witnesses> find_witnesses(const FunctionSpec& spec, double R, int j, const CoveringOptions& options) {
  if (!(R > 1.0) || j < 1) throw Error(ErrorCode::PreconditionViolated, "find_witnesses needs R > 1, j >= 1");
  const CircleWitness top = max_modulus_on_circle(spec, R, options.circle);
  if (!(top.log_modulus > j * std::log(R))) return std::nullopt;

  const int n = std::max(64, options.circle.samples);
  std::vector<double> phi(n), lm(n);
  for (int k = 0; k < n; ++k) {
    phi[k] = kTwoPi * k / n;
    lm[k] = log_modulus(spec, std::polar(R, phi[k]));
  }
  const double log_small = std::log(3.0 * R);
  std::vector<std::pair<double, double>> small;  // (angle, log modulus)
  for (int k = 0; k < n; ++k)
    if (lm[k] < log_small) small.push_back({phi[k], lm[k]});
  if (auto ref = small_modulus_witness_log(spec, R, log_small, options.circle))
    small.push_back({std::arg(ref->point), ref->log_modulus});
  if (small.empty()) return std::nullopt;

  const double phi_M = std::arg(top.point);
  const double goal = R / 10.0;
  std::vector<double> near_max;
  for (int k = 0; k < n; ++k)
    if (lm[k] >= top.log_modulus + std::log(0.9)) near_max.push_back(phi[k]);

  std::optional<Witnesses> best;
  double best_score = -kInf;
  for (int t = 0; t < options.theta_samples; ++t) {
    const double theta = -kPi + kTwoPi * t / options.theta_samples;
    const double mM = cr_margin(R, phi_M, theta);
    if (mM < goal) continue;
    int pick = -1;
    double pick_margin = -kInf;
    for (std::size_t s = 0; s < small.size(); ++s) {
      const double mm = cr_margin(R, small[s].first, theta);
      if (mm > pick_margin || (mm == pick_margin && small[s].second < small[pick].second)) {
        pick_margin = mm;
        pick = static_cast<int>(s);
      }
    }
    if (pick_margin < goal) continue;
    const double score = std::min(mM, pick_margin);
    if (score <= best_score) continue;
    best_score = score;
    Witnesses w;
    w.R = R;
    w.j = j;
    w.w_M = top.point;
    w.log_M = top.log_modulus;
    w.w_m = std::polar(R, small[pick].first);
    w.m = std::exp(small[pick].second);
    w.theta = theta;
    w.separation_goal_met = false;
    for (double a : near_max) {
      const Complex z = std::polar(R, a);
      if (std::abs(z - w.w_M) >= goal && cr_margin(R, a, theta) >= goal) {
        w.separation_goal_met = true;
        w.second_max = z;
        break;
      }
    }
    best = w;
  }
  return best;
}

namespace {

bool smaller_point(Complex a, Complex b) {
  const double ra = std::abs(a), rb = std::abs(b);
  if (ra != rb) return ra < rb;
  return std::arg(a) < std::arg(b);
}

// grid point with the lowest count; ties by smallest |z|, then smallest angle
const CoveringGridPoint* lowest_point(const CoveringGridReport& rep) {
  const CoveringGridPoint* best = nullptr;
  for (const auto& p : rep.points) {
    if (!p.count) continue;
    if (!best || *p.count < *best->count || (*p.count == *best->count && smaller_point(p.w, best->w))) best = &p;
  }
  return best;
}

WindingOptions refined(WindingOptions w) {
  w.initial_spacing /= 2.0;
  return w;
}

}  // namespace

DichotomyOutcome run_dichotomy(const FunctionSpec& spec, double R, double theta, int j, int N,
                               const HypothesisReport& hypotheses, const CoveringOptions& options,
                               double half_angle) {
  if (hypotheses.R != R || hypotheses.j != j || hypotheses.N != N)
    throw Error(ErrorCode::PreconditionViolated, "hypotheses were not checked for this R, j, N");
  if (options.enforce_hypotheses && !hypotheses.passed)
    throw Error(ErrorCode::PreconditionViolated, "dichotomy hypotheses fail at this R");
  DichotomyOutcome out;
  out.R = R;
  out.theta = theta;
  out.j = j;
  out.half_angle = half_angle > 0.0 ? half_angle : 0.75 * kPi;
  out.excluded_radius = std::pow(R, -0.5 * j);
  const PlanarDomain dr = build_DR(R, theta, out.half_angle);
  const double step = options.scan_step * R;
  out.scan = covering_report(spec, dr, build_AR(R), step, 1, options.threads, options.winding);
  const CoveringGridPoint* low = lowest_point(out.scan);
  if (!low || *low->count > 0) {
    out.covers_fully = true;
    return out;
  }
  out.alpha = low->w;
  if (count_preimages(spec, dr, out.alpha, refined(options.winding)).count != 0)
    throw Error(ErrorCode::Inconclusive, "omitted-value candidate is hit at the refined resolution");
  PlanarDomain target = build_AR(R);
  target.removed_disks.push_back({out.alpha, out.excluded_radius});
  out.cover = covering_report(spec, dr, target, step, N, options.threads, options.winding);
  if (!out.cover->min_count || *out.cover->min_count < N) {
    std::ostringstream msg;
    msg << "A_R minus Delta(alpha, R^(-j/2)) is not covered " << N << " times; failing grid points:";
    for (std::size_t i = 0; i < out.cover->failing.size() && i < 16; ++i) msg << ' ' << out.cover->failing[i];
    if (out.cover->failing.size() > 16) msg << " ... (" << out.cover->failing.size() << " total)";
    throw Error(ErrorCode::Inconclusive, msg.str());
  }
  out.verified_N = N;
  return out;
}

AnnulusMinimum annulus_minimum(const FunctionSpec& spec, double R, int N, const CoveringOptions& options) {
  const PlanarDomain ar = build_AR(R);
  AnnulusMinimum out;
  out.scan = covering_report(spec, ar, ar, options.scan_step * R, N, options.threads, options.winding);
  const CoveringGridPoint* low = lowest_point(out.scan);
  if (!low) throw Error(ErrorCode::Inconclusive, "no evaluable grid point in A_R");
  out.ell = *low->count;
  out.alpha = low->w;
  return out;
}

}  // namespace etk
