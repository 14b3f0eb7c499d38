#include <algorithm>
#include <cmath>
#include <sstream>

#include "etk/covering.hpp"
#include "etk/error.hpp"
#include "geometry.hpp"

namespace etk {

namespace {

nlohmann::json grid_summary(const CoveringGridReport& r) {
  return {{"source_id", r.source_id},
          {"target_id", r.target_id},
          {"grid_step", r.grid_step},
          {"N", r.N},
          {"points", r.points.size()},
          {"min_count", r.min_count ? nlohmann::json(*r.min_count) : nlohmann::json(nullptr)},
          {"failing", r.failing},
          {"skipped", r.skipped},
          {"fraction_at_least_N", r.fraction_at_least_N}};
}

nlohmann::json error_entry(const Error& e) { return {{"error", error_name(e.code())}, {"message", e.what()}}; }

// gap radii ordered by distance (in scan steps) from the nearest radius that W meets
std::vector<double> ranked_gaps(const SublevelSet& s) {
  std::vector<std::pair<double, double>> scored;
  for (double g : s.gap_radii) {
    double dist = 3.0 * s.R;
    for (std::size_t k = 0; k < s.radii.size(); ++k) {
      bool met = false;
      for (const auto& c : s.crosses) met = met || c[k];
      if (met) dist = std::min(dist, std::abs(s.radii[k] - g));
    }
    dist = std::min({dist, g - s.R / 2.0, 2.0 * s.R - g});
    scored.push_back({-dist, g});
  }
  std::sort(scored.begin(), scored.end());
  std::vector<double> out;
  for (const auto& p : scored) out.push_back(p.second);
  return out;
}

}  // namespace

RSchedule RSchedule::geometric(double R0, double ratio, int steps) {
  if (!(R0 > 1.0) || !(ratio > 1.0) || steps < 1)
    throw Error(ErrorCode::InvalidArgument, "schedule needs R0 > 1, ratio > 1, steps >= 1");
  RSchedule s;
  double R = R0;
  for (int k = 0; k < steps; ++k, R *= ratio) s.radii.push_back(R);
  return s;
}

double working_d(const CoveringOptions& options, int N) {
  if (options.d > 0.0) return options.d;
  MeasureDParams p;
  p.seed = options.seed;
  p.threads = options.threads;
  p.qh = options.qh;
  p.eps = 1.0 / (2.0 * N * (N + 2));
  const double c1 = measure_d_constant(1e3, options.d_trials, DScenario::Case1, p).d_half;
  p.avoided = std::max(0, N - 1);
  const double c2 = measure_d_constant(1e3, options.d_trials, DScenario::Case2, p).d_half;
  return 2.0 * std::max(c1, c2);
}

SearchResult find_self_covering_V(const FunctionSpec& spec, int N, const RSchedule& schedule,
                                  const CoveringOptions& options) {
  if (N < 1) throw Error(ErrorCode::InvalidArgument, "N must be at least 1");
  SearchResult result;
  result.trace = nlohmann::json::array();
  result.d = working_d(options, N);
  const double d = result.d;

  for (double R : schedule.radii) {
    nlohmann::json entry = {{"R", R}};
    auto finish = [&](const std::string& stage, const std::string& outcome) {
      entry["stage"] = stage;
      entry["outcome"] = outcome;
      result.trace.push_back(entry);
    };
    try {
      if (R * 2.0 > spec.validity_radius()) {
        finish("validity", "A_R leaves the validity disk of the truncated series");
        continue;
      }
      const auto j = choose_j(spec, R, options);
      if (!j) {
        const double log_M = max_modulus_on_circle(spec, R, options.circle).log_modulus;
        entry["log_M"] = log_M;
        finish("witness", "witness |f|>R^j never found: ln M(R) = " + std::to_string(log_M) +
                              " is not above j_min ln R");
        continue;
      }
      entry["j"] = *j;
      const auto w = find_witnesses(spec, R, *j, options);
      if (!w) {
        finish("witness", "no admissible theta: |f| < 3R witness missing or not placeable in C_R");
        continue;
      }
      entry["witnesses"] = to_json(*w);
      const HypothesisReport hyp = check_dichotomy_hypotheses_log(w->m, w->log_M, R, *j, N, d);
      entry["hypotheses"] = to_json(hyp);
      if (options.enforce_hypotheses && !hyp.passed) {
        finish("hypotheses", "dichotomy hypotheses fail");
        continue;
      }

      DichotomyOutcome dich;
      try {
        dich = run_dichotomy(spec, R, w->theta, *j, N, hyp, options);
      } catch (const Error& e) {
        if (e.code() != ErrorCode::Inconclusive) throw;
        entry["dichotomy"] = error_entry(e);
        finish("dichotomy", "inconclusive");
        continue;
      }
      entry["dichotomy"] = {{"covers_fully", dich.covers_fully}, {"alpha", complex_to_json(dich.alpha)}};

      if (!dich.covers_fully) {
        try {
          Case1Result c1 = case1_search(spec, R, w->theta, *j, N, dich.alpha, d, options);
          if (c1.escalate) {
            entry["escalated"] = true;
            const PlanarDomain wide = build_DR(R, w->theta, 0.75 * detail::kPi + options.extra_half_angle);
            if (count_preimages(spec, wide, dich.alpha, options.winding).count != 0) {
              finish("case I", "alpha is attained on the widened D_R");
              continue;
            }
            c1 = case1_search(spec, R, w->theta, *j, N, dich.alpha, d, options, true);
          }
          if (!c1.certificate) {
            finish("case I", "no certificate: " + c1.note);
            continue;
          }
          c1.certificate->log_M = std::max(c1.certificate->log_M, w->log_M);
          result.certificate = std::move(c1.certificate);
          finish("case I", "certificate");
          return result;
        } catch (const Error& e) {
          if (e.code() != ErrorCode::CertificationFailed) throw;
          entry["case1"] = error_entry(e);
          finish("case I", "certification failed");
          continue;
        }
      }

      const AnnulusMinimum minimum = annulus_minimum(spec, R, N, options);
      entry["annulus_min_count"] = minimum.ell;
      std::optional<SublevelSet> sub;
      if (minimum.ell < N) {
        sub = sublevel_components(spec, R, options.sublevel_step * R);
        entry["sublevel"] = to_json(*sub);
        const auto gaps = ranked_gaps(*sub);
        if (!gaps.empty()) {
          nlohmann::json tries = nlohmann::json::array();
          for (std::size_t g = 0; g < gaps.size() && g < 3; ++g) {
            try {
              CoveringCertificate cert = case2a_certificate(spec, R, gaps[g], N, options);
              cert.j = *j;
              cert.theta = w->theta;
              cert.w_m = w->w_m;
              cert.w_M = w->w_M;
              cert.m = w->m;
              cert.log_M = w->log_M;
              cert.d = d;
              result.certificate = std::move(cert);
              finish("case IIa", "certificate");
              return result;
            } catch (const Error& e) {
              if (e.code() != ErrorCode::NotEnoughPreimages && e.code() != ErrorCode::MarginTooSmall &&
                  e.code() != ErrorCode::CertificationFailed)
                throw;
              tries.push_back(error_entry(e));
            }
          }
          entry["case2a"] = tries;
          finish("case IIa", "no gap circle certified");
          continue;
        }
      }
      try {
        CoveringCertificate cert = case2b_certificate(spec, R, N, *j, d, sub.value_or(SublevelSet{}), minimum, options);
        cert.theta = w->theta;
        if (minimum.scan.min_count && *minimum.scan.min_count >= N) {
          cert.w_m = w->w_m;
          cert.w_M = w->w_M;
          cert.m = w->m;
          cert.log_M = w->log_M;
        }
        result.certificate = std::move(cert);
        finish("case IIb", "certificate");
        return result;
      } catch (const Error& e) {
        if (e.code() != ErrorCode::CertificationFailed) throw;
        entry["case2b"] = error_entry(e);
        finish("case IIb", "certification failed");
        continue;
      }
    } catch (const Error& e) {
      entry["error"] = error_entry(e);
      finish("error", error_name(e.code()));
    }
  }
  return result;
}

nlohmann::json to_json(const HypothesisReport& h) {
  return {{"R", h.R},         {"j", h.j},         {"N", h.N},           {"d", h.d},
          {"log_k", h.log_k}, {"first", h.first}, {"second", h.second}, {"third", h.third},
          {"passed", h.passed}, {"log_threshold_R", std::isfinite(h.log_threshold_R) ? nlohmann::json(h.log_threshold_R)
                                                                                     : nlohmann::json("inf")}};
}

nlohmann::json to_json(const Witnesses& w) {
  return {{"R", w.R},
          {"j", w.j},
          {"w_M", complex_to_json(w.w_M)},
          {"log_M", w.log_M},
          {"w_m", complex_to_json(w.w_m)},
          {"m", w.m},
          {"theta", w.theta},
          {"separation_goal_met", w.separation_goal_met},
          {"second_max", complex_to_json(w.second_max)}};
}

nlohmann::json to_json(const DichotomyOutcome& o) {
  nlohmann::json j = {{"R", o.R},
                      {"theta", o.theta},
                      {"j", o.j},
                      {"half_angle", o.half_angle},
                      {"variant", o.covers_fully ? "CoversFully" : "OmitsAlpha"},
                      {"scan", grid_summary(o.scan)}};
  if (!o.covers_fully) {
    j["alpha"] = complex_to_json(o.alpha);
    j["verified_N"] = o.verified_N;
    j["excluded_radius"] = o.excluded_radius;
    if (o.cover) j["cover"] = grid_summary(*o.cover);
  }
  return j;
}

nlohmann::json to_json(const SublevelSet& s) {
  nlohmann::json comps = nlohmann::json::array();
  for (std::size_t c = 0; c < s.components.size(); ++c) {
    long crossing = 0;
    for (bool b : s.crosses[c]) crossing += b;
    comps.push_back({{"size", s.components[c].members.size()},
                     {"diameter", s.components[c].diameter},
                     {"sample", complex_to_json(s.components[c].sample)},
                     {"radii_crossed", crossing}});
  }
  return {{"R", s.R},
          {"threshold", s.threshold},
          {"grid_step", s.grid_step},
          {"components", comps},
          {"radii_scanned", s.radii.size()},
          {"gap_radii", s.gap_radii}};
}

nlohmann::json to_json(const CoveringCertificate& c) {
  nlohmann::json j = {{"case_tag", to_string(c.case_tag)},
                      {"N", c.N},
                      {"R", c.R},
                      {"R_bound", c.R_bound},
                      {"j", c.j},
                      {"theta", c.theta},
                      {"construction", c.construction},
                      {"V", to_json(c.V)},
                      {"witnesses",
                       {{"w_m", complex_to_json(c.w_m)},
                        {"w_M", complex_to_json(c.w_M)},
                        {"m", c.m},
                        {"log_M", c.log_M}}},
                      {"d", c.d},
                      {"grid_report", grid_summary(c.grid_report)},
                      {"self_inclusion_evidence", grid_summary(c.self_inclusion_evidence)}};
  if (c.alpha) {
    j["alpha"] = complex_to_json(*c.alpha);
    j["excluded_radius"] = c.excluded_radius;
  }
  if (c.rouche) j["rouche"] = to_json(*c.rouche);
  if (c.diameter) {
    j["diameter"] = {{"upper_bound", c.diameter->upper_bound}, {"path_points", c.diameter->path_witness.size()}};
  }
  return j;
}

std::string certificate_svg(const CoveringCertificate& c) {
  const double ext = c.R_bound * 1.05;
  const double mark = ext / 120.0;
  std::ostringstream os;
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"" << -ext << ' ' << -ext << ' ' << 2 * ext << ' '
     << 2 * ext << "\">\n";
  os << "<title>case " << to_string(c.case_tag) << " certificate, N=" << c.N << ", R=" << c.R << "</title>\n";
  os << "<g transform=\"scale(1,-1)\">\n";
  const double s = c.grid_report.grid_step;
  for (const auto& p : c.grid_report.points) {
    std::string fill = "#999999";
    if (p.count) {
      const double t = std::clamp(static_cast<double>(*p.count) / c.N, 0.0, 1.0);
      fill = "hsl(" + std::to_string(static_cast<int>(120 * t)) + ",70%,45%)";
    }
    os << "<rect x=\"" << p.w.real() - s / 2 << "\" y=\"" << p.w.imag() - s / 2 << "\" width=\"" << s
       << "\" height=\"" << s << "\" fill=\"" << fill << "\" fill-opacity=\"0.5\"/>\n";
  }
  for (const auto& contour : boundary_contour(c.V, c.R_bound / 200.0))
    os << "<path d=\"" << contour_svg_path(contour) << "\" fill=\"none\" stroke=\"black\" stroke-width=\""
       << mark / 4 << "\"/>\n";
  if (c.alpha) {
    os << "<circle cx=\"" << c.alpha->real() << "\" cy=\"" << c.alpha->imag() << "\" r=\""
       << std::max(c.excluded_radius, mark / 2) << "\" fill=\"none\" stroke=\"red\" stroke-width=\"" << mark / 4
       << "\"/>\n";
  }
  auto dot = [&](Complex z, const char* color) {
    os << "<circle cx=\"" << z.real() << "\" cy=\"" << z.imag() << "\" r=\"" << mark << "\" fill=\"" << color
       << "\"/>\n";
  };
  dot(c.w_m, "blue");
  dot(c.w_M, "orange");
  os << "</g>\n</svg>\n";
  return os.str();
}

}  // namespace etk
