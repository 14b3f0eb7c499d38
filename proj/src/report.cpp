#include "etk/report.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "etk/covering.hpp"
#include "etk/entropy.hpp"
#include "etk/error.hpp"
#include "etk/parallel.hpp"
#include "etk/winding.hpp"

namespace etk {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

template <class T>
T positive(const json& section, const char* key, T fallback) {
  if (!section.contains(key)) return fallback;
  const json& v = section.at(key);
  if (!v.is_number()) throw Error(ErrorCode::ParseError, std::string("'") + key + "' must be a number");
  const T x = v.get<T>();
  if (!(x > T{})) throw Error(ErrorCode::InvalidArgument, std::string("'") + key + "' must be positive");
  return x;
}

const json& section(const json& raw, const char* name) {
  static const json empty = json::object();
  if (!raw.contains(name)) return empty;
  if (!raw.at(name).is_object()) throw Error(ErrorCode::ParseError, std::string("'") + name + "' must be an object");
  return raw.at(name);
}

std::vector<double> radii_list(const json& s, const char* key) {
  std::vector<double> r;
  if (!s.at(key).is_array()) throw Error(ErrorCode::ParseError, std::string("'") + key + "' must be an array");
  for (const auto& v : s.at(key)) {
    if (!v.is_number() || !(v.get<double>() > 0.0))
      throw Error(ErrorCode::InvalidArgument, std::string("'") + key + "' entries must be positive numbers");
    r.push_back(v.get<double>());
  }
  if (r.empty()) throw Error(ErrorCode::InvalidArgument, std::string("'") + key + "' is empty");
  return r;
}

struct CoverParams {
  int N = 3;
  RSchedule schedule;
  CoveringOptions options;
};

CoverParams cover_params(const json& s, const RunConfig& cfg, int default_N, RSchedule default_schedule,
                         int default_j_min, int default_j_max) {
  CoverParams p;
  p.N = positive(s, "N", default_N);
  if (s.contains("schedule"))
    p.schedule.radii = radii_list(s, "schedule");
  else if (s.contains("R_start") || s.contains("ratio") || s.contains("steps"))
    p.schedule = RSchedule::geometric(positive(s, "R_start", 64.0), positive(s, "ratio", 2.0), positive(s, "steps", 20));
  else
    p.schedule = std::move(default_schedule);
  p.options.seed = cfg.seed;
  p.options.threads = cfg.threads;
  if (s.contains("d")) p.options.d = positive(s, "d", 1.0);
  p.options.d_trials = positive(s, "d_trials", p.options.d_trials);
  p.options.j_min = positive(s, "j_min", default_j_min);
  p.options.j_max = positive(s, "j_max", std::max(default_j_max, p.options.j_min));
  if (p.options.j_max < p.options.j_min) throw Error(ErrorCode::InvalidArgument, "j_max < j_min");
  p.options.scan_step = positive(s, "scan_step", p.options.scan_step);
  p.options.sublevel_step = positive(s, "sublevel_step", p.options.sublevel_step);
  if (s.contains("enforce_hypotheses")) p.options.enforce_hypotheses = s.at("enforce_hypotheses").get<bool>();
  return p;
}

json stamp(const RunConfig& cfg, json body) {
  body["config_hash"] = cfg.hash;
  body["version"] = kToolkitVersion;
  return body;
}

std::string write(const RunConfig& cfg, const std::string& name, const std::string& content) {
  fs::create_directories(cfg.out_dir);
  const fs::path path = fs::path(cfg.out_dir) / name;
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::InvalidArgument, "cannot write " + path.string());
  out << content;
  return path.string();
}

std::string svg_stamp(const RunConfig& cfg, std::string svg) {
  const auto pos = svg.find('>');
  if (pos == std::string::npos) return svg;
  return svg.insert(pos + 1, std::string("\n<!-- etk ") + kToolkitVersion + " config " + cfg.hash + " -->");
}

// log|f| over [-2R, 2R]^2, for runs that end without a certificate
std::string log_modulus_heatmap(const FunctionSpec& spec, double R) {
  constexpr int n = 64;
  const double ext = 2.0 * R, cell = 2.0 * ext / n;
  std::vector<double> v(n * n);
  double lo = INFINITY, hi = -INFINITY;
  for (int iy = 0; iy < n; ++iy)
    for (int ix = 0; ix < n; ++ix) {
      const Complex z(-ext + (ix + 0.5) * cell, ext - (iy + 0.5) * cell);
      double lm = log_evaluate(spec, z).real();
      if (!std::isfinite(lm)) lm = -745.0;
      v[iy * n + ix] = lm;
      lo = std::min(lo, lm);
      hi = std::max(hi, lm);
    }
  std::ostringstream os;
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"0 0 " << n << ' ' << n << "\">\n";
  os << "<title>log|f| on [-2R,2R]^2, R=" << R << "</title>\n";
  for (int i = 0; i < n * n; ++i) {
    const int g = hi > lo ? static_cast<int>(255.0 * (v[i] - lo) / (hi - lo)) : 128;
    os << "<rect x=\"" << i % n << "\" y=\"" << i / n << "\" width=\"1\" height=\"1\" fill=\"rgb(" << g << ','
       << g / 2 << ',' << 255 - g << ")\"/>\n";
  }
  os << "</svg>\n";
  return os.str();
}

double uniform01(std::uint64_t& state) {
  state = splitmix64(state);
  return static_cast<double>(state >> 11) * 0x1.0p-53;
}

// w uniform in {r0 < |w| < r1} by area
Complex sample_annulus(std::uint64_t& state, double r0, double r1) {
  const double u = uniform01(state), t = uniform01(state);
  const double r = std::sqrt(r0 * r0 + u * (r1 * r1 - r0 * r0));
  return std::polar(r, 2.0 * 3.141592653589793 * t);
}

int count_or_retry(const FunctionSpec& spec, const PlanarDomain& D, Complex& w, std::uint64_t& state, double r0,
                   double r1, int& retries) {
  for (int a = 0;; ++a) {
    try {
      return count_preimages(spec, D, w).count;
    } catch (const Error& e) {
      if (e.code() != ErrorCode::BoundaryHit || a >= 8) throw;
      ++retries;
      w = sample_annulus(state, r0, r1);
    }
  }
}

}  // namespace

std::string config_hash(const json& raw) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : raw.dump()) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  std::ostringstream os;
  os << std::hex;
  os.width(16);
  os.fill('0');
  os << h;
  return os.str();
}

RunConfig parse_run_config(const json& raw) {
  if (!raw.is_object()) throw Error(ErrorCode::ParseError, "config must be a JSON object");
  RunConfig cfg;
  cfg.raw = raw;
  if (!raw.contains("function")) throw Error(ErrorCode::ParseError, "config needs 'function'");
  cfg.function = function_from_json(raw.at("function"));
  if (raw.contains("seed")) {
    const json& sd = raw.at("seed");
    if (!sd.is_number_integer() || (!sd.is_number_unsigned() && sd.get<long long>() < 0))
      throw Error(ErrorCode::ParseError, "'seed' must be a non-negative integer");
    cfg.seed = raw.at("seed").get<std::uint64_t>();
  }
  cfg.threads = positive(raw, "threads", 1u);
  if (raw.contains("out_dir")) cfg.out_dir = raw.at("out_dir").get<std::string>();
  // the output location and thread count do not change results
  json hashed = raw;
  hashed.erase("out_dir");
  hashed.erase("threads");
  cfg.hash = config_hash(hashed);
  return cfg;
}

CommandResult cmd_covering_search(const RunConfig& cfg) {
  const CoverParams p = cover_params(section(cfg.raw, "covering"), cfg, 3, RSchedule::geometric(), 5, 5);
  const SearchResult r = find_self_covering_V(cfg.function, p.N, p.schedule, p.options);
  CommandResult out;
  json cert = r.certificate ? to_json(*r.certificate) : json(nullptr);
  out.artifacts.push_back(
      write(cfg, "certificate.json", stamp(cfg, {{"found", r.certificate.has_value()}, {"certificate", cert}}).dump(2) + "\n"));
  out.artifacts.push_back(
      write(cfg, "trace.json", stamp(cfg, {{"d", r.d}, {"N", p.N}, {"schedule", p.schedule.radii}, {"trace", r.trace}}).dump(2) + "\n"));
  if (r.certificate) {
    out.artifacts.push_back(write(cfg, "domain.svg", svg_stamp(cfg, certificate_svg(*r.certificate))));
    out.artifacts.push_back(write(cfg, "heatmap.svg", svg_stamp(cfg, covering_report_svg(r.certificate->grid_report))));
    std::ostringstream s;
    s << "certificate case " << to_string(r.certificate->case_tag) << " at R=" << r.certificate->R << " N=" << p.N
      << " min count " << r.certificate->grid_report.min_count.value_or(0);
    out.summary = s.str();
  } else {
    out.exit_code = 3;
    const double last = p.schedule.radii.back();
    out.artifacts.push_back(write(cfg, "domain.svg",
                                  svg_stamp(cfg, "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"0 0 1 1\">\n"
                                                 "<title>no certificate</title>\n</svg>\n")));
    out.artifacts.push_back(write(cfg, "heatmap.svg", svg_stamp(cfg, log_modulus_heatmap(cfg.function, last))));
    out.summary = "budget exhausted after " + std::to_string(p.schedule.radii.size()) + " radii, see trace.json";
  }
  return out;
}

CommandResult cmd_entropy(const RunConfig& cfg) {
  const json& s = section(cfg.raw, "entropy");
  if (!s.contains("compact_set") && !s.contains("bound"))
    throw Error(ErrorCode::InvalidArgument, "entropy needs 'compact_set' and/or 'bound'");
  json body = json::object();
  std::optional<EntropyEstimate> est;
  CommandResult out;
  std::ostringstream summary;
  if (s.contains("compact_set")) {
    const CompactSet X = compact_set_from_json(s.at("compact_set"));
    std::vector<double> deltas{0.05};
    if (s.contains("deltas")) deltas = radii_list(s, "deltas");
    SeparatedSetOptions so;
    so.threads = cfg.threads;
    est = entropy_lower_curve(cfg.function, X, positive(s, "n_max", 12), deltas, so);
    body["estimate"] = to_json(*est);
    summary << "h_lower " << est->h_lower;
  }
  if (s.contains("bound")) {
    const json& b = s.at("bound");
    const CoverParams p = cover_params(b, cfg, 4, RSchedule::geometric(), 5, 5);
    const SearchResult r = find_self_covering_V(cfg.function, p.N, p.schedule, p.options);
    if (!r.certificate) {
      body["bound"] = {{"found", false}, {"trace", r.trace}};
      out.exit_code = 3;
      summary << (est ? "; " : "") << "no certificate for the bound";
    } else {
      BackwardOrbitParams bp;
      bp.m = positive(b, "m", 3);
      bp.k = positive(b, "k", 3);
      bp.node_budget = positive(b, "node_budget", bp.node_budget);
      if (b.contains("branch_cap")) bp.branch_cap = positive(b, "branch_cap", 1);
      bp.threads = cfg.threads;
      const EntropyBound eb = certificate_entropy_bound(cfg.function, *r.certificate, bp);
      body["bound"] = {{"found", true}, {"certificate", to_json(*r.certificate)}, {"entropy", to_json(eb)}};
      summary << (est ? "; " : "") << "bound " << eb.measured << " floor " << eb.floor << " orbits "
              << eb.orbits.count;
    }
  }
  std::string csv = std::string("# etk ") + kToolkitVersion + " config " + cfg.hash + "\n";
  std::string svg;
  if (est) {
    csv += entropy_csv(*est);
    svg = entropy_curve_svg(*est);
  } else {
    csv += "n,delta,K_lower\n";
    svg = "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"0 0 1 1\">\n<title>no estimate</title>\n</svg>\n";
  }
  out.artifacts.push_back(write(cfg, "entropy.csv", csv));
  out.artifacts.push_back(write(cfg, "entropy.json", stamp(cfg, body).dump(2) + "\n"));
  out.artifacts.push_back(write(cfg, "curve.svg", svg_stamp(cfg, svg)));
  out.summary = summary.str();
  return out;
}

json example_product_report(const RunConfig& cfg) {
  const json& s = section(cfg.raw, "example");
  const auto* lp = cfg.function.as<LacunaryProduct>();
  if (!lp) throw Error(ErrorCode::InvalidArgument, "example-product needs a product function");
  const int samples = positive(s, "samples", 64);
  const auto& zeros = lp->zeros;
  const int n = static_cast<int>(zeros.size());

  json rows = json::array();
  bool disk_ok = true, annulus_ok = true;
  int worst_diff = 0;
  for (int i = 1; i <= n; ++i) {
    const double next = i < n ? std::abs(zeros[i]) : lp->tail_zeros_lower_modulus;
    const double R = std::sqrt(std::abs(zeros[i - 1]) * next);
    const double tail_eps = product_tail_bound(*lp, 2.0 * R);  // TailTooClose when the tail is within 4R
    std::uint64_t state = stream_seed(cfg.seed, static_cast<std::uint64_t>(i));
    const auto disk = make_disk(0.0, R), big = make_disk(0.0, 2.0 * R), small = make_disk(0.0, R / 2.0);
    int lo = 1 << 30, hi = -1, dlo = 1 << 30, dhi = -(1 << 30), retries = 0;
    for (int t = 0; t < samples; ++t) {
      Complex w = sample_annulus(state, 0.0, R);
      const int c = count_or_retry(cfg.function, disk, w, state, 0.0, R, retries);
      lo = std::min(lo, c);
      hi = std::max(hi, c);
      Complex a = sample_annulus(state, R / 2.0, 2.0 * R);
      const int outer = count_or_retry(cfg.function, big, a, state, R / 2.0, 2.0 * R, retries);
      const int inner = count_preimages(cfg.function, small, a).count;
      dlo = std::min(dlo, outer - inner);
      dhi = std::max(dhi, outer - inner);
    }
    const bool disk_pass = lo == i && hi == i;
    const bool ann_pass = std::max(std::abs(dlo), std::abs(dhi)) <= 1;
    disk_ok = disk_ok && disk_pass;
    annulus_ok = annulus_ok && ann_pass;
    worst_diff = std::max({worst_diff, std::abs(dlo), std::abs(dhi)});
    rows.push_back({{"i", i},
                    {"R", R},
                    {"tail_log_error", tail_eps},
                    {"disk_count_min", lo},
                    {"disk_count_max", hi},
                    {"disk_pass", disk_pass},
                    {"annulus_diff_min", dlo},
                    {"annulus_diff_max", dhi},
                    {"annulus_pass", ann_pass},
                    {"boundary_resamples", retries}});
  }

  // entropy bound from a disk certificate
  std::vector<double> sched;
  for (int i = 1; i <= n; ++i) sched.push_back(std::sqrt(std::abs(zeros[i - 1]) * (i < n ? std::abs(zeros[i]) : lp->tail_zeros_lower_modulus)));
  sched.push_back(std::abs(zeros.back()));
  std::sort(sched.begin(), sched.end());
  RSchedule def;
  def.radii = sched;
  const json& es = s.contains("entropy") ? s.at("entropy") : json::object();
  const CoverParams p = cover_params(es, cfg, std::max(1, std::min(3, n)), def, 2, 5);
  const SearchResult r = find_self_covering_V(cfg.function, p.N, p.schedule, p.options);
  json entropy;
  if (r.certificate) {
    BackwardOrbitParams bp;
    bp.m = positive(es, "m", 2);
    bp.k = positive(es, "k", 1);
    bp.threads = cfg.threads;
    const EntropyBound eb = certificate_entropy_bound(cfg.function, *r.certificate, bp);
    entropy = {{"found", true},
               {"case_tag", to_string(r.certificate->case_tag)},
               {"R", r.certificate->R},
               {"N", p.N},
               {"bound", to_json(eb)},
               {"pass", eb.orbits.meets_floor && eb.measured >= eb.floor}};
  } else {
    entropy = {{"found", false}, {"N", p.N}, {"pass", false}, {"trace", r.trace}};
  }
  return {{"zeros", [&] {
             json z = json::array();
             for (Complex c : zeros) z.push_back(complex_to_json(c));
             return z;
           }()},
          {"tail_zeros_lower_modulus", lp->tail_zeros_lower_modulus},
          {"samples_per_radius", samples},
          {"radii", rows},
          {"annulus_difference", {{"pass", annulus_ok}, {"max_abs_difference", worst_diff}}},
          {"disk_counts", {{"pass", disk_ok}}},
          {"entropy", entropy}};
}

CommandResult cmd_example_product(const RunConfig& cfg) {
  CommandResult out;
  const json report = example_product_report(cfg);
  out.artifacts.push_back(write(cfg, "example.json", stamp(cfg, report).dump(2) + "\n"));
  const bool found = report.at("entropy").at("found").get<bool>();
  out.exit_code = found ? 0 : 3;
  std::ostringstream s;
  s << "annulus difference " << (report["annulus_difference"]["pass"].get<bool>() ? "pass" : "fail")
    << ", disk counts " << (report["disk_counts"]["pass"].get<bool>() ? "pass" : "fail") << ", entropy "
    << (report["entropy"]["pass"].get<bool>() ? "pass" : "fail");
  out.summary = s.str();
  return out;
}

CommandResult run_command(const std::string& command, const json& raw) {
  auto config_error = [](const std::string& code, const std::string& msg) {
    CommandResult r;
    r.exit_code = 2;
    r.summary = json{{"error", code}, {"message", msg}}.dump();
    return r;
  };
  RunConfig cfg;
  try {
    cfg = parse_run_config(raw);
  } catch (const Error& e) {
    return config_error(error_name(e.code()), e.what());
  } catch (const json::exception& e) {
    return config_error("ParseError", e.what());
  }
  try {
    if (command == "covering-search") return cmd_covering_search(cfg);
    if (command == "entropy") return cmd_entropy(cfg);
    if (command == "example-product") return cmd_example_product(cfg);
    return config_error("InvalidArgument", "unknown command '" + command + "'");
  } catch (const Error& e) {
    const ErrorCode c = e.code();
    if (c == ErrorCode::ParseError || c == ErrorCode::InvalidArgument) return config_error(error_name(c), e.what());
    CommandResult r;
    r.exit_code = 3;
    r.summary = json{{"error", error_name(c)}, {"message", e.what()}}.dump();
    return r;
  } catch (const json::exception& e) {
    return config_error("ParseError", e.what());
  }
}

}  // namespace etk
