#include "etk/winding.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "etk/error.hpp"
#include "etk/parallel.hpp"
#include "geometry.hpp"

namespace etk {

using detail::kPi;
using detail::kTwoPi;
using detail::wrap_angle;

int winding_number(const std::vector<Complex>& image_points, Complex w) {
  if (image_points.empty()) return 0;
  double total = 0.0;
  const std::size_t n = image_points.size();
  for (std::size_t k = 0; k < n; ++k) {
    const Complex a = image_points[k] - w;
    const Complex b = image_points[(k + 1) % n] - w;
    if (a == Complex{} || b == Complex{}) throw Error(ErrorCode::OnTarget, "a contour point equals the target");
    const double step = std::arg(b / a);
    if (std::abs(step) > kPi / 2.0) throw Error(ErrorCode::NeedsRefinement, "argument step exceeds pi/2");
    total += step;
  }
  return static_cast<int>(std::lround(total / kTwoPi));
}

namespace {

// log(g - w) from L = log g without forming g when it would overflow or underflow.
Complex shifted_log(Complex L, Complex w) {
  if (w == Complex{}) return L;
  if (!std::isfinite(L.real())) return L.real() < 0 ? std::log(-w) : L;
  const Complex log_w = std::log(w);
  if (L.real() >= log_w.real()) return L + std::log(1.0 - std::exp(log_w - L));
  return std::log(-w) + std::log(1.0 - std::exp(L - log_w));
}

struct Node {
  Complex z;
  Complex s;  // log(g - w) at z
  int depth;
};

bool needs_split(const Complex& sa, const Complex& sb, double max_arg, double max_mod) {
  if (!std::isfinite(sa.real()) || !std::isfinite(sb.real())) return false;
  const double darg = wrap_angle(sb.imag() - sa.imag());
  return std::abs(darg) >= max_arg || std::abs(sb.real() - sa.real()) > max_mod;
}

}  // namespace

BoundarySampler::BoundarySampler(LogMap log_map, const PlanarDomain& domain, const WindingOptions& options)
    : log_map_(std::move(log_map)), options_(options), domain_id_(domain.id) {
  build(domain);
}

BoundarySampler::BoundarySampler(const FunctionSpec& spec, const PlanarDomain& domain,
                                 const WindingOptions& options)
    : BoundarySampler([spec](Complex z) { return log_evaluate(spec, z); }, domain, options) {}

void BoundarySampler::build(const PlanarDomain& domain) {
  // small disks far from 0 need spacing relative to their own size
  const BoundingBox bb = bounding_box(domain);
  const double extent = 0.5 * std::max(bb.hi.real() - bb.lo.real(), bb.hi.imag() - bb.lo.imag());
  const double h = options_.initial_spacing * std::min(outer_radius(domain), extent);
  // stricter than the per-target test so most targets need no extra samples
  const double base_arg = options_.max_arg_step / 2.0;
  const double base_mod = options_.max_log_modulus_step / 2.0;
  for (const Contour& c : boundary_contour(domain, h)) {
    std::vector<Sample> out;
    const std::size_t n = c.points.size();
    std::vector<Complex> logs(n);
    for (std::size_t k = 0; k < n; ++k) logs[k] = log_map_(c.points[k]);
    long edges = 0;
    for (std::size_t k = 0; k < n; ++k) {
      const Complex za = c.points[k];
      const Complex zb = c.points[(k + 1) % n];
      // depth-first bisection emitting samples in order, excluding the far endpoint
      std::vector<Node> stack = {{zb, logs[(k + 1) % n], 0}};
      Node cur{za, logs[k], 0};
      while (!stack.empty()) {
        const Node next = stack.back();
        const int depth = std::max(cur.depth, next.depth);
        if (depth < options_.max_depth && needs_split(cur.s, next.s, base_arg, base_mod)) {
          const Complex zm = 0.5 * (cur.z + next.z);
          stack.push_back({zm, log_map_(zm), depth + 1});
          base_depth_ = std::max(base_depth_, depth + 1);
          continue;
        }
        out.push_back({cur.z, cur.s});
        if (++edges > options_.edge_budget)
          throw Error(ErrorCode::RefinementBudgetExceeded, "boundary sampling exceeded the edge budget");
        cur = next;
        stack.pop_back();
      }
    }
    contours_.push_back(std::move(out));
  }
}

PreimageCount BoundarySampler::count(Complex w) const {
  PreimageCount pc;
  pc.target = w;
  pc.domain_id = domain_id_;
  pc.refinement_depth = base_depth_;
  pc.min_boundary_gap = std::numeric_limits<double>::infinity();
  const double hit = 1e-9 * (1.0 + std::abs(w));
  double total = 0.0;
  for (const auto& contour : contours_) {
    const std::size_t n = contour.size();
    double sum = 0.0;
    long edges = 0;
    for (std::size_t k = 0; k < n; ++k) {
      const Sample& a = contour[k];
      const Sample& b = contour[(k + 1) % n];
      std::vector<Node> stack = {{b.z, shifted_log(b.log_value, w), 0}};
      Node cur{a.z, shifted_log(a.log_value, w), 0};
      while (!stack.empty()) {
        const Node next = stack.back();
        const double gap = std::exp(cur.s.real());
        pc.min_boundary_gap = std::min(pc.min_boundary_gap, gap);
        if (!(gap >= hit)) throw Error(ErrorCode::BoundaryHit, "target lies on or too near the boundary image");
        const int depth = std::max(cur.depth, next.depth);
        if (needs_split(cur.s, next.s, options_.max_arg_step, options_.max_log_modulus_step)) {
          if (depth >= options_.max_depth)
            throw Error(ErrorCode::RefinementBudgetExceeded, "edge bisection depth exhausted");
          const Complex zm = 0.5 * (cur.z + next.z);
          stack.push_back({zm, shifted_log(log_map_(zm), w), depth + 1});
          pc.refinement_depth = std::max(pc.refinement_depth, base_depth_ + depth + 1);
          continue;
        }
        sum += wrap_angle(next.s.imag() - cur.s.imag());
        ++pc.samples;
        if (++edges > options_.edge_budget)
          throw Error(ErrorCode::RefinementBudgetExceeded, "winding count exceeded the edge budget");
        cur = next;
        stack.pop_back();
      }
    }
    total += sum;
  }
  pc.count = static_cast<int>(std::lround(total / kTwoPi));
  return pc;
}

PreimageCount count_preimages(const FunctionSpec& spec, const PlanarDomain& domain, Complex w,
                              const WindingOptions& options) {
  return BoundarySampler(spec, domain, options).count(w);
}

PreimageCount count_critical_points(const FunctionSpec& spec, const PlanarDomain& domain,
                                    const WindingOptions& options) {
  return BoundarySampler([spec](Complex z) { return log_derivative(spec, z); }, domain, options).count(0.0);
}

std::vector<PreimageCluster> locate_preimages(const LogMap& log_map, Complex c, double half_side, Complex w,
                                              const LocateOptions& options) {
  if (!(half_side > 0.0) || !(options.min_radius > 0.0))
    throw Error(ErrorCode::InvalidArgument, "locate_preimages needs positive sizes");
  struct Cell {
    Complex c;
    double h;
  };
  // count in a disk slightly larger than the circumscribed one; nudge the radius on a hit
  auto disk_count = [&](Complex center, double radius) {
    for (int attempt = 0; attempt < 4; ++attempt) {
      try {
        return BoundarySampler(log_map, make_disk(center, radius), options.winding).count(w).count;
      } catch (const Error& e) {
        if (e.code() != ErrorCode::BoundaryHit) throw;
        radius *= 1.0 + 0.013 * (attempt + 1);
      }
    }
    throw Error(ErrorCode::BoundaryHit, "preimage sits on every trial circle");
  };
  std::vector<Cell> stack{{c, half_side}};
  std::vector<PreimageCluster> leaves;
  long used = 0;
  while (!stack.empty()) {
    const Cell cell = stack.back();
    stack.pop_back();
    if (++used > options.budget) throw Error(ErrorCode::SubdivisionBudgetExceeded, "locate_preimages");
    const double radius = cell.h * std::sqrt(2.0) * 1.001;
    const int n = disk_count(cell.c, radius);
    if (n == 0) continue;
    if (radius <= options.min_radius) {
      leaves.push_back({cell.c, radius, n});
      continue;
    }
    const double q = cell.h / 2.0;
    for (Complex off : {Complex(-q, -q), Complex(q, -q), Complex(-q, q), Complex(q, q)})
      stack.push_back({cell.c + off, q});
  }
  // merge overlapping leaves, then recount each merged cluster on its enclosing disk
  std::vector<int> group(leaves.size());
  for (std::size_t i = 0; i < leaves.size(); ++i) group[i] = static_cast<int>(i);
  auto find = [&](int i) {
    while (group[i] != i) i = group[i] = group[group[i]];
    return i;
  };
  for (std::size_t i = 0; i < leaves.size(); ++i)
    for (std::size_t k = i + 1; k < leaves.size(); ++k)
      if (std::abs(leaves[i].center - leaves[k].center) < leaves[i].radius + leaves[k].radius)
        group[find(static_cast<int>(i))] = find(static_cast<int>(k));
  std::vector<PreimageCluster> out;
  for (std::size_t i = 0; i < leaves.size(); ++i) {
    if (find(static_cast<int>(i)) != static_cast<int>(i)) continue;
    Complex sum{};
    int members = 0;
    for (std::size_t k = 0; k < leaves.size(); ++k)
      if (find(static_cast<int>(k)) == static_cast<int>(i)) sum += leaves[k].center, ++members;
    const Complex center = sum / static_cast<double>(members);
    double radius = 0.0;
    for (std::size_t k = 0; k < leaves.size(); ++k)
      if (find(static_cast<int>(k)) == static_cast<int>(i))
        radius = std::max(radius, std::abs(leaves[k].center - center) + leaves[k].radius);
    out.push_back({center, radius, members == 1 ? leaves[i].count : disk_count(center, radius)});
  }
  std::sort(out.begin(), out.end(), [](const PreimageCluster& a, const PreimageCluster& b) {
    if (a.center.real() != b.center.real()) return a.center.real() < b.center.real();
    return a.center.imag() < b.center.imag();
  });
  return out;
}

std::vector<PreimageCluster> locate_preimages(const FunctionSpec& spec, Complex c, double half_side, Complex w,
                                              const LocateOptions& options) {
  return locate_preimages([&spec](Complex z) { return log_evaluate(spec, z); }, c, half_side, w, options);
}

RoucheCertificate rouche_transfer(const FunctionSpec& spec, const PlanarDomain& domain, double r, Complex xi,
                                  const WindingOptions& options) {
  if (!(r > 0.0)) throw Error(ErrorCode::InvalidArgument, "r must be positive");
  if (!(std::abs(xi) < r)) throw Error(ErrorCode::InvalidArgument, "xi must lie in the disk |w| < r");
  const BoundarySampler sampler(spec, domain, options);
  constexpr double kDerivativeSafety = 1.5;
  RoucheCertificate cert;
  cert.r = r;
  cert.xi = xi;
  cert.min_sampled_modulus = std::numeric_limits<double>::infinity();
  cert.certified_lower = std::numeric_limits<double>::infinity();
  cert.method =
      "sampled boundary minimum minus (edge/2)*1.5*max sampled |f'| per edge; numerical, not interval-certified";
  auto modulus = [](Complex log_value) { return std::exp(log_value.real()); };
  auto dmod = [&](Complex z) { return std::exp(log_derivative(spec, z).real()); };
  for (const auto& contour : sampler.contours()) {
    const std::size_t n = contour.size();
    for (std::size_t k = 0; k < n; ++k) {
      struct Piece {
        Complex za, zb;
        double fa, fb;
        int depth;
      };
      std::vector<Piece> stack = {{contour[k].z, contour[(k + 1) % n].z, modulus(contour[k].log_value),
                                   modulus(contour[(k + 1) % n].log_value), 0}};
      while (!stack.empty()) {
        const Piece p = stack.back();
        stack.pop_back();
        cert.min_sampled_modulus = std::min({cert.min_sampled_modulus, p.fa, p.fb});
        const Complex zm = 0.5 * (p.za + p.zb);
        const double len = std::abs(p.zb - p.za);
        const double deriv = std::max({dmod(p.za), dmod(zm), dmod(p.zb)});
        const double lower = std::min(p.fa, p.fb) - 0.5 * len * kDerivativeSafety * deriv;
        const bool overflowed = std::isinf(p.fa) && std::isinf(p.fb);
        if (overflowed || lower >= r || p.depth >= 24) {
          if (!overflowed) cert.certified_lower = std::min(cert.certified_lower, lower);
          if (++cert.edges > options.edge_budget)
            throw Error(ErrorCode::MarginTooSmall, "edge budget exhausted while certifying the margin");
          continue;
        }
        const double fm = modulus(log_evaluate(spec, zm));
        stack.push_back({zm, p.zb, fm, p.fb, p.depth + 1});
        stack.push_back({p.za, zm, p.fa, fm, p.depth + 1});
      }
    }
  }
  cert.margin = cert.certified_lower - r;
  if (!(cert.certified_lower >= r))
    throw Error(ErrorCode::MarginTooSmall, "boundary modulus bound " + std::to_string(cert.certified_lower) +
                                               " does not reach r = " + std::to_string(r));
  cert.count = sampler.count(xi).count;
  return cert;
}

CoveringGridReport covering_report(const FunctionSpec& spec, const PlanarDomain& source, const PlanarDomain& target,
                                   double grid_step, int N, unsigned threads, const WindingOptions& options) {
  if (!(grid_step > 0.0)) throw Error(ErrorCode::InvalidArgument, "grid_step must be positive");
  CoveringGridReport rep;
  rep.source_id = source.id;
  rep.target_id = target.id;
  rep.grid_step = grid_step;
  rep.N = N;
  const BoundingBox bb = bounding_box(target);
  const long nx = static_cast<long>(std::floor((bb.hi.real() - bb.lo.real()) / grid_step)) + 1;
  const long ny = static_cast<long>(std::floor((bb.hi.imag() - bb.lo.imag()) / grid_step)) + 1;
  for (long j = 0; j < ny; ++j)
    for (long i = 0; i < nx; ++i) {
      const Complex w = bb.lo + grid_step * Complex(static_cast<double>(i), static_cast<double>(j));
      if (contains(target, w)) rep.points.push_back({j * nx + i, w, std::nullopt});
    }
  if (rep.points.empty()) return rep;
  const BoundarySampler sampler(spec, source, options);
  parallel_for(rep.points.size(), threads, [&](std::size_t k) {
    try {
      rep.points[k].count = sampler.count(rep.points[k].w).count;
    } catch (const Error& e) {
      if (e.code() != ErrorCode::BoundaryHit) throw;
    }
  });
  long evaluated = 0, good = 0;
  for (const auto& p : rep.points) {
    if (!p.count) {
      rep.skipped.push_back(p.index);
      continue;
    }
    ++evaluated;
    rep.min_count = rep.min_count ? std::min(*rep.min_count, *p.count) : *p.count;
    if (*p.count >= N)
      ++good;
    else
      rep.failing.push_back(p.index);
  }
  rep.fraction_at_least_N = evaluated ? static_cast<double>(good) / evaluated : 0.0;
  return rep;
}

nlohmann::json to_json(const PreimageCount& c) {
  return {{"target", complex_to_json(c.target)},
          {"domain_id", c.domain_id},
          {"count", c.count},
          {"min_boundary_gap", c.min_boundary_gap},
          {"refinement_depth", c.refinement_depth},
          {"samples", c.samples}};
}

nlohmann::json to_json(const RoucheCertificate& c) {
  return {{"count", c.count},
          {"r", c.r},
          {"xi", complex_to_json(c.xi)},
          {"min_sampled_modulus", c.min_sampled_modulus},
          {"certified_lower", c.certified_lower},
          {"margin", c.margin},
          {"edges", c.edges},
          {"method", c.method}};
}

nlohmann::json to_json(const CoveringGridReport& r) {
  nlohmann::json pts = nlohmann::json::array();
  for (const auto& p : r.points)
    pts.push_back({{"index", p.index},
                   {"w", complex_to_json(p.w)},
                   {"count", p.count ? nlohmann::json(*p.count) : nlohmann::json(nullptr)}});
  return {{"source_id", r.source_id},
          {"target_id", r.target_id},
          {"grid_step", r.grid_step},
          {"N", r.N},
          {"points", pts},
          {"min_count", r.min_count ? nlohmann::json(*r.min_count) : nlohmann::json(nullptr)},
          {"failing", r.failing},
          {"skipped", r.skipped},
          {"fraction_at_least_N", r.fraction_at_least_N}};
}

std::string covering_report_csv(const CoveringGridReport& r) {
  std::ostringstream os;
  os.precision(17);
  os << "index,re,im,count,status\n";
  for (const auto& p : r.points) {
    os << p.index << ',' << p.w.real() << ',' << p.w.imag() << ',';
    if (p.count)
      os << *p.count << ',' << (*p.count >= r.N ? "ok" : "failing") << '\n';
    else
      os << ",skipped\n";
  }
  return os.str();
}

std::string covering_report_svg(const CoveringGridReport& r) {
  std::ostringstream os;
  double x0 = 0, y0 = 0, x1 = 1, y1 = 1;
  if (!r.points.empty()) {
    x0 = x1 = r.points[0].w.real();
    y0 = y1 = r.points[0].w.imag();
    for (const auto& p : r.points) {
      x0 = std::min(x0, p.w.real());
      x1 = std::max(x1, p.w.real());
      y0 = std::min(y0, p.w.imag());
      y1 = std::max(y1, p.w.imag());
    }
  }
  const double s = r.grid_step;
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"" << x0 - s << ' ' << -(y1 + s) << ' '
     << (x1 - x0 + 2 * s) << ' ' << (y1 - y0 + 2 * s) << "\">\n";
  os << "<title>preimage counts in " << r.source_id << " over " << r.target_id << ", N=" << r.N << "</title>\n";
  for (const auto& p : r.points) {
    std::string fill = "#999999";
    if (p.count) {
      const double t = r.N > 0 ? std::clamp(static_cast<double>(*p.count) / r.N, 0.0, 1.0) : 1.0;
      const int hue = static_cast<int>(120 * t);  // red (short of N) to green (N or more)
      fill = "hsl(" + std::to_string(hue) + ",70%,45%)";
    }
    os << "<rect x=\"" << p.w.real() - s / 2 << "\" y=\"" << -p.w.imag() - s / 2 << "\" width=\"" << s
       << "\" height=\"" << s << "\" fill=\"" << fill << "\"><title>" << (p.count ? std::to_string(*p.count) : "skipped")
       << "</title></rect>\n";
  }
  os << "</svg>\n";
  return os.str();
}

}  // namespace etk
