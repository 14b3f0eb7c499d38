#include "etk/hyperbolic.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <queue>
#include <random>

#include "etk/error.hpp"
#include "etk/parallel.hpp"
#include "geometry.hpp"

namespace etk {

using detail::kPi;

double HyperbolicConfig::K_hempel() {
  const double g = std::tgamma(0.25);
  return g * g * g * g / (4.0 * kPi * kPi);
}

double HyperbolicConfig::validity_threshold() { return std::exp(5.0); }

double omega01_density_lower(Complex z) {
  const double r = std::abs(z);
  if (!(r > HyperbolicConfig::validity_threshold()))
    throw Error(ErrorCode::BelowThreshold, "density bound needs |z| > e^5");
  return 1.0 / (2.0 * r * std::log(r));
}

double radial_distance_lower(double s1, double s2) {
  // ln ln e^5 is exactly ln 5, so accept the threshold itself up to rounding.
  const double t = HyperbolicConfig::validity_threshold() * (1.0 - 1e-15);
  if (!(s1 >= t) || !(s2 >= t))
    throw Error(ErrorCode::BelowThreshold, "radial bound needs both radii >= e^5");
  if (s2 < s1) throw Error(ErrorCode::InvalidArgument, "radial bound needs s1 <= s2");
  return 0.5 * (std::log(std::log(s2)) - std::log(std::log(s1)));
}

double k_constant(double d) {
  if (!(d >= 0.0)) throw Error(ErrorCode::InvalidArgument, "d must be nonnegative");
  return std::exp(5.0 * std::exp(d));
}

double lemma2_floor(double alpha_mod, double M, double d) {
  if (!(alpha_mod > 0.0) || !(M > 0.0) || !(d >= 0.0))
    throw Error(ErrorCode::InvalidArgument, "lemma2_floor needs alpha_mod > 0, M > 0, d >= 0");
  const double ed = std::exp(d);
  // compare in logs: k(d) overflows for moderate d
  if (!(std::log(M) > 5.0 * ed + std::log(alpha_mod)))
    throw Error(ErrorCode::HypothesisFailed, "M must exceed k(d)*|alpha|");
  return std::exp((ed - 1.0) / ed * std::log(alpha_mod) + std::log(M) / ed);
}

AnnulusAN annulus_AN(double m, double M, double d, int N, std::optional<Complex> alpha) {
  if (!(m >= 0.0) || !(M > m) || N < 1)
    throw Error(ErrorCode::InvalidArgument, "annulus_AN needs 0 <= m < M and N >= 1");
  if (!(d > 0.0)) throw Error(ErrorCode::InvalidArgument, "annulus_AN needs d > 0 (e^d = 1 is degenerate)");
  const double ed = std::exp(d);
  AnnulusAN out;
  double top = M;
  double bottom = m;
  if (alpha) {
    out.center = *alpha;
    top = std::abs(M - std::abs(*alpha));
    bottom = m + std::abs(*alpha);
  }
  if (!(top > 0.0)) {
    out.empty = true;
    return out;
  }
  const double log_k = 5.0 * ed;
  out.r_upper = std::exp(std::log(top) - N * log_k);
  out.r_lower = bottom == 0.0 ? 0.0 : std::exp((ed * std::log(bottom) - std::log(top)) / (ed - 1.0));
  out.empty = !(out.r_lower < out.r_upper);
  return out;
}

namespace {

bool is_simply_connected(const PlanarDomain& d) {
  if (d.simply_connected) return true;
  return d.removed_disks.empty() && d.slits.empty() && !std::holds_alternative<Annulus>(d.base);
}

double inv_dist(const PlanarDomain& d, Complex z) {
  const double b = contains(d, z) ? boundary_distance(d, z) : 0.0;
  return b > 0.0 ? 1.0 / b : std::numeric_limits<double>::infinity();
}

double simpson_rec(const PlanarDomain& d, Complex a, Complex dir, double t0, double t1, double f0,
                   double fm, double f1, double whole, double tol, int depth) {
  const double tm = 0.5 * (t0 + t1);
  const double fl = inv_dist(d, a + dir * (0.5 * (t0 + tm)));
  const double fr = inv_dist(d, a + dir * (0.5 * (tm + t1)));
  const double h = t1 - t0;
  const double left = h / 12.0 * (f0 + 4.0 * fl + fm);
  const double right = h / 12.0 * (fm + 4.0 * fr + f1);
  const double diff = left + right - whole;
  if (!std::isfinite(diff)) return std::numeric_limits<double>::infinity();
  if (depth <= 0 || std::abs(diff) <= 15.0 * tol) return left + right + diff / 15.0;
  return simpson_rec(d, a, dir, t0, tm, f0, fl, fm, left, tol / 2.0, depth - 1) +
         simpson_rec(d, a, dir, tm, t1, fm, fr, f1, right, tol / 2.0, depth - 1);
}

double segment_cost(const PlanarDomain& d, Complex a, Complex b, double rel_tol) {
  const double len = std::abs(b - a);
  if (len == 0.0) return 0.0;
  const Complex dir = (b - a) / len;
  const double f0 = inv_dist(d, a);
  const double f1 = inv_dist(d, b);
  const double fm = inv_dist(d, a + dir * (0.5 * len));
  const double whole = len / 6.0 * (f0 + 4.0 * fm + f1);
  if (!std::isfinite(whole)) return std::numeric_limits<double>::infinity();
  return simpson_rec(d, a, dir, 0.0, len, f0, fm, f1, whole, rel_tol * whole, 40);
}

struct GridPath {
  std::vector<Complex> points;
  bool found = false;
};

GridPath grid_dijkstra(const PlanarDomain& dom, Complex z1, Complex z2, int n) {
  const BoundingBox bb = bounding_box(dom);
  const double w = bb.hi.real() - bb.lo.real();
  const double h = bb.hi.imag() - bb.lo.imag();
  const double hx = w / (n - 1);
  const double hy = h / (n - 1);
  const int total = n * n + 2;
  const int src = n * n;
  const int dst = n * n + 1;
  std::vector<Complex> pos(total);
  std::vector<double> inv(total, std::numeric_limits<double>::infinity());
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i) {
      const Complex p = bb.lo + Complex(i * hx, j * hy);
      pos[j * n + i] = p;
      inv[j * n + i] = inv_dist(dom, p);
    }
  pos[src] = z1;
  pos[dst] = z2;
  inv[src] = inv_dist(dom, z1);
  inv[dst] = inv_dist(dom, z2);

  auto edge_cost = [&](int a, int b) {
    if (!std::isfinite(inv[a]) || !std::isfinite(inv[b])) return std::numeric_limits<double>::infinity();
    if (!segment_inside(dom, pos[a], pos[b])) return std::numeric_limits<double>::infinity();
    const double mid = inv_dist(dom, 0.5 * (pos[a] + pos[b]));
    return std::abs(pos[b] - pos[a]) / 6.0 * (inv[a] + 4.0 * mid + inv[b]);
  };
  // nodes near an endpoint, for attaching it to the lattice
  auto near_nodes = [&](Complex z) {
    std::vector<int> out;
    const int ci = static_cast<int>(std::lround((z.real() - bb.lo.real()) / hx));
    const int cj = static_cast<int>(std::lround((z.imag() - bb.lo.imag()) / hy));
    for (int dj = -3; dj <= 3; ++dj)
      for (int di = -3; di <= 3; ++di) {
        const int i = ci + di;
        const int j = cj + dj;
        if (i >= 0 && j >= 0 && i < n && j < n) out.push_back(j * n + i);
      }
    return out;
  };
  std::vector<char> links_dst(total, 0);
  for (int v : near_nodes(z2)) links_dst[v] = 1;

  static constexpr int kOffsets[16][2] = {{1, 0},  {0, 1},  {-1, 0}, {0, -1}, {1, 1},  {1, -1},
                                          {-1, 1}, {-1, -1}, {1, 2},  {2, 1},  {-1, 2}, {-2, 1},
                                          {1, -2}, {2, -1}, {-1, -2}, {-2, -1}};
  std::vector<double> dist(total, std::numeric_limits<double>::infinity());
  std::vector<int> prev(total, -1);
  using Item = std::pair<double, int>;
  std::priority_queue<Item, std::vector<Item>, std::greater<>> pq;
  dist[src] = 0.0;
  pq.push({0.0, src});
  auto relax = [&](int a, int b) {
    const double c = edge_cost(a, b);
    if (dist[a] + c < dist[b]) {
      dist[b] = dist[a] + c;
      prev[b] = a;
      pq.push({dist[b], b});
    }
  };
  while (!pq.empty()) {
    const auto [du, u] = pq.top();
    pq.pop();
    if (du > dist[u]) continue;
    if (u == dst) break;
    if (u == src) {
      relax(src, dst);
      for (int v : near_nodes(z1)) relax(src, v);
      continue;
    }
    const int i = u % n;
    const int j = u / n;
    for (const auto& o : kOffsets) {
      const int a = i + o[0];
      const int b = j + o[1];
      if (a < 0 || b < 0 || a >= n || b >= n) continue;
      relax(u, b * n + a);
    }
    if (links_dst[u]) relax(u, dst);
  }
  GridPath out;
  if (!std::isfinite(dist[dst])) return out;
  for (int v = dst; v != -1; v = prev[v]) out.points.push_back(pos[v]);
  std::reverse(out.points.begin(), out.points.end());
  out.found = true;
  return out;
}

std::vector<Complex> shortcut(const PlanarDomain& dom, std::vector<Complex> path, int window) {
  const double cheap_tol = 1e-4;
  for (int pass = 0; pass < 2; ++pass) {
    const int n = static_cast<int>(path.size());
    std::vector<double> prefix(n, 0.0);
    for (int k = 1; k < n; ++k) prefix[k] = prefix[k - 1] + segment_cost(dom, path[k - 1], path[k], cheap_tol);
    std::vector<Complex> out = {path[0]};
    int i = 0;
    bool changed = false;
    while (i < n - 1) {
      int next = i + 1;
      for (int j = std::min(n - 1, i + window); j >= i + 2; --j) {
        if (!segment_inside(dom, path[i], path[j])) continue;
        if (segment_cost(dom, path[i], path[j], cheap_tol) < prefix[j] - prefix[i]) {
          next = j;
          changed = true;
          break;
        }
      }
      out.push_back(path[next]);
      i = next;
    }
    path = std::move(out);
    if (!changed) break;
  }
  return path;
}

// Local descent on interior vertices; the polyline is first subdivided so it can bend.
std::vector<Complex> relax(const PlanarDomain& dom, const std::vector<Complex>& path, double tol) {
  double len = 0.0;
  for (std::size_t k = 1; k < path.size(); ++k) len += std::abs(path[k] - path[k - 1]);
  if (len == 0.0) return path;
  const double max_seg = len / 16.0;
  std::vector<Complex> p = {path[0]};
  for (std::size_t k = 1; k < path.size(); ++k) {
    const int pieces = std::max(1, static_cast<int>(std::ceil(std::abs(path[k] - path[k - 1]) / max_seg)));
    for (int s = 1; s <= pieces; ++s) p.push_back(path[k - 1] + (path[k] - path[k - 1]) * (double(s) / pieces));
  }
  const std::size_t n = p.size();
  auto local = [&](std::size_t k, Complex at) {
    if (!segment_inside(dom, p[k - 1], at) || !segment_inside(dom, at, p[k + 1]))
      return std::numeric_limits<double>::infinity();
    return segment_cost(dom, p[k - 1], at, tol) + segment_cost(dom, at, p[k + 1], tol);
  };
  double step = max_seg / 2.0;
  while (step > len * 1e-4) {
    bool improved = false;
    for (std::size_t k = 1; k + 1 < n; ++k) {
      Complex t = p[k + 1] - p[k - 1];
      if (std::abs(t) == 0.0) continue;
      t /= std::abs(t);
      const Complex nrm = t * Complex(0.0, 1.0);
      double best = local(k, p[k]);
      for (Complex dir : {nrm, -nrm, t, -t}) {
        const Complex cand = p[k] + step * dir;
        const double c = local(k, cand);
        if (c < best) {
          best = c;
          p[k] = cand;
          improved = true;
        }
      }
    }
    if (!improved) step /= 2.0;
  }
  return p;
}

}  // namespace

double quasihyperbolic_length(const PlanarDomain& domain, const std::vector<Complex>& path, double rel_tol) {
  double total = 0.0;
  for (std::size_t k = 1; k < path.size(); ++k) total += segment_cost(domain, path[k - 1], path[k], rel_tol);
  return total;
}

DiameterEstimate quasihyperbolic_upper(const PlanarDomain& domain, Complex z1, Complex z2,
                                       const QuasiHyperbolicOptions& options) {
  if (!is_simply_connected(domain))
    throw Error(ErrorCode::NotSimplyConnected, "quasihyperbolic bound needs a simply connected domain");
  if (!contains(domain, z1) || !contains(domain, z2))
    throw Error(ErrorCode::InvalidArgument, "endpoints must be interior points");
  DiameterEstimate est;
  est.domain_id = domain.id;
  est.subset_id = "pair";
  if (z1 == z2) {
    est.path_witness = {z1, z2};
    return est;
  }
  if (options.grid < 4 || options.max_grid < options.grid)
    throw Error(ErrorCode::InvalidArgument, "grid must be >= 4 and <= max_grid");
  for (int n = options.grid; n <= options.max_grid; n *= 2) {
    GridPath gp = grid_dijkstra(domain, z1, z2, n);
    if (!gp.found) continue;
    est.path_witness = shortcut(domain, std::move(gp.points), options.smoothing_window);
    est.path_witness = relax(domain, est.path_witness, 1e-6);
    est.upper_bound = quasihyperbolic_length(domain, est.path_witness, options.rel_tol);
    return est;
  }
  throw Error(ErrorCode::Disconnected, "no grid path joins the two points");
}

namespace {

struct Trial {
  PlanarDomain domain;
  Complex z1, z2;
};

Trial draw_case1(std::mt19937_64& rng, double R, double jexp) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const double theta = 2.0 * kPi * u(rng);
  const PlanarDomain cr = build_CR(R, theta);
  auto in_cr = [&] {
    for (;;) {
      const Complex z = std::polar(2.0 * R / 3.0 + (5.0 * R / 6.0) * u(rng), theta + (4.0 * kPi / 3.0) * (u(rng) - 0.5));
      if (contains(cr, z)) return z;
    }
  };
  const Complex z1 = in_cr();
  const Complex z2 = in_cr();
  Complex alpha;
  do {
    alpha = std::polar(0.4 * R + 1.8 * R * u(rng), 2.0 * kPi * u(rng));
  } while (std::abs(alpha - z1) < R / 20.0 * (1 + 1e-9) || std::abs(alpha - z2) < R / 20.0 * (1 + 1e-9));
  return {build_case1_domain(alpha, R, theta, jexp, z1, z2).domain, z1, z2};
}

Trial draw_case2(std::mt19937_64& rng, double R, double eps, int ell, double jexp) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const double lo = R / 2.0 + eps * R;
  const double hi = 2.0 * R - eps * R;
  auto draw = [&] { return std::polar(lo + (hi - lo) * u(rng), 2.0 * kPi * u(rng)); };
  const double sep = eps * R * (1 + 1e-9);
  Complex alpha, z1, z2;
  do {
    alpha = draw();
    z1 = draw();
    z2 = draw();
  } while (std::abs(alpha - z1) < sep || std::abs(alpha - z2) < sep || std::abs(z1 - z2) < sep);
  std::vector<Complex> avoided;
  while (static_cast<int>(avoided.size()) < ell) {
    const Complex x = draw();
    if (std::abs(x - z1) >= sep && std::abs(x - z2) >= sep) avoided.push_back(x);
  }
  return {build_case2_domain(alpha, avoided, eps, R, jexp, z1, z2), z1, z2};
}

}  // namespace

MeasureDResult measure_d_constant(double R, int trials, DScenario scenario, const MeasureDParams& params) {
  if (trials < 1) throw Error(ErrorCode::InvalidArgument, "trials must be >= 1");
  if (!(R > 1.0)) throw Error(ErrorCode::InvalidArgument, "R must exceed 1");
  std::vector<DiameterEstimate> estimates(trials);
  std::vector<PlanarDomain> domains(trials);
  parallel_for(static_cast<std::size_t>(trials), params.threads, [&](std::size_t i) {
    std::mt19937_64 rng(stream_seed(params.seed, i));
    Trial t = scenario == DScenario::Case1 ? draw_case1(rng, R, params.jexp)
                                           : draw_case2(rng, R, params.eps, params.avoided, params.jexp);
    estimates[i] = quasihyperbolic_upper(t.domain, t.z1, t.z2, params.qh);
    estimates[i].subset_id = "trial_" + std::to_string(i);
    domains[i] = std::move(t.domain);
  });
  MeasureDResult out;
  for (int i = 0; i < trials; ++i) {
    out.per_trial.push_back(estimates[i].upper_bound);
    if (out.worst_trial < 0 || estimates[i].upper_bound > out.d_half) {
      out.d_half = estimates[i].upper_bound;
      out.worst_trial = i;
    }
  }
  out.worst = estimates[out.worst_trial];
  out.worst_domain = domains[out.worst_trial];
  return out;
}

nlohmann::json to_json(const DiameterEstimate& e) {
  nlohmann::json path = nlohmann::json::array();
  for (auto p : e.path_witness) path.push_back(complex_to_json(p));
  return {{"domain_id", e.domain_id},
          {"subset_id", e.subset_id},
          {"upper_bound", e.upper_bound},
          {"path_witness", path}};
}

}  // namespace etk
