#include <algorithm>
#include <atomic>
#include <cmath>
#include <functional>
#include <limits>

#include "etk/entropy.hpp"
#include "etk/error.hpp"
#include "etk/parallel.hpp"
#include "geometry.hpp"

namespace etk {

using detail::kPi;
using detail::kTwoPi;

namespace {

using Fn = std::function<Complex(Complex)>;

// Aberth iteration for a degree-n polynomial, driven by the Newton ratio p/p'.
std::vector<Complex> aberth(const Fn& newton_ratio, int n, std::vector<Complex> z) {
  for (int iter = 0; iter < 800; ++iter) {
    double worst = 0.0;
    for (int i = 0; i < n; ++i) {
      const Complex ratio = newton_ratio(z[i]);
      if (ratio == Complex{}) continue;
      Complex sum{};
      for (int j = 0; j < n; ++j)
        if (j != i) sum += 1.0 / (z[i] - z[j]);
      const Complex step = ratio / (1.0 - ratio * sum);
      if (!std::isfinite(step.real()) || !std::isfinite(step.imag())) continue;
      z[i] -= step;
      worst = std::max(worst, std::abs(step) / (1.0 + std::abs(z[i])));
    }
    if (worst < 1e-15) break;
  }
  return z;
}

// merges numerically coincident roots into clusters with multiplicity
std::vector<PreimageCluster> cluster_roots(const std::vector<Complex>& roots, double rel_tol) {
  std::vector<PreimageCluster> out;
  for (Complex r : roots) {
    bool merged = false;
    for (auto& c : out)
      if (std::abs(c.center - r) <= rel_tol * (1.0 + std::abs(r))) {
        c.center = (c.center * static_cast<double>(c.count) + r) / static_cast<double>(c.count + 1);
        c.radius = std::max(c.radius, std::abs(c.center - r));
        ++c.count;
        merged = true;
        break;
      }
    if (!merged) out.push_back({r, 0.0, 1});
  }
  return out;
}

std::vector<Complex> circle_guesses(int n, double r) {
  std::vector<Complex> z;
  for (int i = 0; i < n; ++i) z.push_back(std::polar(r, kTwoPi * i / n + 0.4));
  return z;
}

double cauchy_radius(const std::vector<Complex>& c) {
  const int n = static_cast<int>(c.size()) - 1;
  double r = 0.0;
  for (int k = 0; k < n; ++k) r = std::max(r, std::pow(std::abs(c[k] / c[n]), 1.0 / (n - k)));
  return std::max(r, 1e-3);
}

std::vector<Complex> trim(std::vector<Complex> c) {
  while (c.size() > 1 && c.back() == Complex{}) c.pop_back();
  return c;
}

Complex horner(const std::vector<Complex>& c, Complex z) {
  Complex v{};
  for (auto it = c.rbegin(); it != c.rend(); ++it) v = v * z + *it;
  return v;
}

std::vector<Complex> derivative_coeffs(const std::vector<Complex>& c) {
  std::vector<Complex> d;
  for (std::size_t k = 1; k < c.size(); ++k) d.push_back(c[k] * static_cast<double>(k));
  if (d.empty()) d.push_back(0.0);
  return d;
}

std::vector<PreimageCluster> polynomial_roots(std::vector<Complex> c) {
  c = trim(std::move(c));
  const int n = static_cast<int>(c.size()) - 1;
  if (n < 1) return {};
  const auto d = derivative_coeffs(c);
  const auto roots = aberth([&](Complex z) { return horner(c, z) / horner(d, z); }, n,
                            circle_guesses(n, cauchy_radius(c)));
  return cluster_roots(roots, 1e-7);
}

std::vector<Complex> coefficients(const FunctionSpec& spec) {
  if (const auto* p = spec.as<Polynomial>()) return p->coeffs;
  if (const auto* t = spec.as<TaylorTruncated>()) return t->coeffs;
  return {};
}

bool finite(Complex z) { return std::isfinite(z.real()) && std::isfinite(z.imag()); }

}  // namespace

double entropy_floor(int N, long degree_product, int m) {
  if (N < 1 || degree_product < 1 || m < 1) throw Error(ErrorCode::InvalidArgument, "entropy floor needs N, D, m >= 1");
  return std::log(static_cast<double>(N)) - std::log(static_cast<double>(degree_product)) / m;
}

std::vector<PreimageCluster> solve_preimages(const FunctionSpec& spec, const PlanarDomain& V, Complex y) {
  std::vector<PreimageCluster> all;
  if (const auto* e = spec.as<ExpAffine>()) {
    if (y == Complex{}) return {};
    const Complex L = std::log(y) - e->b;
    const double reach = std::abs(e->a) * outer_radius(V) + std::abs(L);
    const long K = static_cast<long>(std::ceil(reach / kTwoPi)) + 1;
    for (long k = -K; k <= K; ++k) all.push_back({(L + Complex(0.0, kTwoPi * k)) / e->a, 0.0, 1});
  } else if (const auto* lp = spec.as<LacunaryProduct>()) {
    const int n = static_cast<int>(lp->zeros.size());
    std::vector<Complex> guess;
    for (int i = 0; i < n; ++i) guess.push_back(lp->zeros[i] * Complex(1.0, 1e-3));
    const auto roots =
        aberth([&](Complex z) { return (evaluate(spec, z) - y) / derivative(spec, z); }, n, guess);
    all = cluster_roots(roots, 1e-7);
  } else {
    auto c = coefficients(spec);
    c[0] -= y;
    all = polynomial_roots(std::move(c));
  }
  std::vector<PreimageCluster> out;
  for (const auto& c : all)
    if (finite(c.center) && contains(V, c.center)) out.push_back(c);
  return out;
}

CriticalData critical_data(const FunctionSpec& spec, const PlanarDomain& V, const CriticalOptions& options) {
  CriticalData out;
  std::vector<PreimageCluster> zeros;
  if (spec.as<ExpAffine>()) {
    // (e^(az+b))' never vanishes
  } else if (const auto* lp = spec.as<LacunaryProduct>()) {
    // f'/f'' = S1 / (S1^2 - S2) with S_k = sum (z - z_i)^-k over the finite zeros; the tail is ignored
    const auto& zs = lp->zeros;
    const int n = static_cast<int>(zs.size()) - 1;
    if (n >= 1) {
      std::vector<Complex> guess;
      for (int i = 0; i < n; ++i) guess.push_back(std::sqrt(zs[i] * zs[i + 1]) * Complex(1.0, 1e-3));
      const auto roots = aberth(
          [&](Complex z) {
            Complex s1{}, s2{};
            for (Complex a : zs) {
              const Complex inv = 1.0 / (z - a);
              s1 += inv;
              s2 += inv * inv;
            }
            return s1 / (s1 * s1 - s2);
          },
          n, guess);
      zeros = cluster_roots(roots, 1e-7);
    }
  } else {
    zeros = polynomial_roots(derivative_coeffs(coefficients(spec)));
  }
  for (const auto& zc : zeros) {
    if (!contains(V, zc.center)) continue;
    CriticalPoint cp;
    cp.location = zc.center;
    cp.local_degree = 1 + zc.count;
    // conservative: a near-return within 10x the tolerance counts as periodic
    Complex z = cp.location;
    const double tol = options.return_tol * (1.0 + std::abs(cp.location));
    for (int p = 1; p <= options.period_budget; ++p) {
      z = evaluate(spec, z);
      if (!finite(z) || std::abs(z) > 1e300) break;
      if (std::abs(z - cp.location) <= 10.0 * tol) {
        cp.periodic = true;
        cp.period = p;
        break;
      }
    }
    out.critical_points.push_back(cp);
    if (!cp.periodic) out.degree_product *= cp.local_degree;
  }
  return out;
}

namespace {

double halton(long i, int base) {
  double f = 1.0, r = 0.0;
  while (i > 0) {
    f /= base;
    r += f * static_cast<double>(i % base);
    i /= base;
  }
  return r;
}

// g^n(Delta(x, rho)) misses Delta(x, rho) for n <= m, on sampled boundary points and the centre
bool shield_holds(const FunctionSpec& spec, Complex x, double rho, int m) {
  for (int s = 0; s <= 64; ++s) {
    Complex z = s == 64 ? x : x + std::polar(rho, kTwoPi * s / 64);
    for (int n = 1; n <= m; ++n) {
      z = evaluate(spec, z);
      if (!finite(z)) break;
      if (std::abs(z - x) <= rho) return false;
    }
  }
  return true;
}

// largest halved disk around a periodic point whose image under f^p stays inside it
Disk superattracting_disk(const FunctionSpec& spec, const CriticalPoint& c, double start) {
  double rho = start;
  for (int it = 0; it < 60; ++it, rho /= 2.0) {
    bool inside = true;
    for (int s = 0; s < 64 && inside; ++s) {
      Complex z = c.location + std::polar(rho, kTwoPi * s / 64);
      for (int p = 0; p < c.period; ++p) z = evaluate(spec, z);
      inside = finite(z) && std::abs(z - c.location) < rho;
    }
    if (inside) return {c.location, rho};
  }
  return {c.location, rho};
}

}  // namespace

BackwardOrbitResult backward_orbit_separated_count(const FunctionSpec& spec, const CoveringCertificate& cert,
                                                   const BackwardOrbitParams& params) {
  if (params.m < 0 || params.k < 0) throw Error(ErrorCode::InvalidArgument, "m and k must be non-negative");
  const PlanarDomain& V = cert.V;
  BackwardOrbitResult out;
  out.N = cert.N;
  const int cap = params.branch_cap > 0 ? params.branch_cap : cert.N;
  const int depth = params.m * params.k;
  const double scale = cert.R > 0.0 ? cert.R : outer_radius(V);

  const CriticalData crit = critical_data(spec, V);
  out.degree_product = crit.degree_product;
  const int mm = std::max(1, params.m);

  // shield radius for the non-periodic critical points
  double rho = params.critical_shield > 0.0 ? params.critical_shield : scale / 10.0;
  for (const auto& c : crit.critical_points) {
    if (c.periodic) continue;
    int halvings = 0;
    while (!shield_holds(spec, c.location, rho, mm)) {
      if (params.critical_shield > 0.0 || ++halvings > 60)
        throw Error(ErrorCode::PreconditionViolated, "critical shield property fails");
      rho /= 2.0;
    }
  }
  out.critical_shield = rho;

  out.exclusion = params.superattracting_exclusion;
  for (const auto& c : crit.critical_points)
    if (c.periodic) out.exclusion.push_back(superattracting_disk(spec, c, scale / 10.0));
  auto in_V_prime = [&](Complex z) {
    if (!contains(V, z)) return false;
    for (const auto& d : out.exclusion)
      if (std::abs(z - d.center) <= d.radius) return false;
    return true;
  };

  // points of critical orbits, to keep the base point away from them
  std::vector<Complex> crit_orbit;
  for (const auto& c : crit.critical_points) {
    Complex z = c.location;
    for (int n = 0; n <= mm; ++n) {
      crit_orbit.push_back(z);
      z = evaluate(spec, z);
      if (!finite(z)) break;
    }
  }
  if (params.base_point) {
    out.base_point = *params.base_point;
    if (!in_V_prime(out.base_point)) throw Error(ErrorCode::PreconditionViolated, "base point outside V'");
  } else {
    const BoundingBox bb = bounding_box(V);
    bool found = false;
    for (long i = 1; i < 100000 && !found; ++i) {
      const Complex z(bb.lo.real() + (bb.hi.real() - bb.lo.real()) * halton(i, 2),
                      bb.lo.imag() + (bb.hi.imag() - bb.lo.imag()) * halton(i, 3));
      if (!in_V_prime(z)) continue;
      bool clear = true;
      for (Complex q : crit_orbit) clear = clear && std::abs(z - q) > 2.0 * rho;
      if (clear) out.base_point = z, found = true;
    }
    if (!found) throw Error(ErrorCode::PreconditionViolated, "no admissible base point in V'");
  }

  auto children_of = [&](Complex y) {
    std::vector<PreimageCluster> c;
    for (const auto& p : solve_preimages(spec, V, y))
      if (in_V_prime(p.center)) c.push_back(p);
    std::sort(c.begin(), c.end(), [](const PreimageCluster& a, const PreimageCluster& b) {
      const double ra = std::abs(a.center), rb = std::abs(b.center);
      if (ra != rb) return ra < rb;
      return std::arg(a.center) < std::arg(b.center);
    });
    return c;
  };

  const auto first = children_of(out.base_point);
  out.epsilon = params.epsilon;
  if (!(out.epsilon > 0.0)) {
    double gap = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < first.size(); ++i)
      for (std::size_t j = i + 1; j < first.size(); ++j) gap = std::min(gap, std::abs(first[i].center - first[j].center));
    out.epsilon = std::isfinite(gap) ? gap / 2.0 : scale * 1e-3;
  }
  const double eps = out.epsilon;

  auto pick = [&](const std::vector<PreimageCluster>& c) {
    std::vector<Complex> kept;
    for (const auto& p : c) {
      if (static_cast<int>(kept.size()) >= cap) break;
      bool ok = true;
      for (Complex q : kept) ok = ok && std::abs(p.center - q) > eps;
      if (ok) kept.push_back(p.center);
    }
    return kept;
  };

  std::atomic<long> nodes{0}, checked{0}, mismatches{0};
  auto check = [&](Complex y, int level) {
    if (level > params.consistency_depth) return;
    int found = 0;
    for (const auto& p : solve_preimages(spec, V, y)) found += p.count;
    try {
      const int counted = count_preimages(spec, V, y).count;
      ++checked;
      if (counted != found) ++mismatches;
    } catch (const Error& e) {
      if (e.code() != ErrorCode::BoundaryHit) throw;
    }
  };

  // depth-first count of leaves below y at the given level
  std::function<std::uint64_t(Complex, int)> count_below = [&](Complex y, int level) -> std::uint64_t {
    if (level == depth) return 1;
    if (++nodes > params.node_budget) throw Error(ErrorCode::EnumerationBudgetExceeded, "backward orbit node budget");
    check(y, level);
    std::uint64_t total = 0;
    for (Complex z : pick(children_of(y))) total += count_below(z, level + 1);
    return total;
  };

  if (depth == 0) {
    out.count = 1;
  } else {
    ++nodes;
    check(out.base_point, 0);
    const auto top = pick(first);
    std::vector<std::uint64_t> partial(top.size(), 0);
    parallel_for(top.size(), params.threads, [&](std::size_t i) { partial[i] = count_below(top[i], 1); });
    for (auto v : partial) out.count += v;
  }
  out.nodes = nodes;
  out.checked_nodes = checked;
  out.consistency_mismatches = mismatches;
  out.floor = std::pow(std::pow(static_cast<double>(cert.N), params.m) / static_cast<double>(out.degree_product),
                       params.k);
  out.meets_floor = static_cast<double>(out.count) >= out.floor;
  return out;
}

EntropyBound certificate_entropy_bound(const FunctionSpec& spec, const CoveringCertificate& cert,
                                       const BackwardOrbitParams& params) {
  if (params.m < 1 || params.k < 1) throw Error(ErrorCode::InvalidArgument, "entropy bound needs m, k >= 1");
  EntropyBound b;
  b.orbits = backward_orbit_separated_count(spec, cert, params);
  b.measured = b.orbits.count > 0 ? std::log(static_cast<double>(b.orbits.count)) / (params.k * params.m) : 0.0;
  b.floor = entropy_floor(cert.N, b.orbits.degree_product, params.m);
  return b;
}

nlohmann::json to_json(const CriticalData& c) {
  nlohmann::json pts = nlohmann::json::array();
  for (const auto& p : c.critical_points)
    pts.push_back({{"location", complex_to_json(p.location)},
                   {"local_degree", p.local_degree},
                   {"periodic", p.periodic},
                   {"period", p.period}});
  return {{"critical_points", pts}, {"degree_product", c.degree_product}};
}

nlohmann::json to_json(const BackwardOrbitResult& r) {
  nlohmann::json ex = nlohmann::json::array();
  for (const auto& d : r.exclusion) ex.push_back({{"center", complex_to_json(d.center)}, {"radius", d.radius}});
  return {{"count", r.count},
          {"base_point", complex_to_json(r.base_point)},
          {"epsilon", r.epsilon},
          {"critical_shield", r.critical_shield},
          {"degree_product", r.degree_product},
          {"N", r.N},
          {"floor", r.floor},
          {"meets_floor", r.meets_floor},
          {"nodes", r.nodes},
          {"checked_nodes", r.checked_nodes},
          {"consistency_mismatches", r.consistency_mismatches},
          {"exclusion", ex}};
}

nlohmann::json to_json(const EntropyBound& b) {
  return {{"measured", b.measured}, {"floor", b.floor}, {"orbits", to_json(b.orbits)}};
}

}  // namespace etk
