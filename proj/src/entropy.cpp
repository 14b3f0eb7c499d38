#include "etk/entropy.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <unordered_map>

#include "etk/error.hpp"
#include "etk/parallel.hpp"
#include "geometry.hpp"

namespace etk {

using detail::kTwoPi;

CompactSet CompactSet::circle(Complex c, double r, long seeds, double tol) {
  if (!(r > 0.0) || seeds < 1 || !(tol >= 0.0)) throw Error(ErrorCode::InvalidArgument, "circle needs r > 0, seeds >= 1");
  CompactSet x;
  x.kind = Kind::Circle;
  x.center = c;
  x.radius = r;
  x.circle_seeds = seeds;
  x.tolerance = tol;
  std::ostringstream id;
  id << "circle(" << c.real() << "," << c.imag() << ";" << r << ")";
  x.id = id.str();
  return x;
}

CompactSet CompactSet::points(std::vector<Complex> cloud, double tol, std::string id) {
  if (cloud.empty() || !(tol > 0.0)) throw Error(ErrorCode::InvalidArgument, "cloud needs points and tol > 0");
  CompactSet x;
  x.kind = Kind::Cloud;
  x.cloud = std::move(cloud);
  x.tolerance = tol;
  x.id = std::move(id);
  return x;
}

CompactSet CompactSet::closure(const PlanarDomain& region, double seed_step) {
  if (!(seed_step > 0.0)) throw Error(ErrorCode::InvalidArgument, "seed step must be positive");
  validate(region);
  CompactSet x;
  x.kind = Kind::Region;
  x.region = region;
  x.seed_step = seed_step;
  x.id = region.id.empty() ? "region" : region.id;
  return x;
}

nlohmann::json to_json(const CompactSet& x) {
  nlohmann::json j = {{"id", x.id}, {"tolerance", x.tolerance}};
  switch (x.kind) {
    case CompactSet::Kind::Circle:
      j["kind"] = "circle";
      j["center"] = complex_to_json(x.center);
      j["radius"] = x.radius;
      j["seeds"] = x.circle_seeds;
      break;
    case CompactSet::Kind::Cloud: {
      j["kind"] = "cloud";
      nlohmann::json pts = nlohmann::json::array();
      for (Complex z : x.cloud) pts.push_back(complex_to_json(z));
      j["points"] = pts;
      break;
    }
    case CompactSet::Kind::Region:
      j["kind"] = "region";
      j["region"] = to_json(x.region);
      j["seed_step"] = x.seed_step;
      break;
  }
  return j;
}

CompactSet compact_set_from_json(const nlohmann::json& j) {
  try {
    const std::string kind = j.at("kind").get<std::string>();
    const double tol = j.value("tolerance", 1e-9);
    if (kind == "circle")
      return CompactSet::circle(j.contains("center") ? complex_from_json(j.at("center")) : Complex{},
                                j.at("radius").get<double>(), j.value("seeds", 1L << 17), tol);
    if (kind == "cloud") {
      std::vector<Complex> pts;
      for (const auto& p : j.at("points")) pts.push_back(complex_from_json(p));
      return CompactSet::points(std::move(pts), tol, j.value("id", std::string("cloud")));
    }
    if (kind == "region") return CompactSet::closure(domain_from_json(j.at("region")), j.at("seed_step").get<double>());
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::ParseError, std::string("compact set: ") + e.what());
  }
  throw Error(ErrorCode::ParseError, "compact set kind must be circle, cloud or region");
}

namespace {

struct CellKey {
  std::int64_t a, b, c, d;
  bool operator==(const CellKey&) const = default;
};

struct CellHash {
  std::size_t operator()(const CellKey& k) const noexcept {
    std::uint64_t h = 0x9e3779b97f4a7c15ULL;
    for (std::int64_t v : {k.a, k.b, k.c, k.d}) h = splitmix64(h ^ static_cast<std::uint64_t>(v));
    return static_cast<std::size_t>(h);
  }
};

std::int64_t cell(double x, double size) { return static_cast<std::int64_t>(std::floor(x / size)); }

// membership test and seed list for X
class Membership {
 public:
  explicit Membership(const CompactSet& x) : x_(x) {
    if (x.kind == CompactSet::Kind::Cloud) {
      cell_ = std::max(x.tolerance, 1e-300);
      for (std::size_t i = 0; i < x.cloud.size(); ++i)
        index_[{cell(x.cloud[i].real(), cell_), cell(x.cloud[i].imag(), cell_), 0, 0}].push_back(static_cast<int>(i));
    }
  }

  bool contains(Complex z) const {
    if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) return false;
    switch (x_.kind) {
      case CompactSet::Kind::Circle:
        return std::abs(std::abs(z - x_.center) - x_.radius) <= x_.tolerance * std::max(1.0, x_.radius);
      case CompactSet::Kind::Cloud: {
        const std::int64_t cx = cell(z.real(), cell_), cy = cell(z.imag(), cell_);
        for (std::int64_t dx = -1; dx <= 1; ++dx)
          for (std::int64_t dy = -1; dy <= 1; ++dy) {
            auto it = index_.find({cx + dx, cy + dy, 0, 0});
            if (it == index_.end()) continue;
            for (int i : it->second)
              if (std::abs(x_.cloud[i] - z) <= x_.tolerance) return true;
          }
        return false;
      }
      case CompactSet::Kind::Region:
        return etk::contains(x_.region, z);
    }
    return false;
  }

  std::vector<Complex> seeds() const {
    std::vector<Complex> s;
    switch (x_.kind) {
      case CompactSet::Kind::Circle:
        s.reserve(static_cast<std::size_t>(x_.circle_seeds));
        for (long k = 0; k < x_.circle_seeds; ++k)
          s.push_back(x_.center + std::polar(x_.radius, kTwoPi * static_cast<double>(k) / x_.circle_seeds));
        break;
      case CompactSet::Kind::Cloud:
        s = x_.cloud;
        break;
      case CompactSet::Kind::Region: {
        const BoundingBox bb = bounding_box(x_.region);
        const long nx = static_cast<long>(std::floor((bb.hi.real() - bb.lo.real()) / x_.seed_step)) + 1;
        const long ny = static_cast<long>(std::floor((bb.hi.imag() - bb.lo.imag()) / x_.seed_step)) + 1;
        for (long j = 0; j < ny; ++j)
          for (long i = 0; i < nx; ++i) {
            const Complex z = bb.lo + x_.seed_step * Complex(static_cast<double>(i), static_cast<double>(j));
            if (etk::contains(x_.region, z)) s.push_back(z);
          }
        break;
      }
    }
    return s;
  }

 private:
  const CompactSet& x_;
  double cell_ = 1.0;
  std::unordered_map<CellKey, std::vector<int>, CellHash> index_;
};

// orbits[s * n_max + t] = f^t(seed s); exits[s] = first t with f^t(seed) outside X
struct Orbits {
  int n_max = 0;
  std::vector<Complex> points;
  std::vector<int> exits;
};

Orbits compute_orbits(const FunctionSpec& spec, const CompactSet& X, int n_max, unsigned threads) {
  const Membership member(X);
  const std::vector<Complex> seeds = member.seeds();
  Orbits o;
  o.n_max = n_max;
  o.points.resize(seeds.size() * static_cast<std::size_t>(n_max));
  o.exits.assign(seeds.size(), n_max);
  parallel_for(seeds.size(), threads, [&](std::size_t s) {
    Complex z = seeds[s];
    for (int t = 0; t < n_max; ++t) {
      if (!member.contains(z)) {
        o.exits[s] = t;
        return;
      }
      o.points[s * n_max + t] = z;
      if (t + 1 < n_max) z = evaluate(spec, z);
    }
  });
  return o;
}

long greedy_count(const Orbits& o, int n, double delta) {
  std::unordered_map<CellKey, std::vector<std::size_t>, CellHash> kept;
  long count = 0;
  const std::size_t seeds = o.exits.size();
  for (std::size_t s = 0; s < seeds; ++s) {
    if (o.exits[s] < n) continue;
    const Complex* orb = &o.points[s * o.n_max];
    const Complex first = orb[0], last = orb[n - 1];
    const CellKey key{cell(first.real(), delta), cell(first.imag(), delta), cell(last.real(), delta),
                      cell(last.imag(), delta)};
    bool separated = true;
    for (int a = -1; a <= 1 && separated; ++a)
      for (int b = -1; b <= 1 && separated; ++b)
        for (int c = -1; c <= 1 && separated; ++c)
          for (int d = -1; d <= 1 && separated; ++d) {
            auto it = kept.find({key.a + a, key.b + b, key.c + c, key.d + d});
            if (it == kept.end()) continue;
            for (std::size_t other : it->second) {
              const Complex* q = &o.points[other * o.n_max];
              bool close = true;
              for (int t = 0; t < n && close; ++t) close = std::abs(orb[t] - q[t]) <= delta;
              if (close) {
                separated = false;
                break;
              }
            }
          }
    if (!separated) continue;
    kept[key].push_back(s);
    ++count;
  }
  return count;
}

}  // namespace

long separated_set_lower(const FunctionSpec& spec, const CompactSet& X, int n, double delta,
                         const SeparatedSetOptions& options) {
  if (n < 1 || !(delta > 0.0)) throw Error(ErrorCode::InvalidArgument, "separated set needs n >= 1, delta > 0");
  return greedy_count(compute_orbits(spec, X, n, options.threads), n, delta);
}

EntropyEstimate entropy_lower_curve(const FunctionSpec& spec, const CompactSet& X, int n_max,
                                    std::vector<double> deltas, const SeparatedSetOptions& options) {
  if (n_max < 2) throw Error(ErrorCode::InvalidArgument, "n_max must be at least 2");
  if (deltas.empty()) throw Error(ErrorCode::InvalidArgument, "delta list is empty");
  for (double d : deltas)
    if (!(d > 0.0)) throw Error(ErrorCode::InvalidArgument, "every delta must be positive");
  std::sort(deltas.begin(), deltas.end());
  deltas.erase(std::unique(deltas.begin(), deltas.end()), deltas.end());

  EntropyEstimate e;
  e.compact_set_id = X.id;
  e.deltas = deltas;
  const Orbits orbits = compute_orbits(spec, X, n_max, options.threads);
  for (int n = 1; n <= n_max; ++n) {
    e.n_values.push_back(n);
    long running = 0;
    for (auto it = deltas.rbegin(); it != deltas.rend(); ++it) {
      const long k = greedy_count(orbits, n, *it);
      e.raw[{n, *it}] = k;
      running = std::max(running, k);
      e.table[{n, *it}] = running;
    }
  }
  const double dmin = deltas.front();
  for (int n = 1; n <= n_max; ++n) {
    const long k = e.table[{n, dmin}];
    e.curve.push_back({n, k > 0 ? std::log(static_cast<double>(k)) / n : 0.0});
  }
  e.h_lower = 0.0;
  for (int n = 2; n <= n_max; ++n) {
    double best = -std::numeric_limits<double>::infinity();
    for (double d : deltas) {
      const long k1 = e.table[{1, d}], kn = e.table[{n, d}];
      if (k1 <= 0 || kn <= 0) continue;
      const double g = (std::log(static_cast<double>(kn)) - std::log(static_cast<double>(k1))) / (n - 1);
      if (g > best) best = g;
      if (g > e.h_lower) {
        e.h_lower = g;
        e.best_n = n;
        e.best_delta = d;
      }
    }
    e.growth.push_back({n, std::isfinite(best) ? best : 0.0});
  }
  return e;
}

nlohmann::json to_json(const EntropyEstimate& e) {
  nlohmann::json rows = nlohmann::json::array();
  for (int n : e.n_values)
    for (double d : e.deltas)
      rows.push_back({{"n", n}, {"delta", d}, {"K_lower", e.table.at({n, d})}, {"K_greedy", e.raw.at({n, d})}});
  nlohmann::json curve = nlohmann::json::array(), growth = nlohmann::json::array();
  for (const auto& [n, v] : e.curve) curve.push_back({{"n", n}, {"value", v}});
  for (const auto& [n, v] : e.growth) growth.push_back({{"n", n}, {"value", v}});
  return {{"compact_set_id", e.compact_set_id},
          {"table", rows},
          {"curve", curve},
          {"growth", growth},
          {"h_lower", e.h_lower},
          {"best_n", e.best_n},
          {"best_delta", e.best_delta}};
}

std::string entropy_csv(const EntropyEstimate& e) {
  std::ostringstream os;
  os.precision(17);
  os << "n,delta,K_lower,K_greedy\n";
  for (int n : e.n_values)
    for (double d : e.deltas) os << n << ',' << d << ',' << e.table.at({n, d}) << ',' << e.raw.at({n, d}) << '\n';
  return os.str();
}

std::string entropy_curve_svg(const EntropyEstimate& e) {
  const double W = 480, H = 320, pad = 40;
  double ymax = std::max(1e-9, e.h_lower);
  for (const auto& [n, v] : e.curve) ymax = std::max(ymax, v);
  for (const auto& [n, v] : e.growth) ymax = std::max(ymax, v);
  ymax *= 1.1;
  const int nmax = e.n_values.empty() ? 1 : e.n_values.back();
  auto X = [&](double n) { return pad + (W - 2 * pad) * (n - 1) / std::max(1, nmax - 1); };
  auto Y = [&](double v) { return H - pad - (H - 2 * pad) * v / ymax; };
  std::ostringstream os;
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"0 0 " << W << ' ' << H << "\">\n";
  os << "<title>entropy estimates for " << e.compact_set_id << "</title>\n";
  os << "<line x1=\"" << pad << "\" y1=\"" << H - pad << "\" x2=\"" << W - pad << "\" y2=\"" << H - pad
     << "\" stroke=\"black\"/>\n<line x1=\"" << pad << "\" y1=\"" << pad << "\" x2=\"" << pad << "\" y2=\""
     << H - pad << "\" stroke=\"black\"/>\n";
  auto poly = [&](const std::vector<std::pair<int, double>>& pts, const char* color) {
    os << "<polyline fill=\"none\" stroke=\"" << color << "\" points=\"";
    for (const auto& [n, v] : pts) os << X(n) << ',' << Y(v) << ' ';
    os << "\"/>\n";
  };
  poly(e.curve, "steelblue");
  poly(e.growth, "darkorange");
  os << "<line x1=\"" << pad << "\" y1=\"" << Y(e.h_lower) << "\" x2=\"" << W - pad << "\" y2=\"" << Y(e.h_lower)
     << "\" stroke=\"gray\" stroke-dasharray=\"4 3\"/>\n";
  os << "<text x=\"" << pad << "\" y=\"" << pad - 10 << "\" font-size=\"12\">h_lower = " << e.h_lower
     << " (blue: log K / n, orange: growth rate)</text>\n";
  os << "</svg>\n";
  return os.str();
}

}  // namespace etk
