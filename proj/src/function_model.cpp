#include "etk/function_model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "etk/error.hpp"

namespace etk {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

Complex horner(const std::vector<Complex>& c, Complex z) {
  Complex acc{0.0, 0.0};
  for (auto it = c.rbegin(); it != c.rend(); ++it) acc = acc * z + *it;
  return acc;
}

std::vector<Complex> differentiate(const std::vector<Complex>& c) {
  std::vector<Complex> d;
  for (std::size_t k = 1; k < c.size(); ++k) d.push_back(c[k] * static_cast<double>(k));
  return d;
}

// Highest index with a nonzero coefficient, or -1 for the zero polynomial.
int degree_of(const std::vector<Complex>& c) {
  for (int k = static_cast<int>(c.size()) - 1; k >= 0; --k)
    if (c[k] != Complex{}) return k;
  return -1;
}

// log p(z), overflow-free for large |z|: p(z) = z^n * sum_k c_k z^(k-n).
Complex log_poly(const std::vector<Complex>& c, Complex z) {
  const int n = degree_of(c);
  if (n < 0) return {-kInf, 0.0};
  if (std::abs(z) <= 1.0 || n == 0) return std::log(horner(c, z));
  const Complex inv = 1.0 / z;
  Complex acc{0.0, 0.0};
  for (int k = 0; k <= n; ++k) acc = acc * inv + c[k];
  // acc = sum_k c_k z^(k-n) evaluated by Horner in 1/z
  return static_cast<double>(n) * std::log(z) + std::log(acc);
}

void check_taylor(const TaylorTruncated& t, Complex z) {
  if (std::abs(z) > t.validity_radius)
    throw Error(ErrorCode::OutOfValidity,
                "|z| = " + std::to_string(std::abs(z)) + " exceeds validity radius " +
                    std::to_string(t.validity_radius));
}

Complex log_product(const LacunaryProduct& p, Complex z) {
  Complex acc{0.0, 0.0};
  for (const auto& zi : p.zeros) acc += std::log(1.0 - z / zi);
  return acc;
}

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

}  // namespace

FunctionSpec::FunctionSpec(FunctionForm form) : form_(std::move(form)) {
  std::visit(overloaded{
                 [](const ExpAffine& e) {
                   if (!std::isfinite(std::abs(e.a)) || !std::isfinite(std::abs(e.b)))
                     throw Error(ErrorCode::InvalidArgument, "exp parameters must be finite");
                 },
                 [](const Polynomial& p) {
                   if (p.coeffs.empty())
                     throw Error(ErrorCode::InvalidArgument, "polynomial needs coefficients");
                 },
                 [](const TaylorTruncated& t) {
                   if (t.coeffs.empty())
                     throw Error(ErrorCode::InvalidArgument, "taylor needs coefficients");
                   if (!(t.validity_radius > 0.0))
                     throw Error(ErrorCode::InvalidArgument, "validity_radius must be > 0");
                   if (!(t.tail_bound_coeff >= 0.0))
                     throw Error(ErrorCode::InvalidArgument, "tail_bound_coeff must be >= 0");
                 },
                 [](const LacunaryProduct& p) {
                   double prev = 0.0;
                   for (const auto& zi : p.zeros) {
                     const double m = std::abs(zi);
                     if (!(m > prev))
                       throw Error(ErrorCode::InvalidArgument,
                                   "product zeros must be nonzero and strictly increasing in "
                                   "modulus");
                     prev = m;
                   }
                   if (!(p.tail_zeros_lower_modulus > prev))
                     throw Error(ErrorCode::InvalidArgument,
                                 "tail_zeros_lower_modulus must exceed the last zero modulus");
                 },
             },
             form_);
  // Trim trailing zero coefficients so the leading one is nonzero.
  if (auto* p = std::get_if<Polynomial>(&form_)) {
    while (p->coeffs.size() > 1 && p->coeffs.back() == Complex{}) p->coeffs.pop_back();
  }
}

FunctionSpec FunctionSpec::exp_affine(Complex a, Complex b) {
  return FunctionSpec(ExpAffine{a, b});
}
FunctionSpec FunctionSpec::polynomial(std::vector<Complex> coeffs) {
  return FunctionSpec(Polynomial{std::move(coeffs)});
}
FunctionSpec FunctionSpec::taylor(std::vector<Complex> coeffs, double validity_radius,
                                  double tail_bound_coeff) {
  return FunctionSpec(TaylorTruncated{std::move(coeffs), validity_radius, tail_bound_coeff});
}
FunctionSpec FunctionSpec::product(std::vector<Complex> zeros, double tail_zeros_lower_modulus) {
  return FunctionSpec(LacunaryProduct{std::move(zeros), tail_zeros_lower_modulus});
}

const char* FunctionSpec::kind() const noexcept {
  switch (form_.index()) {
    case 0: return "exp";
    case 1: return "poly";
    case 2: return "taylor";
    default: return "product";
  }
}

double FunctionSpec::validity_radius() const noexcept {
  if (const auto* t = as<TaylorTruncated>()) return t->validity_radius;
  return kInf;
}

Complex evaluate(const FunctionSpec& spec, Complex z) { return evaluate_with_bound(spec, z).value; }

Evaluation evaluate_with_bound(const FunctionSpec& spec, Complex z) {
  return std::visit(
      overloaded{
          [&](const ExpAffine& e) { return Evaluation{std::exp(e.a * z + e.b), 0.0}; },
          [&](const Polynomial& p) { return Evaluation{horner(p.coeffs, z), 0.0}; },
          [&](const TaylorTruncated& t) {
            check_taylor(t, z);
            const double ratio = std::abs(z) / t.validity_radius;
            const double bound =
                t.tail_bound_coeff * std::pow(ratio, static_cast<double>(t.coeffs.size()));
            return Evaluation{horner(t.coeffs, z), bound};
          },
          [&](const LacunaryProduct& p) {
            Complex acc{1.0, 0.0};
            for (const auto& zi : p.zeros) acc *= (zi - z) / zi;
            double bound = kInf;
            if (p.tail_zeros_lower_modulus > 2.0 * std::abs(z)) {
              const double eps = product_tail_bound(p, std::abs(z));
              bound = std::abs(acc) * std::expm1(eps);
            }
            return Evaluation{acc, bound};
          },
      },
      spec.form());
}

Complex log_evaluate(const FunctionSpec& spec, Complex z) {
  return std::visit(overloaded{
                        [&](const ExpAffine& e) { return e.a * z + e.b; },
                        [&](const Polynomial& p) { return log_poly(p.coeffs, z); },
                        [&](const TaylorTruncated& t) {
                          check_taylor(t, z);
                          return log_poly(t.coeffs, z);
                        },
                        [&](const LacunaryProduct& p) { return log_product(p, z); },
                    },
                    spec.form());
}

Complex derivative(const FunctionSpec& spec, Complex z) {
  return std::visit(
      overloaded{
          [&](const ExpAffine& e) { return e.a * std::exp(e.a * z + e.b); },
          [&](const Polynomial& p) { return horner(differentiate(p.coeffs), z); },
          [&](const TaylorTruncated& t) {
            check_taylor(t, z);
            return horner(differentiate(t.coeffs), z);
          },
          [&](const LacunaryProduct& p) {
            // Product rule, exact at the zeros themselves.
            Complex sum{0.0, 0.0};
            for (std::size_t i = 0; i < p.zeros.size(); ++i) {
              Complex term = -1.0 / p.zeros[i];
              for (std::size_t k = 0; k < p.zeros.size(); ++k)
                if (k != i) term *= (p.zeros[k] - z) / p.zeros[k];
              sum += term;
            }
            return sum;
          },
      },
      spec.form());
}

Complex log_derivative(const FunctionSpec& spec, Complex z) {
  return std::visit(
      overloaded{
          [&](const ExpAffine& e) {
            if (e.a == Complex{}) return Complex{-kInf, 0.0};
            return std::log(e.a) + e.a * z + e.b;
          },
          [&](const Polynomial& p) { return log_poly(differentiate(p.coeffs), z); },
          [&](const TaylorTruncated& t) {
            check_taylor(t, z);
            return log_poly(differentiate(t.coeffs), z);
          },
          [&](const LacunaryProduct& p) {
            const std::size_t n = p.zeros.size();
            if (n == 0) return Complex{-kInf, 0.0};
            std::vector<Complex> logs(n);
            for (std::size_t k = 0; k < n; ++k) logs[k] = std::log(1.0 - z / p.zeros[k]);
            // log-sum-exp over the product-rule terms
            std::vector<Complex> terms(n);
            double top = -kInf;
            for (std::size_t i = 0; i < n; ++i) {
              Complex t = std::log(-1.0 / p.zeros[i]);
              for (std::size_t k = 0; k < n; ++k)
                if (k != i) t += logs[k];
              terms[i] = t;
              if (std::isfinite(t.real())) top = std::max(top, t.real());
            }
            if (!std::isfinite(top)) return Complex{-kInf, 0.0};
            Complex sum{0.0, 0.0};
            for (const auto& t : terms)
              if (std::isfinite(t.real())) sum += std::exp(t - top);
            return std::log(sum) + top;
          },
      },
      spec.form());
}

namespace {

double log_abs_on_circle(const FunctionSpec& spec, double radius, double angle) {
  return log_evaluate(spec, std::polar(radius, angle)).real();
}

// Golden-section search for the extremum of log|f| over [lo, hi]; sign = +1 maximizes.
double golden_refine(const FunctionSpec& spec, double radius, double lo, double hi, double sign,
                     int iterations) {
  const double g = (std::sqrt(5.0) - 1.0) / 2.0;
  double x1 = hi - g * (hi - lo);
  double x2 = lo + g * (hi - lo);
  double f1 = sign * log_abs_on_circle(spec, radius, x1);
  double f2 = sign * log_abs_on_circle(spec, radius, x2);
  for (int it = 0; it < iterations; ++it) {
    if (f1 >= f2) {
      hi = x2;
      x2 = x1;
      f2 = f1;
      x1 = hi - g * (hi - lo);
      f1 = sign * log_abs_on_circle(spec, radius, x1);
    } else {
      lo = x1;
      x1 = x2;
      f1 = f2;
      x2 = lo + g * (hi - lo);
      f2 = sign * log_abs_on_circle(spec, radius, x2);
    }
  }
  return f1 >= f2 ? x1 : x2;
}

CircleWitness make_witness(const FunctionSpec& spec, double radius, double angle) {
  CircleWitness w;
  w.point = std::polar(radius, angle);
  w.log_modulus = log_evaluate(spec, w.point).real();
  w.modulus_of_image = std::exp(w.log_modulus);
  w.circle_radius = radius;
  return w;
}

// Scan the circle and refine around the best sample. Ties go to the lowest angle.
CircleWitness scan_circle(const FunctionSpec& spec, double radius, double sign,
                          const CircleScanOptions& options) {
  if (!(radius > 0.0)) throw Error(ErrorCode::InvalidArgument, "radius must be > 0");
  if (radius > spec.validity_radius())
    throw Error(ErrorCode::OutOfValidity, "circle exceeds validity radius");
  const int n = std::max(options.samples, 8);
  const double step = 2.0 * std::numbers::pi / n;
  int best = 0;
  double best_val = -kInf;
  for (int k = 0; k < n; ++k) {
    const double v = sign * log_abs_on_circle(spec, radius, k * step);
    if (v > best_val) {
      best_val = v;
      best = k;
    }
  }
  const double a0 = best * step;
  if (!std::isfinite(best_val)) return make_witness(spec, radius, a0);
  const double refined = golden_refine(spec, radius, a0 - step, a0 + step, sign,
                                       options.refine_iterations);
  const double rv = sign * log_abs_on_circle(spec, radius, refined);
  double angle = rv > best_val ? refined : a0;
  angle = std::remainder(angle, 2.0 * std::numbers::pi);
  return make_witness(spec, radius, angle);
}

}  // namespace

CircleWitness max_modulus_on_circle(const FunctionSpec& spec, double radius,
                                    const CircleScanOptions& options) {
  return scan_circle(spec, radius, +1.0, options);
}

std::optional<CircleWitness> small_modulus_witness_log(const FunctionSpec& spec, double radius,
                                                       double log_bound,
                                                       const CircleScanOptions& options) {
  CircleWitness w = scan_circle(spec, radius, -1.0, options);
  if (w.log_modulus < log_bound) return w;
  return std::nullopt;
}

std::optional<CircleWitness> small_modulus_witness(const FunctionSpec& spec, double radius,
                                                   double bound,
                                                   const CircleScanOptions& options) {
  if (!(bound > 0.0)) throw Error(ErrorCode::InvalidArgument, "bound must be > 0");
  return small_modulus_witness_log(spec, radius, std::log(bound), options);
}

double product_tail_bound(const LacunaryProduct& product, double radius) {
  const double tail = product.tail_zeros_lower_modulus;
  if (!(tail > 2.0 * radius))
    throw Error(ErrorCode::TailTooClose, "tail zeros at modulus " + std::to_string(tail) +
                                             " are not beyond 2R = " +
                                             std::to_string(2.0 * radius));
  // Tail zeros |zeta_k| >= tail * 2^(k-1); sum_k |log(1 - z/zeta_k)| <= sum_k q_k / (1 - q_k).
  const double q = std::max(radius, 0.0) / tail;
  return 2.0 * q / (1.0 - q);
}

nlohmann::json complex_to_json(Complex z) { return nlohmann::json::array({z.real(), z.imag()}); }

Complex complex_from_json(const nlohmann::json& j) {
  if (j.is_number()) return {j.get<double>(), 0.0};
  if (j.is_array() && j.size() == 2 && j[0].is_number() && j[1].is_number())
    return {j[0].get<double>(), j[1].get<double>()};
  throw Error(ErrorCode::ParseError, "complex numbers are [re, im] pairs: got " + j.dump());
}

namespace {

std::vector<Complex> complex_list(const nlohmann::json& j, const char* key) {
  if (!j.contains(key) || !j.at(key).is_array())
    throw Error(ErrorCode::ParseError, std::string("missing array field '") + key + "'");
  std::vector<Complex> out;
  for (const auto& e : j.at(key)) out.push_back(complex_from_json(e));
  return out;
}

double number_field(const nlohmann::json& j, const char* key) {
  if (!j.contains(key) || !j.at(key).is_number())
    throw Error(ErrorCode::ParseError, std::string("missing numeric field '") + key + "'");
  return j.at(key).get<double>();
}

}  // namespace

nlohmann::json to_json(const FunctionSpec& spec) {
  nlohmann::json j;
  j["kind"] = spec.kind();
  std::visit(overloaded{
                 [&](const ExpAffine& e) {
                   j["a"] = complex_to_json(e.a);
                   j["b"] = complex_to_json(e.b);
                 },
                 [&](const Polynomial& p) {
                   j["coeffs"] = nlohmann::json::array();
                   for (auto c : p.coeffs) j["coeffs"].push_back(complex_to_json(c));
                 },
                 [&](const TaylorTruncated& t) {
                   j["coeffs"] = nlohmann::json::array();
                   for (auto c : t.coeffs) j["coeffs"].push_back(complex_to_json(c));
                   j["validity_radius"] = t.validity_radius;
                   j["tail_bound_coeff"] = t.tail_bound_coeff;
                 },
                 [&](const LacunaryProduct& p) {
                   j["zeros"] = nlohmann::json::array();
                   for (auto c : p.zeros) j["zeros"].push_back(complex_to_json(c));
                   j["tail_zeros_lower_modulus"] = p.tail_zeros_lower_modulus;
                 },
             },
             spec.form());
  return j;
}

FunctionSpec function_from_json(const nlohmann::json& j) {
  if (!j.is_object() || !j.contains("kind") || !j.at("kind").is_string())
    throw Error(ErrorCode::ParseError, "function JSON needs a string 'kind'");
  const std::string kind = j.at("kind").get<std::string>();
  if (kind == "exp") {
    ExpAffine e;
    if (j.contains("a")) e.a = complex_from_json(j.at("a"));
    if (j.contains("b")) e.b = complex_from_json(j.at("b"));
    return FunctionSpec(e);
  }
  if (kind == "poly") return FunctionSpec(Polynomial{complex_list(j, "coeffs")});
  if (kind == "taylor")
    return FunctionSpec(TaylorTruncated{complex_list(j, "coeffs"),
                                        number_field(j, "validity_radius"),
                                        j.value("tail_bound_coeff", 0.0)});
  if (kind == "product")
    return FunctionSpec(
        LacunaryProduct{complex_list(j, "zeros"), number_field(j, "tail_zeros_lower_modulus")});
  throw Error(ErrorCode::ParseError, "unknown function kind '" + kind + "'");
}

}  // namespace etk
