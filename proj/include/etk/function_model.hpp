#pragma once

#include <complex>
#include <optional>
#include <variant>
#include <vector>

#include <json.hpp>

namespace etk {

using Complex = std::complex<double>;

/// z -> exp(a z + b)
struct ExpAffine {
  Complex a{1.0, 0.0};
  Complex b{0.0, 0.0};
};

/// Ascending-degree coefficients.
struct Polynomial {
  std::vector<Complex> coeffs;
};

/// Truncated Taylor series about 0. The remainder is bounded by
/// tail_bound_coeff * (|z| / validity_radius)^(degree + 1) for |z| <= validity_radius.
struct TaylorTruncated {
  std::vector<Complex> coeffs;
  double validity_radius = 1.0;
  double tail_bound_coeff = 0.0;
};

/// z -> prod_i (z_i - z) / z_i over the listed zeros. The omitted tail zeros
/// are assumed to have modulus >= tail_zeros_lower_modulus and to at least
/// double in modulus from one to the next.
struct LacunaryProduct {
  std::vector<Complex> zeros;
  double tail_zeros_lower_modulus = 0.0;
};

using FunctionForm = std::variant<ExpAffine, Polynomial, TaylorTruncated, LacunaryProduct>;

class FunctionSpec {
 public:
  FunctionSpec() = default;
  // Validates the variant invariants; throws Error(InvalidArgument).
  explicit FunctionSpec(FunctionForm form);

  static FunctionSpec exp_affine(Complex a, Complex b = {});
  static FunctionSpec polynomial(std::vector<Complex> coeffs);
  static FunctionSpec taylor(std::vector<Complex> coeffs, double validity_radius,
                             double tail_bound_coeff);
  static FunctionSpec product(std::vector<Complex> zeros, double tail_zeros_lower_modulus);

  const FunctionForm& form() const noexcept { return form_; }
  const char* kind() const noexcept;

  template <class T>
  const T* as() const noexcept {
    return std::get_if<T>(&form_);
  }

  /// +inf for everything except TaylorTruncated.
  double validity_radius() const noexcept;

 private:
  FunctionForm form_{ExpAffine{}};
};

struct Evaluation {
  Complex value;
  double abs_error_bound = 0.0;
};

Complex evaluate(const FunctionSpec& spec, Complex z);
Evaluation evaluate_with_bound(const FunctionSpec& spec, Complex z);

/// A logarithm of f(z) on an unspecified branch. Real part is -inf at zeros.
/// Finite for arguments where f itself would overflow a double.
Complex log_evaluate(const FunctionSpec& spec, Complex z);

Complex derivative(const FunctionSpec& spec, Complex z);

/// A logarithm of f'(z); real part -inf at critical points.
Complex log_derivative(const FunctionSpec& spec, Complex z);

struct CircleWitness {
  Complex point;
  double modulus_of_image = 0.0;  // may be +inf when the value overflows
  double log_modulus = 0.0;       // ln |f(point)|
  double circle_radius = 0.0;
};

struct CircleScanOptions {
  int samples = 4096;
  int refine_iterations = 60;
};

CircleWitness max_modulus_on_circle(const FunctionSpec& spec, double radius,
                                    const CircleScanOptions& options = {});

/// Point on |z| = radius with |f| < bound, or nullopt if the scan finds none.
std::optional<CircleWitness> small_modulus_witness(const FunctionSpec& spec, double radius,
                                                   double bound,
                                                   const CircleScanOptions& options = {});

/// Log-space variant of small_modulus_witness; log_bound = ln(bound).
std::optional<CircleWitness> small_modulus_witness_log(const FunctionSpec& spec, double radius,
                                                       double log_bound,
                                                       const CircleScanOptions& options = {});

/// Relative-error exponent for dropping the tail zeros on |z| <= radius:
/// |f_true / f_truncated - 1| <= exp(eps) - 1 with eps = 2q / (1 - q), q = radius / tail.
double product_tail_bound(const LacunaryProduct& product, double radius);

// JSON: {"kind": "exp"|"poly"|"taylor"|"product", ...} with complex numbers as [re, im].
nlohmann::json to_json(const FunctionSpec& spec);
FunctionSpec function_from_json(const nlohmann::json& j);

nlohmann::json complex_to_json(Complex z);
Complex complex_from_json(const nlohmann::json& j);

}  // namespace etk
