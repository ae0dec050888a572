#pragma once

#include <memory>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

namespace iddlab {

// ---------------------------------------------------------------------------
// Closed-form symmetric families
// ---------------------------------------------------------------------------

/// f(t) = exp(-v t^2 / 2). v = 0 is the point mass at zero.
struct Gaussian {
  double variance = 1.0;
};

/// f(t) = exp(-|c t|^alpha), alpha in (0, 2].
struct SymmetricStable {
  double alpha = 2.0;
  double scale = 1.0;
};

/// f(t) = (1 + t^2)^(-shape). Difference of two iid Gamma(shape, 1) variables;
/// shape = 1 is the standard Laplace law.
struct SymmetrizedGamma {
  double shape = 1.0;
};

/// f(t) = exp(rate (cos(jump t) - 1)): Poisson(rate) number of +-jump steps.
struct CompoundPoissonSym {
  double rate = 1.0;
  double jump = 1.0;
};

using FamilyParams = std::variant<Gaussian, SymmetricStable, SymmetrizedGamma, CompoundPoissonSym>;

/// Throws InputError when a parameter is outside its family's range.
void validate(const FamilyParams& family);

std::string family_name(const FamilyParams& family);

// ---------------------------------------------------------------------------
// Khinchine canonical exponent
// ---------------------------------------------------------------------------

struct Atom {
  double position;  // x > 0
  double mass;      // theta({x}) > 0
};

/// Spectral density tabulated on a strictly increasing grid inside (0, inf).
/// Integrated with the trapezoidal rule.
struct TabulatedDensity {
  std::vector<double> x;
  std::vector<double> density;
};

/// Second and fourth cumulants of a symmetric law. Odd cumulants vanish.
struct Cumulants {
  double k2 = 0.0;
  double k4 = 0.0;

  double mu2() const { return k2; }
  double mu4() const { return k4 + 3.0 * k2 * k2; }
};

/// Gaussian coefficient plus spectral measure on (0, inf):
///
///   log f(t) = -a t^2 - 4 * Int_(0,inf) sin^2(t x / 2) (1 + x^2) / x^2 dtheta(x)
///
/// The coefficient `a` is defined through log f directly, so the Gaussian part
/// has variance 2a.
class CanonicalExponent {
 public:
  CanonicalExponent(double gaussian_coefficient, std::vector<Atom> atoms,
                    std::optional<TabulatedDensity> density = std::nullopt);

  double gaussian_coefficient() const noexcept { return a_; }
  std::span<const Atom> atoms() const noexcept { return atoms_; }
  const std::optional<TabulatedDensity>& density() const noexcept { return density_; }

  double log_cf(double t) const;
  double total_mass() const;
  Cumulants cumulants() const;

  /// Single atom reproducing CompoundPoissonSym{rate, jump} exactly.
  static CanonicalExponent compound_poisson(double rate, double jump, double gaussian_coefficient = 0.0);

 private:
  double a_;
  std::vector<Atom> atoms_;
  std::optional<TabulatedDensity> density_;
};

// ---------------------------------------------------------------------------
// SymmetricCF
// ---------------------------------------------------------------------------

enum class CFKind { family, canonical, empirical, product, root_rescaled, sum_rescaled, dilated };

std::string to_string(CFKind kind);

namespace detail {
class CFNode;
}

/// Real, even characteristic function. Immutable; copies share the
/// underlying expression tree.
class SymmetricCF {
 public:
  explicit SymmetricCF(const FamilyParams& family);
  explicit SymmetricCF(CanonicalExponent exponent);

  /// f(t). Throws InputError for non-finite t, PositivityError when a lazy
  /// root hits a non-positive base value.
  double evaluate(double t) const;
  double operator()(double t) const { return evaluate(t); }

  /// log f(t), computed without forming f where an exponent is available.
  /// Throws PositivityError if f(t) <= 0.
  double log_evaluate(double t) const;

  CFKind kind() const;

  /// The closed-form family parameters if this CF is a bare family.
  const FamilyParams* family() const;

  /// Second and fourth cumulants propagated through the expression tree;
  /// nullopt when the law has no finite fourth moment.
  std::optional<Cumulants> cumulants() const;

  /// Whether the second moment is finite (the fourth may not be).
  bool has_finite_variance() const;

  /// Gaussian coefficient `a` known from the structure of the expression
  /// (closed forms, canonical exponents, and their transforms); nullopt for
  /// empirical inputs.
  std::optional<double> exact_gaussian_coefficient() const;

  /// Empirical CFs may take non-positive values; everything else is > 0.
  bool may_be_nonpositive() const;

  std::string describe() const;

 private:
  explicit SymmetricCF(std::shared_ptr<const detail::CFNode> node) : node_(std::move(node)) {}
  std::shared_ptr<const detail::CFNode> node_;

  friend SymmetricCF from_samples(std::span<const double> samples);
  friend SymmetricCF root_rescale(const SymmetricCF& cf, int m);
  friend SymmetricCF sum_rescale(const SymmetricCF& cf, int m);
  friend SymmetricCF convolve(const SymmetricCF& a, const SymmetricCF& b);
  friend SymmetricCF dilate(const SymmetricCF& cf, double c);
};

SymmetricCF from_canonical(CanonicalExponent exponent);

/// Symmetrized empirical CF (1/n) sum cos(t x_j).
SymmetricCF from_samples(std::span<const double> samples);

/// f_m(t) = f(sqrt(m) t)^(1/m), the CF of one summand when f is the CF of a
/// normalized sum of m iid terms.
SymmetricCF root_rescale(const SymmetricCF& cf, int m);

/// f(t / sqrt(m))^m, the CF of (xi_1 + ... + xi_m) / sqrt(m).
SymmetricCF sum_rescale(const SymmetricCF& cf, int m);

/// Pointwise product: the CF of an independent sum.
SymmetricCF convolve(const SymmetricCF& a, const SymmetricCF& b);

/// f(c t), the CF of c X. c > 0.
SymmetricCF dilate(const SymmetricCF& cf, double c);

/// g(t) = exp(-a t^2); a = 0 gives the point mass at zero.
SymmetricCF limit_gaussian(double a);

/// The constant-one CF (point mass at zero).
SymmetricCF degenerate_cf();

}  // namespace iddlab
