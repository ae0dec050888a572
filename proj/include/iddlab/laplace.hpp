#pragma once

#include <memory>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "iddlab/cf.hpp"

namespace iddlab {

/// L(s) = (1 + s)^(-shape)
struct GammaSub {
  double shape = 1.0;
};

/// L(s) = exp(rate (e^(-s) - 1)): Poisson(rate) count of unit jumps.
struct PoissonSub {
  double rate = 1.0;
};

/// L(s) = exp(-(c s)^alpha), alpha in (0, 1).
struct StableSub {
  double alpha = 0.5;
  double scale = 1.0;
};

/// L(s) = exp(-sigma s): point mass at sigma >= 0.
struct Drift {
  double sigma = 0.0;
};

using SubordinatorParams = std::variant<GammaSub, PoissonSub, StableSub, Drift>;

void validate(const SubordinatorParams& params);
std::string subordinator_name(const SubordinatorParams& params);

/// Drift plus a Borel measure on (0, inf):
///
///   -log L(s) = sigma s + Int (1 - e^(-a s)) / (1 - e^(-a)) dmu(a)
///
/// The measure uses the same atom/density representation as CanonicalExponent.
class LaplaceExponent {
 public:
  LaplaceExponent(double drift, std::vector<Atom> atoms, std::optional<TabulatedDensity> density = std::nullopt);

  double drift() const noexcept { return sigma_; }
  std::span<const Atom> atoms() const noexcept { return atoms_; }
  const std::optional<TabulatedDensity>& density() const noexcept { return density_; }

  double log_transform(double s) const;

  /// Single atom at a = 1 reproducing PoissonSub{rate} (plus drift).
  static LaplaceExponent poisson(double rate, double drift = 0.0);

 private:
  double sigma_;
  std::vector<Atom> atoms_;
  std::optional<TabulatedDensity> density_;
};

enum class LaplaceKind { family, canonical, product, root_rescaled };

namespace detail {
class LTNode;
}

/// Laplace transform of a positive infinitely divisible law. Immutable.
class LaplaceTransform {
 public:
  explicit LaplaceTransform(const SubordinatorParams& params);
  explicit LaplaceTransform(LaplaceExponent exponent);

  /// L(s) for s > 0; InputError otherwise.
  double evaluate(double s) const;
  double operator()(double s) const { return evaluate(s); }

  /// log L(s) without forming L.
  double log_evaluate(double s) const;

  LaplaceKind kind() const;

  /// Drift known from the structure of the expression.
  double exact_drift() const;

  std::string describe() const;

 private:
  explicit LaplaceTransform(std::shared_ptr<const detail::LTNode> node) : node_(std::move(node)) {}
  std::shared_ptr<const detail::LTNode> node_;

  friend LaplaceTransform root_rescale_L(const LaplaceTransform& lt, int m);
  friend LaplaceTransform product(const LaplaceTransform& a, const LaplaceTransform& b);
};

/// L_m(s) = L(m s)^(1/m).
LaplaceTransform root_rescale_L(const LaplaceTransform& lt, int m);

/// Pointwise product: the transform of an independent sum.
LaplaceTransform product(const LaplaceTransform& a, const LaplaceTransform& b);

struct DriftEstimate {
  double sigma_hat = 0.0;
  double error_bound = 0.0;
  double s_used = 0.0;
  std::vector<std::pair<double, double>> sequence;  // (s, -log L(s) / s)
};

/// Last-point value of -log L(s) / s with a successive-difference bound.
DriftEstimate estimate_drift(const LaplaceTransform& lt, std::span<const double> s_schedule);
DriftEstimate estimate_drift(const LaplaceTransform& lt);

struct SupportDecision {
  bool touches_zero = false;  // zero drift: P{W < x} > 0 for every x > 0
  DriftEstimate estimate;
};

/// yes iff sigma_hat <= tol + error_bound; otherwise the support starts at sigma_hat.
SupportDecision support_touches_zero(const LaplaceTransform& lt, double tol, std::span<const double> s_schedule);
SupportDecision support_touches_zero(const LaplaceTransform& lt, double tol = 1e-4);

struct LaplaceLimitDeviation {
  double sup = 0.0;
  double s_at_sup = 0.0;
  double sigma_used = 0.0;
  std::string sigma_source;  // "given" | "structural" | "estimated"
};

/// sup_{0 < s <= S} |L_m(s) - exp(-sigma s)| on grid_size uniform points of
/// (0, S] with golden-section refinement of an interior maximum.
LaplaceLimitDeviation limit_deviation_L(const LaplaceTransform& lt, int m, double S, std::size_t grid_size = 1000,
                                        std::optional<double> sigma = std::nullopt);

struct ShapeCheck {
  bool positive = true;
  bool nonincreasing = true;
  bool convex = true;
};

/// Necessary conditions for complete monotonicity at grid resolution.
ShapeCheck check_completely_monotone_shape(const LaplaceTransform& lt, std::span<const double> s_grid);

/// 1024 log-spaced points on [1e-3, 1e3].
std::vector<double> default_s_grid();

}  // namespace iddlab
