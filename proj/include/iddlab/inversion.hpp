#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "iddlab/cf.hpp"

namespace iddlab {

/// Quadrature for F(x) = 1/2 + (1/pi) Int_0^T f(t) sin(t x) / t dt.
///
/// Nodes: composite Simpson, a quarter of them linear on (0, 1] and the rest
/// log-spaced on [1, T]. When `truncation` is unset, T is the smallest power
/// of two (from 2^-6 up to 1e5) beyond which |f| stays below eps_tail.
struct QuadratureSpec {
  std::optional<double> truncation;
  std::size_t nodes = 4096;
  double eps_tail = 1e-10;

  void validate() const;
};

/// Throws NumericError if f does not decay below eps_tail by t = 1e5.
double auto_truncation(const SymmetricCF& cf, double eps_tail);

/// CDF of the symmetric law with CF `cf` at x.
double cdf_from_cf(const SymmetricCF& cf, double x, const QuadratureSpec& quad = {});

/// sqrt(mu2) when the variance is finite, else 1/t* with log f(t*) = -1
/// (the scale c for stable laws).
double natural_scale(const SymmetricCF& cf);

/// 401 points on [-8 s, 8 s], s the larger natural scale of the two laws.
std::vector<double> default_x_grid(const SymmetricCF& cf1, const SymmetricCF& cf2);

struct KolmogorovReport {
  double distance = 0.0;
  double x_at_max = 0.0;
  double truncation = 0.0;
  std::size_t nodes = 0;
  std::size_t x_points = 0;
};

/// max over the x grid of |F1(x) - F2(x)|.
KolmogorovReport kolmogorov_distance(const SymmetricCF& cf1, const SymmetricCF& cf2, const QuadratureSpec& quad = {},
                                     std::optional<std::vector<double>> x_grid = std::nullopt);

struct StableFit {
  double alpha = 2.0;
  double scale = 1.0;
  double d_K = 1.0;
  std::size_t candidates = 0;
};

/// Exhaustive search over alpha_grid x scale_grid minimizing the Kolmogorov
/// distance to `target` on a fixed x grid (default: 8 natural scales of the
/// target). Ties go to the smaller alpha, then the smaller scale.
StableFit fit_stable(const SymmetricCF& target, std::span<const double> alpha_grid, std::span<const double> scale_grid,
                     const QuadratureSpec& quad = {}, std::optional<std::vector<double>> x_grid = std::nullopt);

/// {1.00, 1.05, ..., 1.95}
std::vector<double> default_alpha_grid();

/// 21 log-spaced scales on [s0 / 4, 4 s0], s0 = sqrt(variance / 2) the scale
/// at which exp(-(s0 t)^2) is the matched Gaussian.
std::vector<double> default_scale_grid(double variance);

struct ComparisonReport {
  std::string family;
  int m = 1;
  double variance = 0.0;
  double d_K_gaussian = 0.0;
  double best_alpha = 2.0;
  double best_scale = 1.0;
  double d_K_stable = 1.0;
  double tie_tolerance = 1e-4;
  std::string verdict;  // "stable closer" | "gaussian closer" | "tie within tolerance"
  std::vector<double> alpha_grid;
  std::vector<double> scale_grid;
  double x_range = 0.0;
  std::size_t x_points = 0;
  std::size_t nodes = 0;
  double truncation_gaussian = 0.0;
};

/// Distances of the normalized m-fold sum of `family` to its matched Gaussian
/// and to the best stable law with alpha < 2.
ComparisonReport approx_compare(const FamilyParams& family, int m, std::span<const double> alpha_grid,
                                std::span<const double> scale_grid, const QuadratureSpec& quad = {},
                                double tie_tolerance = 1e-4);

}  // namespace iddlab
