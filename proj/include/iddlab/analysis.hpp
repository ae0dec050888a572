#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "iddlab/cf.hpp"

namespace iddlab {

struct ProfilePoint {
  double t;
  double value;
};

/// Estimate of the Gaussian coefficient a = lim_{t->inf} -log f(t) / t^2.
struct GaussianEstimate {
  double a_hat = 0.0;
  double component_variance = 0.0;  // 2 a_hat
  double error_bound = 0.0;         // |last - second to last|
  double t_used = 0.0;
  bool monotone_decreasing = false;
  std::vector<ProfilePoint> sequence;  // (t, -log f(t) / t^2) along the schedule
};

struct GaussianDecision {
  bool has_component = false;
  GaussianEstimate estimate;
};

/// Schedule must be strictly increasing, positive, >= 3 points and span at
/// least two decades. Throws PositivityError if f(t) <= 0 on the schedule.
GaussianEstimate estimate_gaussian_coefficient(const SymmetricCF& cf, std::span<const double> t_schedule);
GaussianEstimate estimate_gaussian_coefficient(const SymmetricCF& cf);

/// yes iff a_hat > tol + error_bound.
GaussianDecision has_gaussian_component(const SymmetricCF& cf, double tol, std::span<const double> t_schedule);
GaussianDecision has_gaussian_component(const SymmetricCF& cf, double tol = 1e-4);

struct LimitDeviation {
  double sup = 0.0;
  double t_at_sup = 0.0;
  double a_used = 0.0;
  std::string a_source;  // "given" | "structural" | "estimated"
};

/// sup_{|t| <= T} |f_m(t) - exp(-a t^2)| over grid_size uniform points on
/// [0, T] (f is even), with golden-section refinement around an interior
/// maximum. When `a` is not supplied the structural coefficient is used if
/// known; otherwise it is estimated and snapped to zero when detection says no.
LimitDeviation limit_deviation(const SymmetricCF& cf, int m, double T, std::size_t grid_size = 1001,
                               std::optional<double> a = std::nullopt);

enum class MomentMethod { automatic, closed_form, finite_difference };

std::string to_string(MomentMethod method);

struct MomentSet {
  double mu2 = 0.0;
  double mu4 = 0.0;
  double kappa = 0.0;  // mu4 / mu2^2 - 3
  MomentMethod method = MomentMethod::closed_form;
};

/// Throws NoFiniteMomentError for heavy-tailed inputs.
MomentSet moments(const SymmetricCF& cf, MomentMethod method = MomentMethod::automatic);

struct KurtosisScaling {
  int m = 1;
  double kappa_1 = 0.0;
  double kappa_m = 0.0;
  double m_times_kappa_1 = 0.0;
  double error = 0.0;
  bool error_is_relative = true;  // false when m * kappa_1 vanishes (Gaussian)
};

KurtosisScaling kurtosis_scaling_check(const SymmetricCF& cf, int m, MomentMethod method = MomentMethod::automatic);

/// r(t) = (-log f(t) - a_hat t^2) / t^2 on each (nonzero) grid point.
std::vector<ProfilePoint> remainder_profile(const SymmetricCF& cf, double a_hat, std::span<const double> t_grid);

}  // namespace iddlab
