#pragma once

#include <cstddef>
#include <string>

#include "iddlab/cf.hpp"

namespace iddlab {

enum class SmallTPolicy { taylor_bound, exclude };

std::string to_string(SmallTPolicy policy);

/// Grid for the supremum in lambda_r. The grid is log-spaced on
/// [t_min, t_max] and mirrored; since all CFs here are even, only the
/// positive half is evaluated.
struct LambdaConfig {
  double r = 3.0;
  double t_min = 1e-3;
  double t_max = 50.0;
  std::size_t grid_size = 2048;
  SmallTPolicy small_t_policy = SmallTPolicy::taylor_bound;

  /// Throws ConfigError unless r > 2, 0 < t_min < t_max, grid_size >= 2.
  void validate() const;
};

/// A lambda_r value with the grid that produced it.
struct MetricReport {
  double value = 0.0;  // may be +infinity
  double t_at_sup = 0.0;
  double t_min_used = 0.0;
  double t_max = 0.0;
  std::size_t grid_size = 0;
  int extensions = 0;  // downward decade extensions performed
  double r = 0.0;
};

/// sup_{t != 0} |fU(t) - fV(t)| / |t|^r on the configured grid.
///
/// Under taylor_bound the grid is extended one decade downward (at most three
/// times) while the supremum sits at t_min. If an extension raises the
/// boundary supremum by a factor of 2 or more the ratio is diverging at small
/// t and +infinity is reported.
MetricReport lambda_r_report(const SymmetricCF& cfU, const SymmetricCF& cfV, const LambdaConfig& config);
double lambda_r(const SymmetricCF& cfU, const SymmetricCF& cfV, const LambdaConfig& config);

/// Forward CLT bound: lambda_r(S_m, Z) <= m^-(r/2 - 1) lambda_r(xi, Z).
struct BoundCheck {
  double lhs = 0.0;
  double rhs = 0.0;
  bool holds = false;
  bool applicable = true;  // false when lambda_r(xi, Z) is infinite
  int m = 1;
  double r = 0.0;
  double z_variance = 0.0;
  double t_min_used = 0.0;
};

BoundCheck clt_bound_check(const SymmetricCF& cf_xi, int m, const LambdaConfig& config);

/// Backward form: lambda_r(X(m), Z) >= m^(r/2 - 1) lambda_r(X(1), Z) with
/// X(m) = root_rescale(cf_root, m).
struct BackwardCheck {
  double lhs = 0.0;    // lambda_r(X(m), Z)
  double lower = 0.0;  // m^(r/2-1) lambda_r(X(1), Z)
  bool holds = false;
  bool applicable = true;
  int m = 1;
  double r = 0.0;
  double z_variance = 0.0;
  double t_min_used = 0.0;
};

BackwardCheck backward_bound(const SymmetricCF& cf_root, int m, const LambdaConfig& config);

}  // namespace iddlab
