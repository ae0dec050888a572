#include "iddlab/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "iddlab/analysis.hpp"
#include "iddlab/errors.hpp"
#include "iddlab/grid.hpp"

namespace iddlab {

std::string to_string(SmallTPolicy policy) {
  return policy == SmallTPolicy::taylor_bound ? "taylor-bound" : "exclude";
}

void LambdaConfig::validate() const {
  if (!(r > 2.0) || !std::isfinite(r)) throw ConfigError("lambda_r requires a finite r > 2");
  if (!(t_min > 0.0) || !(t_max > t_min) || !std::isfinite(t_max))
    throw ConfigError("lambda_r grid requires 0 < t_min < t_max < inf");
  if (grid_size < 2) throw ConfigError("lambda_r grid needs at least 2 points");
}

namespace {

struct GridSup {
  double value = 0.0;
  double t = 0.0;
  std::size_t index = 0;
};

// |fU - fV| = e^hi (1 - e^(lo - hi)) from the logs when both are strictly
// positive, which keeps the difference accurate as t -> 0.
double cf_gap(const SymmetricCF& u, const SymmetricCF& v, double t) {
  if (u.may_be_nonpositive() || v.may_be_nonpositive()) return std::abs(u.evaluate(t) - v.evaluate(t));
  const double lu = u.log_evaluate(t);
  const double lv = v.log_evaluate(t);
  const double hi = std::max(lu, lv), lo = std::min(lu, lv);
  return -std::exp(hi) * std::expm1(lo - hi);
}

GridSup ratio_sup(const SymmetricCF& u, const SymmetricCF& v, double r, double lo, double hi, std::size_t n) {
  const auto grid = log_spaced(lo, hi, n);
  GridSup best;
  best.t = grid.front();
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const double t = grid[i];
    const double ratio = cf_gap(u, v, t) / std::pow(t, r);
    if (ratio > best.value) best = {ratio, t, i};
  }
  return best;
}

MetricReport run_lambda(const SymmetricCF& u, const SymmetricCF& v, const LambdaConfig& config) {
  config.validate();
  MetricReport rep;
  rep.r = config.r;
  rep.t_max = config.t_max;
  rep.grid_size = config.grid_size;

  double lo = config.t_min;
  GridSup sup = ratio_sup(u, v, config.r, lo, config.t_max, config.grid_size);
  if (config.small_t_policy == SmallTPolicy::taylor_bound) {
    while (sup.value > 0.0 && sup.index == 0 && rep.extensions < 3) {
      const double previous = sup.value;
      lo /= 10.0;
      ++rep.extensions;
      sup = ratio_sup(u, v, config.r, lo, config.t_max, config.grid_size);
      if (sup.index == 0 && sup.value >= 2.0 * previous) {
        sup.value = std::numeric_limits<double>::infinity();
        break;
      }
    }
  }
  rep.value = sup.value;
  rep.t_at_sup = sup.t;
  rep.t_min_used = lo;
  return rep;
}

SymmetricCF matched_gaussian(const SymmetricCF& cf) {
  if (!cf.has_finite_variance()) throw NoFiniteMomentError("bound checks need finite variance: " + cf.describe());
  return SymmetricCF(Gaussian{moments(cf).mu2});
}

// Evaluates both distances on one grid. If either side needed a downward
// extension, both are recomputed from the smaller t_min without further
// extension.
std::pair<MetricReport, MetricReport> shared_grid_pair(const SymmetricCF& a, const SymmetricCF& b,
                                                       const SymmetricCF& z, const LambdaConfig& config) {
  MetricReport ra = run_lambda(a, z, config);
  MetricReport rb = run_lambda(b, z, config);
  if (ra.t_min_used != rb.t_min_used && std::isfinite(ra.value) && std::isfinite(rb.value)) {
    LambdaConfig shared = config;
    shared.t_min = std::min(ra.t_min_used, rb.t_min_used);
    shared.small_t_policy = SmallTPolicy::exclude;
    const int ea = ra.extensions, eb = rb.extensions;
    ra = run_lambda(a, z, shared);
    rb = run_lambda(b, z, shared);
    ra.extensions = ea;
    rb.extensions = eb;
  }
  return {ra, rb};
}

}  // namespace

MetricReport lambda_r_report(const SymmetricCF& cfU, const SymmetricCF& cfV, const LambdaConfig& config) {
  return run_lambda(cfU, cfV, config);
}

double lambda_r(const SymmetricCF& cfU, const SymmetricCF& cfV, const LambdaConfig& config) {
  return run_lambda(cfU, cfV, config).value;
}

BoundCheck clt_bound_check(const SymmetricCF& cf_xi, int m, const LambdaConfig& config) {
  config.validate();
  const SymmetricCF z = matched_gaussian(cf_xi);
  const SymmetricCF sum = sum_rescale(cf_xi, m);
  const auto [r_sum, r_xi] = shared_grid_pair(sum, cf_xi, z, config);

  BoundCheck out;
  out.m = m;
  out.r = config.r;
  out.z_variance = moments(cf_xi).mu2;
  out.t_min_used = std::min(r_sum.t_min_used, r_xi.t_min_used);
  out.lhs = r_sum.value;
  if (!std::isfinite(r_xi.value)) {
    out.applicable = false;
    out.rhs = r_xi.value;
    out.holds = false;
    return out;
  }
  out.rhs = std::pow(static_cast<double>(m), -(config.r / 2.0 - 1.0)) * r_xi.value;
  out.holds = out.lhs <= out.rhs + 1e-9;
  return out;
}

BackwardCheck backward_bound(const SymmetricCF& cf_root, int m, const LambdaConfig& config) {
  config.validate();
  const SymmetricCF z = matched_gaussian(cf_root);
  const SymmetricCF xm = root_rescale(cf_root, m);
  const auto [r_m, r_1] = shared_grid_pair(xm, cf_root, z, config);

  BackwardCheck out;
  out.m = m;
  out.r = config.r;
  out.z_variance = moments(cf_root).mu2;
  out.t_min_used = std::min(r_m.t_min_used, r_1.t_min_used);
  out.lhs = r_m.value;
  if (!std::isfinite(r_1.value)) {
    out.applicable = false;
    out.lower = r_1.value;
    out.holds = false;
    return out;
  }
  out.lower = std::pow(static_cast<double>(m), config.r / 2.0 - 1.0) * r_1.value;
  out.holds = out.lhs >= out.lower - 1e-9;
  return out;
}

}  // namespace iddlab
