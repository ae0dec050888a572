#include "iddlab/analysis.hpp"

#include <cmath>

#include "detail/sup_search.hpp"
#include "iddlab/errors.hpp"
#include "iddlab/grid.hpp"

namespace iddlab {

namespace {

void validate_schedule(std::span<const double> s) {
  if (s.size() < 3) throw InputError("schedule needs at least 3 points");
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (!std::isfinite(s[i]) || !(s[i] > 0.0)) throw InputError("schedule points must be finite and > 0");
    if (i > 0 && !(s[i] > s[i - 1])) throw InputError("schedule must be strictly increasing");
  }
  if (s.back() < 100.0 * s.front()) throw InputError("schedule must span at least two decades");
}

}  // namespace

GaussianEstimate estimate_gaussian_coefficient(const SymmetricCF& cf, std::span<const double> t_schedule) {
  validate_schedule(t_schedule);
  GaussianEstimate est;
  est.sequence.reserve(t_schedule.size());
  for (double t : t_schedule) {
    const double lf = cf.log_evaluate(t);
    if (!std::isfinite(lf)) throw NumericError("log characteristic function underflowed at t = " + std::to_string(t));
    est.sequence.push_back({t, -lf / (t * t)});
  }
  const auto n = est.sequence.size();
  const double last = est.sequence[n - 1].value;
  const double prev = est.sequence[n - 2].value;
  est.a_hat = std::max(0.0, last);
  est.component_variance = 2.0 * est.a_hat;
  est.error_bound = std::abs(last - prev);
  est.t_used = est.sequence[n - 1].t;
  est.monotone_decreasing = true;
  for (std::size_t i = 1; i < n; ++i)
    if (est.sequence[i].value > est.sequence[i - 1].value) est.monotone_decreasing = false;
  return est;
}

GaussianEstimate estimate_gaussian_coefficient(const SymmetricCF& cf) {
  const auto s = default_schedule();
  return estimate_gaussian_coefficient(cf, s);
}

GaussianDecision has_gaussian_component(const SymmetricCF& cf, double tol, std::span<const double> t_schedule) {
  if (!std::isfinite(tol) || !(tol > 0.0)) throw InputError("detection tolerance must be finite and > 0");
  GaussianDecision d;
  d.estimate = estimate_gaussian_coefficient(cf, t_schedule);
  d.has_component = d.estimate.a_hat > tol + d.estimate.error_bound;
  return d;
}

GaussianDecision has_gaussian_component(const SymmetricCF& cf, double tol) {
  const auto s = default_schedule();
  return has_gaussian_component(cf, tol, s);
}

LimitDeviation limit_deviation(const SymmetricCF& cf, int m, double T, std::size_t grid_size, std::optional<double> a) {
  if (!std::isfinite(T) || !(T > 0.0)) throw InputError("limit deviation range T must be finite and > 0");
  LimitDeviation out;
  if (a) {
    out.a_used = *a;
    out.a_source = "given";
  } else if (auto exact = cf.exact_gaussian_coefficient()) {
    out.a_used = *exact;
    out.a_source = "structural";
  } else {
    const auto d = has_gaussian_component(cf);
    out.a_used = d.has_component ? d.estimate.a_hat : 0.0;
    out.a_source = "estimated";
  }
  const auto fm = root_rescale(cf, m);
  const auto g = limit_gaussian(out.a_used);
  const auto grid = linspace(0.0, T, grid_size);
  const auto best = detail::grid_sup(std::span<const double>(grid),
                                     [&](double t) { return std::abs(fm.evaluate(t) - g.evaluate(t)); });
  out.sup = best.value;
  out.t_at_sup = best.x;
  return out;
}

std::string to_string(MomentMethod method) {
  switch (method) {
    case MomentMethod::automatic: return "automatic";
    case MomentMethod::closed_form: return "closed-form";
    case MomentMethod::finite_difference: return "finite-difference";
  }
  return "unknown";
}

namespace {

MomentSet make_set(double mu2, double mu4, MomentMethod method) {
  MomentSet s;
  s.mu2 = mu2;
  s.mu4 = mu4;
  s.kappa = mu4 / (mu2 * mu2) - 3.0;
  s.method = method;
  return s;
}

// Rough second moment from 1 - f(h) ~ mu2 h^2 / 2, with h adjusted until the
// drop is neither lost in rounding nor outside the quadratic regime.
double rough_mu2(const SymmetricCF& cf) {
  double h = 1e-2;
  for (int it = 0; it < 40; ++it) {
    const double drop = 1.0 - cf.evaluate(h);
    if (drop > 1e-1) {
      h /= 10.0;
    } else if (drop < 1e-8) {
      h *= 10.0;
    } else {
      return 2.0 * drop / (h * h);
    }
  }
  throw NumericError("could not bracket the curvature of the characteristic function at 0");
}

MomentSet finite_difference_moments(const SymmetricCF& cf) {
  const double s = 1.0 / std::sqrt(rough_mu2(cf));
  const double h = std::max(1e-2 * s, 1e-4);
  const double f0 = cf.evaluate(0.0);
  const double f1 = cf.evaluate(h), f2 = cf.evaluate(2.0 * h), f3 = cf.evaluate(3.0 * h);
  // Fourth-order central stencils, folded using f(-t) = f(t).
  const double d2 = (-2.0 * f2 + 32.0 * f1 - 30.0 * f0) / (12.0 * h * h);
  const double d4 = (-2.0 * f3 + 24.0 * f2 - 78.0 * f1 + 56.0 * f0) / (6.0 * h * h * h * h);
  return make_set(-d2, d4, MomentMethod::finite_difference);
}

}  // namespace

MomentSet moments(const SymmetricCF& cf, MomentMethod method) {
  const auto c = cf.cumulants();
  if (!c) throw NoFiniteMomentError("law has no finite second or fourth moment: " + cf.describe());
  if (method == MomentMethod::finite_difference) return finite_difference_moments(cf);
  return make_set(c->mu2(), c->mu4(), MomentMethod::closed_form);
}

KurtosisScaling kurtosis_scaling_check(const SymmetricCF& cf, int m, MomentMethod method) {
  KurtosisScaling out;
  out.m = m;
  out.kappa_1 = moments(cf, method).kappa;
  out.kappa_m = moments(root_rescale(cf, m), method).kappa;
  out.m_times_kappa_1 = m * out.kappa_1;
  const double diff = std::abs(out.kappa_m - out.m_times_kappa_1);
  if (std::abs(out.m_times_kappa_1) <= 1e-9) {
    out.error = diff;
    out.error_is_relative = false;
  } else {
    out.error = diff / std::abs(out.m_times_kappa_1);
    out.error_is_relative = true;
  }
  return out;
}

std::vector<ProfilePoint> remainder_profile(const SymmetricCF& cf, double a_hat, std::span<const double> t_grid) {
  std::vector<ProfilePoint> out;
  out.reserve(t_grid.size());
  for (double t : t_grid) {
    if (!std::isfinite(t) || t == 0.0) throw InputError("remainder profile grid points must be finite and nonzero");
    const double t2 = t * t;
    out.push_back({t, (-cf.log_evaluate(t) - a_hat * t2) / t2});
  }
  return out;
}

}  // namespace iddlab
