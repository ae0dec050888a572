#include "iddlab/inversion.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numbers>

#include "iddlab/analysis.hpp"
#include "iddlab/errors.hpp"
#include "iddlab/grid.hpp"

namespace iddlab {

void QuadratureSpec::validate() const {
  if (nodes < 64) throw ConfigError("quadrature needs at least 64 nodes");
  if (truncation && (!std::isfinite(*truncation) || !(*truncation > 0.0)))
    throw ConfigError("quadrature truncation must be finite and > 0");
  if (!std::isfinite(eps_tail) || !(eps_tail > 0.0) || eps_tail >= 1.0)
    throw ConfigError("quadrature tail tolerance must lie in (0, 1)");
}

namespace {

constexpr double kMaxTruncation = 1e5;

struct Nodes {
  std::vector<double> t;
  std::vector<double> w;   // Simpson weights, used on the linear part
  std::size_t log_start;   // first node of the log-spaced part (t = 1); t.size() if none
};

void simpson_weights(double h, std::size_t intervals, std::vector<double>& w) {
  for (std::size_t i = 0; i <= intervals; ++i) {
    const double c = (i == 0 || i == intervals) ? 1.0 : (i % 2 == 1 ? 4.0 : 2.0);
    w.push_back(c * h / 3.0);
  }
}

Nodes build_nodes(double T, std::size_t n) {
  Nodes q;
  if (T <= 1.0) {
    const std::size_t intervals = (n - 1) & ~std::size_t{1};
    const double h = T / static_cast<double>(intervals);
    for (std::size_t i = 0; i <= intervals; ++i) q.t.push_back(h * static_cast<double>(i));
    simpson_weights(h, intervals, q.w);
    q.log_start = q.t.size();
    return q;
  }
  const std::size_t lin = std::max<std::size_t>(2, (n / 4) & ~std::size_t{1});
  const std::size_t log_intervals = (n - lin - 1) & ~std::size_t{1};

  const double h = 1.0 / static_cast<double>(lin);
  for (std::size_t i = 0; i <= lin; ++i) q.t.push_back(h * static_cast<double>(i));
  simpson_weights(h, lin, q.w);
  q.t.back() = 1.0;
  q.log_start = lin;

  const double du = std::log(T) / static_cast<double>(log_intervals);
  for (std::size_t j = 1; j <= log_intervals; ++j)
    q.t.push_back(j == log_intervals ? T : std::exp(du * static_cast<double>(j)));
  return q;
}

// Adds the weights of int_{t0}^{t2} p(t) sin(x t) dt, p the quadratic through
// (t_k, phi_k), to out[k] * phi_k. Falls back to Simpson when the panel holds
// too little of a period for the closed-form moments to be accurate.
void filon_panel(const double* t, double x, double* out) {
  const double c = t[1];
  const double u0 = t[0] - c, u2 = t[2] - c;
  const double theta = std::abs(x) * (u2 - u0);
  if (theta < 0.05) {
    // Simpson with unequal halves.
    const double H = u2 - u0, a = -u0, b = u2;
    const double w0 = H / 6.0 * (2.0 - b / a), w1 = H * H * H / (6.0 * a * b), w2 = H / 6.0 * (2.0 - a / b);
    out[0] += w0 * std::sin(x * t[0]);
    out[1] += w1 * std::sin(x * t[1]);
    out[2] += w2 * std::sin(x * t[2]);
    return;
  }
  // S_n = int u^n sin(x u) du, C_n = int u^n cos(x u) du over [u0, u2].
  const double s0 = std::sin(x * u0), s2 = std::sin(x * u2), k0 = std::cos(x * u0), k2 = std::cos(x * u2);
  const double S0 = (k0 - k2) / x;
  const double C0 = (s2 - s0) / x;
  const double S1 = (u0 * k0 - u2 * k2) / x + C0 / x;
  const double C1 = (u2 * s2 - u0 * s0) / x - S0 / x;
  const double S2 = (u0 * u0 * k0 - u2 * u2 * k2) / x + 2.0 * C1 / x;
  const double C2 = (u2 * u2 * s2 - u0 * u0 * s0) / x - 2.0 * S1 / x;
  // sin(x (c + u)) = sin(x c) cos(x u) + cos(x c) sin(x u)
  const double sc = std::sin(x * c), cc = std::cos(x * c);
  const double M0 = sc * C0 + cc * S0, M1 = sc * C1 + cc * S1, M2 = sc * C2 + cc * S2;
  // Lagrange basis in powers of u: L_k = A_k + B_k u + D_k u^2 with nodes u0, 0, u2.
  const double d0 = u0 * (u0 - u2), d1 = u0 * u2, d2 = u2 * (u2 - u0);
  out[0] += (M2 - u2 * M1) / d0;
  out[1] += (u0 * u2 * M0 - (u0 + u2) * M1 + M2) / d1;
  out[2] += (M2 - u0 * M1) / d2;
}

// sin(t x) / t with its limit x at t = 0.
double sinc_kernel(double t, double x) { return t == 0.0 ? x : std::sin(t * x) / t; }

// row[i] such that sum_i row[i] f(t_i) = (1/pi) int_0^T f(t) sin(t x) / t dt.
void kernel_row(const Nodes& q, double x, double* row) {
  const std::size_t N = q.t.size();
  std::fill(row, row + N, 0.0);
  for (std::size_t i = 0; i < q.w.size(); ++i) row[i] = q.w[i] * sinc_kernel(q.t[i], x);
  if (x != 0.0)
    for (std::size_t i = q.log_start; i + 2 < N; i += 2) filon_panel(&q.t[i], x, &row[i]);
  // The log part interpolates f(t) / t; the shared node sits at t = 1.
  for (std::size_t i = q.log_start; i < N; ++i) row[i] /= q.t[i];
  for (std::size_t i = 0; i < N; ++i) row[i] /= std::numbers::pi;
}

bool tail_below(const SymmetricCF& cf, double T, double eps) {
  constexpr int samples = 32;
  for (int i = 0; i <= samples; ++i) {
    const double t = T * (1.0 + 3.0 * i / samples);
    if (std::abs(cf.evaluate(t)) >= eps) return false;
  }
  return true;
}

double resolve_truncation(const SymmetricCF& a, const SymmetricCF& b, const QuadratureSpec& quad) {
  if (quad.truncation) return *quad.truncation;
  return std::max(auto_truncation(a, quad.eps_tail), auto_truncation(b, quad.eps_tail));
}

// Precomputed linear map from CF values on the nodes to CDF values
// (minus 1/2) on the x grid.
class InversionOperator {
 public:
  InversionOperator(double T, std::size_t n, std::span<const double> xs) : xs_(xs.begin(), xs.end()) {
    nodes_ = build_nodes(T, n);
    const std::size_t N = nodes_.t.size();
    table_.resize(xs_.size() * N);
    for (std::size_t j = 0; j < xs_.size(); ++j) kernel_row(nodes_, xs_[j], &table_[j * N]);
  }

  std::vector<double> sample(const SymmetricCF& cf) const {
    std::vector<double> f(nodes_.t.size());
    for (std::size_t i = 0; i < f.size(); ++i) f[i] = cf.evaluate(nodes_.t[i]);
    return f;
  }

  /// max_j |sum_i table[j][i] (fa_i - fb_i)| and its x.
  std::pair<double, double> max_gap(std::span<const double> fa, std::span<const double> fb) const {
    const std::size_t N = nodes_.t.size();
    std::vector<double> diff(N);
    for (std::size_t i = 0; i < N; ++i) diff[i] = fa[i] - fb[i];
    double best = 0.0, at = xs_.empty() ? 0.0 : xs_[0];
    for (std::size_t j = 0; j < xs_.size(); ++j) {
      const double* row = &table_[j * N];
      double acc = 0.0;
      for (std::size_t i = 0; i < N; ++i) acc += row[i] * diff[i];
      if (std::abs(acc) > best) {
        best = std::abs(acc);
        at = xs_[j];
      }
    }
    return {best, at};
  }

  std::size_t node_count() const { return nodes_.t.size(); }

 private:
  std::vector<double> xs_;
  Nodes nodes_;
  std::vector<double> table_;
};

}  // namespace

double auto_truncation(const SymmetricCF& cf, double eps_tail) {
  for (double T = 1.0 / 64.0; T <= kMaxTruncation; T *= 2.0)
    if (tail_below(cf, T, eps_tail)) return T;
  if (tail_below(cf, kMaxTruncation, eps_tail)) return kMaxTruncation;
  throw NumericError("characteristic function does not decay below the tail tolerance by t = 1e5 (" + cf.describe() +
                     "); pass an explicit truncation");
}

double cdf_from_cf(const SymmetricCF& cf, double x, const QuadratureSpec& quad) {
  quad.validate();
  if (!std::isfinite(x)) throw InputError("cdf argument must be finite");
  const double T = quad.truncation ? *quad.truncation : auto_truncation(cf, quad.eps_tail);
  const Nodes q = build_nodes(T, quad.nodes);
  std::vector<double> row(q.t.size());
  kernel_row(q, x, row.data());
  double acc = 0.0;
  for (std::size_t i = 0; i < q.t.size(); ++i) acc += row[i] * cf.evaluate(q.t[i]);
  const double F = 0.5 + acc;
  if (F < -1e-9 || F > 1.0 + 1e-9)
    throw NumericError("inverted CDF left [0, 1] beyond tolerance; refine the quadrature");
  return std::clamp(F, 0.0, 1.0);
}

double natural_scale(const SymmetricCF& cf) {
  if (cf.has_finite_variance()) {
    const double v = cf.cumulants()->k2;
    if (!(v > 0.0)) throw InputError("degenerate law has no scale: " + cf.describe());
    return std::sqrt(v);
  }
  // Bracket log f(t) = -1 then bisect.
  double lo = 0.0, hi = 1.0;
  while (cf.log_evaluate(hi) > -1.0) {
    lo = hi;
    hi *= 2.0;
    if (hi > kMaxTruncation) throw NumericError("could not determine a scale for " + cf.describe());
  }
  for (int i = 0; i < 200 && hi - lo > 1e-15 * hi; ++i) {
    const double mid = 0.5 * (lo + hi);
    (cf.log_evaluate(mid) > -1.0 ? lo : hi) = mid;
  }
  return 1.0 / (0.5 * (lo + hi));
}

std::vector<double> default_x_grid(const SymmetricCF& cf1, const SymmetricCF& cf2) {
  const double s = std::max(natural_scale(cf1), natural_scale(cf2));
  return linspace(-8.0 * s, 8.0 * s, 401);
}

KolmogorovReport kolmogorov_distance(const SymmetricCF& cf1, const SymmetricCF& cf2, const QuadratureSpec& quad,
                                     std::optional<std::vector<double>> x_grid) {
  quad.validate();
  const std::vector<double> xs = x_grid ? std::move(*x_grid) : default_x_grid(cf1, cf2);
  if (xs.empty()) throw InputError("x grid is empty");
  const double T = resolve_truncation(cf1, cf2, quad);
  const InversionOperator op(T, quad.nodes, xs);
  const auto [d, at] = op.max_gap(op.sample(cf1), op.sample(cf2));
  KolmogorovReport r;
  r.distance = std::min(d, 1.0);
  r.x_at_max = at;
  r.truncation = T;
  r.nodes = op.node_count();
  r.x_points = xs.size();
  return r;
}

StableFit fit_stable(const SymmetricCF& target, std::span<const double> alpha_grid, std::span<const double> scale_grid,
                     const QuadratureSpec& quad, std::optional<std::vector<double>> x_grid) {
  quad.validate();
  if (alpha_grid.empty() || scale_grid.empty()) throw InputError("stable fit grids must be nonempty");
  std::vector<double> alphas(alpha_grid.begin(), alpha_grid.end());
  std::vector<double> scales(scale_grid.begin(), scale_grid.end());
  std::sort(alphas.begin(), alphas.end());
  std::sort(scales.begin(), scales.end());
  for (double a : alphas)
    if (!(a > 0.0 && a <= 2.0)) throw InputError("stable fit alpha grid must lie in (0, 2]");
  for (double c : scales)
    if (!std::isfinite(c) || !(c > 0.0)) throw InputError("stable fit scale grid must be finite and > 0");

  const std::vector<double> xs = x_grid ? std::move(*x_grid) : [&] {
    const double s = natural_scale(target);
    return linspace(-8.0 * s, 8.0 * s, 401);
  }();
  if (xs.empty()) throw InputError("x grid is empty");

  const double target_T = quad.truncation ? *quad.truncation : auto_truncation(target, quad.eps_tail);
  // One operator (and target sample) per distinct truncation.
  std::map<double, std::pair<InversionOperator, std::vector<double>>> ops;
  auto op_for = [&](double T) -> const std::pair<InversionOperator, std::vector<double>>& {
    auto it = ops.find(T);
    if (it == ops.end()) {
      InversionOperator op(T, quad.nodes, xs);
      auto f = op.sample(target);
      it = ops.emplace(T, std::make_pair(std::move(op), std::move(f))).first;
    }
    return it->second;
  };

  StableFit best;
  best.d_K = std::numeric_limits<double>::infinity();
  for (double a : alphas) {
    for (double c : scales) {
      const SymmetricCF cand(SymmetricStable{a, c});
      const double T =
          quad.truncation ? *quad.truncation : std::max(target_T, auto_truncation(cand, quad.eps_tail));
      const auto& [op, f_target] = op_for(T);
      const double d = std::min(op.max_gap(op.sample(cand), f_target).first, 1.0);
      ++best.candidates;
      if (d < best.d_K) {
        best.d_K = d;
        best.alpha = a;
        best.scale = c;
      }
    }
  }
  return best;
}

std::vector<double> default_alpha_grid() {
  std::vector<double> g;
  for (int k = 0; k < 20; ++k) g.push_back(1.0 + 0.05 * k);
  return g;
}

std::vector<double> default_scale_grid(double variance) {
  if (!std::isfinite(variance) || !(variance > 0.0)) throw InputError("scale grid needs a positive variance");
  const double s0 = std::sqrt(variance / 2.0);
  return log_spaced(0.25 * s0, 4.0 * s0, 21);
}

ComparisonReport approx_compare(const FamilyParams& family, int m, std::span<const double> alpha_grid,
                                std::span<const double> scale_grid, const QuadratureSpec& quad, double tie_tolerance) {
  quad.validate();
  if (!std::isfinite(tie_tolerance) || tie_tolerance < 0.0) throw InputError("tie tolerance must be finite and >= 0");
  const SymmetricCF base(family);
  if (!base.has_finite_variance()) throw InputError("approx_compare needs a finite-variance family");

  ComparisonReport rep;
  rep.family = base.describe();
  rep.m = m;
  rep.tie_tolerance = tie_tolerance;
  rep.variance = moments(base).mu2;
  if (!(rep.variance > 0.0)) throw InputError("approx_compare needs a non-degenerate family");

  const SymmetricCF sum = sum_rescale(base, m);
  const SymmetricCF z(Gaussian{rep.variance});
  const double range = 8.0 * std::sqrt(rep.variance);
  const auto xs = linspace(-range, range, 401);

  const auto dg = kolmogorov_distance(sum, z, quad, xs);
  rep.d_K_gaussian = dg.distance;
  rep.truncation_gaussian = dg.truncation;
  rep.nodes = dg.nodes;
  rep.x_points = xs.size();
  rep.x_range = range;

  for (double a : alpha_grid)
    if (a < 2.0) rep.alpha_grid.push_back(a);
  std::sort(rep.alpha_grid.begin(), rep.alpha_grid.end());
  rep.scale_grid.assign(scale_grid.begin(), scale_grid.end());
  std::sort(rep.scale_grid.begin(), rep.scale_grid.end());
  if (rep.alpha_grid.empty()) throw InputError("alpha grid has no value below 2");

  const auto fit = fit_stable(sum, rep.alpha_grid, rep.scale_grid, quad, xs);
  rep.best_alpha = fit.alpha;
  rep.best_scale = fit.scale;
  rep.d_K_stable = fit.d_K;

  const double diff = rep.d_K_gaussian - rep.d_K_stable;
  if (std::abs(diff) <= tie_tolerance)
    rep.verdict = "tie within tolerance";
  else
    rep.verdict = diff > 0.0 ? "stable closer" : "gaussian closer";
  return rep;
}

}  // namespace iddlab
