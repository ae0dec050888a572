#include "iddlab/laplace.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include "detail/sup_search.hpp"
#include "iddlab/errors.hpp"
#include "iddlab/grid.hpp"

namespace iddlab {

namespace {

bool finite_positive(double v) { return std::isfinite(v) && v > 0.0; }

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

std::string num(double v) {
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

// (1 - e^(-a s)) / (1 - e^(-a))
double laplace_kernel(double s, double a) { return std::expm1(-a * s) / std::expm1(-a); }

}  // namespace

void validate(const SubordinatorParams& params) {
  std::visit(overloaded{
                 [](const GammaSub& g) {
                   if (!finite_positive(g.shape)) throw InputError("gamma: shape must be finite and > 0");
                 },
                 [](const PoissonSub& p) {
                   if (!finite_positive(p.rate)) throw InputError("poisson: rate must be finite and > 0");
                 },
                 [](const StableSub& s) {
                   if (!(s.alpha > 0.0 && s.alpha < 1.0)) throw InputError("stable subordinator: alpha must lie in (0, 1)");
                   if (!finite_positive(s.scale)) throw InputError("stable subordinator: scale must be finite and > 0");
                 },
                 [](const Drift& d) {
                   if (!std::isfinite(d.sigma) || d.sigma < 0.0) throw InputError("drift: sigma must be finite and >= 0");
                 },
             },
             params);
}

std::string subordinator_name(const SubordinatorParams& params) {
  return std::visit(overloaded{
                        [](const GammaSub&) { return std::string("gamma"); },
                        [](const PoissonSub&) { return std::string("poisson"); },
                        [](const StableSub&) { return std::string("stable"); },
                        [](const Drift&) { return std::string("drift"); },
                    },
                    params);
}

LaplaceExponent::LaplaceExponent(double drift, std::vector<Atom> atoms, std::optional<TabulatedDensity> density)
    : sigma_(drift), atoms_(std::move(atoms)), density_(std::move(density)) {
  if (!std::isfinite(sigma_) || sigma_ < 0.0) throw InputError("laplace exponent: drift must be finite and >= 0");
  for (std::size_t i = 0; i < atoms_.size(); ++i) {
    if (!finite_positive(atoms_[i].position) || !finite_positive(atoms_[i].mass))
      throw InputError("laplace exponent: atom " + std::to_string(i) + " needs position > 0 and mass > 0");
  }
  if (density_) {
    const auto& x = density_->x;
    const auto& d = density_->density;
    if (x.size() != d.size() || x.size() < 2)
      throw InputError("laplace exponent: density grid needs >= 2 points and matching value count");
    for (std::size_t i = 0; i < x.size(); ++i) {
      if (!finite_positive(x[i])) throw InputError("laplace exponent: density grid must lie in (0, inf)");
      if (i > 0 && !(x[i] > x[i - 1])) throw InputError("laplace exponent: density grid must be strictly increasing");
      if (!std::isfinite(d[i]) || d[i] < 0.0) throw InputError("laplace exponent: density values must be >= 0");
    }
  }
}

LaplaceExponent LaplaceExponent::poisson(double rate, double drift) {
  if (!finite_positive(rate)) throw InputError("poisson: rate must be finite and > 0");
  return LaplaceExponent(drift, {Atom{1.0, -rate * std::expm1(-1.0)}});
}

double LaplaceExponent::log_transform(double s) const {
  double acc = sigma_ * s;
  for (const auto& atom : atoms_) acc += atom.mass * laplace_kernel(s, atom.position);
  if (density_) {
    const auto& x = density_->x;
    const auto& d = density_->density;
    for (std::size_t i = 1; i < x.size(); ++i)
      acc += 0.5 * (x[i] - x[i - 1]) * (laplace_kernel(s, x[i - 1]) * d[i - 1] + laplace_kernel(s, x[i]) * d[i]);
  }
  return -acc;
}

namespace detail {

class LTNode {
 public:
  virtual ~LTNode() = default;
  virtual LaplaceKind kind() const = 0;
  virtual double log_value(double s) const = 0;
  virtual double drift() const = 0;
  virtual std::string describe() const = 0;
};

namespace {

class SubordinatorNode final : public LTNode {
 public:
  explicit SubordinatorNode(SubordinatorParams p) : p_(std::move(p)) { validate(p_); }

  LaplaceKind kind() const override { return LaplaceKind::family; }

  double log_value(double s) const override {
    return std::visit(overloaded{
                          [s](const GammaSub& g) { return -g.shape * std::log1p(s); },
                          [s](const PoissonSub& p) { return p.rate * std::expm1(-s); },
                          [s](const StableSub& st) { return -std::pow(st.scale * s, st.alpha); },
                          [s](const Drift& d) { return -d.sigma * s; },
                      },
                      p_);
  }

  double drift() const override {
    if (auto* d = std::get_if<Drift>(&p_)) return d->sigma;
    return 0.0;
  }

  std::string describe() const override {
    return std::visit(overloaded{
                          [](const GammaSub& g) { return "gamma(shape=" + num(g.shape) + ")"; },
                          [](const PoissonSub& p) { return "poisson(rate=" + num(p.rate) + ")"; },
                          [](const StableSub& s) {
                            return "stable(alpha=" + num(s.alpha) + ",scale=" + num(s.scale) + ")";
                          },
                          [](const Drift& d) { return "drift(sigma=" + num(d.sigma) + ")"; },
                      },
                      p_);
  }

 private:
  SubordinatorParams p_;
};

class ExponentNode final : public LTNode {
 public:
  explicit ExponentNode(LaplaceExponent e) : e_(std::move(e)) {}
  LaplaceKind kind() const override { return LaplaceKind::canonical; }
  double log_value(double s) const override { return e_.log_transform(s); }
  double drift() const override { return e_.drift(); }
  std::string describe() const override {
    return "canonical(drift=" + num(e_.drift()) + ",atoms=" + std::to_string(e_.atoms().size()) +
           (e_.density() ? ",density" : "") + ")";
  }

 private:
  LaplaceExponent e_;
};

class ProductLTNode final : public LTNode {
 public:
  ProductLTNode(std::shared_ptr<const LTNode> a, std::shared_ptr<const LTNode> b) : a_(std::move(a)), b_(std::move(b)) {}
  LaplaceKind kind() const override { return LaplaceKind::product; }
  double log_value(double s) const override { return a_->log_value(s) + b_->log_value(s); }
  double drift() const override { return a_->drift() + b_->drift(); }
  std::string describe() const override { return a_->describe() + " * " + b_->describe(); }

 private:
  std::shared_ptr<const LTNode> a_, b_;
};

class RootRescaleLTNode final : public LTNode {
 public:
  RootRescaleLTNode(std::shared_ptr<const LTNode> base, int m) : base_(std::move(base)), m_(m) {}
  LaplaceKind kind() const override { return LaplaceKind::root_rescaled; }
  double log_value(double s) const override { return base_->log_value(m_ * s) / m_; }
  double drift() const override { return base_->drift(); }
  std::string describe() const override {
    return "root_rescale(" + base_->describe() + ", m=" + std::to_string(m_) + ")";
  }

 private:
  std::shared_ptr<const LTNode> base_;
  int m_;
};

}  // namespace
}  // namespace detail

LaplaceTransform::LaplaceTransform(const SubordinatorParams& params)
    : node_(std::make_shared<detail::SubordinatorNode>(params)) {}

LaplaceTransform::LaplaceTransform(LaplaceExponent exponent)
    : node_(std::make_shared<detail::ExponentNode>(std::move(exponent))) {}

double LaplaceTransform::evaluate(double s) const { return std::exp(log_evaluate(s)); }

double LaplaceTransform::log_evaluate(double s) const {
  if (!std::isfinite(s) || !(s > 0.0)) throw InputError("Laplace transform argument must be finite and > 0");
  return node_->log_value(s);
}

LaplaceKind LaplaceTransform::kind() const { return node_->kind(); }

double LaplaceTransform::exact_drift() const { return node_->drift(); }

std::string LaplaceTransform::describe() const { return node_->describe(); }

LaplaceTransform root_rescale_L(const LaplaceTransform& lt, int m) {
  if (m < 1) throw InputError("rescale factor m must be a positive integer");
  return LaplaceTransform(std::make_shared<detail::RootRescaleLTNode>(lt.node_, m));
}

LaplaceTransform product(const LaplaceTransform& a, const LaplaceTransform& b) {
  return LaplaceTransform(std::make_shared<detail::ProductLTNode>(a.node_, b.node_));
}

DriftEstimate estimate_drift(const LaplaceTransform& lt, std::span<const double> s_schedule) {
  if (s_schedule.size() < 3) throw InputError("schedule needs at least 3 points");
  for (std::size_t i = 0; i < s_schedule.size(); ++i) {
    if (!finite_positive(s_schedule[i])) throw InputError("schedule points must be finite and > 0");
    if (i > 0 && !(s_schedule[i] > s_schedule[i - 1])) throw InputError("schedule must be strictly increasing");
  }
  if (s_schedule.back() < 100.0 * s_schedule.front()) throw InputError("schedule must span at least two decades");

  DriftEstimate est;
  for (double s : s_schedule) est.sequence.emplace_back(s, -lt.log_evaluate(s) / s);
  const auto n = est.sequence.size();
  const double last = est.sequence[n - 1].second;
  est.sigma_hat = std::max(0.0, last);
  est.error_bound = std::abs(last - est.sequence[n - 2].second);
  est.s_used = est.sequence[n - 1].first;
  return est;
}

DriftEstimate estimate_drift(const LaplaceTransform& lt) {
  const auto s = default_schedule();
  return estimate_drift(lt, s);
}

SupportDecision support_touches_zero(const LaplaceTransform& lt, double tol, std::span<const double> s_schedule) {
  if (!std::isfinite(tol) || !(tol > 0.0)) throw InputError("support tolerance must be finite and > 0");
  SupportDecision d;
  d.estimate = estimate_drift(lt, s_schedule);
  d.touches_zero = d.estimate.sigma_hat <= tol + d.estimate.error_bound;
  return d;
}

SupportDecision support_touches_zero(const LaplaceTransform& lt, double tol) {
  const auto s = default_schedule();
  return support_touches_zero(lt, tol, s);
}

LaplaceLimitDeviation limit_deviation_L(const LaplaceTransform& lt, int m, double S, std::size_t grid_size,
                                        std::optional<double> sigma) {
  if (!finite_positive(S)) throw InputError("limit deviation range S must be finite and > 0");
  if (grid_size < 2) throw InputError("limit deviation grid needs at least 2 points");
  LaplaceLimitDeviation out;
  if (sigma) {
    if (!std::isfinite(*sigma) || *sigma < 0.0) throw InputError("drift must be finite and >= 0");
    out.sigma_used = *sigma;
    out.sigma_source = "given";
  } else {
    out.sigma_used = lt.exact_drift();
    out.sigma_source = "structural";
  }
  const auto lm = root_rescale_L(lt, m);
  const double sig = out.sigma_used;
  std::vector<double> grid(grid_size);
  for (std::size_t i = 0; i < grid_size; ++i) grid[i] = S * static_cast<double>(i + 1) / static_cast<double>(grid_size);
  const auto best = detail::grid_sup(std::span<const double>(grid), [&](double s) {
    // |L_m - e^(-sig s)| = e^(-sig s) |expm1(log L_m + sig s)|
    return std::exp(-sig * s) * std::abs(std::expm1(lm.log_evaluate(s) + sig * s));
  });
  out.sup = best.value;
  out.s_at_sup = best.x;
  return out;
}

ShapeCheck check_completely_monotone_shape(const LaplaceTransform& lt, std::span<const double> s_grid) {
  ShapeCheck c;
  std::vector<double> v(s_grid.size());
  for (std::size_t i = 0; i < s_grid.size(); ++i) {
    // log L stays finite where L itself underflows.
    const double lv = lt.log_evaluate(s_grid[i]);
    if (std::isnan(lv) || lv > 0.0 || lv == -std::numeric_limits<double>::infinity()) c.positive = false;
    v[i] = std::exp(lv);
  }
  double prev_slope = 0.0;
  for (std::size_t i = 1; i < v.size(); ++i) {
    const double slope = (v[i] - v[i - 1]) / (s_grid[i] - s_grid[i - 1]);
    if (v[i] > v[i - 1]) c.nonincreasing = false;
    if (i > 1) {
      // Where L is nearly flat the slopes are pure rounding noise.
      const double noise = 8.0 * std::numeric_limits<double>::epsilon() * v[i - 1] / (s_grid[i] - s_grid[i - 1]);
      const double slack = 1e-10 * std::max(std::abs(slope), std::abs(prev_slope)) + noise + 1e-300;
      if (slope < prev_slope - slack) c.convex = false;
    }
    prev_slope = slope;
  }
  return c;
}

std::vector<double> default_s_grid() { return log_spaced(1e-3, 1e3, 1024); }

}  // namespace iddlab
