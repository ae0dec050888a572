#include "iddlab/cf.hpp"

#include <cmath>
#include <sstream>
#include <utility>

#include "iddlab/errors.hpp"

namespace iddlab {

PositivityError::PositivityError(double t, double value)
    : NumericError([&] {
        std::ostringstream os;
        os.precision(17);
        os << "characteristic function is not strictly positive at t = " << t << " (value " << value << ")";
        return os.str();
      }()),
      t_(t),
      value_(value) {}

namespace {

bool finite_positive(double v) { return std::isfinite(v) && v > 0.0; }

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

}  // namespace

void validate(const FamilyParams& family) {
  std::visit(overloaded{
                 [](const Gaussian& g) {
                   if (!std::isfinite(g.variance) || g.variance < 0.0)
                     throw InputError("gaussian: variance must be finite and >= 0");
                 },
                 [](const SymmetricStable& s) {
                   if (!(s.alpha > 0.0 && s.alpha <= 2.0)) throw InputError("stable: alpha must lie in (0, 2]");
                   if (!finite_positive(s.scale)) throw InputError("stable: scale must be finite and > 0");
                 },
                 [](const SymmetrizedGamma& g) {
                   if (!finite_positive(g.shape)) throw InputError("symgamma: shape must be finite and > 0");
                 },
                 [](const CompoundPoissonSym& p) {
                   if (!finite_positive(p.rate)) throw InputError("cpoisson: rate must be finite and > 0");
                   if (!finite_positive(p.jump)) throw InputError("cpoisson: jump must be finite and > 0");
                 },
             },
             family);
}

std::string family_name(const FamilyParams& family) {
  return std::visit(overloaded{
                        [](const Gaussian&) { return std::string("gauss"); },
                        [](const SymmetricStable&) { return std::string("stable"); },
                        [](const SymmetrizedGamma&) { return std::string("symgamma"); },
                        [](const CompoundPoissonSym&) { return std::string("cpoisson"); },
                    },
                    family);
}

std::string to_string(CFKind kind) {
  switch (kind) {
    case CFKind::family: return "family";
    case CFKind::canonical: return "canonical";
    case CFKind::empirical: return "empirical";
    case CFKind::product: return "product";
    case CFKind::root_rescaled: return "root_rescaled";
    case CFKind::sum_rescaled: return "sum_rescaled";
    case CFKind::dilated: return "dilated";
  }
  return "unknown";
}

// ---------------------------------------------------------------------------
// CanonicalExponent
// ---------------------------------------------------------------------------

CanonicalExponent::CanonicalExponent(double gaussian_coefficient, std::vector<Atom> atoms,
                                     std::optional<TabulatedDensity> density)
    : a_(gaussian_coefficient), atoms_(std::move(atoms)), density_(std::move(density)) {
  if (!std::isfinite(a_) || a_ < 0.0) throw InputError("canonical: gaussian coefficient must be finite and >= 0");
  for (std::size_t i = 0; i < atoms_.size(); ++i) {
    if (!finite_positive(atoms_[i].position))
      throw InputError("canonical: atom " + std::to_string(i) + " position must be finite and > 0");
    if (!finite_positive(atoms_[i].mass))
      throw InputError("canonical: atom " + std::to_string(i) + " mass must be finite and > 0");
  }
  if (density_) {
    const auto& x = density_->x;
    const auto& d = density_->density;
    if (x.size() != d.size() || x.size() < 2)
      throw InputError("canonical: density grid needs >= 2 points and matching value count");
    for (std::size_t i = 0; i < x.size(); ++i) {
      if (!finite_positive(x[i])) throw InputError("canonical: density grid must lie in (0, inf)");
      if (i > 0 && !(x[i] > x[i - 1])) throw InputError("canonical: density grid must be strictly increasing");
      if (!std::isfinite(d[i]) || d[i] < 0.0) throw InputError("canonical: density values must be finite and >= 0");
    }
  }
}

CanonicalExponent CanonicalExponent::compound_poisson(double rate, double jump, double gaussian_coefficient) {
  if (!finite_positive(rate) || !finite_positive(jump)) throw InputError("compound_poisson: rate and jump must be > 0");
  // 2 * mass * (1 + h^2) / h^2 * (cos(h t) - 1) == rate * (cos(h t) - 1)
  const double mass = rate * jump * jump / (2.0 * (1.0 + jump * jump));
  return CanonicalExponent(gaussian_coefficient, {Atom{jump, mass}});
}

namespace {

// -4 sin^2(t x / 2) (1 + x^2) / x^2 for one unit of spectral mass.
double khinchine_kernel(double t, double x) {
  const double s = std::sin(0.5 * t * x);
  return -4.0 * s * s * (1.0 + x * x) / (x * x);
}

template <class F>
double trapezoid(const TabulatedDensity& d, F&& g) {
  double sum = 0.0;
  for (std::size_t i = 1; i < d.x.size(); ++i) {
    const double left = g(d.x[i - 1]) * d.density[i - 1];
    const double right = g(d.x[i]) * d.density[i];
    sum += 0.5 * (d.x[i] - d.x[i - 1]) * (left + right);
  }
  return sum;
}

}  // namespace

double CanonicalExponent::log_cf(double t) const {
  double acc = -a_ * t * t;
  for (const auto& atom : atoms_) acc += atom.mass * khinchine_kernel(t, atom.position);
  if (density_) acc += trapezoid(*density_, [t](double x) { return khinchine_kernel(t, x); });
  return acc;
}

double CanonicalExponent::total_mass() const {
  double m = 0.0;
  for (const auto& atom : atoms_) m += atom.mass;
  if (density_) m += trapezoid(*density_, [](double) { return 1.0; });
  return m;
}

Cumulants CanonicalExponent::cumulants() const {
  // Taylor expansion of the kernel: 2 (1+x^2)/x^2 (cos tx - 1)
  //   = -(1+x^2) t^2 + (1+x^2) x^2 t^4 / 12 - ...
  Cumulants c{2.0 * a_, 0.0};
  auto k2 = [](double x) { return 2.0 * (1.0 + x * x); };
  auto k4 = [](double x) { return 2.0 * (1.0 + x * x) * x * x; };
  for (const auto& atom : atoms_) {
    c.k2 += atom.mass * k2(atom.position);
    c.k4 += atom.mass * k4(atom.position);
  }
  if (density_) {
    c.k2 += trapezoid(*density_, k2);
    c.k4 += trapezoid(*density_, k4);
  }
  return c;
}

// ---------------------------------------------------------------------------
// Expression nodes
// ---------------------------------------------------------------------------

namespace detail {

class CFNode {
 public:
  virtual ~CFNode() = default;
  virtual CFKind kind() const = 0;
  // t >= 0 in both evaluators; callers fold the sign.
  virtual double value(double t) const = 0;
  virtual double log_value(double t) const = 0;
  virtual std::optional<Cumulants> cumulants() const = 0;
  virtual std::optional<double> gaussian_coefficient() const = 0;
  virtual bool may_be_nonpositive() const { return false; }
  virtual std::string describe() const = 0;
};

namespace {

std::string num(double v) {
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

double checked_log(double t, double v) {
  if (!(v > 0.0)) throw PositivityError(t, v);
  return std::log(v);
}

class FamilyNode final : public CFNode {
 public:
  explicit FamilyNode(FamilyParams p) : p_(std::move(p)) { validate(p_); }

  CFKind kind() const override { return CFKind::family; }
  const FamilyParams& params() const { return p_; }

  double value(double t) const override { return std::exp(log_value(t)); }

  double log_value(double t) const override {
    return std::visit(overloaded{
                          [t](const Gaussian& g) { return -0.5 * g.variance * t * t; },
                          [t](const SymmetricStable& s) { return -std::pow(s.scale * t, s.alpha); },
                          [t](const SymmetrizedGamma& g) { return -g.shape * std::log1p(t * t); },
                          [t](const CompoundPoissonSym& p) { return p.rate * (std::cos(p.jump * t) - 1.0); },
                      },
                      p_);
  }

  std::optional<Cumulants> cumulants() const override {
    return std::visit(overloaded{
                          [](const Gaussian& g) -> std::optional<Cumulants> { return Cumulants{g.variance, 0.0}; },
                          [](const SymmetricStable& s) -> std::optional<Cumulants> {
                            if (s.alpha < 2.0) return std::nullopt;
                            return Cumulants{2.0 * s.scale * s.scale, 0.0};
                          },
                          [](const SymmetrizedGamma& g) -> std::optional<Cumulants> {
                            return Cumulants{2.0 * g.shape, 12.0 * g.shape};
                          },
                          [](const CompoundPoissonSym& p) -> std::optional<Cumulants> {
                            const double h2 = p.jump * p.jump;
                            return Cumulants{p.rate * h2, p.rate * h2 * h2};
                          },
                      },
                      p_);
  }

  std::optional<double> gaussian_coefficient() const override {
    return std::visit(overloaded{
                          [](const Gaussian& g) { return 0.5 * g.variance; },
                          [](const SymmetricStable& s) { return s.alpha == 2.0 ? s.scale * s.scale : 0.0; },
                          [](const SymmetrizedGamma&) { return 0.0; },
                          [](const CompoundPoissonSym&) { return 0.0; },
                      },
                      p_);
  }

  std::string describe() const override {
    return std::visit(overloaded{
                          [](const Gaussian& g) { return "gauss(variance=" + num(g.variance) + ")"; },
                          [](const SymmetricStable& s) {
                            return "stable(alpha=" + num(s.alpha) + ",scale=" + num(s.scale) + ")";
                          },
                          [](const SymmetrizedGamma& g) { return "symgamma(shape=" + num(g.shape) + ")"; },
                          [](const CompoundPoissonSym& p) {
                            return "cpoisson(rate=" + num(p.rate) + ",jump=" + num(p.jump) + ")";
                          },
                      },
                      p_);
  }

 private:
  FamilyParams p_;
};

class CanonicalNode final : public CFNode {
 public:
  explicit CanonicalNode(CanonicalExponent e) : e_(std::move(e)) {}

  CFKind kind() const override { return CFKind::canonical; }
  double value(double t) const override { return std::exp(e_.log_cf(t)); }
  double log_value(double t) const override { return e_.log_cf(t); }
  std::optional<Cumulants> cumulants() const override { return e_.cumulants(); }
  std::optional<double> gaussian_coefficient() const override { return e_.gaussian_coefficient(); }
  std::string describe() const override {
    return "canonical(a=" + num(e_.gaussian_coefficient()) + ",atoms=" + std::to_string(e_.atoms().size()) +
           (e_.density() ? ",density" : "") + ")";
  }

 private:
  CanonicalExponent e_;
};

class EmpiricalNode final : public CFNode {
 public:
  explicit EmpiricalNode(std::vector<double> xs) : xs_(std::move(xs)) {}

  CFKind kind() const override { return CFKind::empirical; }

  double value(double t) const override {
    double s = 0.0;
    for (double x : xs_) s += std::cos(t * x);
    return s / static_cast<double>(xs_.size());
  }

  double log_value(double t) const override { return checked_log(t, value(t)); }

  std::optional<Cumulants> cumulants() const override {
    double m2 = 0.0, m4 = 0.0;
    for (double x : xs_) {
      const double x2 = x * x;
      m2 += x2;
      m4 += x2 * x2;
    }
    const double n = static_cast<double>(xs_.size());
    m2 /= n;
    m4 /= n;
    return Cumulants{m2, m4 - 3.0 * m2 * m2};
  }

  std::optional<double> gaussian_coefficient() const override { return std::nullopt; }
  bool may_be_nonpositive() const override { return true; }
  std::string describe() const override { return "empirical(n=" + std::to_string(xs_.size()) + ")"; }

 private:
  std::vector<double> xs_;
};

class ProductNode final : public CFNode {
 public:
  ProductNode(std::shared_ptr<const CFNode> a, std::shared_ptr<const CFNode> b)
      : a_(std::move(a)), b_(std::move(b)) {}

  CFKind kind() const override { return CFKind::product; }

  double value(double t) const override {
    if (may_be_nonpositive()) return a_->value(t) * b_->value(t);
    return std::exp(log_value(t));
  }

  double log_value(double t) const override { return a_->log_value(t) + b_->log_value(t); }

  std::optional<Cumulants> cumulants() const override {
    auto ca = a_->cumulants();
    auto cb = b_->cumulants();
    if (!ca || !cb) return std::nullopt;
    return Cumulants{ca->k2 + cb->k2, ca->k4 + cb->k4};
  }

  std::optional<double> gaussian_coefficient() const override {
    auto ga = a_->gaussian_coefficient();
    auto gb = b_->gaussian_coefficient();
    if (!ga || !gb) return std::nullopt;
    return *ga + *gb;
  }

  bool may_be_nonpositive() const override { return a_->may_be_nonpositive() || b_->may_be_nonpositive(); }
  std::string describe() const override { return a_->describe() + " * " + b_->describe(); }

 private:
  std::shared_ptr<const CFNode> a_, b_;
};

class RootRescaleNode final : public CFNode {
 public:
  RootRescaleNode(std::shared_ptr<const CFNode> base, int m)
      : base_(std::move(base)), m_(m), sqrt_m_(std::sqrt(static_cast<double>(m))) {}

  CFKind kind() const override { return CFKind::root_rescaled; }

  double value(double t) const override {
    if (!base_->may_be_nonpositive()) return std::exp(log_value(t));
    const double v = base_->value(sqrt_m_ * t);
    if (!(v > 0.0)) throw PositivityError(t, v);
    return std::exp(std::log(v) / m_);
  }

  double log_value(double t) const override {
    if (!base_->may_be_nonpositive()) return base_->log_value(sqrt_m_ * t) / m_;
    const double v = base_->value(sqrt_m_ * t);
    return checked_log(t, v) / m_;
  }

  std::optional<Cumulants> cumulants() const override {
    auto c = base_->cumulants();
    if (!c) return std::nullopt;
    // kappa_j(m) = m^(j/2 - 1) kappa_j
    return Cumulants{c->k2, c->k4 * m_};
  }

  std::optional<double> gaussian_coefficient() const override { return base_->gaussian_coefficient(); }
  bool may_be_nonpositive() const override { return false; }
  std::string describe() const override { return "root_rescale(" + base_->describe() + ", m=" + std::to_string(m_) + ")"; }

 private:
  std::shared_ptr<const CFNode> base_;
  int m_;
  double sqrt_m_;
};

class SumRescaleNode final : public CFNode {
 public:
  SumRescaleNode(std::shared_ptr<const CFNode> base, int m)
      : base_(std::move(base)), m_(m), sqrt_m_(std::sqrt(static_cast<double>(m))) {}

  CFKind kind() const override { return CFKind::sum_rescaled; }

  double value(double t) const override {
    if (base_->may_be_nonpositive()) return std::pow(base_->value(t / sqrt_m_), m_);
    return std::exp(log_value(t));
  }

  double log_value(double t) const override {
    if (base_->may_be_nonpositive()) return checked_log(t, value(t));
    return m_ * base_->log_value(t / sqrt_m_);
  }

  std::optional<Cumulants> cumulants() const override {
    auto c = base_->cumulants();
    if (!c) return std::nullopt;
    return Cumulants{c->k2, c->k4 / m_};
  }

  std::optional<double> gaussian_coefficient() const override { return base_->gaussian_coefficient(); }
  bool may_be_nonpositive() const override { return base_->may_be_nonpositive(); }
  std::string describe() const override { return "sum_rescale(" + base_->describe() + ", m=" + std::to_string(m_) + ")"; }

 private:
  std::shared_ptr<const CFNode> base_;
  int m_;
  double sqrt_m_;
};

class DilateNode final : public CFNode {
 public:
  DilateNode(std::shared_ptr<const CFNode> base, double c) : base_(std::move(base)), c_(c) {}

  CFKind kind() const override { return CFKind::dilated; }
  double value(double t) const override { return base_->value(c_ * t); }
  double log_value(double t) const override { return base_->log_value(c_ * t); }

  std::optional<Cumulants> cumulants() const override {
    auto c = base_->cumulants();
    if (!c) return std::nullopt;
    const double c2 = c_ * c_;
    return Cumulants{c->k2 * c2, c->k4 * c2 * c2};
  }

  std::optional<double> gaussian_coefficient() const override {
    auto a = base_->gaussian_coefficient();
    if (!a) return std::nullopt;
    return *a * c_ * c_;
  }

  bool may_be_nonpositive() const override { return base_->may_be_nonpositive(); }
  std::string describe() const override { return "dilate(" + base_->describe() + ", c=" + num(c_) + ")"; }

 private:
  std::shared_ptr<const CFNode> base_;
  double c_;
};

void check_m(int m) {
  if (m < 1) throw InputError("rescale factor m must be a positive integer");
}

}  // namespace
}  // namespace detail

// ---------------------------------------------------------------------------
// SymmetricCF
// ---------------------------------------------------------------------------

SymmetricCF::SymmetricCF(const FamilyParams& family) : node_(std::make_shared<detail::FamilyNode>(family)) {}

SymmetricCF::SymmetricCF(CanonicalExponent exponent)
    : node_(std::make_shared<detail::CanonicalNode>(std::move(exponent))) {}

double SymmetricCF::evaluate(double t) const {
  if (!std::isfinite(t)) throw InputError("characteristic function argument must be finite");
  return node_->value(std::abs(t));
}

double SymmetricCF::log_evaluate(double t) const {
  if (!std::isfinite(t)) throw InputError("characteristic function argument must be finite");
  return node_->log_value(std::abs(t));
}

CFKind SymmetricCF::kind() const { return node_->kind(); }

const FamilyParams* SymmetricCF::family() const {
  if (auto* f = dynamic_cast<const detail::FamilyNode*>(node_.get())) return &f->params();
  return nullptr;
}

std::optional<Cumulants> SymmetricCF::cumulants() const { return node_->cumulants(); }

bool SymmetricCF::has_finite_variance() const { return node_->cumulants().has_value(); }

std::optional<double> SymmetricCF::exact_gaussian_coefficient() const { return node_->gaussian_coefficient(); }

bool SymmetricCF::may_be_nonpositive() const { return node_->may_be_nonpositive(); }

std::string SymmetricCF::describe() const { return node_->describe(); }

SymmetricCF from_canonical(CanonicalExponent exponent) { return SymmetricCF(std::move(exponent)); }

SymmetricCF from_samples(std::span<const double> samples) {
  if (samples.empty()) throw InputError("sample list is empty");
  for (std::size_t i = 0; i < samples.size(); ++i)
    if (!std::isfinite(samples[i])) throw InputError("sample " + std::to_string(i) + " is not finite");
  return SymmetricCF(std::make_shared<detail::EmpiricalNode>(std::vector<double>(samples.begin(), samples.end())));
}

SymmetricCF root_rescale(const SymmetricCF& cf, int m) {
  detail::check_m(m);
  return SymmetricCF(std::make_shared<detail::RootRescaleNode>(cf.node_, m));
}

SymmetricCF sum_rescale(const SymmetricCF& cf, int m) {
  detail::check_m(m);
  return SymmetricCF(std::make_shared<detail::SumRescaleNode>(cf.node_, m));
}

SymmetricCF convolve(const SymmetricCF& a, const SymmetricCF& b) {
  return SymmetricCF(std::make_shared<detail::ProductNode>(a.node_, b.node_));
}

SymmetricCF dilate(const SymmetricCF& cf, double c) {
  if (!finite_positive(c)) throw InputError("dilation factor must be finite and > 0");
  return SymmetricCF(std::make_shared<detail::DilateNode>(cf.node_, c));
}

SymmetricCF limit_gaussian(double a) {
  if (!std::isfinite(a) || a < 0.0) throw InputError("limit gaussian coefficient must be finite and >= 0");
  return SymmetricCF(Gaussian{2.0 * a});
}

SymmetricCF degenerate_cf() { return SymmetricCF(Gaussian{0.0}); }

}  // namespace iddlab
