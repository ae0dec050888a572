#include <chrono>
#include <cmath>
#include <ctime>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>

#include <CLI11.hpp>

#include "iddlab/analysis.hpp"
#include "iddlab/cli.hpp"
#include "iddlab/errors.hpp"
#include "iddlab/grid.hpp"
#include "iddlab/inversion.hpp"
#include "iddlab/metrics.hpp"

namespace iddlab::cli {

using nlohmann::json;

namespace {

// Effective configuration. Every field is reachable as --<key> on the
// subcommands that use it and as "<key>" in a --config JSON file.
struct RunConfig {
  // CF source
  std::string family;
  std::optional<double> variance, alpha, scale, shape, rate, jump;
  double gauss_coef = 0.0;
  std::vector<std::string> atoms;
  std::vector<std::string> convolve;
  std::string samples;

  int m = 1;
  double t_max = 10.0;
  std::size_t grid_size = 101;
  std::vector<double> schedule = default_schedule();
  double tol = 1e-4;
  std::string mode = "root";
  bool check_fixed_point = false;
  std::string method = "auto";
  bool detect = false;

  // metrics
  double r = 3.0;
  double lambda_t_min = 1e-3;
  double lambda_t_max = 50.0;
  std::size_t lambda_grid_size = 2048;
  std::string small_t_policy = "taylor-bound";
  std::string vs;
  std::string metric = "lambda";
  std::string direction = "forward";
  bool assert_holds = false;

  // laplace
  std::string action = "all";
  std::string lfamily;
  std::optional<double> sigma;
  std::vector<std::string> lconvolve;
  std::vector<double> s_schedule = default_schedule();
  double s_max = 10.0;
  std::size_t s_grid_size = 1000;

  // inversion
  std::size_t nodes = 4096;
  std::optional<double> truncation;
  double eps_tail = 1e-10;
  double alpha_min = 1.0;
  double alpha_max = 1.95;
  double alpha_step = 0.05;
  std::size_t scale_count = 21;
  std::optional<double> scale_min, scale_max;
  double tie_tol = 1e-4;
};

json to_j(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }
template <class T>
json to_j(const T& v) {
  return json(v);
}

template <class T>
void from_j(const json& j, T& v) {
  v = j.get<T>();
}
void from_j(const json& j, std::optional<double>& v) {
  if (j.is_null())
    v.reset();
  else
    v = j.get<double>();
}

struct Binding {
  std::string key;
  CLI::Option* option;
  std::function<void(const json&)> load;
  std::function<json()> save;
};

class Bindings {
 public:
  template <class T>
  void option(CLI::App* sub, const std::string& key, T& field, const std::string& help) {
    auto* opt = sub->add_option("--" + key, field, help);
    add(sub, key, opt, field);
  }

  void flag(CLI::App* sub, const std::string& key, bool& field, const std::string& help) {
    auto* opt = sub->add_flag("--" + key, field, help);
    add(sub, key, opt, field);
  }

  const std::vector<Binding>& of(CLI::App* sub) const { return by_sub_.at(sub); }

 private:
  template <class T>
  void add(CLI::App* sub, const std::string& key, CLI::Option* opt, T& field) {
    by_sub_[sub].push_back(Binding{key, opt, [&field](const json& j) { from_j(j, field); },
                                   [&field]() { return to_j(field); }});
  }

  std::map<CLI::App*, std::vector<Binding>> by_sub_;
};

std::string utc_timestamp() {
  const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

json curve(const std::vector<double>& x, const std::vector<double>& y, const char* xname, const char* yname) {
  return json{{xname, x}, {yname, y}};
}

// ---------------------------------------------------------------------------
// Sources
// ---------------------------------------------------------------------------

struct Source {
  SymmetricCF cf;
  json info;
};

FamilyParams family_from_flags(const RunConfig& c) {
  const auto v = [](const std::optional<double>& o, double d) { return o.value_or(d); };
  FamilyParams p;
  if (c.family == "gauss" || c.family == "gaussian")
    p = Gaussian{v(c.variance, 1.0)};
  else if (c.family == "stable")
    p = SymmetricStable{v(c.alpha, 2.0), v(c.scale, 1.0)};
  else if (c.family == "symgamma")
    p = SymmetrizedGamma{v(c.shape, 1.0)};
  else if (c.family == "cpoisson")
    p = CompoundPoissonSym{v(c.rate, 1.0), v(c.jump, 1.0)};
  else
    throw InputError("unknown family '" + c.family + "' (expected gauss, stable, symgamma, cpoisson, canonical)");
  validate(p);
  return p;
}

std::pair<double, double> parse_pair(const std::string& s, const char* what) {
  const auto colon = s.find(':');
  if (colon == std::string::npos) throw InputError(std::string(what) + " must look like position:mass, got '" + s + "'");
  try {
    std::size_t used = 0;
    const double a = std::stod(s.substr(0, colon), &used);
    if (used != colon) throw std::invalid_argument(s);
    const auto rest = s.substr(colon + 1);
    const double b = std::stod(rest, &used);
    if (used != rest.size()) throw std::invalid_argument(s);
    return {a, b};
  } catch (const std::logic_error&) {
    throw InputError(std::string(what) + " must look like position:mass, got '" + s + "'");
  }
}

std::vector<Atom> parse_atoms(const std::vector<std::string>& specs) {
  std::vector<Atom> atoms;
  for (const auto& s : specs) {
    const auto [x, mass] = parse_pair(s, "--atom");
    atoms.push_back({x, mass});
  }
  return atoms;
}

Source build_source(const RunConfig& c) {
  std::optional<SymmetricCF> cf;
  json info;
  if (!c.samples.empty()) {
    if (!c.family.empty()) throw InputError("--samples and --family are mutually exclusive");
    const Samples s = ingest(c.samples);
    cf = from_samples(s.values);
    info["samples"] = {{"path", c.samples}, {"n", s.values.size()}, {"mean", s.mean}, {"variance", s.variance}};
  } else if (c.family == "canonical") {
    cf = from_canonical(CanonicalExponent(c.gauss_coef, parse_atoms(c.atoms)));
  } else if (!c.family.empty()) {
    cf = SymmetricCF(family_from_flags(c));
  } else {
    throw InputError("a characteristic function source is required: --family or --samples");
  }
  for (const auto& spec : c.convolve) cf = convolve(*cf, SymmetricCF(parse_family(spec)));
  info["description"] = cf->describe();
  return {*cf, info};
}

LaplaceTransform build_laplace(const RunConfig& c) {
  const auto v = [](const std::optional<double>& o, double d) { return o.value_or(d); };
  std::optional<LaplaceTransform> lt;
  if (c.lfamily == "canonical") {
    lt = LaplaceTransform(LaplaceExponent(v(c.sigma, 0.0), parse_atoms(c.atoms)));
  } else if (c.lfamily == "gamma") {
    lt = LaplaceTransform(GammaSub{v(c.shape, 1.0)});
  } else if (c.lfamily == "poisson") {
    lt = LaplaceTransform(PoissonSub{v(c.rate, 1.0)});
  } else if (c.lfamily == "stable") {
    lt = LaplaceTransform(StableSub{v(c.alpha, 0.5), v(c.scale, 1.0)});
  } else if (c.lfamily == "drift") {
    lt = LaplaceTransform(Drift{v(c.sigma, 0.0)});
  } else if (c.lfamily.empty()) {
    throw InputError("laplace needs --lfamily");
  } else {
    throw InputError("unknown subordinator '" + c.lfamily + "' (expected gamma, poisson, stable, drift, canonical)");
  }
  for (const auto& spec : c.lconvolve) lt = product(*lt, LaplaceTransform(parse_subordinator(spec)));
  return *lt;
}

MomentMethod parse_method(const std::string& s) {
  if (s == "auto") return MomentMethod::automatic;
  if (s == "closed" || s == "closed-form") return MomentMethod::closed_form;
  if (s == "fd" || s == "finite-difference") return MomentMethod::finite_difference;
  throw InputError("--method must be auto, closed or fd");
}

LambdaConfig lambda_config(const RunConfig& c) {
  LambdaConfig lc;
  lc.r = c.r;
  lc.t_min = c.lambda_t_min;
  lc.t_max = c.lambda_t_max;
  lc.grid_size = c.lambda_grid_size;
  if (c.small_t_policy == "taylor-bound")
    lc.small_t_policy = SmallTPolicy::taylor_bound;
  else if (c.small_t_policy == "exclude")
    lc.small_t_policy = SmallTPolicy::exclude;
  else
    throw InputError("--small-t-policy must be taylor-bound or exclude");
  lc.validate();
  return lc;
}

QuadratureSpec quad_spec(const RunConfig& c) {
  QuadratureSpec q;
  q.nodes = c.nodes;
  q.truncation = c.truncation;
  q.eps_tail = c.eps_tail;
  q.validate();
  return q;
}

json moment_json(const MomentSet& s) {
  return {{"mu2", s.mu2}, {"mu4", s.mu4}, {"kappa", s.kappa}, {"method", to_string(s.method)}};
}

json metric_json(const MetricReport& r) {
  return {{"value", r.value},        {"t_at_sup", r.t_at_sup}, {"t_min_used", r.t_min_used},
          {"t_max", r.t_max},        {"grid_size", r.grid_size}, {"extensions", r.extensions},
          {"r", r.r}};
}

// ---------------------------------------------------------------------------
// Subcommands
// ---------------------------------------------------------------------------

struct Outcome {
  json result;
  int exit_code = ok;
};

Outcome cmd_detect(const RunConfig& c, json& diagnostics) {
  const auto src = build_source(c);
  const auto d = has_gaussian_component(src.cf, c.tol, c.schedule);
  const auto& e = d.estimate;
  std::vector<double> t, seq;
  for (const auto& p : e.sequence) {
    t.push_back(p.t);
    seq.push_back(p.value);
  }
  std::vector<double> rem;
  for (const auto& p : remainder_profile(src.cf, e.a_hat, c.schedule)) rem.push_back(p.value);
  if (!e.monotone_decreasing) diagnostics.push_back("-log f(t)/t^2 is not monotone along the schedule");
  json r = src.info;
  r.update({{"gaussian_component", d.has_component},
            {"a_hat", e.a_hat},
            {"component_variance", e.component_variance},
            {"error_bound", e.error_bound},
            {"t_used", e.t_used},
            {"tol", c.tol},
            {"monotone_decreasing", e.monotone_decreasing},
            {"sequence", curve(t, seq, "t", "value")},
            {"remainder_profile", curve(t, rem, "t", "r")}});
  return {r, ok};
}

Outcome cmd_rescale(const RunConfig& c, json&) {
  const auto src = build_source(c);
  SymmetricCF out = src.cf;
  if (c.mode == "root")
    out = root_rescale(src.cf, c.m);
  else if (c.mode == "sum")
    out = sum_rescale(src.cf, c.m);
  else
    throw InputError("--mode must be root or sum");

  const auto grid = linspace(-c.t_max, c.t_max, c.grid_size);
  std::vector<double> f, fm;
  double dev = 0.0;
  for (double t : grid) {
    f.push_back(src.cf.evaluate(t));
    fm.push_back(out.evaluate(t));
    dev = std::max(dev, std::abs(fm.back() - f.back()));
  }
  json r = src.info;
  r.update({{"mode", c.mode},
            {"m", c.m},
            {"t", grid},
            {"f", f},
            {"f_m", fm},
            {"sup_deviation_from_input", dev}});
  if (c.check_fixed_point) r["fixed_point"] = dev < 1e-12;
  if (c.mode == "root") {
    const auto ld = limit_deviation(src.cf, c.m, c.t_max, c.grid_size);
    r["limit_deviation"] = {
        {"sup", ld.sup}, {"t_at_sup", ld.t_at_sup}, {"a_used", ld.a_used}, {"a_source", ld.a_source}, {"T", c.t_max}};
  }
  return {r, ok};
}

Outcome cmd_kurtosis(const RunConfig& c, json&) {
  const auto src = build_source(c);
  const auto method = parse_method(c.method);
  const auto k = kurtosis_scaling_check(src.cf, c.m, method);
  json r = src.info;
  r.update({{"m", c.m},
            {"kappa_1", k.kappa_1},
            {"kappa_m", k.kappa_m},
            {"m_times_kappa_1", k.m_times_kappa_1},
            {"error", k.error},
            {"error_kind", k.error_is_relative ? "relative" : "absolute"},
            {"moments_1", moment_json(moments(src.cf, method))},
            {"moments_m", moment_json(moments(root_rescale(src.cf, c.m), method))}});
  return {r, ok};
}

Outcome cmd_distance(const RunConfig& c, json&) {
  const auto src = build_source(c);
  if (c.vs.empty()) throw InputError("distance needs --vs <family spec>");
  const SymmetricCF other(parse_family(c.vs));
  json r = src.info;
  r["vs"] = other.describe();
  if (c.metric != "lambda" && c.metric != "kolmogorov" && c.metric != "both")
    throw InputError("--metric must be lambda, kolmogorov or both");
  if (c.metric == "lambda" || c.metric == "both") r["lambda_r"] = metric_json(lambda_r_report(src.cf, other, lambda_config(c)));
  if (c.metric == "kolmogorov" || c.metric == "both") {
    const auto k = kolmogorov_distance(src.cf, other, quad_spec(c));
    r["kolmogorov"] = {{"distance", k.distance},     {"x_at_max", k.x_at_max}, {"truncation", k.truncation},
                       {"nodes", k.nodes},           {"x_points", k.x_points}};
  }
  return {r, ok};
}

Outcome cmd_bound_check(const RunConfig& c, json& diagnostics) {
  const auto src = build_source(c);
  const auto lc = lambda_config(c);
  json r = src.info;
  bool holds = true, applicable = true;
  if (c.direction == "forward") {
    const auto b = clt_bound_check(src.cf, c.m, lc);
    holds = b.holds;
    applicable = b.applicable;
    r.update({{"direction", "forward"}, {"lhs", b.lhs}, {"rhs", b.rhs}, {"holds", b.holds},
              {"applicable", b.applicable}, {"m", b.m}, {"r", b.r}, {"z_variance", b.z_variance},
              {"t_min_used", b.t_min_used}});
  } else if (c.direction == "backward") {
    const auto b = backward_bound(src.cf, c.m, lc);
    holds = b.holds;
    applicable = b.applicable;
    r.update({{"direction", "backward"}, {"lhs", b.lhs}, {"lower", b.lower}, {"holds", b.holds},
              {"applicable", b.applicable}, {"m", b.m}, {"r", b.r}, {"z_variance", b.z_variance},
              {"t_min_used", b.t_min_used}});
  } else {
    throw InputError("--direction must be forward or backward");
  }
  if (!applicable) diagnostics.push_back("lambda_r of the summand against Z is infinite; bound not applicable");
  const int code = (c.assert_holds && applicable && !holds) ? assertion_failed : ok;
  return {r, code};
}

Outcome cmd_laplace(const RunConfig& c, json&) {
  const auto lt = build_laplace(c);
  const bool all = c.action == "all";
  if (!all && c.action != "drift" && c.action != "limit" && c.action != "support" && c.action != "shape")
    throw InputError("--action must be drift, limit, support, shape or all");
  json r = {{"description", lt.describe()}};
  if (all || c.action == "drift") {
    const auto e = estimate_drift(lt, c.s_schedule);
    std::vector<double> s, v;
    for (const auto& [si, vi] : e.sequence) {
      s.push_back(si);
      v.push_back(vi);
    }
    r["drift"] = {{"sigma_hat", e.sigma_hat}, {"error_bound", e.error_bound}, {"s_used", e.s_used},
                  {"sequence", curve(s, v, "s", "value")}};
  }
  if (all || c.action == "support") {
    const auto d = support_touches_zero(lt, c.tol, c.s_schedule);
    r["support"] = {{"touches_zero", d.touches_zero},
                    {"support_gap", d.touches_zero ? 0.0 : d.estimate.sigma_hat},
                    {"sigma_hat", d.estimate.sigma_hat},
                    {"error_bound", d.estimate.error_bound},
                    {"tol", c.tol}};
  }
  if (all || c.action == "limit") {
    const auto d = limit_deviation_L(lt, c.m, c.s_max, c.s_grid_size);
    r["limit"] = {{"m", c.m}, {"S", c.s_max}, {"sup", d.sup}, {"s_at_sup", d.s_at_sup},
                  {"sigma_used", d.sigma_used}, {"sigma_source", d.sigma_source}};
  }
  if (all || c.action == "shape") {
    const auto grid = default_s_grid();
    const auto base = check_completely_monotone_shape(lt, grid);
    const auto rescaled = check_completely_monotone_shape(root_rescale_L(lt, c.m), grid);
    auto sj = [](const ShapeCheck& s) {
      return json{{"positive", s.positive}, {"nonincreasing", s.nonincreasing}, {"convex", s.convex}};
    };
    r["shape"] = {{"transform", sj(base)}, {"root_rescaled", sj(rescaled)}, {"m", c.m}};
  }
  return {r, ok};
}

Outcome cmd_approx_compare(const RunConfig& c, json&) {
  if (!c.samples.empty() || !c.convolve.empty() || c.family.empty() || c.family == "canonical")
    throw InputError("approx-compare needs a single closed-form --family");
  const FamilyParams family = family_from_flags(c);
  if (!(c.alpha_step > 0.0) || !(c.alpha_max >= c.alpha_min)) throw InputError("alpha grid needs step > 0 and max >= min");
  std::vector<double> alphas;
  for (int k = 0;; ++k) {
    const double a = c.alpha_min + c.alpha_step * k;
    if (a > c.alpha_max + 1e-9) break;
    alphas.push_back(a);
  }
  const double variance = moments(SymmetricCF(family)).mu2;
  std::vector<double> scales;
  if (c.scale_min || c.scale_max) {
    if (!c.scale_min || !c.scale_max) throw InputError("--scale-min and --scale-max go together");
    scales = log_spaced(*c.scale_min, *c.scale_max, c.scale_count);
  } else {
    const double s0 = std::sqrt(variance / 2.0);
    scales = c.scale_count == 21 ? default_scale_grid(variance) : log_spaced(0.25 * s0, 4.0 * s0, c.scale_count);
  }
  const auto rep = approx_compare(family, c.m, alphas, scales, quad_spec(c), c.tie_tol);
  json r = {{"family", rep.family},
            {"m", rep.m},
            {"variance", rep.variance},
            {"d_K_gaussian", rep.d_K_gaussian},
            {"best_alpha", rep.best_alpha},
            {"best_scale", rep.best_scale},
            {"d_K_stable", rep.d_K_stable},
            {"verdict", rep.verdict},
            {"tie_tolerance", rep.tie_tolerance},
            {"alpha_grid", rep.alpha_grid},
            {"scale_grid", rep.scale_grid},
            {"quadrature",
             {{"x_range", rep.x_range},
              {"x_points", rep.x_points},
              {"nodes", rep.nodes},
              {"truncation_gaussian", rep.truncation_gaussian}}}};
  return {r, ok};
}

Outcome cmd_empirical(const RunConfig& c, json& diagnostics) {
  if (c.samples.empty()) throw InputError("empirical needs --samples <file>");
  const auto src = build_source(c);
  json r = src.info;
  r["moments"] = moment_json(moments(src.cf, MomentMethod::closed_form));
  const auto grid = linspace(0.0, c.t_max, c.grid_size);
  std::vector<double> f;
  double positive_until = c.t_max;
  bool positive = true;
  for (double t : grid) {
    f.push_back(src.cf.evaluate(t));
    if (positive && !(f.back() > 0.0)) {
      positive = false;
      positive_until = t;
    }
  }
  r["cf"] = curve(grid, f, "t", "value");
  r["positive_on_grid"] = positive;
  r["first_nonpositive_t"] = positive ? json(nullptr) : json(positive_until);
  if (!positive) diagnostics.push_back("empirical CF is not positive on the whole grid; log-based analyses will reject it");
  if (c.detect) {
    const auto d = has_gaussian_component(src.cf, c.tol, c.schedule);
    r["detect"] = {{"gaussian_component", d.has_component}, {"a_hat", d.estimate.a_hat},
                   {"error_bound", d.estimate.error_bound}};
  }
  if (c.m > 1) r["kurtosis_scaling"] = {{"m", c.m}, {"kappa_m", kurtosis_scaling_check(src.cf, c.m).kappa_m}};
  return {r, ok};
}

// ---------------------------------------------------------------------------
// Option wiring
// ---------------------------------------------------------------------------

void add_source_options(Bindings& b, CLI::App* s, RunConfig& c) {
  b.option(s, "family", c.family, "gauss | stable | symgamma | cpoisson | canonical");
  b.option(s, "variance", c.variance, "gauss: variance");
  b.option(s, "alpha", c.alpha, "stable: index alpha");
  b.option(s, "scale", c.scale, "stable: scale c");
  b.option(s, "shape", c.shape, "symgamma: shape");
  b.option(s, "rate", c.rate, "cpoisson: rate");
  b.option(s, "jump", c.jump, "cpoisson: jump size");
  b.option(s, "gauss-coef", c.gauss_coef, "canonical: Gaussian coefficient a");
  b.option(s, "atom", c.atoms, "canonical: spectral atom position:mass (repeatable)");
  b.option(s, "convolve", c.convolve, "multiply by another family, e.g. gauss:variance=1.4 (repeatable)");
  b.option(s, "samples", c.samples, "sample file (one number per line)");
}

void add_lambda_options(Bindings& b, CLI::App* s, RunConfig& c) {
  b.option(s, "r", c.r, "metric order r > 2");
  b.option(s, "lambda-t-min", c.lambda_t_min, "smallest |t| of the metric grid");
  b.option(s, "lambda-t-max", c.lambda_t_max, "largest |t| of the metric grid");
  b.option(s, "lambda-grid-size", c.lambda_grid_size, "log-spaced metric grid points");
  b.option(s, "small-t-policy", c.small_t_policy, "taylor-bound | exclude");
}

void add_quad_options(Bindings& b, CLI::App* s, RunConfig& c) {
  b.option(s, "nodes", c.nodes, "quadrature nodes");
  b.option(s, "truncation", c.truncation, "quadrature truncation T (auto when absent)");
  b.option(s, "eps-tail", c.eps_tail, "tail tolerance for automatic truncation");
}

std::optional<std::string> find_config_path(const std::vector<std::string>& args) {
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (args[i] == "--config" && i + 1 < args.size()) return args[i + 1];
    if (args[i].rfind("--config=", 0) == 0) return args[i].substr(9);
  }
  return std::nullopt;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  RunConfig cfg;
  Bindings b;
  CLI::App app{"iddlab: Gaussian components, rescaling limits and CLT-rate metrics for symmetric ID laws", "iddlab"};
  app.require_subcommand(1);
  app.fallthrough();
  std::string config_path, output_path;
  app.add_option("--config", config_path, "JSON file with option defaults; flags override it");
  app.add_option("--output", output_path, "write the report here instead of stdout");

  std::map<CLI::App*, std::function<Outcome(const RunConfig&, json&)>> handlers;

  auto* detect = app.add_subcommand("detect", "Gaussian-component detection");
  add_source_options(b, detect, cfg);
  b.option(detect, "tol", cfg.tol, "detection tolerance");
  b.option(detect, "schedule", cfg.schedule, "increasing t schedule");
  handlers[detect] = cmd_detect;

  auto* rescale = app.add_subcommand("rescale", "root/sum rescaling and the limit deviation");
  add_source_options(b, rescale, cfg);
  b.option(rescale, "m", cfg.m, "rescale factor");
  b.option(rescale, "mode", cfg.mode, "root | sum");
  b.option(rescale, "t-max", cfg.t_max, "grid half-width T");
  b.option(rescale, "grid-size", cfg.grid_size, "grid points");
  b.flag(rescale, "check-fixed-point", cfg.check_fixed_point, "report whether f_m == f within 1e-12");
  handlers[rescale] = cmd_rescale;

  auto* kurt = app.add_subcommand("kurtosis", "kurtosis scaling under root rescaling");
  add_source_options(b, kurt, cfg);
  b.option(kurt, "m", cfg.m, "rescale factor");
  b.option(kurt, "method", cfg.method, "auto | closed | fd");
  handlers[kurt] = cmd_kurtosis;

  auto* dist = app.add_subcommand("distance", "lambda_r / Kolmogorov distance between two laws");
  add_source_options(b, dist, cfg);
  b.option(dist, "vs", cfg.vs, "second law as a family spec, e.g. gauss:variance=2");
  b.option(dist, "metric", cfg.metric, "lambda | kolmogorov | both");
  add_lambda_options(b, dist, cfg);
  add_quad_options(b, dist, cfg);
  handlers[dist] = cmd_distance;

  auto* bound = app.add_subcommand("bound-check", "forward/backward CLT-rate bound in lambda_r");
  add_source_options(b, bound, cfg);
  b.option(bound, "m", cfg.m, "number of summands");
  b.option(bound, "direction", cfg.direction, "forward | backward");
  b.flag(bound, "assert", cfg.assert_holds, "exit 3 when the inequality fails");
  add_lambda_options(b, bound, cfg);
  handlers[bound] = cmd_bound_check;

  auto* lap = app.add_subcommand("laplace", "positive ID laws: drift, limit, support");
  b.option(lap, "action", cfg.action, "drift | limit | support | shape | all");
  b.option(lap, "lfamily", cfg.lfamily, "gamma | poisson | stable | drift | canonical");
  b.option(lap, "shape", cfg.shape, "gamma: shape");
  b.option(lap, "rate", cfg.rate, "poisson: rate");
  b.option(lap, "alpha", cfg.alpha, "stable: alpha in (0, 1)");
  b.option(lap, "scale", cfg.scale, "stable: scale");
  b.option(lap, "sigma", cfg.sigma, "drift / canonical: drift");
  b.option(lap, "atom", cfg.atoms, "canonical: measure atom position:mass (repeatable)");
  b.option(lap, "lconvolve", cfg.lconvolve, "multiply by another transform, e.g. drift:sigma=2 (repeatable)");
  b.option(lap, "m", cfg.m, "rescale factor");
  b.option(lap, "s-max", cfg.s_max, "limit deviation range S");
  b.option(lap, "s-grid-size", cfg.s_grid_size, "limit deviation grid points");
  b.option(lap, "s-schedule", cfg.s_schedule, "increasing s schedule");
  b.option(lap, "tol", cfg.tol, "support tolerance");
  handlers[lap] = cmd_laplace;

  auto* cmp = app.add_subcommand("approx-compare", "stable vs Gaussian approximation of a normalized sum");
  add_source_options(b, cmp, cfg);
  b.option(cmp, "m", cfg.m, "number of summands");
  b.option(cmp, "alpha-min", cfg.alpha_min, "smallest alpha");
  b.option(cmp, "alpha-max", cfg.alpha_max, "largest alpha (values >= 2 are dropped)");
  b.option(cmp, "alpha-step", cfg.alpha_step, "alpha step");
  b.option(cmp, "scale-count", cfg.scale_count, "number of log-spaced scales");
  b.option(cmp, "scale-min", cfg.scale_min, "smallest scale (default: s0/4)");
  b.option(cmp, "scale-max", cfg.scale_max, "largest scale (default: 4 s0)");
  b.option(cmp, "tie-tol", cfg.tie_tol, "tie tolerance for the verdict");
  add_quad_options(b, cmp, cfg);
  handlers[cmp] = cmd_approx_compare;

  auto* emp = app.add_subcommand("empirical", "empirical CF of a sample file");
  add_source_options(b, emp, cfg);
  b.option(emp, "t-max", cfg.t_max, "grid upper end");
  b.option(emp, "grid-size", cfg.grid_size, "grid points");
  b.flag(emp, "detect", cfg.detect, "also run Gaussian-component detection");
  b.option(emp, "tol", cfg.tol, "detection tolerance");
  b.option(emp, "schedule", cfg.schedule, "increasing t schedule");
  b.option(emp, "m", cfg.m, "also report the root-rescaled kurtosis for m > 1");
  handlers[emp] = cmd_empirical;

  // Config file values sit between built-in defaults and explicit flags.
  json file_config = json::object();
  if (auto path = find_config_path(args)) {
    std::ifstream in(*path);
    if (!in) {
      err << "error: cannot open config file: " << *path << "\n";
      return input_error;
    }
    try {
      file_config = json::parse(in);
    } catch (const json::exception& e) {
      err << "error: config file is not valid JSON: " << e.what() << "\n";
      return input_error;
    }
    if (!file_config.is_object()) {
      err << "error: config file must hold a JSON object\n";
      return input_error;
    }
  }

  try {
    std::vector<std::string> rev(args.rbegin(), args.rend());
    app.parse(rev);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return ok;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n\n" << app.help();
    return input_error;
  }

  CLI::App* sub = app.get_subcommands().front();
  json diagnostics = json::array();
  for (auto it = file_config.begin(); it != file_config.end(); ++it) {
    const auto& bs = b.of(sub);
    auto found = std::find_if(bs.begin(), bs.end(), [&](const Binding& x) { return x.key == it.key(); });
    if (found == bs.end()) {
      diagnostics.push_back("config key '" + it.key() + "' does not apply to " + sub->get_name() + "; ignored");
      continue;
    }
    if (found->option->count() > 0) continue;
    try {
      found->load(it.value());
    } catch (const json::exception& e) {
      err << "error: config key '" << it.key() << "' has the wrong type: " << e.what() << "\n";
      return input_error;
    }
  }

  json effective = json::object();
  for (const auto& x : b.of(sub)) effective[x.key] = x.save();

  Outcome outcome;
  try {
    outcome = handlers.at(sub)(cfg, diagnostics);
  } catch (const InputError& e) {
    err << "error: " << e.what() << "\n";
    return input_error;
  } catch (const NumericError& e) {
    err << "numeric error: " << e.what() << "\n";
    return numeric_error;
  }

  const json report = {{"schema", kReportSchema},
                       {"command", sub->get_name()},
                       {"config", effective},
                       {"result", outcome.result},
                       {"diagnostics", diagnostics},
                       {"meta", {{"tool", "iddlab"}, {"version", kVersion}, {"timestamp", utc_timestamp()}}}};
  const std::string text = dump_report(report);
  if (!output_path.empty()) {
    std::ofstream f(output_path);
    if (!f) {
      err << "error: cannot write report to " << output_path << "\n";
      return input_error;
    }
    f << text;
  } else {
    out << text;
  }
  for (const auto& d : diagnostics) err << "note: " << d.get<std::string>() << "\n";
  return outcome.exit_code;
}

}  // namespace iddlab::cli
