#include <doctest.h>

#include <cmath>
#include <numbers>
#include <vector>

#include "iddlab/analysis.hpp"
#include "iddlab/errors.hpp"
#include "iddlab/grid.hpp"

using namespace iddlab;

namespace {

// Finite-variance catalog fixtures.
std::vector<SymmetricCF> catalog() {
  return {SymmetricCF(Gaussian{0.5}),         SymmetricCF(Gaussian{2.0}),
          SymmetricCF(SymmetrizedGamma{0.5}), SymmetricCF(SymmetrizedGamma{1.0}),
          SymmetricCF(SymmetrizedGamma{2.0}), SymmetricCF(CompoundPoissonSym{0.5, 1.0}),
          SymmetricCF(CompoundPoissonSym{2.0, 1.0}), SymmetricCF(CompoundPoissonSym{3.0, 0.4}),
          SymmetricCF(SymmetricStable{2.0, 0.8})};
}

bool is_gaussian(const SymmetricCF& cf) {
  const auto* f = cf.family();
  return f && (std::holds_alternative<Gaussian>(*f) ||
               (std::holds_alternative<SymmetricStable>(*f) && std::get<SymmetricStable>(*f).alpha == 2.0));
}

}  // namespace

TEST_CASE("estimate_gaussian_coefficient: pure Gaussian is exact at every point") {
  const auto est = estimate_gaussian_coefficient(SymmetricCF(Gaussian{4.0}));
  for (const auto& p : est.sequence) CHECK(p.value == doctest::Approx(2.0).epsilon(1e-15));
  CHECK(est.a_hat == doctest::Approx(2.0).epsilon(1e-15));
  CHECK(est.component_variance == doctest::Approx(4.0).epsilon(1e-15));
  CHECK(est.error_bound < 1e-15);
  CHECK(est.t_used == 1e4);
}

TEST_CASE("estimate_gaussian_coefficient: Gaussian plus compound Poisson") {
  const auto cf = convolve(SymmetricCF(Gaussian{1.4}), SymmetricCF(CompoundPoissonSym{3.0, 1.0}));
  const std::vector<double> schedule{10.0, 31.6, 100.0, 316.0, 1000.0};
  const auto est = estimate_gaussian_coefficient(cf, schedule);
  // Remainder 3 (1 - cos t) / t^2 <= 6 / t^2.
  CHECK(std::abs(est.a_hat - 0.7) < 6e-6);
  CHECK(est.a_hat == doctest::Approx(0.7 + 3.0 * (1.0 - std::cos(1000.0)) / 1e6).epsilon(1e-13));
}

TEST_CASE("estimate_gaussian_coefficient: Cauchy tends to zero without moments") {
  const std::vector<double> schedule{10.0, 100.0, 1000.0};
  const auto est = estimate_gaussian_coefficient(SymmetricCF(SymmetricStable{1.0, 1.0}), schedule);
  CHECK(est.a_hat == doctest::Approx(1e-3).epsilon(1e-12));
  CHECK(est.monotone_decreasing);
}

TEST_CASE("estimate_gaussian_coefficient: schedule and positivity errors") {
  const SymmetricCF g(Gaussian{1.0});
  CHECK_THROWS_AS(estimate_gaussian_coefficient(g, std::vector<double>{10.0, 100.0}), InputError);
  CHECK_THROWS_AS(estimate_gaussian_coefficient(g, std::vector<double>{10.0, 20.0, 50.0}), InputError);
  CHECK_THROWS_AS(estimate_gaussian_coefficient(g, std::vector<double>{10.0, 5.0, 1000.0}), InputError);
  const auto emp = from_samples(std::vector<double>{1.0, -1.0});
  try {
    estimate_gaussian_coefficient(emp, std::vector<double>{std::numbers::pi / 2 * 3, 100.0, 1000.0});
    FAIL("expected PositivityError");
  } catch (const PositivityError& e) {
    CHECK(e.where() == doctest::Approx(std::numbers::pi * 1.5));
  }
}

TEST_CASE("has_gaussian_component") {
  CHECK_FALSE(has_gaussian_component(SymmetricCF(SymmetrizedGamma{1.0}), 1e-4).has_component);

  const auto yes = has_gaussian_component(SymmetricCF(Gaussian{0.02}), 1e-4);
  CHECK(yes.has_component);
  CHECK(yes.estimate.a_hat == doctest::Approx(0.01).epsilon(1e-13));

  const auto cp = has_gaussian_component(SymmetricCF(CompoundPoissonSym{100.0, 1.0}), 1e-4);
  CHECK_FALSE(cp.has_component);
  CHECK(cp.estimate.a_hat <= 2e-6);

  CHECK_FALSE(has_gaussian_component(SymmetricCF(SymmetricStable{1.0, 1.0}), 1e-4).has_component);
  CHECK(has_gaussian_component(from_canonical(CanonicalExponent(0.05, {{2.0, 1.0}})), 1e-4).has_component);
  CHECK_THROWS_AS(has_gaussian_component(SymmetricCF(Gaussian{1.0}), 0.0), InputError);
}

TEST_CASE("limit_deviation") {
  for (int m : {1, 7, 1000}) CHECK(limit_deviation(SymmetricCF(Gaussian{1.3}), m, 10.0).sup < 1e-12);

  const SymmetricCF lap(SymmetrizedGamma{1.0});
  const auto d100 = limit_deviation(lap, 100, 5.0);
  CHECK(d100.sup == doctest::Approx(1.0 - std::pow(2501.0, -0.01)).epsilon(1e-12));
  CHECK(d100.sup == doctest::Approx(0.0753).epsilon(1e-3));
  CHECK(d100.t_at_sup == 5.0);
  CHECK(d100.a_source == "structural");
  const auto d1e4 = limit_deviation(lap, 10000, 5.0);
  CHECK(d1e4.sup == doctest::Approx(1.0 - std::pow(250001.0, -1e-4)).epsilon(1e-10));
  CHECK(d1e4.sup == doctest::Approx(1.243e-3).epsilon(1e-3));

  // Estimated coefficient snaps to zero when detection says no.
  const auto emp_like = limit_deviation(lap, 100, 5.0, 1001, 0.0);
  CHECK(emp_like.a_source == "given");
  CHECK(emp_like.sup == doctest::Approx(d100.sup));
}

TEST_CASE("moments: closed forms") {
  const auto g = moments(SymmetricCF(Gaussian{2.0}));
  CHECK(g.mu2 == 2.0);
  CHECK(g.mu4 == 12.0);
  CHECK(g.kappa == doctest::Approx(0.0));

  const auto l = moments(SymmetricCF(SymmetrizedGamma{1.0}));
  CHECK(l.mu2 == 2.0);
  CHECK(l.mu4 == 24.0);
  CHECK(l.kappa == doctest::Approx(3.0));
  CHECK(moments(SymmetricCF(SymmetrizedGamma{2.0})).kappa == doctest::Approx(1.5));

  const auto cp = moments(SymmetricCF(CompoundPoissonSym{2.0, 1.5}));
  CHECK(cp.mu2 == doctest::Approx(2.0 * 2.25));
  CHECK(cp.mu4 == doctest::Approx(2.0 * std::pow(1.5, 4) + 3.0 * 4.0 * std::pow(1.5, 4)));

  CHECK_THROWS_AS(moments(SymmetricCF(SymmetricStable{1.5, 1.0})), NoFiniteMomentError);
  CHECK_THROWS_AS(moments(SymmetricCF(SymmetricStable{1.5, 1.0}), MomentMethod::finite_difference), NoFiniteMomentError);
}

TEST_CASE("moments: finite differences agree with closed forms") {
  auto fixtures = catalog();
  fixtures.push_back(root_rescale(SymmetricCF(SymmetrizedGamma{1.0}), 5));
  fixtures.push_back(from_canonical(CanonicalExponent(0.2, {{0.5, 0.3}, {2.0, 0.1}})));
  for (const auto& cf : fixtures) {
    CAPTURE(cf.describe());
    const auto cfm = moments(cf, MomentMethod::closed_form);
    const auto fd = moments(cf, MomentMethod::finite_difference);
    CHECK(fd.method == MomentMethod::finite_difference);
    CHECK(fd.mu2 == doctest::Approx(cfm.mu2).epsilon(1e-3));
    CHECK(fd.mu4 == doctest::Approx(cfm.mu4).epsilon(1e-3));
  }
}

TEST_CASE("kurtosis_scaling_check") {
  const auto g = kurtosis_scaling_check(SymmetricCF(Gaussian{1.0}), 7);
  CHECK(g.kappa_m == doctest::Approx(0.0));
  CHECK(g.m_times_kappa_1 == doctest::Approx(0.0));
  CHECK_FALSE(g.error_is_relative);
  CHECK(g.error < 1e-9);

  // Oracle: (1 + m t^2)^(-shape/m) has kappa = 3 m / shape.
  const auto l = kurtosis_scaling_check(SymmetricCF(SymmetrizedGamma{1.0}), 5);
  CHECK(l.kappa_m == doctest::Approx(15.0).epsilon(1e-12));
  CHECK(l.error < 1e-12);

  CHECK(kurtosis_scaling_check(SymmetricCF(CompoundPoissonSym{2.0, 1.0}), 3).kappa_m == doctest::Approx(1.5));

  const auto fd = kurtosis_scaling_check(SymmetricCF(SymmetrizedGamma{2.0}), 10, MomentMethod::finite_difference);
  CHECK(fd.error < 1e-3);
  CHECK(fd.kappa_m == doctest::Approx(15.0).epsilon(1e-3));
}

TEST_CASE("remainder_profile") {
  const auto ts = log_spaced(0.1, 100.0, 40);
  for (const auto& p : remainder_profile(SymmetricCF(Gaussian{3.0}), 1.5, ts)) CHECK(std::abs(p.value) < 1e-12);

  const std::vector<double> ten{10.0};
  CHECK(remainder_profile(SymmetricCF(SymmetrizedGamma{1.0}), 0.0, ten)[0].value ==
        doctest::Approx(std::log(101.0) / 100.0).epsilon(1e-14));
  CHECK(remainder_profile(SymmetricCF(SymmetrizedGamma{1.0}), 0.0, ten)[0].value == doctest::Approx(0.04615).epsilon(1e-4));

  const std::vector<double> two_pi{2.0 * std::numbers::pi, std::numbers::pi};
  const auto cp = remainder_profile(SymmetricCF(CompoundPoissonSym{1.0, 1.0}), 0.0, two_pi);
  CHECK(std::abs(cp[0].value) < 1e-15);
  CHECK(cp[1].value == doctest::Approx(2.0 / (std::numbers::pi * std::numbers::pi)));
  CHECK_THROWS_AS(remainder_profile(SymmetricCF(Gaussian{1.0}), 0.5, std::vector<double>{0.0}), InputError);
}

TEST_CASE("variance invariance under root rescaling") {
  for (const auto& cf : catalog())
    for (int m : {2, 5, 10}) {
      CAPTURE(cf.describe());
      CHECK(moments(root_rescale(cf, m)).mu2 == doctest::Approx(moments(cf).mu2).epsilon(1e-9));
    }
}

TEST_CASE("variance gap and the Gaussian characterization") {
  for (const auto& cf : catalog()) {
    CAPTURE(cf.describe());
    const double a = estimate_gaussian_coefficient(cf).a_hat;
    const double mu2 = moments(cf).mu2;
    if (is_gaussian(cf)) {
      CHECK(mu2 == doctest::Approx(2.0 * a).epsilon(1e-12));
      // Equal variances force f == limit.
      const auto lim = limit_gaussian(a);
      for (double t : linspace(-10.0, 10.0, 201)) CHECK(std::abs(cf.evaluate(t) - lim.evaluate(t)) < 1e-9);
    } else {
      CHECK(mu2 - 2.0 * a > 0.0);
    }
  }
  const SymmetricCF lap(SymmetrizedGamma{1.0});
  CHECK(moments(lap).mu2 - 2.0 * lap.exact_gaussian_coefficient().value() == 2.0);
}

TEST_CASE("fourth cumulant scales linearly in m") {
  for (const auto& cf : catalog())
    for (int m : {2, 5, 10}) {
      const auto one = moments(cf);
      const auto many = moments(root_rescale(cf, m));
      const double lhs = many.mu4 - 3.0 * many.mu2 * many.mu2;
      const double rhs = m * (one.mu4 - 3.0 * one.mu2 * one.mu2);
      CAPTURE(cf.describe());
      if (std::abs(rhs) < 1e-12)
        CHECK(std::abs(lhs) < 1e-9);
      else
        CHECK(lhs == doctest::Approx(rhs).epsilon(1e-9));
    }
}

TEST_CASE("excess kurtosis is nonnegative on catalog fixtures") {
  for (const auto& cf : catalog()) CHECK(moments(cf).kappa >= -1e-12);
}
