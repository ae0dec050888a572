#include <doctest.h>

#include <cmath>
#include <limits>

#include "iddlab/errors.hpp"
#include "iddlab/metrics.hpp"

using namespace iddlab;

namespace {

// Dense-grid oracles (tests/oracles/dense_grid_oracles.py).
constexpr double kLambda3LaplaceVsGauss = 0.17415790956942745;
constexpr double kLambda25LaplaceVsGauss = 0.1442800235810737;
constexpr double kLambda3S4VsGauss = 0.050359112497820296;
constexpr double kLambda3X4VsGauss = 0.4990549462627752;
constexpr double kLambda3X16VsGauss = 1.1797666376287312;

const SymmetricCF kLaplace(SymmetrizedGamma{1.0});
const SymmetricCF kGauss2(Gaussian{2.0});

}  // namespace

TEST_CASE("LambdaConfig validation") {
  LambdaConfig c;
  CHECK_NOTHROW(c.validate());
  c.r = 2.0;
  CHECK_THROWS_AS(c.validate(), ConfigError);
  c = {};
  c.t_min = 60.0;
  CHECK_THROWS_AS(c.validate(), ConfigError);
  c = {};
  c.grid_size = 1;
  CHECK_THROWS_AS(c.validate(), ConfigError);
}

TEST_CASE("lambda_r against dense-grid oracles") {
  LambdaConfig c;
  const auto rep = lambda_r_report(kLaplace, kGauss2, c);
  CHECK(rep.value == doctest::Approx(kLambda3LaplaceVsGauss).epsilon(1e-4));
  CHECK(rep.t_at_sup == doctest::Approx(0.6019).epsilon(1e-2));
  CHECK(rep.extensions == 0);

  c.r = 2.5;
  CHECK(lambda_r(kLaplace, kGauss2, c) == doctest::Approx(kLambda25LaplaceVsGauss).epsilon(1e-4));

  c.r = 3.0;
  CHECK(lambda_r(sum_rescale(kLaplace, 4), kGauss2, c) == doctest::Approx(kLambda3S4VsGauss).epsilon(1e-4));
  CHECK(lambda_r(root_rescale(kLaplace, 4), kGauss2, c) == doctest::Approx(kLambda3X4VsGauss).epsilon(1e-4));
  CHECK(lambda_r(root_rescale(kLaplace, 16), kGauss2, c) == doctest::Approx(kLambda3X16VsGauss).epsilon(1e-4));
}

TEST_CASE("lambda_r: identical laws give zero without grid extension") {
  const auto rep = lambda_r_report(kLaplace, SymmetricCF(SymmetrizedGamma{1.0}), LambdaConfig{});
  CHECK(rep.value == 0.0);
  CHECK(rep.extensions == 0);
}

TEST_CASE("lambda_r: mismatched second moments diverge") {
  const auto rep = lambda_r_report(SymmetricCF(Gaussian{1.0}), SymmetricCF(Gaussian{1.21}), LambdaConfig{});
  CHECK(std::isinf(rep.value));
  CHECK(rep.extensions >= 1);

  LambdaConfig ex;
  ex.small_t_policy = SmallTPolicy::exclude;
  const auto finite = lambda_r_report(SymmetricCF(Gaussian{1.0}), SymmetricCF(Gaussian{1.21}), ex);
  CHECK(std::isfinite(finite.value));
  CHECK(finite.t_at_sup == doctest::Approx(ex.t_min));
  CHECK(finite.extensions == 0);
}

TEST_CASE("lambda_r is symmetric") {
  const LambdaConfig c;
  const SymmetricCF cp(CompoundPoissonSym{2.0, 1.0});
  const SymmetricCF g(Gaussian{2.0});
  CHECK(lambda_r(cp, g, c) == lambda_r(g, cp, c));
  CHECK(lambda_r(kLaplace, kGauss2, c) == lambda_r(kGauss2, kLaplace, c));
}

TEST_CASE("lambda_r is homogeneous of degree r under dilation") {
  // lambda_r(cU, cV) = c^r lambda_r(U, V) when the t grid is scaled by 1/c.
  for (double r : {2.5, 3.0}) {
    LambdaConfig base;
    base.r = r;
    base.small_t_policy = SmallTPolicy::exclude;
    LambdaConfig scaled = base;
    constexpr double c = 2.0;
    scaled.t_min = base.t_min / c;
    scaled.t_max = base.t_max / c;
    const double lhs = lambda_r(dilate(kLaplace, c), dilate(kGauss2, c), scaled);
    const double rhs = std::pow(c, r) * lambda_r(kLaplace, kGauss2, base);
    CHECK(lhs == doctest::Approx(rhs).epsilon(1e-9));
  }
}

TEST_CASE("clt_bound_check holds on catalog fixtures") {
  const SymmetricCF fixtures[] = {kLaplace, SymmetricCF(SymmetrizedGamma{0.5}), SymmetricCF(SymmetrizedGamma{2.0}),
                                  SymmetricCF(CompoundPoissonSym{2.0, 1.0})};
  for (const auto& xi : fixtures)
    for (double r : {2.5, 3.0})
      for (int m : {2, 4, 8, 16}) {
        LambdaConfig c;
        c.r = r;
        const auto b = clt_bound_check(xi, m, c);
        CAPTURE(xi.describe());
        CAPTURE(m);
        CAPTURE(r);
        CHECK(b.applicable);
        CHECK(b.holds);
        CHECK(b.lhs <= b.rhs + 1e-9);
      }
}

TEST_CASE("clt_bound_check matches oracles for m = 4, r = 3") {
  const auto b = clt_bound_check(kLaplace, 4, LambdaConfig{});
  CHECK(b.z_variance == 2.0);
  CHECK(std::abs(b.lhs - kLambda3S4VsGauss) < 1e-4);
  CHECK(std::abs(b.rhs - kLambda3LaplaceVsGauss / 2.0) < 1e-4);
}

TEST_CASE("clt_bound_check on a Gaussian is trivially tight") {
  const auto b = clt_bound_check(SymmetricCF(Gaussian{1.5}), 8, LambdaConfig{});
  CHECK(b.lhs < 1e-12);
  CHECK(b.holds);
}

TEST_CASE("clt_bound_check is not applicable without a finite variance") {
  CHECK_THROWS_AS(clt_bound_check(SymmetricCF(SymmetricStable{1.5, 1.0}), 4, LambdaConfig{}), NoFiniteMomentError);
}

TEST_CASE("backward_bound") {
  for (int m : {4, 16}) {
    const auto b = backward_bound(kLaplace, m, LambdaConfig{});
    CHECK(b.holds);
    CHECK(b.lhs >= b.lower - 1e-9);
    CHECK(b.lower == doctest::Approx(std::sqrt(double(m)) * kLambda3LaplaceVsGauss).epsilon(1e-3));
  }
  CHECK(backward_bound(kLaplace, 4, LambdaConfig{}).lhs == doctest::Approx(kLambda3X4VsGauss).epsilon(1e-4));
  CHECK(backward_bound(kLaplace, 16, LambdaConfig{}).lhs == doctest::Approx(kLambda3X16VsGauss).epsilon(1e-4));
}

TEST_CASE("backward bound is the forward bound read from X(m)") {
  // S_m of X(m) is X(1), so the two checks share their numbers.
  const int m = 4;
  const auto back = backward_bound(kLaplace, m, LambdaConfig{});
  const auto fwd = clt_bound_check(root_rescale(kLaplace, m), m, LambdaConfig{});
  CHECK(fwd.lhs == doctest::Approx(back.lower / std::sqrt(double(m)) * 1.0).epsilon(1e-9));
  CHECK(fwd.rhs == doctest::Approx(back.lhs / std::sqrt(double(m))).epsilon(1e-9));
}
