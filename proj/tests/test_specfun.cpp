#include <boost/math/special_functions/bessel.hpp>
#include <boost/math/special_functions/digamma.hpp>
#include <boost/math/special_functions/expint.hpp>
#include <catch_amalgamated.hpp>
#include <cmath>
#include <numbers>
#include <random>

#include "ftr/specfun.hpp"
#include "oracles.hpp"

using namespace ftr::specfun;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

// Reference values below were computed with mpmath at 40 digits.

TEST_CASE("ln_gamma special values", "[specfun][ln_gamma]") {
  CHECK(ln_gamma(1.0) == 0.0);
  CHECK(ln_gamma(2.0) == 0.0);
  CHECK_THAT(ln_gamma(0.5), WithinRel(0.5 * std::log(std::numbers::pi), 1e-14));
  CHECK_THAT(ln_gamma(7.3), WithinRel(7.1478925230222490328, 1e-13));
  CHECK_THAT(ln_gamma(2.2), WithinRel(0.096947466790638776492, 1e-13));
  CHECK_THAT(ln_gamma(100.5), WithinRel(361.43554046777762156, 1e-14));
  CHECK_THAT(ln_gamma(0.001), WithinRel(6.9071788853838536825, 1e-14));
  CHECK_THAT(ln_gamma(1.4), WithinRel(-0.11961291417237129864, 1e-13));
  CHECK_THAT(ln_gamma(2.6), WithinRel(0.35741186354897977006, 1e-13));
  CHECK_THAT(ln_gamma(3.0), WithinRel(std::log(2.0), 1e-14));
}

TEST_CASE("ln_gamma keeps relative accuracy next to its zeros", "[specfun][ln_gamma]") {
  CHECK_THAT(ln_gamma(1.0000000001), WithinRel(-5.772157125783244041e-11, 1e-12));
  CHECK_THAT(ln_gamma(1.9999999), WithinRel(-4.2278430309861298194e-8, 1e-12));
}

TEST_CASE("ln_gamma satisfies the recurrence over the positive axis", "[specfun][ln_gamma][property]") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> log_x(-5.0, 5.0);
  for (int i = 0; i < 500; ++i) {
    const double x = std::pow(10.0, log_x(rng));
    const double lhs = ln_gamma(x + 1.0);
    const double rhs = ln_gamma(x) + std::log(x);
    CHECK(std::abs(lhs - rhs) <= 1e-12 * std::max({1.0, std::abs(lhs), std::abs(ln_gamma(x))}));
  }
}

TEST_CASE("ln_gamma rejects non-positive arguments", "[specfun][ln_gamma]") {
  CHECK_THROWS_AS(ln_gamma(0.0), ftr::domain_error);
  CHECK_THROWS_AS(ln_gamma(-1.5), ftr::domain_error);
}

TEST_CASE("gamma_ratio is the rising product", "[specfun]") {
  CHECK(gamma_ratio(3.0, 2) == 12.0);
  CHECK(gamma_ratio(0.37, 0) == 1.0);
  CHECK(gamma_ratio(0.5, 3) == 1.875);
  CHECK_THAT(gamma_ratio(2.5, 4), WithinRel(std::exp(ln_gamma(6.5) - ln_gamma(2.5)), 1e-13));
  CHECK_THROWS_AS(gamma_ratio(0.0, 1), ftr::domain_error);
}

TEST_CASE("digamma and reciprocal gamma", "[specfun]") {
  CHECK_THAT(digamma(1.0), WithinRel(-euler_gamma, 1e-14));
  CHECK_THAT(digamma(0.3), WithinRel(-3.5025242222001331249, 1e-13));
  CHECK_THAT(digamma(-0.7), WithinRel(-2.0739527936287037831, 1e-13));
  CHECK_THAT(digamma(-2.5), WithinRel(1.1031566406452431872, 1e-13));
  CHECK_THAT(digamma(15.2), WithinRel(2.6880401589007584106, 1e-14));
  for (double x : {0.01, 0.9, 3.3, 42.0, -3.7}) CHECK_THAT(digamma(x), WithinRel(boost::math::digamma(x), 1e-12));
  CHECK(rgamma(0.0) == 0.0);
  CHECK(rgamma(-3.0) == 0.0);
  CHECK_THAT(rgamma(-0.5), WithinRel(-1.0 / (2.0 * std::sqrt(std::numbers::pi)), 1e-13));
  CHECK_THROWS_AS(digamma(-2.0), ftr::domain_error);
}

TEST_CASE("gauss_2f1 trivial and terminating cases", "[specfun][2f1]") {
  CHECK(gauss_2f1(0.3, 1.7, 2.2, 0.0).value == 1.0);
  CHECK(gauss_2f1(0.5, 0.0, 1.0, 0.7).value == 1.0);
  CHECK(gauss_2f1(0.5, 0.0, 1.0, -40.0).value == 1.0);
  // 1 - 2(1/2)(-1)/1 + ((1/2)(3/2)/2)(2*1/2)(1)
  const auto v = gauss_2f1(0.5, -2.0, 1.0, -1.0);
  CHECK(v.value == 2.375);
  CHECK(v.converged);
  CHECK(v.terms_used == 3);
}

TEST_CASE("gauss_2f1 on the power-series range", "[specfun][2f1]") {
  const auto v = gauss_2f1(0.35, 0.85, 1.0, 0.5);
  CHECK_THAT(v.value, WithinRel(1.2246863495139410365, 1e-12));
  CHECK(v.converged);
  CHECK(v.terms_used <= 10000);
}

TEST_CASE("gauss_2f1 through the Pfaff transformation", "[specfun][2f1]") {
  CHECK_THAT(gauss_2f1(0.5, 0.7, 1.3, -3.0).value, WithinRel(0.66097115099501627251, 1e-12));
  CHECK_THAT(gauss_2f1(0.5, 0.7, 1.3, -20.0).value, WithinRel(0.36557491227912875957, 1e-12));
}

TEST_CASE("gauss_2f1 near unit argument", "[specfun][2f1]") {
  struct Case {
    double a, b, c, x, expected;
  };
  // c - a - b covers: 0 (log case), -1 (log case), positive integers,
  // non-integers of both signs and a point inside the near-integer band.
  const Case cases[] = {
      {0.25, 0.75, 1, 0.95, 1.6186234528579671494},
      {0.5, 1, 1, 0.99, 9.9999999999999955591},
      {1, 1.5, 1, 0.998, 11180.339887498933587},
      {0.75, 1.25, 1, 0.97, 30.276319054690582628},
      {2.5, 3, 1, 0.907, 176635.16875285717581},
      {0.2500005, 0.7500005, 1, 0.95, 1.6186258773428861436},
      {0.3, 0.2, 2.5, 0.95, 1.0313073670196107375},
      {0.3, 0.4, 1.7, 0.96, 1.1223526952445425642},
      {-0.3, 0.4, 1.2, 0.97, 0.85761011380781122171},
      {0.05, 0.55, 1, 0.998001998, 1.082915002154430164},
      {5, 5.5, 1, 0.9999, 9.4940829532719492849e+39},
      {0.75, 1.25, 1, 0.9999, 9003.7466610699522407},
  };
  for (const auto& c : cases) {
    INFO("a=" << c.a << " b=" << c.b << " c=" << c.c << " x=" << c.x);
    const auto v = gauss_2f1(c.a, c.b, c.c, c.x);
    CHECK(v.converged);
    CHECK_THAT(v.value, WithinRel(c.expected, 1e-11));
  }
}

TEST_CASE("gauss_2f1 agrees with brute-force summation on both sides of the switch", "[specfun][2f1][property]") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> shape(0.05, 4.0);
  std::uniform_real_distribution<double> arg(0.5, 0.99);
  for (int i = 0; i < 200; ++i) {
    const double m = shape(rng);
    const double x = arg(rng);
    const double a = m / 2.0;
    const double b = (1.0 + m) / 2.0;
    const double expected = static_cast<double>(ftr::oracle::f21_direct(a, b, 1.0L, x));
    INFO("m=" << m << " x=" << x);
    CHECK_THAT(gauss_2f1(a, b, 1.0, x).value, WithinRel(expected, 1e-10));
  }
}

TEST_CASE("gauss_2f1 domain errors", "[specfun][2f1]") {
  CHECK_THROWS_AS(gauss_2f1(0.5, 0.5, -1.0, 0.5), ftr::domain_error);
  CHECK_THROWS_AS(gauss_2f1(0.5, 0.5, 1.0, 1.0), ftr::domain_error);
}

TEST_CASE("gauss_2f1 reports non-convergence with the term count", "[specfun][2f1]") {
  SeriesOptions opt;
  opt.max_terms = 5;
  try {
    (void)gauss_2f1(0.3, 0.4, 1.0, 0.8, opt);
    FAIL("expected a convergence error");
  } catch (const ftr::convergence_error& e) {
    CHECK(e.terms_used() >= 5);
  }
}

TEST_CASE("terminating 2F1 equals the cosine-power average", "[specfun][2f1][property]") {
  for (int i = 0; i <= 8; ++i) {
    for (int d = 1; d <= 9; ++d) {
      const double delta = 0.1 * d;
      const double hyper = std::pow(1.0 - delta, i) * gauss_2f1(0.5, -i, 1.0, 2.0 * delta / (delta - 1.0)).value;
      const double average = quad_0_pi([&](double t) { return std::pow(1.0 + delta * std::cos(t), i); }) / std::numbers::pi;
      INFO("i=" << i << " delta=" << delta);
      CHECK_THAT(hyper, WithinRel(average, 1e-9));
    }
  }
}

TEST_CASE("cosine-power average at unit balance has the central-binomial closed form", "[specfun][2f1][property]") {
  const double delta = 1.0 - std::ldexp(1.0, -40);
  for (int i = 0; i <= 8; ++i) {
    const double closed = std::pow(2.0, i) * std::exp(ln_gamma(i + 0.5) - ln_gamma(i + 1.0)) / std::sqrt(std::numbers::pi);
    const double hyper = std::pow(1.0 - delta, i) * gauss_2f1(0.5, -i, 1.0, 2.0 * delta / (delta - 1.0)).value;
    const double average = quad_0_pi([&](double t) { return std::pow(1.0 + std::cos(t), i); }) / std::numbers::pi;
    INFO("i=" << i);
    CHECK_THAT(hyper, WithinRel(closed, 1e-9));
    CHECK_THAT(average, WithinRel(closed, 1e-9));
  }
}

TEST_CASE("hyp_3f2_capacity trivial and terminating cases", "[specfun][3f2]") {
  CHECK(hyp_3f2_capacity(0.7, 0.0).value == 1.0);
  CHECK(hyp_3f2_capacity(2.0, 0.5).value == 1.0);
  CHECK(hyp_3f2_capacity(3.0, 0.5).value == 0.875);
  CHECK(hyp_3f2_capacity(2.0, 0.999).value == 1.0);
  const auto four = hyp_3f2_capacity(4.0, 0.6);
  CHECK(four.terms_used == 3);
  // 1 + (-2)/4 z + (-2)(-1)/(9*2) z^2
  CHECK_THAT(four.value, WithinRel(1.0 - 0.5 * 0.6 + (2.0 / 18.0) * 0.36, 1e-15));
}

TEST_CASE("hyp_3f2_capacity against reference values", "[specfun][3f2]") {
  struct Case {
    double m, z, expected;
  };
  const Case cases[] = {
      {0.7, 0.5, 1.2239775964354480811},   {0.7, 0.97, 1.8866323830870275499},
      {0.7, 0.999, 2.1102975223773963702}, {0.1, 0.9995, 5.7479679276130753779},
      {1.0, 0.99, 1.6046721697741164646},  {1.0001, 0.99, 1.604567197079046734},
      {3.5, 0.99, 0.67487757514697337667}, {2.5, 0.3, 0.96112965579706409667},
      {0.999, 0.96, 1.5353610874099599676}, {7.3, 0.98, 0.40084763414675328421},
      {0.01, 0.99999, 10.968369436558596682},
  };
  for (const auto& c : cases) {
    INFO("m=" << c.m << " z=" << c.z);
    CHECK_THAT(hyp_3f2_capacity(c.m, c.z).value, WithinRel(c.expected, 1e-11));
  }
}

TEST_CASE("capacity log term equals its integral representation", "[specfun][3f2][property]") {
  // (m-1) z 3F2(1,1,2-m;2,2;z) = int_0^z (1 - (1-t)^{m-1}) / t dt, with t = 1 - e^{-u}
  for (double m : {0.05, 0.3, 0.7, 1.3, 2.5, 4.2}) {
    for (double z : {0.2, 0.9, 0.96, 0.999}) {
      const double upper = -std::log1p(-z);
      const double integral = ftr::oracle::simpson(
          [m](double u) {
            const double t = -std::expm1(-u);
            if (t == 0.0) return (m - 1.0);
            return -std::expm1((m - 1.0) * (-u)) / t * std::exp(-u);
          },
          0.0, upper, 200000);
      INFO("m=" << m << " z=" << z);
      CHECK_THAT(capacity_log_term(m, z), WithinRel(integral, 1e-9));
    }
  }
  CHECK(capacity_log_term(1.0, 0.9) == 0.0);
}

TEST_CASE("capacity log term stays accurate for large m", "[specfun][3f2][property]") {
  for (double m : {12.0, 20.0, 37.5, 300.0, 1e4}) {
    for (double z : {0.01, 0.1, 0.5, 0.9, 0.999}) {
      const double upper = -std::log1p(-z);
      auto f = [m](double u) {
        const double t = -std::expm1(-u);
        if (t == 0.0) return (m - 1.0);
        return -std::expm1((m - 1.0) * (-u)) / t * std::exp(-u);
      };
      // resolve the layer of width 1/m at the origin separately
      const double split = std::min(upper, 50.0 / m);
      double integral = ftr::oracle::simpson(f, 0.0, split, 100000);
      if (split < upper) integral += ftr::oracle::simpson(f, split, upper, 400000);
      INFO("m=" << m << " z=" << z);
      CHECK_THAT(capacity_log_term(m, z), WithinRel(integral, 1e-9));
      CHECK_THAT((m - 1.0) * z * hyp_3f2_capacity(m, z).value, WithinRel(integral, 1e-9));
    }
  }
  // both sides of the (m - 2) z = 8 switch
  const double m = 42.0;
  CHECK_THAT(capacity_log_term(m, 0.2 * (1 - 1e-12)), WithinRel(capacity_log_term(m, 0.2 * (1 + 1e-12)), 1e-11));
}

TEST_CASE("hyp_3f2_capacity is continuous across the switch point", "[specfun][3f2]") {
  for (double m : {0.2, 0.9, 1.05, 3.7}) {
    SeriesOptions series_only;
    series_only.z_switch = 0.999;
    series_only.max_terms = 100000;
    const double z = 0.97;
    INFO("m=" << m);
    CHECK_THAT(hyp_3f2_capacity(m, z).value, WithinRel(hyp_3f2_capacity(m, z, series_only).value, 1e-11));
  }
}

TEST_CASE("hyp_3f2_capacity domain errors", "[specfun][3f2]") {
  CHECK_THROWS_AS(hyp_3f2_capacity(0.0, 0.5), ftr::domain_error);
  CHECK_THROWS_AS(hyp_3f2_capacity(1.5, 1.0), ftr::domain_error);
  CHECK_THROWS_AS(hyp_3f2_capacity(1.5, -0.1), ftr::domain_error);
}

TEST_CASE("bessel_i0_scaled", "[specfun][bessel]") {
  CHECK(bessel_i0_scaled(0.0) == 1.0);
  // brute-force series for x = 1
  long double series = 0.0L;
  long double term = 1.0L;
  for (int k = 0; k < 40; ++k) {
    if (k > 0) term *= 0.25L / (static_cast<long double>(k) * k);
    series += term;
  }
  CHECK_THAT(bessel_i0_scaled(1.0), WithinRel(static_cast<double>(series * std::exp(-1.0L)), 1e-14));
  CHECK_THAT(bessel_i0_scaled(10.0), WithinRel(0.12783333716342860732, 1e-13));
  CHECK_THAT(bessel_i0_scaled(20.0), WithinRel(0.089780311884826021596, 1e-13));
  CHECK_THAT(bessel_i0_scaled(20.5), WithinRel(0.088664429015745248147, 1e-13));
  CHECK_THAT(bessel_i0_scaled(50.0), WithinRel(0.05656162664745419253, 1e-13));
  const double at700 = bessel_i0_scaled(700.0);
  CHECK(std::isfinite(at700));
  CHECK_THAT(at700, WithinRel(0.015081295651531357587, 1e-13));
  CHECK_THAT(at700, WithinRel(1.0 / std::sqrt(2.0 * std::numbers::pi * 700.0) * (1.0 + 1.0 / 5600.0), 1e-6));
  for (double x : {0.3, 4.0, 15.0, 19.9, 25.0, 300.0}) {
    INFO("x=" << x);
    CHECK_THAT(bessel_i0_scaled(x), WithinRel(boost::math::cyl_bessel_i(0, x) * std::exp(-x), 1e-12));
  }
  CHECK(std::isfinite(bessel_i0_scaled(1e6)));
}

TEST_CASE("ein matches references and the exponential integral", "[specfun][ein]") {
  CHECK(ein(0.0) == 0.0);
  CHECK_THAT(ein(1e-8), WithinRel(9.9999999750000002648e-9, 1e-14));
  CHECK_THAT(ein(0.5), WithinRel(0.44384207911774836294, 1e-14));
  CHECK_THAT(ein(2.0), WithinRel(1.3192633561695392896, 1e-14));
  CHECK_THAT(ein(2.5), WithinRel(1.5184213146459576613, 1e-14));
  CHECK_THAT(ein(30.0), WithinRel(3.9784130465636912576, 1e-14));
  for (double x : {2.01, 5.0, 80.0, 1e4}) {
    CHECK_THAT(ein(x), WithinRel(boost::math::expint(1, x) + std::log(x) + euler_gamma, 1e-13));
  }
}

TEST_CASE("quad_0_pi basic integrals", "[specfun][quad]") {
  CHECK_THAT(quad_0_pi([](double) { return 1.0; }), WithinRel(std::numbers::pi, 1e-14));
  CHECK_THAT(quad_0_pi([](double t) { return std::cos(t); }), WithinAbs(0.0, 1e-13));
  CHECK_THAT(quad_0_pi([](double t) { return std::pow(1.0 + 0.5 * std::cos(t), 2); }),
             WithinRel(std::numbers::pi * 1.125, 1e-12));
  // sharply peaked integrand still converges
  const double sharp = quad_0_pi([](double t) { return 1.0 / (1e-4 + (t - 1.0) * (t - 1.0)); });
  const double exact = (std::atan((std::numbers::pi - 1.0) / 1e-2) + std::atan(1.0 / 1e-2)) / 1e-2;
  CHECK_THAT(sharp, WithinRel(exact, 1e-9));
}

TEST_CASE("quad_0_pi reports failure on a non-smooth integrand", "[specfun][quad]") {
  CHECK_THROWS_AS(quad_0_pi([](double t) { return t < 1.0 ? 0.0 : 1.0; }, 1e-14), ftr::convergence_error);
}

TEST_CASE("specfun evaluations are deterministic", "[specfun]") {
  CHECK(gauss_2f1(0.05, 0.55, 1.0, 0.998).value == gauss_2f1(0.05, 0.55, 1.0, 0.998).value);
  CHECK(hyp_3f2_capacity(0.3, 0.999).value == hyp_3f2_capacity(0.3, 0.999).value);
  CHECK(ln_gamma(3.3) == ln_gamma(3.3));
}
