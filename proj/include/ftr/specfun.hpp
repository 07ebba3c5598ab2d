#pragma once

// Special functions and quadrature used by the FTR closed forms.
//
// Everything here is a pure function of its arguments. The hypergeometric
// evaluators only cover the argument regimes the FTR statistics produce:
// terminating series, real arguments below one, and the near-unit corner
// reached through a linear transformation to 1 - x.

#include <array>
#include <cmath>
#include <algorithm>
#include <cstddef>
#include <initializer_list>
#include <mutex>
#include <numbers>
#include <string>
#include <vector>

#include "ftr/error.hpp"

namespace ftr::specfun {

inline constexpr double euler_gamma = std::numbers::egamma;

struct SeriesValue {
  double value = 0.0;
  std::size_t terms_used = 0;
  bool converged = false;
};

struct SeriesOptions {
  double rel_tol = 1e-12;
  std::size_t max_terms = 10000;
  // Above this argument the Gauss function is evaluated through the
  // 1 - x connection formula.
  double x_switch = 0.9;
  // Above this argument the capacity 3F2 is evaluated through its
  // closed-form complement in 1 - z.
  double z_switch = 0.95;
};

namespace detail {

inline bool is_nonpositive_integer(double x) { return x <= 0.0 && x == std::nearbyint(x); }

inline bool is_integer(double x) { return x == std::nearbyint(x); }

// sin(pi x) with exact zeros at the integers.
inline double sin_pi(double x) {
  double r = std::fmod(x, 2.0);
  if (r < 0.0) r += 2.0;
  double sign = 1.0;
  if (r >= 1.0) {
    r -= 1.0;
    sign = -1.0;
  }
  if (r > 0.5) r = 1.0 - r;
  if (r == 0.0) return 0.0;
  return sign * std::sin(std::numbers::pi * r);
}

inline double cos_pi(double x) { return sin_pi(x + 0.5); }

// Riemann zeta at the integers 2..kZetaTerms+1 by Euler-Maclaurin summation.
inline constexpr std::size_t kZetaTerms = 64;

inline const std::array<double, kZetaTerms + 2>& zeta_table() {
  static const auto table = [] {
    std::array<double, kZetaTerms + 2> z{};
    constexpr double bernoulli[] = {1.0 / 6.0,   -1.0 / 30.0, 1.0 / 42.0,      -1.0 / 30.0,
                                    5.0 / 66.0,  -691.0 / 2730.0, 7.0 / 6.0, -3617.0 / 510.0};
    constexpr int cutoff = 16;
    for (std::size_t k = 2; k < z.size(); ++k) {
      const double s = static_cast<double>(k);
      double sum = 0.0;
      for (int n = cutoff - 1; n >= 1; --n) sum += std::pow(n, -s);
      const double big_n = cutoff;
      sum += std::pow(big_n, 1.0 - s) / (s - 1.0) + 0.5 * std::pow(big_n, -s);
      // B_{2j}/(2j)! * s (s+1) ... (s+2j-2) * N^{-s-2j+1}
      double rising = s;
      double factorial = 2.0;
      double power = std::pow(big_n, -s - 1.0);
      for (int j = 1; j <= 8; ++j) {
        sum += bernoulli[j - 1] / factorial * rising * power;
        rising *= (s + 2 * j - 1) * (s + 2 * j);
        factorial *= (2.0 * j + 1.0) * (2.0 * j + 2.0);
        power /= big_n * big_n;
      }
      z[k] = sum;
    }
    return z;
  }();
  return table;
}

// ln Gamma(1 + eps) for |eps| <= 1/2 from its Taylor series in zeta values.
inline double ln_gamma_1p(double eps) {
  const auto& zeta = zeta_table();
  double sum = 0.0;
  double power = -eps;
  for (std::size_t k = 2; k < zeta.size(); ++k) {
    power *= -eps;
    const double term = zeta[k] * power / static_cast<double>(k);
    sum += term;
    if (std::abs(term) <= 1e-17 * std::abs(sum)) break;
  }
  return -euler_gamma * eps + sum;
}

}  // namespace detail

/// Natural log of Gamma(x) for x > 0.
///
/// A Lanczos sum (g = 607/128, 15 terms) away from the zeros of ln Gamma, and
/// the zeta-value Taylor series around x = 1 and x = 2 so that relative error
/// stays at round-off level where ln Gamma crosses zero.
inline double ln_gamma(double x) {
  if (!(x > 0.0) || !std::isfinite(x)) throw domain_error("ln_gamma: argument must be positive and finite");
  if (x == 1.0 || x == 2.0) return 0.0;
  if (x < 0.5) return ln_gamma(x + 1.0) - std::log(x);
  if (x <= 1.5) return detail::ln_gamma_1p(x - 1.0);
  if (x <= 2.5) return std::log1p(x - 2.0) + detail::ln_gamma_1p(x - 2.0);

  static constexpr double g = 607.0 / 128.0;
  static constexpr double c[] = {
      0.99999999999999709182,     57.156235665862923517,     -59.597960355475491248,
      14.136097974741747174,      -0.49191381609762019978,   .33994649984811888699e-4,
      .46523628927048575665e-4,   -.98374475304879564677e-4, .15808870322491248884e-3,
      -.21026444172410488319e-3,  .21743961811521264320e-3,  -.16431810653676389022e-3,
      .84418223983852743293e-4,   -.26190838401581408670e-4, .36899182659531622704e-5};
  const double z = x - 1.0;
  double series = c[0];
  for (int k = 14; k >= 1; --k) series += c[k] / (z + k);
  const double t = z + g + 0.5;
  return 0.5 * std::log(2.0 * std::numbers::pi) + (z + 0.5) * std::log(t) - t + std::log(series);
}

/// Gamma(m + i) / Gamma(m) as the rising product m (m+1) ... (m+i-1).
inline double gamma_ratio(double m, unsigned i) {
  if (!(m > 0.0)) throw domain_error("gamma_ratio: m must be positive");
  double product = 1.0;
  for (unsigned j = 0; j < i; ++j) product *= m + j;
  return product;
}

/// log|Gamma(x)| and the sign of Gamma(x) for any real x that is not a pole.
struct SignedLogGamma {
  double log_abs;
  int sign;
};

inline SignedLogGamma signed_ln_gamma(double x) {
  if (detail::is_nonpositive_integer(x)) throw domain_error("signed_ln_gamma: pole of Gamma");
  if (x > 0.0) return {ln_gamma(x), 1};
  // Gamma(x) Gamma(1-x) = pi / sin(pi x)
  const double s = detail::sin_pi(x);
  return {std::log(std::numbers::pi) - std::log(std::abs(s)) - ln_gamma(1.0 - x), s > 0.0 ? 1 : -1};
}

/// 1 / Gamma(x), zero at the poles.
inline double rgamma(double x) {
  if (detail::is_nonpositive_integer(x)) return 0.0;
  const auto lg = signed_ln_gamma(x);
  return lg.sign * std::exp(-lg.log_abs);
}

/// Digamma psi(x) for real x away from the poles.
inline double digamma(double x) {
  if (detail::is_nonpositive_integer(x)) throw domain_error("digamma: pole");
  if (x < 0.5) {
    // psi(x) = psi(1 - x) - pi cot(pi x)
    return digamma(1.0 - x) - std::numbers::pi * detail::cos_pi(x) / detail::sin_pi(x);
  }
  double result = 0.0;
  while (x < 10.0) {
    result -= 1.0 / x;
    x += 1.0;
  }
  const double inv2 = 1.0 / (x * x);
  const double tail =
      inv2 * (1.0 / 12 -
              inv2 * (1.0 / 120 -
                      inv2 * (1.0 / 252 -
                              inv2 * (1.0 / 240 - inv2 * (1.0 / 132 - inv2 * (691.0 / 32760 - inv2 / 12))))));
  return result + std::log(x) - 0.5 / x - tail;
}

namespace detail {

// Product of Gamma values over a quotient, sign included. A pole in the
// denominator gives zero.
inline double gamma_quotient(std::initializer_list<double> num, std::initializer_list<double> den) {
  double log_abs = 0.0;
  int sign = 1;
  for (double d : den) {
    if (is_nonpositive_integer(d)) return 0.0;
    const auto lg = signed_ln_gamma(d);
    log_abs -= lg.log_abs;
    sign *= lg.sign;
  }
  for (double n : num) {
    const auto lg = signed_ln_gamma(n);
    log_abs += lg.log_abs;
    sign *= lg.sign;
  }
  return sign * std::exp(log_abs);
}

// Plain power series of 2F1 with an optional term budget. Does not throw.
inline SeriesValue f21_series(double a, double b, double c, double x, double rel_tol, std::size_t max_terms) {
  double term = 1.0;
  double sum = 1.0;
  std::size_t k = 0;
  const double tail_factor = 1.0 - std::min(std::abs(x), 0.999999);
  while (k < max_terms) {
    const double ratio = (a + k) * (b + k) / ((c + k) * (k + 1.0)) * x;
    term *= ratio;
    sum += term;
    ++k;
    if (term == 0.0) return {sum, k + 1, true};
    if (std::abs(ratio) < 1.0 && std::abs(term) <= rel_tol * tail_factor * std::abs(sum)) return {sum, k + 1, true};
  }
  return {sum, k + 1, false};
}

// Finite sum of a terminating 2F1; `degree` is the negated integer numerator.
inline SeriesValue f21_polynomial(double a, double b, double c, double x, unsigned degree) {
  double term = 1.0;
  double sum = 1.0;
  for (unsigned k = 0; k < degree; ++k) {
    term *= (a + k) * (b + k) / ((c + k) * (k + 1.0)) * x;
    sum += term;
  }
  return {sum, degree + 1u, true};
}

inline SeriesValue require(SeriesValue v, const char* what) {
  if (!v.converged) throw convergence_error(what, v.terms_used);
  return v;
}

// Connection formula for c - a - b = -n, n = 0, 1, 2, ...
inline SeriesValue f21_log_case_negative(double a, double b, double c, double w, int n, const SeriesOptions& opt) {
  double finite = 0.0;
  if (n > 0) {
    double term = 1.0;
    double sum = 1.0;
    for (int k = 0; k < n - 1; ++k) {
      term *= (a - n + k) * (b - n + k) / ((k + 1.0) * (1.0 - n + k)) * w;
      sum += term;
    }
    finite = gamma_quotient({static_cast<double>(n), c}, {a, b}) * std::pow(w, -n) * sum;
  }
  const double coef = -((n % 2 == 0) ? 1.0 : -1.0) * gamma_quotient({c}, {a - n, b - n});
  if (coef == 0.0) return {finite, static_cast<std::size_t>(n), true};

  const double log_w = std::log(w);
  double psi_k1 = -euler_gamma;             // psi(k + 1)
  double psi_kn1 = digamma(n + 1.0);        // psi(k + n + 1)
  double psi_ak = digamma(a);               // psi(a + k)
  double psi_bk = digamma(b);               // psi(b + k)
  double t = rgamma(n + 1.0);               // (a)_k (b)_k / (k! (k+n)!) w^k
  double sum = 0.0;
  std::size_t k = 0;
  for (; k < opt.max_terms; ++k) {
    const double contrib = t * (log_w - psi_k1 - psi_kn1 + psi_ak + psi_bk);
    sum += contrib;
    if (k > 0 && std::abs(contrib) <= opt.rel_tol * std::abs(sum) * (1.0 - w)) {
      return {finite + coef * sum, k + 1 + n, true};
    }
    const double kd = static_cast<double>(k);
    t *= (a + kd) * (b + kd) / ((kd + 1.0) * (kd + n + 1.0)) * w;
    psi_k1 += 1.0 / (kd + 1.0);
    psi_kn1 += 1.0 / (kd + n + 1.0);
    psi_ak += 1.0 / (a + kd);
    psi_bk += 1.0 / (b + kd);
    if (t == 0.0) return {finite + coef * sum, k + 1 + n, true};
  }
  return {finite + coef * sum, k + n, false};
}

// Connection formula for c - a - b = +n, n = 1, 2, ...
inline SeriesValue f21_log_case_positive(double a, double b, double c, double w, int n, const SeriesOptions& opt) {
  double term = 1.0;
  double sum_finite = 1.0;
  for (int k = 0; k < n - 1; ++k) {
    term *= (a + k) * (b + k) / ((k + 1.0) * (1.0 - n + k)) * w;
    sum_finite += term;
  }
  const double finite = gamma_quotient({static_cast<double>(n), c}, {a + n, b + n}) * sum_finite;
  const double coef = -std::pow(-w, n) * gamma_quotient({c}, {a, b});
  if (coef == 0.0) return {finite, static_cast<std::size_t>(n), true};

  const double log_w = std::log(w);
  double psi_k1 = -euler_gamma;
  double psi_kn1 = digamma(n + 1.0);
  double psi_ak = digamma(a + n);
  double psi_bk = digamma(b + n);
  double t = rgamma(n + 1.0);
  double sum = 0.0;
  std::size_t k = 0;
  for (; k < opt.max_terms; ++k) {
    const double contrib = t * (log_w - psi_k1 - psi_kn1 + psi_ak + psi_bk);
    sum += contrib;
    if (k > 0 && std::abs(contrib) <= opt.rel_tol * std::abs(sum) * (1.0 - w)) {
      return {finite + coef * sum, k + 1 + n, true};
    }
    const double kd = static_cast<double>(k);
    t *= (a + n + kd) * (b + n + kd) / ((kd + 1.0) * (kd + n + 1.0)) * w;
    psi_k1 += 1.0 / (kd + 1.0);
    psi_kn1 += 1.0 / (kd + n + 1.0);
    psi_ak += 1.0 / (a + n + kd);
    psi_bk += 1.0 / (b + n + kd);
    if (t == 0.0) return {finite + coef * sum, k + 1 + n, true};
  }
  return {finite + coef * sum, k + n, false};
}

// Within this distance of an integer the gamma-function connection
// coefficients cancel catastrophically; the direct series is summed instead.
inline constexpr double kNearIntegerBand = 1e-5;
inline constexpr std::size_t kNearIntegerMaxTerms = 20'000'000;

inline SeriesValue f21_near_one(double a, double b, double c, double x, const SeriesOptions& opt) {
  const double w = 1.0 - x;
  const double s = c - a - b;
  const double n = std::nearbyint(s);
  const double gap = std::abs(s - n);
  if (gap <= 1e-12 * std::max(1.0, std::abs(s))) {
    return n <= 0.0 ? f21_log_case_negative(a, b, c, w, static_cast<int>(-n), opt)
                    : f21_log_case_positive(a, b, c, w, static_cast<int>(n), opt);
  }
  if (gap < kNearIntegerBand) {
    return f21_series(a, b, c, x, opt.rel_tol, std::max(opt.max_terms, kNearIntegerMaxTerms));
  }
  const double coef1 = gamma_quotient({c, s}, {c - a, c - b});
  const double coef2 = gamma_quotient({c, -s}, {a, b});
  SeriesValue f1{0.0, 0, true};
  SeriesValue f2{0.0, 0, true};
  if (coef1 != 0.0) f1 = f21_series(a, b, 1.0 - s, w, opt.rel_tol, opt.max_terms);
  if (coef2 != 0.0) f2 = f21_series(c - a, c - b, 1.0 + s, w, opt.rel_tol, opt.max_terms);
  return {coef1 * f1.value + coef2 * std::pow(w, s) * f2.value, f1.terms_used + f2.terms_used,
          f1.converged && f2.converged};
}

}  // namespace detail

/// Gauss hypergeometric function 2F1(a, b; c; x) for real x < 1.
///
/// Terminating series are summed exactly. Negative arguments go through the
/// Pfaff transformation, arguments above `opt.x_switch` through the 1 - x
/// connection formula (logarithmic form when c - a - b is an integer).
inline SeriesValue gauss_2f1(double a, double b, double c, double x, const SeriesOptions& opt = {}) {
  if (detail::is_nonpositive_integer(c)) throw domain_error("gauss_2f1: c must not be a non-positive integer");
  if (!(x < 1.0) || !std::isfinite(x)) throw domain_error("gauss_2f1: argument must be below one");
  if (x == 0.0) return {1.0, 1, true};
  if (detail::is_nonpositive_integer(a) || detail::is_nonpositive_integer(b)) {
    const double na = detail::is_nonpositive_integer(a) ? -a : HUGE_VAL;
    const double nb = detail::is_nonpositive_integer(b) ? -b : HUGE_VAL;
    return detail::f21_polynomial(a, b, c, x, static_cast<unsigned>(std::min(na, nb)));
  }
  if (x < 0.0) {
    // 2F1(a,b;c;x) = (1-x)^{-a} 2F1(a, c-b; c; x/(x-1))
    auto inner = gauss_2f1(a, c - b, c, x / (x - 1.0), opt);
    inner.value *= std::pow(1.0 - x, -a);
    return inner;
  }
  if (x <= opt.x_switch) return detail::require(detail::f21_series(a, b, c, x, opt.rel_tol, opt.max_terms), "gauss_2f1");
  return detail::require(detail::f21_near_one(a, b, c, x, opt), "gauss_2f1 (1-x transformation)");
}

namespace detail {

// (psi(1+s) - psi(1)) / s, smooth through s = 0.
inline double harmonic_over_s(double s) {
  if (std::abs(s) >= 0.5) return (digamma(1.0 + s) + euler_gamma) / s;
  const auto& zeta = zeta_table();
  double sum = 0.0;
  double power = 1.0;
  for (std::size_t n = 1; n + 1 < zeta.size(); ++n) {
    const double term = zeta[n + 1] * power;
    sum += (n % 2 == 1) ? term : -term;
    if (std::abs(term) <= 1e-17 * std::abs(sum)) break;
    power *= s;
  }
  return sum;
}

// expm1(s * y) / s, equal to y at s = 0.
inline double expm1_over_s(double s, double y) { return s == 0.0 ? y : std::expm1(s * y) / s; }

// Series coefficient of 3F2(1,1,2-m;2,2;z): (2-m)_k / ((k+1)^2 k!) z^k.
inline SeriesValue capacity_3f2_series(double m, double z, const SeriesOptions& opt) {
  double term = 1.0;
  double sum = 1.0;
  std::size_t k = 0;
  const double tail_factor = 1.0 - z;
  while (k < opt.max_terms) {
    const double kd = static_cast<double>(k);
    term *= (2.0 - m + kd) * (kd + 1.0) / ((kd + 2.0) * (kd + 2.0)) * z;
    sum += term;
    ++k;
    if (term == 0.0) return {sum, k + 1, true};
    if (std::abs(term) <= opt.rel_tol * tail_factor * std::abs(sum)) return {sum, k + 1, true};
  }
  return {sum, k + 1, false};
}

inline bool capacity_3f2_terminates(double m) { return m >= 2.0 && is_integer(m); }

// J(w) = sum_j [w^{j+1}/(j+1) - w^{j+m}/(j+m)] = int_0^w (1 - u^{m-1})/(1 - u) du,
// summed until w^j drops below 1e-18 (w <= 1 - z_switch keeps this short).
inline SeriesValue capacity_complement(double m, double w, const SeriesOptions& opt) {
  double sum = 0.0;
  double wp = w;               // w^{j+1}
  double wm = std::pow(w, m);  // w^{j+m}
  double decay = 1.0;          // w^j
  for (std::size_t j = 0; j < opt.max_terms; ++j) {
    sum += wp / (j + 1.0) - wm / (j + m);
    decay *= w;
    if (decay < 1e-18) return {sum, j + 1, true};
    wp *= w;
    wm *= w;
  }
  return {sum, opt.max_terms, false};
}

// The 3F2 series alternates with terms of size up to about e^{(m-2) z}; past
// this bound the sum loses too many digits.
inline constexpr double kCapacitySeriesSpread = 8.0;

inline bool capacity_series_stable(double m, double z) { return (m - 2.0) * z <= kCapacitySeriesSpread; }

// (m-1) z 3F2 = psi(m) + gamma_e + ln z + sum_j w^{j+m} / (j+m), w = 1 - z.
// Used for large m, where w^m is small and the sum is short.
inline SeriesValue capacity_large_m(double m, double z, const SeriesOptions& opt) {
  const double w = 1.0 - z;
  const double head = digamma(m) + euler_gamma + std::log(z);
  const std::size_t cap = opt.max_terms + static_cast<std::size_t>(40.0 / z);
  double sum = 0.0;
  double wm = std::exp(m * std::log1p(-z));
  for (std::size_t j = 0; j < cap; ++j) {
    const double term = wm / (static_cast<double>(j) + m);
    sum += term;
    // remaining terms are bounded by term / z
    if (term <= 1e-17 * z * std::abs(head + sum)) return {head + sum, j + 1, true};
    wm *= w;
  }
  return {head + sum, cap, false};
}

}  // namespace detail

/// 3F2(1, 1, 2-m; 2, 2; z) for m > 0 and 0 <= z < 1.
///
/// Terminates after m - 1 terms for integer m >= 2. Above `opt.z_switch` the
/// value comes from the identity
///   (m-1) z 3F2 = psi(m) + gamma_e - int_0^{1-z} (1 - u^{m-1}) / (1 - u) du,
/// whose right-hand integral is a short power series in 1 - z.
inline SeriesValue hyp_3f2_capacity(double m, double z, const SeriesOptions& opt = {}) {
  if (!(m > 0.0) || !std::isfinite(m)) throw domain_error("hyp_3f2_capacity: m must be positive");
  if (!(z >= 0.0 && z < 1.0)) throw domain_error("hyp_3f2_capacity: z must lie in [0, 1)");
  if (z == 0.0) return {1.0, 1, true};
  if (!detail::capacity_series_stable(m, z)) {
    const auto t = detail::require(detail::capacity_large_m(m, z, opt), "hyp_3f2_capacity (large m)");
    return {t.value / ((m - 1.0) * z), t.terms_used, true};
  }
  if (detail::capacity_3f2_terminates(m)) {
    const auto n = static_cast<unsigned>(m) - 1u;  // terms k = 0 .. m-2
    double term = 1.0;
    double sum = 1.0;
    for (unsigned k = 0; k + 1 < n; ++k) {
      term *= (2.0 - m + k) * (k + 1.0) / ((k + 2.0) * (k + 2.0)) * z;
      sum += term;
    }
    return {sum, n, true};
  }
  if (z <= opt.z_switch) return detail::require(detail::capacity_3f2_series(m, z, opt), "hyp_3f2_capacity");

  const double s = m - 1.0;
  const double w = 1.0 - z;
  if (std::abs(s) >= 0.5) {
    const auto j = detail::require(detail::capacity_complement(m, w, opt), "hyp_3f2_capacity (complement)");
    return {(digamma(m) + euler_gamma - j.value) / (s * z), j.terms_used, true};
  }
  // Divide the complement by s analytically so m near 1 keeps full precision.
  const double log_w = std::log(w);
  const double e = detail::expm1_over_s(s, log_w);
  double sum = 0.0;
  double wp = w;
  std::size_t j = 0;
  for (; j < opt.max_terms; ++j) {
    const double jd = static_cast<double>(j);
    const double term = wp * (1.0 / ((jd + 1.0) * (jd + 1.0 + s)) - e / (jd + 1.0 + s));
    sum += term;
    if (wp / w < 1e-18) break;
    wp *= w;
  }
  if (j == opt.max_terms) throw convergence_error("hyp_3f2_capacity (complement)", j);
  return {(detail::harmonic_over_s(s) - sum) / z, j + 1, true};
}

/// (m-1) z 3F2(1, 1, 2-m; 2, 2; z), the second term of the FTR capacity
/// integrand. Exactly zero at m = 1; stable as z approaches one.
inline double capacity_log_term(double m, double z, const SeriesOptions& opt = {}) {
  if (!(m > 0.0) || !std::isfinite(m)) throw domain_error("capacity_log_term: m must be positive");
  if (!(z >= 0.0 && z < 1.0)) throw domain_error("capacity_log_term: z must lie in [0, 1)");
  if (m == 1.0 || z == 0.0) return 0.0;
  if (!detail::capacity_series_stable(m, z)) {
    return detail::require(detail::capacity_large_m(m, z, opt), "capacity_log_term (large m)").value;
  }
  if (detail::capacity_3f2_terminates(m) || z <= opt.z_switch) {
    return (m - 1.0) * z * hyp_3f2_capacity(m, z, opt).value;
  }
  const auto j = detail::require(detail::capacity_complement(m, 1.0 - z, opt), "capacity_log_term");
  return digamma(m) + euler_gamma - j.value;
}

/// e^{-|x|} I0(x): power series up to |x| = 20, Hankel asymptotic series beyond.
inline double bessel_i0_scaled(double x) {
  x = std::abs(x);
  if (x <= 20.0) {
    const double q = 0.25 * x * x;
    double term = 1.0;
    double sum = 1.0;
    for (int k = 1; k < 200; ++k) {
      term *= q / (static_cast<double>(k) * k);
      sum += term;
      if (term < 1e-17 * sum) break;
    }
    return std::exp(-x) * sum;
  }
  const double inv8x = 1.0 / (8.0 * x);
  double term = 1.0;
  double sum = 1.0;
  for (int k = 1; k < 60; ++k) {
    const double next = term * (2.0 * k - 1.0) * (2.0 * k - 1.0) * inv8x / k;
    if (next >= term) break;
    term = next;
    sum += term;
    if (term < 1e-17 * sum) break;
  }
  return sum / std::sqrt(2.0 * std::numbers::pi * x);
}

/// Entire exponential integral Ein(x) = int_0^x (1 - e^{-t}) / t dt, x >= 0.
inline double ein(double x) {
  if (!(x >= 0.0)) throw domain_error("ein: argument must be non-negative");
  if (x <= 2.0) {
    double term = x;
    double sum = x;
    for (int k = 2; k < 100; ++k) {
      term *= -x * (k - 1.0) / (static_cast<double>(k) * k);
      sum += term;
      if (std::abs(term) < 1e-17 * std::abs(sum)) break;
    }
    return sum;
  }
  // E1 by the modified Lentz continued fraction.
  constexpr double tiny = 1e-300;
  double b = x + 1.0;
  double c = 1.0 / tiny;
  double d = 1.0 / b;
  double h = d;
  for (int i = 1; i < 500; ++i) {
    const double an = -static_cast<double>(i) * i;
    b += 2.0;
    d = 1.0 / (an * d + b);
    c = b + an / c;
    const double delta = c * d;
    h *= delta;
    if (std::abs(delta - 1.0) < 1e-16) break;
  }
  return h * std::exp(-x) + std::log(x) + euler_gamma;
}

namespace detail {

struct GaussRule {
  std::vector<double> nodes;    // on [-1, 1]
  std::vector<double> weights;
};

inline GaussRule make_gauss_legendre(std::size_t n) {
  GaussRule rule{std::vector<double>(n), std::vector<double>(n)};
  const std::size_t half = (n + 1) / 2;
  for (std::size_t i = 0; i < half; ++i) {
    double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0;
      double p1 = x;
      for (std::size_t k = 2; k <= n; ++k) {
        const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      dp = n * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    rule.nodes[i] = -x;
    rule.nodes[n - 1 - i] = x;
    rule.weights[i] = w;
    rule.weights[n - 1 - i] = w;
  }
  return rule;
}

inline constexpr std::size_t kQuadMinOrder = 16;
inline constexpr std::size_t kQuadLevels = 9;  // orders 16 .. 4096

inline const GaussRule& gauss_rule(std::size_t level) {
  static std::array<GaussRule, kQuadLevels> rules;
  static std::array<std::once_flag, kQuadLevels> once;
  std::call_once(once[level], [level] { rules[level] = make_gauss_legendre(kQuadMinOrder << level); });
  return rules[level];
}

}  // namespace detail

/// Integral of f over [0, pi] by Gauss-Legendre rules of doubling order,
/// stopping when two successive orders agree to `rel_tol`.
template <class F>
double quad_0_pi(F&& f, double rel_tol = 1e-10) {
  constexpr double half_pi = 0.5 * std::numbers::pi;
  auto apply = [&](const detail::GaussRule& rule, double& l1) {
    double sum = 0.0;
    l1 = 0.0;
    for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
      const double v = f(half_pi * (rule.nodes[i] + 1.0));
      sum += rule.weights[i] * v;
      l1 += rule.weights[i] * std::abs(v);
    }
    l1 *= half_pi;
    return half_pi * sum;
  };
  double l1 = 0.0;
  double previous = apply(detail::gauss_rule(0), l1);
  for (std::size_t level = 1; level < detail::kQuadLevels; ++level) {
    const double current = apply(detail::gauss_rule(level), l1);
    const double diff = std::abs(current - previous);
    if (diff <= std::max(rel_tol * std::abs(current), 64.0 * 2.2e-16 * l1)) return current;
    previous = current;
  }
  throw convergence_error("quad_0_pi: tolerance not reached", detail::kQuadMinOrder << (detail::kQuadLevels - 1));
}

}  // namespace ftr::specfun
