#pragma once

// Closed-form FTR statistics: normalized moments, amount of fading and its
// sensitivities, asymptotic outage (power offset) and asymptotic capacity
// (capacity loss relative to Rayleigh).

#include <cmath>
#include <cstddef>
#include <numbers>
#include <optional>

#include "ftr/error.hpp"
#include "ftr/models.hpp"
#include "ftr/specfun.hpp"

namespace ftr {

inline constexpr double log2_e = std::numbers::log2e;

/// Rayleigh asymptotic capacity loss log2(e) * gamma_e, in bits.
inline constexpr double rayleigh_capacity_loss_bits = std::numbers::log2e * std::numbers::egamma;

namespace detail {

/// (1/pi) int_0^pi (1 + delta cos t)^i dt via the terminating 2F1 form.
inline double cosine_power_mean(unsigned i, double delta) {
  if (i == 0 || delta == 0.0) return 1.0;
  const double x = 2.0 * delta / (delta - 1.0);
  return std::pow(1.0 - delta, static_cast<double>(i)) * specfun::gauss_2f1(0.5, -static_cast<double>(i), 1.0, x).value;
}

/// The same mean at delta = 1: 2^i Gamma(i + 1/2) / (sqrt(pi) Gamma(i + 1)).
inline double cosine_power_mean_unit(unsigned i) {
  double out = 1.0;
  for (unsigned j = 0; j < i; ++j) out *= (2.0 * j + 1.0) / (j + 1.0);
  return out;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Moments

struct MomentOptions {
  /// Use the delta = 1 closed form when delta > 1 - delta_switch.
  double delta_switch = 1e-6;
};

inline constexpr unsigned kMaxMomentOrder = 20;

/// Normalized moment E[gamma^k] / mean_gamma^k.
inline double normalized_moment(const ResolvedModel& model, unsigned k, const MomentOptions& opt = {}) {
  if (k > kMaxMomentOrder) throw domain_error("normalized_moment: order above 20");
  if (k <= 1) return 1.0;
  const auto& p = model.params;
  const bool unit_delta = p.delta > 1.0 - opt.delta_switch;
  auto cos_mean = [&](unsigned i) {
    return unit_delta ? detail::cosine_power_mean_unit(i) : detail::cosine_power_mean(i, p.delta);
  };
  // m^{-i} Gamma(m + i) / Gamma(m), which is 1 in the m -> infinity limit
  auto shape_factor = [&](unsigned i) {
    return model.limits.m_infinite ? 1.0 : specfun::gamma_ratio(p.m, i) / std::pow(p.m, static_cast<double>(i));
  };
  if (model.limits.k_infinite) return cos_mean(k) * shape_factor(k);

  const double w = p.k / (1.0 + p.k);
  const double u = 1.0 / (1.0 + p.k);
  double k_fact = 1.0;
  for (unsigned j = 2; j <= k; ++j) k_fact *= j;
  double sum = 0.0;
  double binom = 1.0;
  double i_fact = 1.0;
  for (unsigned i = 0; i <= k; ++i) {
    if (i > 0) {
      binom = binom * (k - i + 1) / i;
      i_fact *= i;
    }
    const double weight = binom * std::pow(w, static_cast<double>(i)) * std::pow(u, static_cast<double>(k - i)) / i_fact;
    if (weight == 0.0) continue;
    sum += weight * cos_mean(i) * shape_factor(i);
  }
  return k_fact * sum;
}

inline double normalized_moment(const FtrParams& p, unsigned k, const MomentOptions& opt = {}) {
  return normalized_moment(resolve(p), k, opt);
}

// ---------------------------------------------------------------------------
// Amount of fading

/// AoF = 1 - p(K) [2 - q(delta) r(m)] with p = (K/(1+K))^2, q = 1 + delta^2/2,
/// r = 1 + 1/m. The infinite limits set p or r to one.
inline double aof(const ResolvedModel& model) {
  const auto& p = model.params;
  const double pk = model.limits.k_infinite ? 1.0 : std::pow(p.k / (1.0 + p.k), 2);
  const double q = 1.0 + 0.5 * p.delta * p.delta;
  const double r = model.limits.m_infinite ? 1.0 : 1.0 + 1.0 / p.m;
  return 1.0 - pk * (2.0 - q * r);
}

inline double aof(const FtrParams& p) { return aof(resolve(p)); }

inline double aof(const NamedModel& named) { return aof(resolve(named)); }

struct AofGradient {
  double d_dk = 0.0;
  double d_ddelta = 0.0;
  double d_dm = 0.0;
};

inline AofGradient aof_gradient(const FtrParams& p) {
  validate(p);
  const double one_k = 1.0 + p.k;
  const double pk = std::pow(p.k / one_k, 2);
  const double q = 1.0 + 0.5 * p.delta * p.delta;
  const double r = 1.0 + 1.0 / p.m;
  return {-2.0 * p.k / (one_k * one_k * one_k) * (2.0 - q * r), pk * r * p.delta, -pk * q / (p.m * p.m)};
}

// ---------------------------------------------------------------------------
// Asymptotic outage

/// Linear power offset: the coefficient of gamma_th / mean_gamma in the
/// asymptotic CDF, relative to Rayleigh.
///   (1+K) (1+K/m)^{-m} 2F1(m/2, (1+m)/2; 1; delta^2 K^2 / (K+m)^2)
/// and (1+K) e^{-K} I0(K delta) in the m -> infinity limit.
inline double power_offset_linear(const ResolvedModel& model) {
  if (model.limits.k_infinite) throw unsupported_error("power offset is undefined for K -> infinity");
  const auto& p = model.params;
  if (p.k == 0.0) return 1.0;
  if (model.limits.m_infinite) {
    return (1.0 + p.k) * std::exp(-p.k * (1.0 - p.delta)) * specfun::bessel_i0_scaled(p.k * p.delta);
  }
  const double scale = (1.0 + p.k) * std::exp(-p.m * std::log1p(p.k / p.m));
  if (p.delta == 0.0) return scale;
  const double x = std::pow(p.delta * p.k / (p.k + p.m), 2);
  return scale * specfun::gauss_2f1(0.5 * p.m, 0.5 * (1.0 + p.m), 1.0, x).value;
}

inline double power_offset_db(const ResolvedModel& model) {
  if (model.limits.k_infinite) throw unsupported_error("power offset is undefined for K -> infinity");
  const auto& p = model.params;
  if (model.limits.m_infinite) {
    // split so that e^{-K} I0(K delta) never under- or overflows
    return 10.0 * std::log10(1.0 + p.k) +
           10.0 * std::numbers::log10e *
               (-p.k * (1.0 - p.delta) + std::log(specfun::bessel_i0_scaled(p.k * p.delta)));
  }
  return 10.0 * std::log10(power_offset_linear(model));
}

inline double power_offset_db(const FtrParams& p) { return power_offset_db(resolve(p)); }

/// Asymptotic outage probability (gamma_th / mean_snr) * power offset.
inline double asymptotic_op(const ResolvedModel& model, double gamma_th, double mean_snr) {
  if (!(gamma_th > 0.0) || !(mean_snr > 0.0)) throw domain_error("asymptotic_op: thresholds must be positive");
  return gamma_th / mean_snr * power_offset_linear(model);
}

inline double asymptotic_op(const FtrParams& p, double gamma_th, double mean_snr) {
  return asymptotic_op(resolve(p), gamma_th, mean_snr);
}

// ---------------------------------------------------------------------------
// Asymptotic capacity

struct CapacityOptions {
  double quad_rel_tol = 1e-10;
  specfun::SeriesOptions series{};
};

namespace detail {

/// Capacity integrand F(theta) at effective specular ratio kc = K(1 + delta cos theta):
///   ln((kc + m) / (m (1 + K))) + (m-1) z 3F2(1,1,2-m;2,2;z),  z = kc / (kc + m).
inline double capacity_integrand(double kc, double k, double m, const specfun::SeriesOptions& opt) {
  const double z = kc / (kc + m);
  return std::log1p(kc / m) - std::log1p(k) + specfun::capacity_log_term(m, z, opt);
}

/// m -> infinity limit of the integrand: Ein(kc) - ln(1 + K).
inline double capacity_integrand_twdp(double kc, double k) { return specfun::ein(kc) - std::log1p(k); }

}  // namespace detail

/// Capacity loss relative to Rayleigh in nats, -(1/pi) int_0^pi F(theta) dtheta.
/// Positive values mean a lower high-SNR capacity than Rayleigh.
///
/// For K -> infinity the integral has the closed form
///   -[ln((1 + sqrt(1 - delta^2)) / 2) - ln m + psi(m) + gamma_e],
/// where ln m - psi(m) vanishes as m -> infinity.
inline double capacity_loss_nats(const ResolvedModel& model, const CapacityOptions& opt = {}) {
  const auto& p = model.params;
  if (model.limits.k_infinite) {
    const double two_ray = std::log(0.5 * (1.0 + std::sqrt((1.0 - p.delta) * (1.0 + p.delta))));
    const double shape = model.limits.m_infinite ? 0.0 : specfun::digamma(p.m) - std::log(p.m);
    return -(two_ray + shape + specfun::euler_gamma);
  }
  if (p.k == 0.0) return 0.0;
  auto f = [&](double theta) {
    const double kc = p.k * (1.0 + p.delta * std::cos(theta));
    return model.limits.m_infinite ? detail::capacity_integrand_twdp(kc, p.k)
                                   : detail::capacity_integrand(kc, p.k, p.m, opt.series);
  };
  if (p.delta == 0.0) return -f(0.0);
  return -specfun::quad_0_pi(f, opt.quad_rel_tol) / std::numbers::pi;
}

inline double capacity_loss_nats(const FtrParams& p, const CapacityOptions& opt = {}) {
  return capacity_loss_nats(resolve(p), opt);
}

/// High-SNR ergodic capacity in bits: log2(mean_snr) - log2(e) (gamma_e + capacity loss).
inline double asymptotic_capacity_bits(const ResolvedModel& model, double mean_snr, const CapacityOptions& opt = {}) {
  if (!(mean_snr > 0.0)) throw domain_error("asymptotic_capacity_bits: mean SNR must be positive");
  return std::log2(mean_snr) - rayleigh_capacity_loss_bits - log2_e * capacity_loss_nats(model, opt);
}

inline double asymptotic_capacity_bits(const FtrParams& p, double mean_snr, const CapacityOptions& opt = {}) {
  return asymptotic_capacity_bits(resolve(p), mean_snr, opt);
}

/// Rician shadowed asymptotic capacity loss L^RS(K_eff, m) in bits.
inline double rician_shadowed_L(double k_eff, double m, const specfun::SeriesOptions& opt = {}) {
  if (!(k_eff >= 0.0) || !std::isfinite(k_eff)) throw domain_error("rician_shadowed_L: K must be finite and non-negative");
  if (!(m > 0.0) || !std::isfinite(m)) throw domain_error("rician_shadowed_L: m must be finite and positive");
  return rayleigh_capacity_loss_bits - log2_e * detail::capacity_integrand(k_eff, k_eff, m, opt);
}

/// L^RS with the (1 + K_alpha) normalization replaced by the unconditional
/// (1 + K), as obtained after conditioning on the phase difference alpha.
inline double rician_shadowed_L_alpha(double k_alpha, double k, double m, const specfun::SeriesOptions& opt = {}) {
  if (!(k_alpha >= 0.0) || !(k >= 0.0)) throw domain_error("rician_shadowed_L_alpha: K must be non-negative");
  if (!(m > 0.0) || !std::isfinite(m)) throw domain_error("rician_shadowed_L_alpha: m must be finite and positive");
  return rayleigh_capacity_loss_bits - log2_e * detail::capacity_integrand(k_alpha, k, m, opt);
}

// ---------------------------------------------------------------------------
// Report

struct MetricReport {
  double aof = 1.0;
  std::optional<double> power_offset_db;  // absent for K -> infinity
  double capacity_loss_nats = 0.0;
  double capacity_loss_bits = 0.0;
  std::optional<double> diversity_order;  // absent where the limit does not fix it
};

/// Diversity order: 1 for finite K, 1/2 for the two-wave limit at delta = 1.
inline std::optional<double> diversity_order(const ResolvedModel& model) {
  if (!model.limits.k_infinite) return 1.0;
  if (model.limits.m_infinite && model.params.delta == 1.0) return 0.5;
  return std::nullopt;
}

inline MetricReport evaluate_report(const ResolvedModel& model, const CapacityOptions& opt = {}) {
  MetricReport r;
  r.aof = aof(model);
  if (!model.limits.k_infinite) r.power_offset_db = power_offset_db(model);
  r.capacity_loss_nats = capacity_loss_nats(model, opt);
  r.capacity_loss_bits = r.capacity_loss_nats * log2_e;
  r.diversity_order = diversity_order(model);
  return r;
}

// ---------------------------------------------------------------------------
// Independent evaluation routes used for consistency checks

namespace crosscheck {

/// Power offset as the phase average of the Rician shadowed coefficient,
/// (1+K) (1/pi) int_0^pi (1 + K(1 + delta cos t)/m)^{-m} dt.
inline double power_offset_linear_mixture(const FtrParams& p, double rel_tol = 1e-12) {
  validate(p);
  auto f = [&](double t) { return std::exp(-p.m * std::log1p(p.k * (1.0 + p.delta * std::cos(t)) / p.m)); };
  return (1.0 + p.k) * specfun::quad_0_pi(f, rel_tol) / std::numbers::pi;
}

/// Capacity loss assembled from the conditional Rician shadowed kernel,
/// averaged over alpha in [0, 2 pi) with a periodic trapezoid rule whose
/// point count doubles until two passes agree.
inline double capacity_loss_assembled(const FtrParams& p, double rel_tol = 1e-12, std::size_t max_points = 1u << 16) {
  validate(p);
  auto g = [&](double alpha) {
    return rician_shadowed_L_alpha(p.k * (1.0 + p.delta * std::cos(alpha)), p.k, p.m) / log2_e -
           specfun::euler_gamma;
  };
  std::size_t n = 8;
  double sum = 0.0;
  for (std::size_t i = 0; i < n; ++i) sum += g(2.0 * std::numbers::pi * i / n);
  double previous = sum / n;
  while (n < max_points) {
    // the new points are the midpoints of the previous rule
    for (std::size_t i = 0; i < n; ++i) sum += g(2.0 * std::numbers::pi * (i + 0.5) / n);
    n *= 2;
    const double current = sum / n;
    if (std::abs(current - previous) <= rel_tol * std::max(std::abs(current), 1e-300) ||
        std::abs(current - previous) <= 1e-15) {
      return current;
    }
    previous = current;
  }
  throw convergence_error("capacity_loss_assembled: trapezoid rule did not settle", n);
}

}  // namespace crosscheck

}  // namespace ftr
