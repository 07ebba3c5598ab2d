#pragma once

// FTR parameterization, the named special cases and their reduction to FTR
// parameters, and the channel sampler used as a Monte Carlo oracle.

#include <cmath>
#include <complex>
#include <cstdint>
#include <limits>
#include <numbers>
#include <optional>
#include <random>
#include <string>
#include <string_view>
#include <vector>

#include "ftr/error.hpp"

namespace ftr {

/// Fading parameters: specular-to-diffuse power ratio K, specular balance
/// delta and the Gamma shape m of the specular fluctuation.
struct FtrParams {
  double k = 0.0;
  double delta = 0.0;
  double m = 1.0;
};

/// Which parameters sit at their infinite limit. A flagged parameter is
/// stored as +infinity in FtrParams.
struct LimitFlags {
  bool m_infinite = false;
  bool k_infinite = false;

  bool any() const { return m_infinite || k_infinite; }
  friend bool operator==(const LimitFlags&, const LimitFlags&) = default;
};

struct ResolvedModel {
  FtrParams params;
  LimitFlags limits;

  bool finite() const { return !limits.any(); }
};

inline void validate(const FtrParams& p, const LimitFlags& limits = {}) {
  if (limits.k_infinite ? !(p.k == std::numeric_limits<double>::infinity())
                        : !(std::isfinite(p.k) && p.k >= 0.0)) {
    throw domain_error("K must be finite and non-negative");
  }
  if (!(std::isfinite(p.delta) && p.delta >= 0.0 && p.delta <= 1.0)) throw domain_error("delta must lie in [0, 1]");
  if (limits.m_infinite ? !(p.m == std::numeric_limits<double>::infinity())
                        : !(std::isfinite(p.m) && p.m > 0.0)) {
    throw domain_error("m must be finite and positive");
  }
}

enum class ModelTag { Ftr, Twdp, Ftw, TwoWave, RicianShadowed, Rician, Hoyt, Rayleigh };

inline constexpr std::string_view to_string(ModelTag tag) {
  switch (tag) {
    case ModelTag::Ftr: return "ftr";
    case ModelTag::Twdp: return "twdp";
    case ModelTag::Ftw: return "ftw";
    case ModelTag::TwoWave: return "two-wave";
    case ModelTag::RicianShadowed: return "rician-shadowed";
    case ModelTag::Rician: return "rician";
    case ModelTag::Hoyt: return "hoyt";
    case ModelTag::Rayleigh: return "rayleigh";
  }
  return "unknown";
}

inline std::optional<ModelTag> parse_model_tag(std::string_view name) {
  for (auto tag : {ModelTag::Ftr, ModelTag::Twdp, ModelTag::Ftw, ModelTag::TwoWave, ModelTag::RicianShadowed,
                   ModelTag::Rician, ModelTag::Hoyt, ModelTag::Rayleigh}) {
    if (to_string(tag) == name) return tag;
  }
  return std::nullopt;
}

/// A special case of the FTR family in its native parameters. Fields that a
/// tag does not use are ignored.
struct NamedModel {
  ModelTag tag = ModelTag::Rayleigh;
  double k = 0.0;
  double delta = 0.0;
  double m = 1.0;
  double q = 1.0;  // Hoyt shape, q in (0, 1]

  static NamedModel ftr(double k, double delta, double m) { return {ModelTag::Ftr, k, delta, m}; }
  static NamedModel twdp(double k, double delta) { return {ModelTag::Twdp, k, delta}; }
  static NamedModel ftw(double delta, double m) { return {ModelTag::Ftw, 0.0, delta, m}; }
  static NamedModel two_wave(double delta) { return {ModelTag::TwoWave, 0.0, delta}; }
  static NamedModel rician_shadowed(double k, double m) { return {ModelTag::RicianShadowed, k, 0.0, m}; }
  static NamedModel rician(double k) { return {ModelTag::Rician, k}; }
  static NamedModel hoyt(double q) { return {ModelTag::Hoyt, 0.0, 0.0, 1.0, q}; }
  static NamedModel rayleigh() { return {}; }
};

/// Reduce a named model to FTR parameters plus limit flags.
///
/// Hoyt is embedded at delta = 1, m = 1 with K = (1 - q^2) / (2 q^2), which
/// inverts q^2 = (1 + K(1 - delta)) / (1 + K(1 + delta)).
inline ResolvedModel resolve(const NamedModel& named) {
  constexpr double inf = std::numeric_limits<double>::infinity();
  ResolvedModel out;
  switch (named.tag) {
    case ModelTag::Ftr: out = {{named.k, named.delta, named.m}, {}}; break;
    case ModelTag::Twdp: out = {{named.k, named.delta, inf}, {.m_infinite = true}}; break;
    case ModelTag::Ftw: out = {{inf, named.delta, named.m}, {.k_infinite = true}}; break;
    case ModelTag::TwoWave: out = {{inf, named.delta, inf}, {true, true}}; break;
    case ModelTag::RicianShadowed: out = {{named.k, 0.0, named.m}, {}}; break;
    case ModelTag::Rician: out = {{named.k, 0.0, inf}, {.m_infinite = true}}; break;
    case ModelTag::Hoyt: {
      if (!(named.q > 0.0 && named.q <= 1.0)) throw domain_error("Hoyt q must lie in (0, 1]");
      const double q2 = named.q * named.q;
      out = {{(1.0 - q2) / (2.0 * q2), 1.0, 1.0}, {}};
      break;
    }
    case ModelTag::Rayleigh: out = {{0.0, 0.0, 1.0}, {}}; break;
  }
  validate(out.params, out.limits);
  return out;
}

inline ResolvedModel resolve(const FtrParams& p) {
  validate(p);
  return {p, {}};
}

/// Specular amplitudes for the normalization 2 sigma^2 = 1, with V1 >= V2.
struct SpecularAmplitudes {
  double v1 = 0.0;
  double v2 = 0.0;
  double sigma2 = 0.5;
};

inline SpecularAmplitudes solve_amplitudes(const FtrParams& p) {
  if (!(std::isfinite(p.k) && p.k >= 0.0)) throw domain_error("solve_amplitudes: K must be finite and non-negative");
  if (!(p.delta >= 0.0 && p.delta <= 1.0)) throw domain_error("solve_amplitudes: delta must lie in [0, 1]");
  const double root = std::sqrt((1.0 - p.delta) * (1.0 + p.delta));
  // V2^2 = K (1 - root) / 2 written as K delta^2 / (2 (1 + root)) to avoid cancellation.
  return {std::sqrt(0.5 * p.k * (1.0 + root)), std::sqrt(0.5 * p.k * p.delta * p.delta / (1.0 + root)), 0.5};
}

/// Recover (K, delta) from amplitudes under 2 sigma^2 = 1.
inline FtrParams reconstruct(const SpecularAmplitudes& a, double m) {
  const double power = a.v1 * a.v1 + a.v2 * a.v2;
  return {power / (2.0 * a.sigma2), power > 0.0 ? 2.0 * a.v1 * a.v2 / power : 0.0, m};
}

// ---------------------------------------------------------------------------
// Random variates

/// SplitMix64 finalizer applied to (master, index); used to derive
/// independent per-task seeds from one master seed.
inline std::uint64_t mix_seed(std::uint64_t master, std::uint64_t index) {
  std::uint64_t z = master + 0x9E3779B97F4A7C15ull * (index + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

/// Uniform, normal and gamma variates on top of mt19937_64. The transforms
/// are written out here so streams are identical across standard libraries.
class Variates {
 public:
  explicit Variates(std::uint64_t seed) : engine_(seed) {}

  /// Uniform on [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  double normal() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    const double radius = std::sqrt(-2.0 * std::log1p(-uniform()));
    const double angle = 2.0 * std::numbers::pi * uniform();
    spare_ = radius * std::sin(angle);
    has_spare_ = true;
    return radius * std::cos(angle);
  }

  /// Gamma(shape, 1) by Marsaglia-Tsang; shapes below one are boosted by
  /// Gamma(a) = Gamma(a + 1) U^{1/a}.
  double gamma(double shape) {
    if (shape < 1.0) {
      const double boosted = gamma(shape + 1.0);
      return boosted * std::exp(std::log1p(-uniform()) / shape);
    }
    const double d = shape - 1.0 / 3.0;
    const double c = 1.0 / std::sqrt(9.0 * d);
    for (;;) {
      double x;
      double v;
      do {
        x = normal();
        v = 1.0 + c * x;
      } while (v <= 0.0);
      v = v * v * v;
      const double u = uniform();
      const double x2 = x * x;
      if (u < 1.0 - 0.0331 * x2 * x2) return d * v;
      if (std::log(u) < 0.5 * x2 + d * (1.0 - v + std::log(v))) return d * v;
    }
  }

 private:
  std::mt19937_64 engine_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

/// Draws normalized SNR values gamma / mean_gamma = |r|^2 / E|r|^2 from
///   r = sqrt(zeta) V1 e^{j phi1} + sqrt(zeta) V2 e^{j phi2} + V_d
/// with zeta ~ Gamma(m, 1/m), uniform phases and a circularly symmetric
/// diffuse term of per-axis variance 1/2. With m at infinity zeta is
/// identically one. K at infinity cannot be sampled.
class SnrSampler {
 public:
  SnrSampler(const ResolvedModel& model, std::uint64_t seed) : rng_(seed) {
    if (model.limits.k_infinite) throw unsupported_error("sampler requires finite K");
    validate(model.params, model.limits);
    mode_ = model.limits.m_infinite ? Mode::UnitLos : Mode::Fluctuating;
    amplitudes_ = solve_amplitudes({model.params.k, model.params.delta, 1.0});
    m_ = model.params.m;
    norm_ = 1.0 / (1.0 + model.params.k);
  }

  /// Degenerate sampler that always returns 1 (no fading).
  static SnrSampler no_fading(std::uint64_t seed) { return SnrSampler(seed); }

  double next() {
    if (mode_ == Mode::NoFading) return 1.0;
    const double los = mode_ == Mode::UnitLos ? 1.0 : std::sqrt(rng_.gamma(m_) / m_);
    const double phi1 = 2.0 * std::numbers::pi * rng_.uniform();
    const double phi2 = 2.0 * std::numbers::pi * rng_.uniform();
    const double diffuse_amp = std::sqrt(-std::log1p(-rng_.uniform()));
    const double diffuse_phase = 2.0 * std::numbers::pi * rng_.uniform();
    const double re = los * (amplitudes_.v1 * std::cos(phi1) + amplitudes_.v2 * std::cos(phi2)) +
                      diffuse_amp * std::cos(diffuse_phase);
    const double im = los * (amplitudes_.v1 * std::sin(phi1) + amplitudes_.v2 * std::sin(phi2)) +
                      diffuse_amp * std::sin(diffuse_phase);
    return (re * re + im * im) * norm_;
  }

 private:
  enum class Mode { Fluctuating, UnitLos, NoFading };

  explicit SnrSampler(std::uint64_t seed) : rng_(seed), mode_(Mode::NoFading) {}

  Variates rng_;
  Mode mode_ = Mode::Fluctuating;
  SpecularAmplitudes amplitudes_;
  double m_ = 1.0;
  double norm_ = 1.0;
};

/// n SNR draws at the given mean SNR.
inline std::vector<double> sample_snr(const ResolvedModel& model, double mean_snr, std::size_t n, std::uint64_t seed) {
  if (!(mean_snr > 0.0)) throw domain_error("sample_snr: mean SNR must be positive");
  if (n == 0) throw domain_error("sample_snr: need at least one sample");
  SnrSampler sampler(model, seed);
  std::vector<double> out(n);
  for (auto& v : out) v = mean_snr * sampler.next();
  return out;
}

inline std::vector<double> sample_snr(const FtrParams& p, double mean_snr, std::size_t n, std::uint64_t seed) {
  return sample_snr(resolve(p), mean_snr, n, seed);
}

}  // namespace ftr
