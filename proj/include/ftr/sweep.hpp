#pragma once

// Parameter sweeps behind the command-line tool: (m, delta) maps at fixed K,
// SNR curves, and the closed-form versus Monte Carlo validation table.

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <exception>
#include <mutex>
#include <numbers>
#include <ostream>
#include <string>
#include <string_view>
#include <system_error>
#include <thread>
#include <vector>

#include "ftr/classify.hpp"
#include "ftr/metrics.hpp"
#include "ftr/montecarlo.hpp"

namespace ftr::sweep {

/// Shortest round-trip-free rendering with 9 significant digits, independent
/// of the C locale.
inline std::string format_number(double x) {
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, x, std::chars_format::general, 9);
  if (ec != std::errc{}) return "nan";
  return std::string(buf, end);
}

inline std::vector<double> lin_space(double lo, double hi, std::size_t n) {
  std::vector<double> out(n);
  for (std::size_t i = 0; i < n; ++i) out[i] = n == 1 ? lo : lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n - 1);
  if (n > 1) out.back() = hi;
  return out;
}

inline std::vector<double> log_space(double lo, double hi, std::size_t n) {
  auto exps = lin_space(std::log(lo), std::log(hi), n);
  std::vector<double> out(n);
  std::transform(exps.begin(), exps.end(), out.begin(), [](double e) { return std::exp(e); });
  if (n > 0) out.front() = lo;
  if (n > 1) out.back() = hi;
  return out;
}

/// Run body(i) for i in [0, count) on up to `threads` workers.
template <class Body>
void parallel_for(std::size_t count, unsigned threads, Body&& body) {
  const unsigned workers = static_cast<unsigned>(
      std::min<std::size_t>(count, threads ? threads : std::max(1u, std::thread::hardware_concurrency())));
  if (workers <= 1) {
    for (std::size_t i = 0; i < count; ++i) body(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex mutex;
  {
    std::vector<std::jthread> pool;
    for (unsigned w = 0; w < workers; ++w) {
      pool.emplace_back([&] {
        try {
          for (std::size_t i = next++; i < count; i = next++) body(i);
        } catch (...) {
          std::lock_guard lock(mutex);
          if (!failure) failure = std::current_exception();
          next = count;
        }
      });
    }
  }
  if (failure) std::rethrow_exception(failure);
}

// ---------------------------------------------------------------------------
// Maps

struct MapOutputs {
  bool aof = true;
  bool po_db = true;
  bool dc_nats = true;
  bool classes = true;
};

struct GridSpec {
  double k_fixed = 1.0;
  double m_min = 0.1;
  double m_max = 5.0;
  std::size_t m_steps = 64;
  double delta_min = 0.0;
  double delta_max = 1.0;
  std::size_t delta_steps = 64;
  MapOutputs outputs;
};

inline void validate(const GridSpec& g) {
  if (!(std::isfinite(g.k_fixed) && g.k_fixed >= 0.0)) throw domain_error("grid: K must be finite and non-negative");
  if (!(g.m_min > 0.0 && g.m_min < g.m_max && std::isfinite(g.m_max))) throw domain_error("grid: need 0 < m_min < m_max");
  if (!(g.delta_min >= 0.0 && g.delta_max <= 1.0 && g.delta_min <= g.delta_max)) {
    throw domain_error("grid: need 0 <= delta_min <= delta_max <= 1");
  }
  if (g.m_steps < 2 || g.delta_steps < 2) throw domain_error("grid: need at least 2 steps per axis");
}

struct MapRow {
  double m = 0.0;
  double delta = 0.0;
  double aof = 0.0;
  double po_db = 0.0;
  double dc_nats = 0.0;
  HyperRayleighVerdict verdict;
};

/// Rows in row-major order, m outer and delta inner.
inline std::vector<MapRow> compute_map(const GridSpec& g, unsigned threads = 0) {
  validate(g);
  const auto ms = log_space(g.m_min, g.m_max, g.m_steps);
  const auto deltas = lin_space(g.delta_min, g.delta_max, g.delta_steps);
  std::vector<MapRow> rows(ms.size() * deltas.size());
  parallel_for(rows.size(), threads, [&](std::size_t i) {
    const FtrParams p{g.k_fixed, deltas[i % deltas.size()], ms[i / deltas.size()]};
    auto& row = rows[i];
    row.m = p.m;
    row.delta = p.delta;
    row.verdict = classify(resolve(p));
    row.aof = row.verdict.margins.aof + 1.0;
    row.po_db = *row.verdict.margins.power_offset_db;
    row.dc_nats = row.verdict.margins.capacity_loss_nats;
  });
  return rows;
}

inline void write_map_csv(std::ostream& out, const std::vector<MapRow>& rows, const MapOutputs& o) {
  out << "m,delta";
  if (o.aof) out << ",aof";
  if (o.po_db) out << ",po_db";
  if (o.dc_nats) out << ",dc_nats";
  if (o.classes) out << ",class,level";
  out << '\n';
  for (const auto& r : rows) {
    out << format_number(r.m) << ',' << format_number(r.delta);
    if (o.aof) out << ',' << format_number(r.aof);
    if (o.po_db) out << ',' << format_number(r.po_db);
    if (o.dc_nats) out << ',' << format_number(r.dc_nats);
    if (o.classes) out << ',' << sense_mask(r.verdict) << ',' << level_name(r.verdict);
    out << '\n';
  }
}

/// AoF boundary m*(delta) on the grid's delta axis.
inline void write_boundary_csv(std::ostream& out, const GridSpec& g) {
  out << "delta,m_star\n";
  for (double d : lin_space(g.delta_min, g.delta_max, g.delta_steps)) {
    out << format_number(d) << ',' << format_number(aof_boundary_m(d)) << '\n';
  }
}

// ---------------------------------------------------------------------------
// Curves

enum class CurveMetric { Op, Capacity };

struct CurveSpec {
  CurveMetric metric = CurveMetric::Op;
  double snr_db_min = 0.0;
  double snr_db_max = 40.0;
  std::size_t steps = 41;
  double threshold = 1.0;  // outage threshold gamma_th, linear
};

struct CurvePoint {
  double snr_db = 0.0;
  double value = 0.0;
  double rayleigh = 0.0;
};

inline std::vector<CurvePoint> compute_curve(const ResolvedModel& model, const CurveSpec& c) {
  if (!(c.snr_db_min <= c.snr_db_max) || !std::isfinite(c.snr_db_min) || !std::isfinite(c.snr_db_max)) {
    throw domain_error("curve: need a finite SNR range with min <= max");
  }
  if (c.steps < 1) throw domain_error("curve: need at least one step");
  if (!(c.threshold > 0.0)) throw domain_error("curve: threshold must be positive");
  std::vector<CurvePoint> out;
  out.reserve(c.steps);
  // the SNR-independent part is evaluated once
  const double offset = c.metric == CurveMetric::Op ? power_offset_linear(model) : capacity_loss_nats(model);
  for (double db : lin_space(c.snr_db_min, c.snr_db_max, c.steps)) {
    const double snr = std::pow(10.0, db / 10.0);
    if (c.metric == CurveMetric::Op) {
      const double ray = c.threshold / snr;
      out.push_back({db, ray * offset, ray});
    } else {
      const double ray = std::log2(snr) - rayleigh_capacity_loss_bits;
      out.push_back({db, ray - log2_e * offset, ray});
    }
  }
  return out;
}

inline void write_curve_csv(std::ostream& out, const std::vector<CurvePoint>& points) {
  out << "snr_db,value,rayleigh\n";
  for (const auto& p : points) {
    out << format_number(p.snr_db) << ',' << format_number(p.value) << ',' << format_number(p.rayleigh) << '\n';
  }
}

// ---------------------------------------------------------------------------
// Validation

inline constexpr std::uint64_t kDefaultValidateSeed = 20180101;
inline constexpr std::size_t kMinValidateSamples = 100'000;

struct ValidateConfig {
  std::size_t samples = 1'000'000;    // moments and capacity
  std::size_t tail_factor = 10;       // tail uses samples * tail_factor draws
  std::uint64_t seed = kDefaultValidateSeed;
  double tail_ratio = 1e-3;
  double min_expected_hits = 100.0;   // tail checks below this are skipped
  double capacity_snr_db = 40.0;
  double capacity_bias_bits = 0.005;  // asymptote bias allowed at 40 dB
  double sigmas = 4.0;
  unsigned threads = 0;
};

/// 12 points: K in {1, 10, 100} times m in {0.5, 1, 2, 5}, with delta
/// cycling through {0, 0.5, 1} so every (K, delta) and (m, delta) pair occurs.
inline std::vector<FtrParams> validate_preset(std::string_view name) {
  if (name == "default") {
    const double ks[] = {1.0, 10.0, 100.0};
    const double ms[] = {0.5, 1.0, 2.0, 5.0};
    const double deltas[] = {0.0, 0.5, 1.0};
    std::vector<FtrParams> out;
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 4; ++j) out.push_back({ks[i], deltas[(i + j) % 3], ms[j]});
    return out;
  }
  if (name == "small") return {{1.0, 1.0, 1.0}, {10.0, 0.5, 0.5}, {1.0, 0.0, 2.0}};
  throw domain_error("unknown validation preset: " + std::string(name));
}

enum class CheckStatus { Pass, Fail, Skipped, Info };

inline constexpr std::string_view to_string(CheckStatus s) {
  switch (s) {
    case CheckStatus::Pass: return "PASS";
    case CheckStatus::Fail: return "FAIL";
    case CheckStatus::Skipped: return "SKIP";
    case CheckStatus::Info: return "INFO";
  }
  return "?";
}

struct CheckResult {
  FtrParams params;
  std::string check;
  double closed_form = 0.0;
  double mc_value = 0.0;
  double std_error = 0.0;
  double budget = 0.0;  // allowed deterministic bias added to the sigma band
  CheckStatus status = CheckStatus::Pass;

  double sigma_distance() const {
    return std_error > 0.0 ? std::abs(mc_value - closed_form) / std_error
                           : (mc_value == closed_form ? 0.0 : INFINITY);
  }
};

inline bool all_passed(const std::vector<CheckResult>& results) {
  return std::none_of(results.begin(), results.end(), [](const CheckResult& r) { return r.status == CheckStatus::Fail; });
}

/// Closed forms against Monte Carlo at each point: normalized moments 1..3,
/// the tail CDF at tail_ratio, the ergodic capacity at capacity_snr_db, and
/// (informational) the mean log-SNR against the capacity loss.
inline std::vector<CheckResult> run_validate(const std::vector<FtrParams>& points, const ValidateConfig& cfg) {
  if (cfg.samples < kMinValidateSamples) throw domain_error("validate: need at least 10^5 samples");
  if (!(cfg.tail_ratio > 0.0 && cfg.tail_ratio <= kMaxTailRatio)) throw domain_error("validate: tail ratio must lie in (0, 1e-2]");
  const McOptions mc{cfg.threads};
  const double snr = std::pow(10.0, cfg.capacity_snr_db / 10.0);
  std::vector<CheckResult> out;
  for (std::size_t idx = 0; idx < points.size(); ++idx) {
    const auto model = resolve(points[idx]);
    const std::uint64_t seed = mix_seed(cfg.seed, 2 * idx);
    const std::uint64_t tail_seed = mix_seed(cfg.seed, 2 * idx + 1);
    auto bulk = mc_means<5>(model, cfg.samples, seed, [snr](double g) {
      return std::array{g, g * g, g * g * g, std::log2(1.0 + snr * g), std::log(g)};
    }, mc);

    auto judge = [&](std::string name, double closed, const McEstimate& est, double budget, bool informational) {
      CheckResult r{points[idx], std::move(name), closed, est.value, est.std_error, budget};
      const bool ok = std::abs(est.value - closed) <= cfg.sigmas * est.std_error + budget;
      r.status = informational ? CheckStatus::Info : (ok ? CheckStatus::Pass : CheckStatus::Fail);
      out.push_back(r);
    };

    for (unsigned k = 1; k <= 3; ++k) judge("M" + std::to_string(k), normalized_moment(model, k), bulk[k - 1], 0.0, false);

    const double aop = asymptotic_op(model, cfg.tail_ratio, 1.0);
    const std::size_t tail_n = cfg.samples * cfg.tail_factor;
    if (aop * static_cast<double>(tail_n) < cfg.min_expected_hits) {
      CheckResult r{points[idx], "tail", aop, 0.0, 0.0, 0.0, CheckStatus::Skipped};
      out.push_back(r);
    } else {
      judge("tail", aop, mc_tail_cdf(model, cfg.tail_ratio, tail_n, tail_seed, mc), 0.0, false);
    }

    judge("capacity", asymptotic_capacity_bits(model, snr), bulk[3], cfg.capacity_bias_bits, false);

    // E[ln g] = -(gamma_e + capacity loss) holds exactly, not only at high SNR
    McEstimate neg_log = bulk[4];
    neg_log.value = -neg_log.value - specfun::euler_gamma;
    judge("log_snr", capacity_loss_nats(model), neg_log, 0.0, true);
  }
  return out;
}

inline void write_validate_table(std::ostream& out, const std::vector<CheckResult>& results) {
  auto pad = [](std::string s, std::size_t w) {
    if (s.size() < w) s.insert(0, w - s.size(), ' ');
    return s;
  };
  out << pad("K", 6) << pad("delta", 7) << pad("m", 6) << pad("check", 10) << pad("closed", 17) << pad("mc", 17)
      << pad("stderr", 17) << pad("sigma", 10) << pad("status", 8) << '\n';
  for (const auto& r : results) {
    const bool skipped = r.status == CheckStatus::Skipped;
    out << pad(format_number(r.params.k), 6) << pad(format_number(r.params.delta), 7) << pad(format_number(r.params.m), 6)
        << pad(r.check, 10) << pad(format_number(r.closed_form), 17) << pad(skipped ? "-" : format_number(r.mc_value), 17)
        << pad(skipped ? "-" : format_number(r.std_error), 17)
        << pad(skipped ? "-" : format_number(std::round(r.sigma_distance() * 100.0) / 100.0), 10)
        << pad(std::string(to_string(r.status)), 8) << '\n';
  }
}

}  // namespace ftr::sweep
