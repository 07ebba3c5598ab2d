#pragma once

// Monte Carlo estimators over simulated FTR channel draws. Samples are drawn
// in fixed-size blocks, each seeded from (seed, block index), and the block
// statistics are merged in block order, so results do not depend on the
// number of worker threads.

#include <algorithm>
#include <array>
#include <atomic>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <exception>
#include <mutex>
#include <optional>
#include <thread>
#include <vector>

#include "ftr/error.hpp"
#include "ftr/models.hpp"

namespace ftr {

struct McEstimate {
  double value = 0.0;
  double std_error = 0.0;
  std::size_t n = 0;
  std::uint64_t seed = 0;
  bool zero_hits = false;  // tail estimates only
};

struct McOptions {
  unsigned threads = 0;  // 0 picks the hardware concurrency
};

inline constexpr std::size_t kMcBlockSize = 65536;
inline constexpr std::size_t kMinMomentSamples = 10'000;
inline constexpr std::size_t kMinCapacitySamples = 100'000;
inline constexpr double kMaxTailRatio = 1e-2;

/// What the estimators draw from: a fading model or the unfaded channel.
class Channel {
 public:
  Channel(const ResolvedModel& model) : model_(model) {
    if (model.limits.k_infinite) throw unsupported_error("sampler requires finite K");
  }
  Channel(const FtrParams& p) : Channel(resolve(p)) {}

  static Channel no_fading() { return Channel(); }

  SnrSampler sampler(std::uint64_t seed) const {
    return model_ ? SnrSampler(*model_, seed) : SnrSampler::no_fading(seed);
  }

 private:
  Channel() = default;
  std::optional<ResolvedModel> model_;
};

namespace detail {

struct RunningStat {
  std::size_t n = 0;
  double mean = 0.0;
  double m2 = 0.0;

  void push(double x) {
    ++n;
    const double d = x - mean;
    mean += d / static_cast<double>(n);
    m2 += d * (x - mean);
  }

  void merge(const RunningStat& other) {
    if (other.n == 0) return;
    if (n == 0) {
      *this = other;
      return;
    }
    const double total = static_cast<double>(n + other.n);
    const double d = other.mean - mean;
    mean += d * static_cast<double>(other.n) / total;
    m2 += other.m2 + d * d * static_cast<double>(n) * static_cast<double>(other.n) / total;
    n += other.n;
  }

  double std_error() const { return n > 1 ? std::sqrt(m2 / static_cast<double>(n - 1) / static_cast<double>(n)) : 0.0; }
};

inline unsigned worker_count(const McOptions& opt, std::size_t blocks) {
  unsigned t = opt.threads ? opt.threads : std::max(1u, std::thread::hardware_concurrency());
  return static_cast<unsigned>(std::min<std::size_t>(t, blocks));
}

}  // namespace detail

/// Sample means of N functions of the normalized SNR g = gamma / mean_gamma,
/// all computed from one stream of n draws.
template <std::size_t N, class F>
std::array<McEstimate, N> mc_means(const Channel& channel, std::size_t n, std::uint64_t seed, F&& f,
                                   const McOptions& opt = {}) {
  if (n == 0) throw domain_error("mc_means: need at least one sample");
  const std::size_t blocks = (n + kMcBlockSize - 1) / kMcBlockSize;
  std::vector<std::array<detail::RunningStat, N>> partial(blocks);

  auto run_block = [&](std::size_t b) {
    auto sampler = channel.sampler(mix_seed(seed, b));
    const std::size_t count = std::min(kMcBlockSize, n - b * kMcBlockSize);
    auto& stats = partial[b];
    for (std::size_t i = 0; i < count; ++i) {
      const std::array<double, N> values = f(sampler.next());
      for (std::size_t j = 0; j < N; ++j) stats[j].push(values[j]);
    }
  };

  const unsigned workers = detail::worker_count(opt, blocks);
  if (workers <= 1) {
    for (std::size_t b = 0; b < blocks; ++b) run_block(b);
  } else {
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    for (unsigned w = 0; w < workers; ++w) {
      pool.emplace_back([&] {
        try {
          for (std::size_t b = next++; b < blocks; b = next++) run_block(b);
        } catch (...) {
          std::lock_guard lock(failure_mutex);
          if (!failure) failure = std::current_exception();
          next = blocks;
        }
      });
    }
    pool.clear();
    if (failure) std::rethrow_exception(failure);
  }

  std::array<detail::RunningStat, N> total{};
  for (const auto& block : partial)
    for (std::size_t j = 0; j < N; ++j) total[j].merge(block[j]);
  std::array<McEstimate, N> out{};
  for (std::size_t j = 0; j < N; ++j) out[j] = {total[j].mean, total[j].std_error(), n, seed};
  return out;
}

/// Sample mean of (gamma / mean_gamma)^k.
inline McEstimate mc_normalized_moment(const Channel& channel, unsigned k, std::size_t n, std::uint64_t seed,
                                       const McOptions& opt = {}) {
  if (n < kMinMomentSamples) throw domain_error("mc_normalized_moment: need at least 10^4 samples");
  if (k == 0) return {1.0, 0.0, n, seed};
  const double order = static_cast<double>(k);
  return mc_means<1>(channel, n, seed, [order](double g) { return std::array{std::pow(g, order)}; }, opt)[0];
}

/// Normalized moments of order 1, 2 and 3 from a single stream.
inline std::array<McEstimate, 3> mc_moments_1_to_3(const Channel& channel, std::size_t n, std::uint64_t seed,
                                                   const McOptions& opt = {}) {
  if (n < kMinMomentSamples) throw domain_error("mc_moments: need at least 10^4 samples");
  return mc_means<3>(channel, n, seed, [](double g) { return std::array{g, g * g, g * g * g}; }, opt);
}

/// Fraction of draws with gamma / mean_gamma below ratio, with the binomial
/// standard error. Zero hits give an estimate of 0 and set zero_hits.
inline McEstimate mc_tail_cdf(const Channel& channel, double ratio, std::size_t n, std::uint64_t seed,
                              const McOptions& opt = {}) {
  if (!(ratio > 0.0 && ratio <= kMaxTailRatio)) throw domain_error("mc_tail_cdf: ratio must lie in (0, 1e-2]");
  auto est = mc_means<1>(channel, n, seed, [ratio](double g) { return std::array{g < ratio ? 1.0 : 0.0}; }, opt)[0];
  const double p = est.value;
  est.std_error = std::sqrt(p * (1.0 - p) / static_cast<double>(n));
  est.zero_hits = p == 0.0;
  return est;
}

/// Sample mean of log2(1 + gamma) at the given mean SNR (linear scale).
inline McEstimate mc_ergodic_capacity(const Channel& channel, double mean_snr, std::size_t n, std::uint64_t seed,
                                      const McOptions& opt = {}) {
  if (!(mean_snr > 0.0)) throw domain_error("mc_ergodic_capacity: mean SNR must be positive");
  if (n < kMinCapacitySamples) throw domain_error("mc_ergodic_capacity: need at least 10^5 samples");
  return mc_means<1>(channel, n, seed, [mean_snr](double g) { return std::array{std::log2(1.0 + mean_snr * g)}; },
                     opt)[0];
}

/// Sample mean of ln(gamma / mean_gamma). Its negative minus gamma_e
/// estimates the capacity loss in nats without any high-SNR bias.
inline McEstimate mc_log_snr(const Channel& channel, std::size_t n, std::uint64_t seed, const McOptions& opt = {}) {
  if (n < kMinCapacitySamples) throw domain_error("mc_log_snr: need at least 10^5 samples");
  return mc_means<1>(channel, n, seed, [](double g) { return std::array{std::log(g)}; }, opt)[0];
}

}  // namespace ftr
