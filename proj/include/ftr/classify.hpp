#pragma once

// Hyper-Rayleigh classification in the AoF, outage and capacity senses, and
// the four-level scale built from them.

#include <optional>
#include <string>
#include <string_view>

#include "ftr/metrics.hpp"
#include "ftr/models.hpp"

namespace ftr {

enum class Level { Full, Strong, Weak, None };

inline constexpr std::string_view to_string(Level level) {
  switch (level) {
    case Level::Full: return "Full";
    case Level::Strong: return "Strong";
    case Level::Weak: return "Weak";
    case Level::None: return "None";
  }
  return "unknown";
}

inline Level level_from_count(int senses) {
  switch (senses) {
    case 3: return Level::Full;
    case 2: return Level::Strong;
    case 1: return Level::Weak;
    default: return Level::None;
  }
}

struct Margins {
  double aof = 0.0;                       // AoF - 1
  std::optional<double> power_offset_db;  // absent for K -> infinity
  double capacity_loss_nats = 0.0;
};

/// Per-sense verdicts. A sense is empty when the limit case does not
/// determine it; the level is then empty as well.
struct HyperRayleighVerdict {
  std::optional<bool> aof_sense;
  std::optional<bool> op_sense;
  std::optional<bool> capacity_sense;
  std::optional<Level> level;
  Margins margins;
  std::optional<double> diversity_order;
};

inline constexpr double kDefaultClassifyTol = 1e-12;

/// A margin within tol of zero counts as not hyper-Rayleigh.
inline HyperRayleighVerdict classify(const ResolvedModel& model, double tol = kDefaultClassifyTol,
                                     const CapacityOptions& opt = {}) {
  if (!(tol >= 0.0)) throw domain_error("classify: tolerance must be non-negative");
  HyperRayleighVerdict v;
  v.margins.aof = aof(model) - 1.0;
  v.margins.capacity_loss_nats = capacity_loss_nats(model, opt);
  v.diversity_order = diversity_order(model);
  if (!model.limits.k_infinite) v.margins.power_offset_db = power_offset_db(model);

  v.aof_sense = v.margins.aof > tol;
  v.capacity_sense = v.margins.capacity_loss_nats > tol;
  if (v.diversity_order) {
    if (*v.diversity_order < 1.0) {
      v.op_sense = true;
    } else if (v.margins.power_offset_db) {
      v.op_sense = *v.margins.power_offset_db > tol;
    }
  }
  if (v.aof_sense && v.op_sense && v.capacity_sense) {
    v.level = level_from_count(int{*v.aof_sense} + int{*v.op_sense} + int{*v.capacity_sense});
  }
  return v;
}

inline HyperRayleighVerdict classify(const FtrParams& p, double tol = kDefaultClassifyTol) {
  return classify(resolve(p), tol);
}

inline HyperRayleighVerdict classify(const NamedModel& named, double tol = kDefaultClassifyTol) {
  return classify(resolve(named), tol);
}

/// Three-character sense mask in the order AoF, OP, capacity: the letter
/// when the sense holds, '-' when it does not, '?' when undetermined.
inline std::string sense_mask(const HyperRayleighVerdict& v) {
  auto mark = [](const std::optional<bool>& s, char yes) { return s ? (*s ? yes : '-') : '?'; };
  return {mark(v.aof_sense, 'a'), mark(v.op_sense, 'o'), mark(v.capacity_sense, 'c')};
}

inline std::string_view level_name(const HyperRayleighVerdict& v) {
  return v.level ? to_string(*v.level) : std::string_view{"Indeterminate"};
}

/// Shape parameter at which AoF = 1 for every K > 0:
/// m*(delta) = (1 + delta^2/2) / (1 - delta^2/2).
inline double aof_boundary_m(double delta) {
  if (!(delta >= 0.0 && delta <= 1.0)) throw domain_error("aof_boundary_m: delta must lie in [0, 1]");
  const double h = 0.5 * delta * delta;
  return (1.0 + h) / (1.0 - h);
}

}  // namespace ftr
