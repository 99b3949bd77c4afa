#pragma once

#include "egw/graph.hpp"

#include <cstdint>

namespace egw {

/// Edge-presence agreement over the p(p−1)/2 off-diagonal positions;
/// "positive" means the edge is present in the truth.
struct ConfusionCounts {
  std::int64_t tp = 0;
  std::int64_t tn = 0;
  std::int64_t fp = 0;
  std::int64_t fn = 0;

  std::int64_t total() const noexcept { return tp + tn + fp + fn; }
};

ConfusionCounts confusion(const Graph& estimate, const Graph& truth);

struct RecoveryScores {
  double sp = 1.0;
  double se = 1.0;
  double mcc = 0.0;
};

/// SP and SE default to 1 with an empty denominator; MCC to 0 when any
/// factor of its denominator vanishes.
RecoveryScores sp_se_mcc(const ConfusionCounts& c);

struct RelativeError {
  double re = 0.0;
  double abs_diff = 0.0;
  /// |log I| < 1: re is dominated by the small denominator.
  bool unreliable = false;
};

/// |log I − log Î| / |log I|.
RelativeError rel_error_lognorm(double log_i_true, double log_i_hat);

}  // namespace egw
