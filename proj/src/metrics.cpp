#include "egw/metrics.hpp"

#include <cmath>

namespace egw {

ConfusionCounts confusion(const Graph& estimate, const Graph& truth) {
  if (estimate.p() != truth.p())
    throw Error(Errc::dimension_mismatch, "confusion: graphs have different vertex counts");
  ConfusionCounts c;
  for (int i = 0; i < truth.p(); ++i)
    for (int j = i + 1; j < truth.p(); ++j) {
      const bool est = estimate.has_edge(i, j);
      const bool tru = truth.has_edge(i, j);
      if (tru) (est ? c.tp : c.fn) += 1;
      else (est ? c.fp : c.tn) += 1;
    }
  return c;
}

RecoveryScores sp_se_mcc(const ConfusionCounts& c) {
  RecoveryScores r;
  const double tp = double(c.tp), tn = double(c.tn), fp = double(c.fp), fn = double(c.fn);
  if (tn + fp > 0) r.sp = tn / (tn + fp);
  if (tp + fn > 0) r.se = tp / (tp + fn);
  const double denom = (tp + fp) * (tp + fn) * (tn + fp) * (tn + fn);
  r.mcc = denom > 0 ? (tp * tn - fp * fn) / std::sqrt(denom) : 0.0;
  return r;
}

RelativeError rel_error_lognorm(double log_i_true, double log_i_hat) {
  RelativeError e;
  e.abs_diff = std::abs(log_i_true - log_i_hat);
  e.re = e.abs_diff == 0.0 ? 0.0 : e.abs_diff / std::abs(log_i_true);
  e.unreliable = std::abs(log_i_true) < 1.0;
  return e;
}

}  // namespace egw
