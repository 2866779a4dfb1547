#include "conloc/metrics.hpp"

#include <algorithm>
#include <stdexcept>
#include <vector>

namespace conloc::metrics {

std::string_view exclusion_name(Exclusion e) {
  switch (e) {
    case Exclusion::TIER_CHANGED:
      return "tier_changed";
    case Exclusion::TIER_UNDETERMINED:
      return "tier_undetermined";
    case Exclusion::NO_SAMPLES:
      return "no_samples";
  }
  return "unknown";
}

double sustained_throughput(const BenchmarkRun& run) {
  return static_cast<double>(run.interval_bytes[5]) * 8.0 / 5.0;
}

std::optional<TierEstimate> infer_tier(const ConnectionMonth& cm, int min_days) {
  TierEstimate est;
  for (const auto& run : cm.benchmark_runs) {
    int64_t day = timeutil::day_index(run.start_time, cm.connection.utc_offset_s);
    double bps = sustained_throughput(run);
    auto [it, inserted] = est.daily_maxima.try_emplace(day, bps);
    if (!inserted) it->second = std::max(it->second, bps);
  }
  if (est.daily_maxima.empty() || static_cast<int>(est.daily_maxima.size()) < min_days)
    return std::nullopt;

  double max_v = est.daily_maxima.begin()->second;
  double min_v = max_v;
  double sum = 0;
  for (const auto& [day, v] : est.daily_maxima) {
    max_v = std::max(max_v, v);
    min_v = std::min(min_v, v);
    sum += v;
  }
  double mean = sum / static_cast<double>(est.daily_maxima.size());
  est.changed = (max_v - min_v) > 0.5 * mean;
  if (!est.changed) est.tier_bps = mean;
  return est;
}

RcVerdict recurrent_congestion(std::span<const double> samples, double tier_bps,
                               const RcParams& params) {
  if (samples.empty()) throw std::invalid_argument("recurrent_congestion: no samples");
  if (!(tier_bps > 0)) throw std::invalid_argument("recurrent_congestion: tier must be positive");

  int64_t below = 0;
  for (double x : samples) {
    if (x / tier_bps < params.q) ++below;
  }
  RcVerdict v;
  v.n_samples = static_cast<int64_t>(samples.size());
  v.below_fraction = static_cast<double>(below) / static_cast<double>(v.n_samples);
  v.congested = v.below_fraction > params.t;
  v.tier_bps = tier_bps;
  return v;
}

std::variant<RcVerdict, Exclusion> canonical_rc(const ConnectionMonth& cm,
                                                const RcParams& params, int min_days) {
  auto tier = infer_tier(cm, min_days);
  if (!tier) return Exclusion::TIER_UNDETERMINED;
  if (tier->changed) return Exclusion::TIER_CHANGED;
  if (cm.benchmark_runs.empty()) return Exclusion::NO_SAMPLES;

  std::vector<double> samples;
  samples.reserve(cm.benchmark_runs.size());
  for (const auto& run : cm.benchmark_runs) samples.push_back(sustained_throughput(run));
  return recurrent_congestion(samples, *tier->tier_bps, params);
}

}  // namespace conloc::metrics
