#pragma once

#include <map>
#include <optional>
#include <span>
#include <variant>

#include "conloc/types.hpp"

namespace conloc::metrics {

// Fraction-of-tier / fraction-of-samples thresholds. Canonical values (0.8, 0.2).
struct RcParams {
  double q = 0.8;
  double t = 0.2;
};

struct RcVerdict {
  double below_fraction = 0;  // empirical share of samples below q * tier
  bool congested = false;     // below_fraction > t, strictly
  int64_t n_samples = 0;
  double tier_bps = 0;
};

struct TierEstimate {
  bool changed = false;
  std::optional<double> tier_bps;          // present iff !changed
  std::map<int64_t, double> daily_maxima;  // day index -> max sustained bps
};

enum class Exclusion { TIER_CHANGED, TIER_UNDETERMINED, NO_SAMPLES };

std::string_view exclusion_name(Exclusion e);

inline constexpr int kDefaultMinTierDays = 15;

// Rate over the final 5-second interval only; earlier intervals can carry
// burst-technology inflation and are ignored.
double sustained_throughput(const BenchmarkRun& run);

// Daily maxima of sustained throughput; a spread of more than half the mean
// marks a tier change, otherwise the tier is the mean of the daily maxima.
// Fewer than min_days distinct days of data: nullopt (undetermined).
std::optional<TierEstimate> infer_tier(const ConnectionMonth& cm,
                                       int min_days = kDefaultMinTierDays);

// Counts samples with x / tier_bps < q (strict); congested iff the fraction
// exceeds t (strict). Throws std::invalid_argument on empty samples or a
// non-positive tier.
RcVerdict recurrent_congestion(std::span<const double> samples, double tier_bps,
                               const RcParams& params);

// Month-level verdict at the given params (canonical by default) against the
// inferred tier. Months with a changed or undetermined tier are excluded.
std::variant<RcVerdict, Exclusion> canonical_rc(const ConnectionMonth& cm,
                                                const RcParams& params = {},
                                                int min_days = kDefaultMinTierDays);

}  // namespace conloc::metrics
