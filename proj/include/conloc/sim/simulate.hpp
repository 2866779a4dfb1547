#pragma once

#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "conloc/sim/rng.hpp"
#include "conloc/sim/scenario.hpp"
#include "conloc/types.hpp"

namespace conloc::sim {

enum class Region { INITIAL_SEGMENT, MIDDLE_MILE, PUBLIC_CORE, WEBSITE_EDGE };

// One simulated link: static parameters plus a stateless episode process
// (hash-indexed by time slot, so shared links degrade identically for every
// connection crossing them).
struct LinkProcess {
  std::string link_id;
  Region region = Region::PUBLIC_CORE;
  LinkParams params;
  uint64_t episode_key = 0;
};

// Weekday-evening utilization bump: a raised cosine centered at 21:00 local
// time, zero outside 17:00-01:00, at half height over the 19:00-23:00 peak
// window. Weekends carry no bump.
struct DiurnalModel {
  int32_t utc_offset_s = 0;
  double load(EpochSeconds t) const;
};

// Whether the link is inside a degradation episode at time t.
bool plant_active(const LinkProcess& link, EpochSeconds t);

// capacity x (1 - amplitude x load) x episode depth / competing flows.
double available_share(const LinkProcess& link, EpochSeconds t, const DiurnalModel& diurnal);

struct PathState {
  double min_share = 0;
  double noise_sigma = 0;        // sigma of the limiting link
  bool initial_limiting = false; // an initial-segment link attains the minimum
};

using Path = std::vector<const LinkProcess*>;

PathState path_state(const Path& path, EpochSeconds t, const DiurnalModel& diurnal);

// Minimum available share across the path, times mean-one lognormal noise
// drawn with the limiting link's sigma, clamped to the subscription tier.
double path_throughput(const Path& path, EpochSeconds t, double tier_bps, Rng& rng,
                       const DiurnalModel& diurnal);

// Ground-truth labels for one simulated connection-month.
struct TruthRow {
  std::string unit_id;
  YearMonth ym;
  double tight_fraction = 0;  // share of sample times with a tight initial segment
  bool tis_true = false;      // tight_fraction >= tau
  bool rc_true = false;       // recurrent congestion against the true tier
};

struct SimOutput {
  std::vector<Connection> connections;
  std::vector<BenchmarkRun> benchmark_runs;
  std::vector<WebsiteFetch> website_fetches;
  std::vector<TruthRow> truth;
};

// Deterministic: identical (scenario, seed) gives bit-identical output.
// Connections draw from independent substreams, so per-connection results do
// not depend on simulation order.
SimOutput simulate(const Scenario& sc);

void write_truth_csv(std::ostream& out, std::span<const TruthRow> rows);
// Throws IngestError on malformed content.
std::vector<TruthRow> read_truth_csv(std::istream& in, std::string_view filename);

}  // namespace conloc::sim
