#pragma once

#include <cstdint>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

#include "conloc/types.hpp"

namespace conloc::sim {

// Malformed scenario configuration; the message names the offending key.
struct ScenarioError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Static parameters of one simulated link. Defaults describe a slack link:
// effectively unlimited, flat, noiseless, never degraded.
struct LinkParams {
  double capacity_bps = 1e12;
  double diurnal_amplitude = 0;  // in [0, 1)
  double noise_sigma = 0;        // lognormal sigma applied when this link limits
  int flows_base = 1;
  int flows_peak_extra = 0;  // extra competing flows at full diurnal load
  double plant_p = 0;        // per-slot probability of a degradation episode
  double plant_depth = 0.5;  // capacity multiplier during an episode, in (0, 1]
  int64_t plant_slot_s = 10800;
};

struct GroupSpec {
  std::string name;
  int connections = 0;
  Technology technology = Technology::OTHER;
  std::vector<std::string> isps;  // assigned round-robin
  double tier_bps = 0;
  LinkParams initial;  // one instance per connection
  LinkParams middle;   // middle_count shared instances, assigned i mod count
  int middle_count = 1;
};

struct Scenario {
  uint64_t seed = 1;
  YearMonth start_month{2013, 3};
  int n_months = 1;
  int64_t cadence_s = 7200;
  int64_t page_bytes = 1000000;
  int64_t site_lag_s = 30;  // fetch i starts (i+1) * lag after the benchmark
  int32_t utc_offset_s = 0;
  double tis_tau = 0.2;  // tight_fraction threshold for the tis_true label
  double rc_q = 0.8;     // recurrent-congestion labeling thresholds
  double rc_t = 0.2;
  double drop_prob = 0;      // independent loss of any single measurement
  double burst_factor = 1;   // first-five-interval rate multiplier
  LinkParams core;           // single shared link
  LinkParams edge;           // template stamped once per website
  std::vector<GroupSpec> groups;
};

// Plain-text `key = value` format, `#` comments, dotted keys. Unknown keys,
// unparsable values and out-of-range parameters all throw ScenarioError.
Scenario parse_scenario(std::istream& in, std::string_view filename);

}  // namespace conloc::sim
