#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "conloc/timeutil.hpp"

namespace conloc {

using timeutil::EpochSeconds;
using timeutil::YearMonth;

enum class Technology { DSL, CABLE, OTHER };

std::string_view technology_name(Technology t);
// Case-insensitive; any unrecognized non-empty token maps to OTHER.
std::optional<Technology> parse_technology(std::string_view s);

// The ten front-page download targets, in canonical column order.
inline constexpr std::array<std::string_view, 10> kSites = {
    "cnn",  "youtube",   "msn",      "amazon", "yahoo",
    "ebay", "wikipedia", "facebook", "google", "netflix"};

inline constexpr int kSiteCount = 10;

// Accepts the canonical id or a URL-ish variant (scheme, www., .com/.org,
// trailing slash are stripped; case-insensitive). Returns the site index.
std::optional<int> site_index(std::string_view raw);

// Where a parsed record came from, for reject reporting.
struct SourceRef {
  std::string file;
  long line = 0;
};

struct Connection {
  std::string unit_id;
  std::string isp_id;
  Technology technology = Technology::OTHER;
  std::optional<double> advertised_tier_bps;  // > 0 when present
  int32_t utc_offset_s = 0;                   // shifts day boundaries only
};

// One 30-second download benchmark: bytes moved in six 5-second intervals.
struct BenchmarkRun {
  std::string unit_id;
  EpochSeconds start_time = 0;
  std::array<int64_t, 6> interval_bytes{};
  SourceRef source;
};

struct WebsiteFetch {
  std::string unit_id;
  EpochSeconds start_time = 0;
  int site = 0;  // index into kSites
  double total_time_s = 0;
  std::optional<int64_t> total_bytes;
  SourceRef source;
};

// All validated measurements of one connection in one UTC calendar month.
// The unit of analysis for every downstream verdict.
struct ConnectionMonth {
  Connection connection;
  YearMonth ym;
  std::vector<BenchmarkRun> benchmark_runs;    // time-ordered
  std::vector<WebsiteFetch> website_fetches;   // time-ordered
  std::optional<double> inferred_tier_bps;     // set iff tier stable and inferable
  bool tier_changed = false;
};

}  // namespace conloc
