#pragma once

#include <iosfwd>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "conloc/types.hpp"

namespace conloc {

enum class Schema { BENCHMARK, WEBSITE, CONNECTIONS };

// Unreadable stream or missing/unexpected header row.
struct IngestError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// One quarantined row. Parsing never aborts on a bad row.
struct Reject {
  std::string file;
  long line = 0;
  std::string reason;
};

struct BenchmarkIngest {
  std::vector<BenchmarkRun> records;
  std::vector<Reject> rejects;
};

struct WebsiteIngest {
  std::vector<WebsiteFetch> records;
  std::vector<Reject> rejects;
};

struct ConnectionsIngest {
  std::vector<Connection> records;
  std::vector<Reject> rejects;
};

inline constexpr std::string_view kBenchmarkHeader =
    "unit_id,start_time_iso8601,b0,b1,b2,b3,b4,b5";
inline constexpr std::string_view kWebsiteHeader =
    "unit_id,start_time_iso8601,site_id,total_time_s,total_bytes";
inline constexpr std::string_view kConnectionsHeader =
    "unit_id,isp_id,technology,advertised_tier_bps";
// connections.csv may carry one extra column shifting per-unit day boundaries
inline constexpr std::string_view kConnectionsHeaderWithOffset =
    "unit_id,isp_id,technology,advertised_tier_bps,utc_offset_s";
inline constexpr std::string_view kRejectsHeader = "file,line,reason";

BenchmarkIngest ingest_benchmarks(std::istream& in, std::string_view filename);
WebsiteIngest ingest_websites(std::istream& in, std::string_view filename);
ConnectionsIngest ingest_connections(std::istream& in, std::string_view filename);

void write_benchmarks(std::ostream& out, std::span<const BenchmarkRun> records);
void write_websites(std::ostream& out, std::span<const WebsiteFetch> records);
void write_connections(std::ostream& out, std::span<const Connection> records);
void write_rejects(std::ostream& out, std::span<const Reject> rejects);

struct Grouping {
  std::vector<ConnectionMonth> months;  // sorted by (unit_id, year, month)
  std::vector<Reject> rejects;          // records whose unit is unknown
};

// Every input record lands in exactly one ConnectionMonth or in rejects.
// Groups are keyed by (unit_id, UTC year, UTC month).
Grouping group_by_month(std::span<const BenchmarkRun> runs,
                        std::span<const WebsiteFetch> fetches,
                        std::span<const Connection> connections);

}  // namespace conloc
