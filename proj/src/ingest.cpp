#include "conloc/ingest.hpp"

#include <algorithm>
#include <map>
#include <ostream>
#include <set>

#include "conloc/csv.hpp"
#include "conloc/numfmt.hpp"

namespace conloc {

namespace {

using numfmt::format_double;
using numfmt::format_int;
using numfmt::parse_double;
using numfmt::parse_int64;

std::string trim(const std::string& s) {
  size_t b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  size_t e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

// Reads and checks the header row; throws IngestError on mismatch.
// Returns the matched header variant.
std::string expect_header(csv::Reader& reader, std::string_view filename,
                          std::initializer_list<std::string_view> accepted) {
  std::vector<std::string> row;
  if (!reader.next(row)) {
    throw IngestError(std::string(filename) + ": empty input, header row required");
  }
  std::string got;
  for (size_t i = 0; i < row.size(); ++i) {
    if (i) got.push_back(',');
    got += trim(row[i]);
  }
  for (auto h : accepted) {
    if (got == h) return got;
  }
  throw IngestError(std::string(filename) + ": unexpected header \"" + got + "\"");
}

}  // namespace

BenchmarkIngest ingest_benchmarks(std::istream& in, std::string_view filename) {
  if (!in) throw IngestError(std::string(filename) + ": unreadable stream");
  csv::Reader reader(in);
  expect_header(reader, filename, {kBenchmarkHeader});

  BenchmarkIngest out;
  std::vector<std::string> row;
  while (reader.next(row)) {
    auto reject = [&](std::string reason) {
      out.rejects.push_back({std::string(filename), reader.line(), std::move(reason)});
    };
    if (row.size() != 8) {
      reject("interval count");
      continue;
    }
    BenchmarkRun r;
    r.unit_id = row[0];
    if (r.unit_id.empty()) {
      reject("unit id");
      continue;
    }
    auto t = timeutil::parse_iso8601(row[1]);
    if (!t) {
      reject("timestamp");
      continue;
    }
    r.start_time = *t;
    bool ok = true;
    for (int i = 0; i < 6; ++i) {
      auto b = parse_int64(row[2 + i]);
      if (!b || *b < 0) {
        ok = false;
        break;
      }
      r.interval_bytes[i] = *b;
    }
    if (!ok) {
      reject("interval bytes");
      continue;
    }
    r.source = {std::string(filename), reader.line()};
    out.records.push_back(std::move(r));
  }
  return out;
}

WebsiteIngest ingest_websites(std::istream& in, std::string_view filename) {
  if (!in) throw IngestError(std::string(filename) + ": unreadable stream");
  csv::Reader reader(in);
  expect_header(reader, filename, {kWebsiteHeader});

  WebsiteIngest out;
  std::vector<std::string> row;
  while (reader.next(row)) {
    auto reject = [&](std::string reason) {
      out.rejects.push_back({std::string(filename), reader.line(), std::move(reason)});
    };
    if (row.size() != 5) {
      reject("column count");
      continue;
    }
    WebsiteFetch f;
    f.unit_id = row[0];
    if (f.unit_id.empty()) {
      reject("unit id");
      continue;
    }
    auto t = timeutil::parse_iso8601(row[1]);
    if (!t) {
      reject("timestamp");
      continue;
    }
    f.start_time = *t;
    auto site = site_index(row[2]);
    if (!site) {
      reject("site");
      continue;
    }
    f.site = *site;
    auto secs = parse_double(row[3]);
    if (!secs || !(*secs > 0)) {
      reject("total time");
      continue;
    }
    f.total_time_s = *secs;
    if (!trim(row[4]).empty()) {
      auto bytes = parse_int64(row[4]);
      if (!bytes || *bytes < 0) {
        reject("total bytes");
        continue;
      }
      f.total_bytes = *bytes;
    }
    f.source = {std::string(filename), reader.line()};
    out.records.push_back(std::move(f));
  }
  return out;
}

ConnectionsIngest ingest_connections(std::istream& in, std::string_view filename) {
  if (!in) throw IngestError(std::string(filename) + ": unreadable stream");
  csv::Reader reader(in);
  std::string header =
      expect_header(reader, filename, {kConnectionsHeader, kConnectionsHeaderWithOffset});
  const bool has_offset = header == kConnectionsHeaderWithOffset;
  const size_t arity = has_offset ? 5 : 4;

  ConnectionsIngest out;
  std::set<std::string> seen;
  std::vector<std::string> row;
  while (reader.next(row)) {
    auto reject = [&](std::string reason) {
      out.rejects.push_back({std::string(filename), reader.line(), std::move(reason)});
    };
    if (row.size() != arity) {
      reject("column count");
      continue;
    }
    Connection c;
    c.unit_id = row[0];
    if (c.unit_id.empty()) {
      reject("unit id");
      continue;
    }
    if (!seen.insert(c.unit_id).second) {
      reject("duplicate unit");
      continue;
    }
    c.isp_id = row[1];
    auto tech = parse_technology(row[2]);
    if (!tech) {
      reject("technology");
      seen.erase(c.unit_id);
      continue;
    }
    c.technology = *tech;
    if (!trim(row[3]).empty()) {
      auto tier = parse_double(row[3]);
      if (!tier || !(*tier > 0)) {
        reject("tier");
        seen.erase(c.unit_id);
        continue;
      }
      c.advertised_tier_bps = *tier;
    }
    if (has_offset && !trim(row[4]).empty()) {
      auto off = parse_int64(row[4]);
      if (!off || *off < -86400 || *off > 86400) {
        reject("utc offset");
        seen.erase(c.unit_id);
        continue;
      }
      c.utc_offset_s = static_cast<int32_t>(*off);
    }
    out.records.push_back(std::move(c));
  }
  return out;
}

void write_benchmarks(std::ostream& out, std::span<const BenchmarkRun> records) {
  out << kBenchmarkHeader << "\n";
  for (const auto& r : records) {
    std::vector<std::string> row{r.unit_id, timeutil::format_iso8601(r.start_time)};
    for (int64_t b : r.interval_bytes) row.push_back(format_int(b));
    out << csv::join(row) << "\n";
  }
}

void write_websites(std::ostream& out, std::span<const WebsiteFetch> records) {
  out << kWebsiteHeader << "\n";
  for (const auto& f : records) {
    std::vector<std::string> row{f.unit_id, timeutil::format_iso8601(f.start_time),
                                 std::string(kSites[f.site]), format_double(f.total_time_s),
                                 f.total_bytes ? format_int(*f.total_bytes) : ""};
    out << csv::join(row) << "\n";
  }
}

void write_connections(std::ostream& out, std::span<const Connection> records) {
  bool any_offset =
      std::any_of(records.begin(), records.end(), [](const auto& c) { return c.utc_offset_s != 0; });
  out << (any_offset ? kConnectionsHeaderWithOffset : kConnectionsHeader) << "\n";
  for (const auto& c : records) {
    std::vector<std::string> row{c.unit_id, c.isp_id, std::string(technology_name(c.technology)),
                                 c.advertised_tier_bps ? format_double(*c.advertised_tier_bps) : ""};
    if (any_offset) row.push_back(format_int(c.utc_offset_s));
    out << csv::join(row) << "\n";
  }
}

void write_rejects(std::ostream& out, std::span<const Reject> rejects) {
  out << kRejectsHeader << "\n";
  for (const auto& r : rejects) {
    out << csv::join({r.file, format_int(r.line), r.reason}) << "\n";
  }
}

Grouping group_by_month(std::span<const BenchmarkRun> runs,
                        std::span<const WebsiteFetch> fetches,
                        std::span<const Connection> connections) {
  Grouping out;
  std::map<std::string_view, const Connection*> by_unit;
  for (const auto& c : connections) by_unit.emplace(c.unit_id, &c);

  std::map<std::pair<std::string, YearMonth>, ConnectionMonth> groups;
  auto month_of = [](EpochSeconds t) { return timeutil::year_month_of(t); };

  auto slot = [&](const std::string& unit, EpochSeconds t) -> ConnectionMonth* {
    auto it = by_unit.find(unit);
    if (it == by_unit.end()) return nullptr;
    YearMonth ym = month_of(t);
    auto [g, inserted] = groups.try_emplace({unit, ym});
    if (inserted) {
      g->second.connection = *it->second;
      g->second.ym = ym;
    }
    return &g->second;
  };

  for (const auto& r : runs) {
    if (ConnectionMonth* cm = slot(r.unit_id, r.start_time)) {
      cm->benchmark_runs.push_back(r);
    } else {
      out.rejects.push_back({r.source.file, r.source.line, "unknown unit"});
    }
  }
  for (const auto& f : fetches) {
    if (ConnectionMonth* cm = slot(f.unit_id, f.start_time)) {
      cm->website_fetches.push_back(f);
    } else {
      out.rejects.push_back({f.source.file, f.source.line, "unknown unit"});
    }
  }

  out.months.reserve(groups.size());
  for (auto& [key, cm] : groups) {
    std::stable_sort(cm.benchmark_runs.begin(), cm.benchmark_runs.end(),
                     [](const auto& a, const auto& b) { return a.start_time < b.start_time; });
    std::stable_sort(cm.website_fetches.begin(), cm.website_fetches.end(),
                     [](const auto& a, const auto& b) { return a.start_time < b.start_time; });
    out.months.push_back(std::move(cm));
  }
  return out;
}

}  // namespace conloc
