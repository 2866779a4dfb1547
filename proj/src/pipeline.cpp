#include "conloc/pipeline.hpp"

#include <algorithm>
#include <ostream>

#include "conloc/csv.hpp"
#include "conloc/ingest.hpp"
#include "conloc/numfmt.hpp"

namespace conloc::pipeline {

namespace {

constexpr std::string_view kVerdictsHeader =
    "unit_id,year_month,isp_id,technology,tier_bps,n_samples,below_fraction,rc_congested,"
    "eligible,matched_cycles,high_count,tight,r_site1,r_site2,r_site3,r_site4,r_site5,"
    "r_site6,r_site7,r_site8,r_site9,r_site10";
constexpr int kVerdictCols = 12 + kSiteCount;

constexpr std::string_view kTisVerdictsHeader =
    "unit_id,year_month,eligible,matched_cycles,tight,high_count,r_site1,r_site2,r_site3,"
    "r_site4,r_site5,r_site6,r_site7,r_site8,r_site9,r_site10";

std::string_view bool_name(bool b) { return b ? "true" : "false"; }

std::optional<bool> parse_bool(std::string_view s) {
  if (s == "true") return true;
  if (s == "false") return false;
  return std::nullopt;
}

[[noreturn]] void bad_row(std::string_view filename, long line, std::string_view what) {
  throw IngestError(std::string(filename) + ":" + std::to_string(line) + ": " +
                    std::string(what));
}

}  // namespace

AnalysisResult analyze_months(std::span<const ConnectionMonth> months,
                              const AnalysisParams& params) {
  AnalysisResult result;
  for (const auto& cm : months) {
    auto rc = metrics::canonical_rc(cm, params.rc, params.min_tier_days);
    if (std::holds_alternative<metrics::Exclusion>(rc)) {
      result.excluded.push_back(
          {cm.connection.unit_id, cm.ym, std::get<metrics::Exclusion>(rc)});
      continue;
    }
    const auto& verdict = std::get<metrics::RcVerdict>(rc);

    AnalysisRow row;
    row.unit_id = cm.connection.unit_id;
    row.isp_id = cm.connection.isp_id;
    row.technology = cm.connection.technology;
    row.ym = cm.ym;
    row.tier_bps = verdict.tier_bps;
    row.n_samples = verdict.n_samples;
    row.below_fraction = verdict.below_fraction;
    row.rc_congested = verdict.congested;
    row.tis = tis::detect_tis(cm, params.detector);
    result.rows.push_back(std::move(row));
  }

  auto key_lt = [](const auto& a, const auto& b) {
    if (a.unit_id != b.unit_id) return a.unit_id < b.unit_id;
    return a.ym < b.ym;
  };
  std::stable_sort(result.rows.begin(), result.rows.end(), key_lt);
  std::stable_sort(result.excluded.begin(), result.excluded.end(), key_lt);
  return result;
}

std::vector<report::VerdictRow> to_verdict_rows(std::span<const AnalysisRow> rows) {
  std::vector<report::VerdictRow> out;
  out.reserve(rows.size());
  for (const auto& r : rows) {
    out.push_back({r.isp_id, r.technology, r.ym, r.tis.eligible, r.rc_congested,
                   r.tis.tight});
  }
  return out;
}

void write_verdicts_csv(std::ostream& out, std::span<const AnalysisRow> rows) {
  out << kVerdictsHeader << "\n";
  for (const auto& r : rows) {
    std::vector<std::string> fields;
    fields.reserve(kVerdictCols);
    fields.push_back(r.unit_id);
    fields.push_back(timeutil::format_year_month(r.ym));
    fields.push_back(r.isp_id);
    fields.emplace_back(technology_name(r.technology));
    fields.push_back(numfmt::format_double(r.tier_bps));
    fields.push_back(numfmt::format_int(r.n_samples));
    fields.push_back(numfmt::format_double(r.below_fraction));
    fields.emplace_back(bool_name(r.rc_congested));
    fields.emplace_back(bool_name(r.tis.eligible));
    fields.push_back(numfmt::format_int(r.tis.matched_cycles));
    fields.push_back(numfmt::format_int(r.tis.high_count));
    fields.emplace_back(bool_name(r.tis.tight));
    for (const auto& corr : r.tis.correlations) {
      fields.push_back(corr ? numfmt::format_double(*corr) : std::string());
    }
    out << csv::join(fields) << "\n";
  }
}

std::vector<AnalysisRow> read_verdicts_csv(std::istream& in, std::string_view filename) {
  csv::Reader reader(in);
  std::vector<std::string> fields;
  if (!reader.next(fields) || csv::join(fields) != kVerdictsHeader) {
    throw IngestError(std::string(filename) + ": missing or unexpected header");
  }
  std::vector<AnalysisRow> rows;
  while (reader.next(fields)) {
    const long line = reader.line();
    if (static_cast<int>(fields.size()) != kVerdictCols) bad_row(filename, line, "column count");
    AnalysisRow r;
    r.unit_id = fields[0];
    auto ym = timeutil::parse_year_month(fields[1]);
    if (!ym) bad_row(filename, line, "year_month");
    r.ym = *ym;
    r.isp_id = fields[2];
    auto tech = parse_technology(fields[3]);
    if (!tech) bad_row(filename, line, "technology");
    r.technology = *tech;
    auto tier = numfmt::parse_double(fields[4]);
    auto n = numfmt::parse_int64(fields[5]);
    auto below = numfmt::parse_double(fields[6]);
    auto rc = parse_bool(fields[7]);
    auto eligible = parse_bool(fields[8]);
    auto cycles = numfmt::parse_int64(fields[9]);
    auto high = numfmt::parse_int64(fields[10]);
    auto tight = parse_bool(fields[11]);
    if (!tier || !n || !below || !rc || !eligible || !cycles || !high || !tight) {
      bad_row(filename, line, "field value");
    }
    r.tier_bps = *tier;
    r.n_samples = *n;
    r.below_fraction = *below;
    r.rc_congested = *rc;
    r.tis.eligible = *eligible;
    r.tis.matched_cycles = static_cast<int>(*cycles);
    r.tis.high_count = static_cast<int>(*high);
    r.tis.tight = *tight;
    for (int s = 0; s < kSiteCount; ++s) {
      const std::string& f = fields[12 + s];
      if (f.empty()) continue;
      auto v = numfmt::parse_double(f);
      if (!v) bad_row(filename, line, "correlation");
      r.tis.correlations[s] = *v;
    }
    rows.push_back(std::move(r));
  }
  return rows;
}

void write_tis_verdicts_csv(std::ostream& out, std::span<const AnalysisRow> rows) {
  out << kTisVerdictsHeader << "\n";
  for (const auto& r : rows) {
    std::vector<std::string> fields;
    fields.reserve(6 + kSiteCount);
    fields.push_back(r.unit_id);
    fields.push_back(timeutil::format_year_month(r.ym));
    fields.emplace_back(bool_name(r.tis.eligible));
    fields.push_back(numfmt::format_int(r.tis.matched_cycles));
    fields.emplace_back(bool_name(r.tis.tight));
    fields.push_back(numfmt::format_int(r.tis.high_count));
    for (const auto& corr : r.tis.correlations) {
      fields.push_back(corr ? numfmt::format_double(*corr) : std::string());
    }
    out << csv::join(fields) << "\n";
  }
}

void write_exclusions_csv(std::ostream& out, std::span<const ExcludedRow> rows) {
  out << "unit_id,year_month,reason\n";
  for (const auto& r : rows) {
    out << csv::join({r.unit_id, timeutil::format_year_month(r.ym),
                      std::string(metrics::exclusion_name(r.reason))})
        << "\n";
  }
}

void write_summary_csv(std::ostream& out, std::span<const report::IspSummary> rows) {
  out << "isp_id,technology,year_month,total,fc,ptis,fc_and_ptis,ratio_inter_over_ptis,"
         "ratio_inter_over_fc\n";
  for (const auto& r : rows) {
    out << csv::join({r.isp_id, r.technology, timeutil::format_year_month(r.year_month),
                      numfmt::format_int(r.total), numfmt::format_int(r.fc),
                      numfmt::format_int(r.ptis), numfmt::format_int(r.fc_and_ptis),
                      r.ratio_inter_over_ptis ? numfmt::format_double(*r.ratio_inter_over_ptis)
                                              : std::string(),
                      r.ratio_inter_over_fc ? numfmt::format_double(*r.ratio_inter_over_fc)
                                            : std::string()})
        << "\n";
  }
}

void write_prevalence_csv(std::ostream& out, std::span<const report::PrevalenceRow> rows) {
  out << "isp_id,year_month,metric,fraction\n";
  for (const auto& r : rows) {
    out << csv::join({r.isp_id, timeutil::format_year_month(r.year_month),
                      std::string(report::metric_name(r.metric)),
                      numfmt::format_double(r.fraction)})
        << "\n";
  }
}

}  // namespace conloc::pipeline
