#pragma once

#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "conloc/metrics.hpp"
#include "conloc/report.hpp"
#include "conloc/tis.hpp"
#include "conloc/types.hpp"

namespace conloc::pipeline {

struct AnalysisParams {
  metrics::RcParams rc;
  tis::DetectorParams detector;
  int min_tier_days = metrics::kDefaultMinTierDays;
};

// One tier-stable connection-month with its congestion and tightness verdicts.
struct AnalysisRow {
  std::string unit_id;
  std::string isp_id;
  Technology technology = Technology::OTHER;
  YearMonth ym;
  double tier_bps = 0;
  int64_t n_samples = 0;
  double below_fraction = 0;
  bool rc_congested = false;
  tis::TisVerdict tis;
};

// A connection-month dropped before any verdict could be issued.
struct ExcludedRow {
  std::string unit_id;
  YearMonth ym;
  metrics::Exclusion reason = metrics::Exclusion::NO_SAMPLES;
};

struct AnalysisResult {
  std::vector<AnalysisRow> rows;      // sorted by (unit_id, month)
  std::vector<ExcludedRow> excluded;  // sorted likewise
};

// Runs tier inference, recurrent-congestion classification, and tight
// initial segment detection over every connection-month.
AnalysisResult analyze_months(std::span<const ConnectionMonth> months,
                              const AnalysisParams& params);

std::vector<report::VerdictRow> to_verdict_rows(std::span<const AnalysisRow> rows);

// verdicts.csv: one row per analyzable connection-month, undefined
// correlations serialized as empty fields.
void write_verdicts_csv(std::ostream& out, std::span<const AnalysisRow> rows);
// Throws IngestError on malformed content; verdicts.csv is a tool artifact,
// not field data, so damage is fatal rather than quarantined.
std::vector<AnalysisRow> read_verdicts_csv(std::istream& in, std::string_view filename);

// tis_verdicts.csv: the detector-only view of the same rows.
void write_tis_verdicts_csv(std::ostream& out, std::span<const AnalysisRow> rows);

void write_exclusions_csv(std::ostream& out, std::span<const ExcludedRow> rows);
void write_summary_csv(std::ostream& out, std::span<const report::IspSummary> rows);
void write_prevalence_csv(std::ostream& out, std::span<const report::PrevalenceRow> rows);

}  // namespace conloc::pipeline
