#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "conloc/types.hpp"

namespace conloc::report {

enum class GroupBy { ISP, TECHNOLOGY, ALL };
enum class Metric { RC, TIS };

std::string_view metric_name(Metric m);
std::optional<GroupBy> parse_group_by(std::string_view s);

// One analyzable connection-month, as produced by the analysis pipeline.
struct VerdictRow {
  std::string isp_id;
  Technology technology = Technology::OTHER;
  YearMonth ym;
  bool eligible = false;      // enough matched cycles for a tightness verdict
  bool rc_congested = false;  // canonical recurrent congestion
  bool tight = false;         // detected tight initial segment
};

// Per-group counts of congested and tight connections for one month.
// fc = recurrently congested, ptis = tight initial segment detected.
struct IspSummary {
  std::string isp_id;      // "*" when aggregated across ISPs
  std::string technology;  // technology name, "*" when aggregated
  YearMonth year_month;
  int64_t total = 0;
  int64_t fc = 0;
  int64_t ptis = 0;
  int64_t fc_and_ptis = 0;
  std::optional<double> ratio_inter_over_ptis;  // undefined when ptis = 0
  std::optional<double> ratio_inter_over_fc;    // undefined when fc = 0
};

struct PrevalenceRow {
  std::string isp_id;
  YearMonth year_month;
  Metric metric = Metric::RC;
  double fraction = 0;
};

// Nearest integer percent with halves rounded up: 416/1559 -> 27.
// Requires num >= 0 and den > 0.
int percent_round_half_up(int64_t num, int64_t den);

// Counts eligible rows per group. ISP groups by (isp, technology, month) so
// a provider's DSL and cable populations stay separate; TECHNOLOGY and ALL
// replace the aggregated dimensions with "*". Output is sorted by
// (isp, technology, month).
std::vector<IspSummary> summarize(const std::vector<VerdictRow>& rows, GroupBy group_by);

// fraction = fc/total or ptis/total per summary row. Rows ordered
// lexicographically by isp_id, then month. Groups absent from a month emit
// no row; absence is not zero prevalence.
std::vector<PrevalenceRow> prevalence_series(const std::vector<IspSummary>& summaries,
                                             Metric metric);

// Stable pseudonyms: distinct isp_ids sorted lexicographically map to
// isp_01, isp_02, ... The "*" aggregate passes through unchanged.
std::map<std::string, std::string> anonymize_isps(const std::vector<IspSummary>& summaries);

// Self-contained SVG bar chart of one metric: fraction per ISP, one bar per
// month, months color-coded. Rows must all carry the given metric.
std::string render_prevalence_svg(const std::vector<PrevalenceRow>& rows, Metric metric,
                                  const std::string& title);

}  // namespace conloc::report
