#include "conloc/report.hpp"

#include <algorithm>
#include <cctype>
#include <cstdio>
#include <set>
#include <tuple>

#include "conloc/numfmt.hpp"

namespace conloc::report {

std::string_view metric_name(Metric m) { return m == Metric::RC ? "rc" : "tis"; }

std::optional<GroupBy> parse_group_by(std::string_view s) {
  std::string lower(s);
  for (char& c : lower) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  if (lower == "isp") return GroupBy::ISP;
  if (lower == "technology") return GroupBy::TECHNOLOGY;
  if (lower == "all") return GroupBy::ALL;
  return std::nullopt;
}

int percent_round_half_up(int64_t num, int64_t den) {
  return static_cast<int>((200 * num + den) / (2 * den));
}

std::vector<IspSummary> summarize(const std::vector<VerdictRow>& rows, GroupBy group_by) {
  struct Counts {
    int64_t total = 0, fc = 0, ptis = 0, inter = 0;
  };
  std::map<std::tuple<std::string, std::string, YearMonth>, Counts> groups;

  for (const auto& row : rows) {
    if (!row.eligible) continue;
    std::string isp = group_by == GroupBy::ISP ? row.isp_id : "*";
    std::string tech = group_by == GroupBy::ALL ? "*" : std::string(technology_name(row.technology));
    auto& c = groups[{std::move(isp), std::move(tech), row.ym}];
    ++c.total;
    if (row.rc_congested) ++c.fc;
    if (row.tight) ++c.ptis;
    if (row.rc_congested && row.tight) ++c.inter;
  }

  std::vector<IspSummary> out;
  out.reserve(groups.size());
  for (const auto& [key, c] : groups) {
    IspSummary s;
    s.isp_id = std::get<0>(key);
    s.technology = std::get<1>(key);
    s.year_month = std::get<2>(key);
    s.total = c.total;
    s.fc = c.fc;
    s.ptis = c.ptis;
    s.fc_and_ptis = c.inter;
    if (c.ptis > 0) s.ratio_inter_over_ptis = static_cast<double>(c.inter) / c.ptis;
    if (c.fc > 0) s.ratio_inter_over_fc = static_cast<double>(c.inter) / c.fc;
    out.push_back(std::move(s));
  }
  return out;
}

std::vector<PrevalenceRow> prevalence_series(const std::vector<IspSummary>& summaries,
                                             Metric metric) {
  std::vector<PrevalenceRow> out;
  out.reserve(summaries.size());
  for (const auto& s : summaries) {
    if (s.total == 0) continue;
    int64_t count = metric == Metric::RC ? s.fc : s.ptis;
    out.push_back({s.isp_id, s.year_month, metric, static_cast<double>(count) / s.total});
  }
  std::stable_sort(out.begin(), out.end(), [](const PrevalenceRow& a, const PrevalenceRow& b) {
    if (a.isp_id != b.isp_id) return a.isp_id < b.isp_id;
    return a.year_month < b.year_month;
  });
  return out;
}

std::map<std::string, std::string> anonymize_isps(const std::vector<IspSummary>& summaries) {
  std::set<std::string> ids;
  for (const auto& s : summaries) {
    if (s.isp_id != "*") ids.insert(s.isp_id);
  }
  std::map<std::string, std::string> out;
  int n = 0;
  for (const auto& id : ids) {
    char buf[16];
    std::snprintf(buf, sizeof(buf), "isp_%02d", ++n);
    out[id] = buf;
  }
  out["*"] = "*";
  return out;
}

namespace {

std::string xml_escape(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

}  // namespace

std::string render_prevalence_svg(const std::vector<PrevalenceRow>& rows, Metric metric,
                                  const std::string& title) {
  std::vector<std::string> isps;
  std::vector<YearMonth> months;
  for (const auto& r : rows) {
    if (r.metric != metric) continue;
    if (std::find(isps.begin(), isps.end(), r.isp_id) == isps.end()) isps.push_back(r.isp_id);
    if (std::find(months.begin(), months.end(), r.year_month) == months.end())
      months.push_back(r.year_month);
  }
  std::sort(isps.begin(), isps.end());
  std::sort(months.begin(), months.end());

  constexpr int kBarW = 18;
  constexpr int kBarGap = 4;
  constexpr int kGroupGap = 24;
  constexpr int kPlotH = 220;
  constexpr int kMarginL = 50, kMarginT = 40, kMarginB = 60;
  const int group_w =
      static_cast<int>(months.size()) * (kBarW + kBarGap) - kBarGap + kGroupGap;
  const int plot_w = std::max<int>(1, static_cast<int>(isps.size()) * group_w);
  const int width = kMarginL + plot_w + 20;
  const int height = kMarginT + kPlotH + kMarginB;

  static constexpr const char* kColors[] = {"#4e79a7", "#f28e2b", "#59a14f", "#e15759",
                                            "#b07aa1", "#76b7b2", "#edc948", "#9c755f"};
  constexpr int kColorCount = 8;

  std::string svg;
  svg += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + std::to_string(width) +
         "\" height=\"" + std::to_string(height) + "\" viewBox=\"0 0 " +
         std::to_string(width) + " " + std::to_string(height) + "\">\n";
  svg += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  svg += "<text x=\"" + std::to_string(width / 2) + "\" y=\"20\" text-anchor=\"middle\" "
         "font-family=\"sans-serif\" font-size=\"14\">" + xml_escape(title) + "</text>\n";

  // Y axis with gridlines at 0, 0.25, 0.5, 0.75, 1.
  for (int i = 0; i <= 4; ++i) {
    double frac = i / 4.0;
    int y = kMarginT + kPlotH - static_cast<int>(frac * kPlotH);
    svg += "<line x1=\"" + std::to_string(kMarginL) + "\" y1=\"" + std::to_string(y) +
           "\" x2=\"" + std::to_string(kMarginL + plot_w) + "\" y2=\"" + std::to_string(y) +
           "\" stroke=\"#ddd\"/>\n";
    svg += "<text x=\"" + std::to_string(kMarginL - 6) + "\" y=\"" + std::to_string(y + 4) +
           "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"10\">" +
           numfmt::format_double(frac) + "</text>\n";
  }

  for (size_t gi = 0; gi < isps.size(); ++gi) {
    const int group_x = kMarginL + static_cast<int>(gi) * group_w;
    for (size_t mi = 0; mi < months.size(); ++mi) {
      auto it = std::find_if(rows.begin(), rows.end(), [&](const PrevalenceRow& r) {
        return r.metric == metric && r.isp_id == isps[gi] && r.year_month == months[mi];
      });
      if (it == rows.end()) continue;
      double frac = std::clamp(it->fraction, 0.0, 1.0);
      int h = static_cast<int>(frac * kPlotH + 0.5);
      int x = group_x + static_cast<int>(mi) * (kBarW + kBarGap);
      int y = kMarginT + kPlotH - h;
      svg += "<rect x=\"" + std::to_string(x) + "\" y=\"" + std::to_string(y) + "\" width=\"" +
             std::to_string(kBarW) + "\" height=\"" + std::to_string(h) + "\" fill=\"" +
             kColors[mi % kColorCount] + "\"><title>" + xml_escape(isps[gi]) + " " +
             timeutil::format_year_month(months[mi]) + ": " +
             numfmt::format_double(it->fraction) + "</title></rect>\n";
    }
    int label_x = group_x + (group_w - kGroupGap) / 2;
    svg += "<text x=\"" + std::to_string(label_x) + "\" y=\"" +
           std::to_string(kMarginT + kPlotH + 16) +
           "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"10\">" +
           xml_escape(isps[gi]) + "</text>\n";
  }

  // Month legend.
  int lx = kMarginL;
  const int ly = kMarginT + kPlotH + 36;
  for (size_t mi = 0; mi < months.size(); ++mi) {
    svg += "<rect x=\"" + std::to_string(lx) + "\" y=\"" + std::to_string(ly - 9) +
           "\" width=\"10\" height=\"10\" fill=\"" + kColors[mi % kColorCount] + "\"/>\n";
    std::string label = timeutil::format_year_month(months[mi]);
    svg += "<text x=\"" + std::to_string(lx + 14) + "\" y=\"" + std::to_string(ly) +
           "\" font-family=\"sans-serif\" font-size=\"10\">" + label + "</text>\n";
    lx += 14 + static_cast<int>(label.size()) * 7 + 16;
  }

  svg += "</svg>\n";
  return svg;
}

}  // namespace conloc::report
