#include "conloc/tis.hpp"

#include <algorithm>
#include <cstdlib>

#include "conloc/correlation.hpp"
#include "conloc/metrics.hpp"

namespace conloc::tis {

double website_speed(const WebsiteFetch& fetch) {
  if (fetch.total_bytes) {
    return static_cast<double>(*fetch.total_bytes) * 8.0 / fetch.total_time_s;
  }
  return 1.0 / fetch.total_time_s;
}

Pairing pair_measurements(const ConnectionMonth& cm, const DetectorParams& params) {
  Pairing out;
  for (int s = 0; s < kSiteCount; ++s) out.series[s].site = s;

  struct Candidate {
    EpochSeconds time;
    double speed;
    bool matched = false;
  };
  std::array<std::vector<Candidate>, kSiteCount> fetches;
  for (const auto& f : cm.website_fetches) {
    fetches[f.site].push_back({f.start_time, website_speed(f), false});
  }
  // cm fetches are time-ordered already; keep the sort for raw inputs.
  for (auto& v : fetches) {
    std::stable_sort(v.begin(), v.end(),
                     [](const auto& a, const auto& b) { return a.time < b.time; });
  }

  std::vector<bool> cycle_matched(cm.benchmark_runs.size(), false);
  const int64_t window = params.pairing_window_s;

  for (size_t bi = 0; bi < cm.benchmark_runs.size(); ++bi) {
    const auto& run = cm.benchmark_runs[bi];
    const double bench_bps = metrics::sustained_throughput(run);
    for (int s = 0; s < kSiteCount; ++s) {
      auto& site_fetches = fetches[s];
      if (site_fetches.empty()) continue;
      auto it = std::lower_bound(
          site_fetches.begin(), site_fetches.end(), run.start_time,
          [](const Candidate& c, EpochSeconds t) { return c.time < t; });

      // Scan outward for the nearest unmatched fetch; prefer the earlier one
      // on equal distance.
      auto best = site_fetches.end();
      int64_t best_dist = window + 1;
      auto consider = [&](std::vector<Candidate>::iterator c) {
        if (c->matched) return;
        int64_t dist = std::llabs(c->time - run.start_time);
        if (dist < best_dist || (dist == best_dist && best != site_fetches.end() &&
                                 c->time < best->time)) {
          best = c;
          best_dist = dist;
        }
      };
      for (auto fwd = it; fwd != site_fetches.end() && fwd->time - run.start_time <= window;
           ++fwd)
        consider(fwd);
      for (auto rev = it; rev != site_fetches.begin();) {
        --rev;
        if (run.start_time - rev->time > window) break;
        consider(rev);
      }
      if (best != site_fetches.end()) {
        best->matched = true;
        out.series[s].pairs.push_back({run.start_time, bench_bps, best->speed});
        cycle_matched[bi] = true;
      }
    }
  }
  out.matched_cycles =
      static_cast<int>(std::count(cycle_matched.begin(), cycle_matched.end(), true));
  return out;
}

std::optional<double> series_correlation(const PairedSeries& series,
                                         const DetectorParams& params) {
  const size_t min_n = static_cast<size_t>(std::max(2, params.min_pairs_per_site));
  if (series.pairs.size() < min_n) return std::nullopt;

  std::vector<double> xs, ys;
  xs.reserve(series.pairs.size());
  ys.reserve(series.pairs.size());
  for (const auto& p : series.pairs) {
    xs.push_back(p.benchmark_bps);
    ys.push_back(p.website_speed);
  }
  return params.corr_method == CorrMethod::PEARSON ? stats::pearson(xs, ys)
                                                   : stats::spearman(xs, ys);
}

TisVerdict assemble_verdict(const std::array<std::optional<double>, kSiteCount>& correlations,
                            int matched_cycles, const DetectorParams& params) {
  TisVerdict v;
  v.correlations = correlations;
  v.matched_cycles = matched_cycles;
  v.eligible = matched_cycles >= params.min_cycles;
  for (const auto& r : correlations) {
    if (r && *r > params.corr_threshold) ++v.high_count;
  }
  v.tight = v.eligible && v.high_count >= params.count_threshold;
  return v;
}

TisVerdict detect_tis(const ConnectionMonth& cm, const DetectorParams& params) {
  Pairing pairing = pair_measurements(cm, params);
  std::array<std::optional<double>, kSiteCount> correlations;
  for (int s = 0; s < kSiteCount; ++s) {
    correlations[s] = series_correlation(pairing.series[s], params);
  }
  return assemble_verdict(correlations, pairing.matched_cycles, params);
}

}  // namespace conloc::tis
