#pragma once

#include <array>
#include <optional>
#include <vector>

#include "conloc/types.hpp"

namespace conloc::tis {

enum class CorrMethod { PEARSON, SPEARMAN };

struct DetectorParams {
  double corr_threshold = 0.6;
  int count_threshold = 5;
  int min_cycles = 180;          // matched benchmark cycles for eligibility
  int pairing_window_s = 3600;   // half the nominal 2-hour cadence
  int min_pairs_per_site = 30;   // below this a site correlation is undefined
  CorrMethod corr_method = CorrMethod::PEARSON;
};

struct PairObs {
  EpochSeconds benchmark_time = 0;
  double benchmark_bps = 0;
  double website_speed = 0;
};

// Matched benchmark/website observations for one site within one month.
struct PairedSeries {
  int site = 0;
  std::vector<PairObs> pairs;
};

struct Pairing {
  std::array<PairedSeries, kSiteCount> series;
  int matched_cycles = 0;  // benchmark runs matched to at least one site
};

struct TisVerdict {
  std::array<std::optional<double>, kSiteCount> correlations;
  int high_count = 0;  // defined correlations strictly above corr_threshold
  bool tight = false;
  bool eligible = false;
  int matched_cycles = 0;
};

// bytes * 8 / time when bytes are recorded, else reciprocal time, a rate-like
// proxy whose correlation sign matches throughput.
double website_speed(const WebsiteFetch& fetch);

// Greedy pairing: benchmarks in chronological order, each matched to the
// nearest-in-time unmatched fetch of the site within the window; equidistant
// fetches break toward the earlier one. Each record joins at most one pair
// per site.
Pairing pair_measurements(const ConnectionMonth& cm, const DetectorParams& params);

// Undefined when n < max(2, min_pairs_per_site) or a margin has zero variance.
std::optional<double> series_correlation(const PairedSeries& series,
                                         const DetectorParams& params);

// Threshold logic alone: eligibility from matched cycles, tightness from the
// count of high correlations. Ineligible months are never tight.
TisVerdict assemble_verdict(const std::array<std::optional<double>, kSiteCount>& correlations,
                            int matched_cycles, const DetectorParams& params);

TisVerdict detect_tis(const ConnectionMonth& cm, const DetectorParams& params);

}  // namespace conloc::tis
