#include "conloc/sim/simulate.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <limits>
#include <ostream>

#include "conloc/csv.hpp"
#include "conloc/ingest.hpp"
#include "conloc/numfmt.hpp"
#include "conloc/timeutil.hpp"

namespace conloc::sim {

namespace {

int64_t floor_div(int64_t a, int64_t b) {
  int64_t q = a / b;
  if (a % b != 0 && ((a < 0) != (b < 0))) --q;
  return q;
}

constexpr double kPi = 3.14159265358979323846;

}  // namespace

double DiurnalModel::load(EpochSeconds t) const {
  const int64_t local = t + utc_offset_s;
  int64_t sec_of_day = local % timeutil::kSecondsPerDay;
  if (sec_of_day < 0) sec_of_day += timeutil::kSecondsPerDay;
  double d = sec_of_day / 3600.0 - 21.0;  // signed hours from the 21:00 peak
  if (d < -12.0) d += 24.0;
  if (d > 4.0 || d < -4.0) return 0.0;
  // The bump belongs to the day containing its center, so the tail past
  // midnight still counts as the previous evening.
  const int64_t center = local - static_cast<int64_t>(std::llround(d * 3600.0));
  const int wd = timeutil::weekday_of_day(floor_div(center, timeutil::kSecondsPerDay));
  if (wd == 0 || wd == 6) return 0.0;
  return 0.5 * (1.0 + std::cos(2.0 * kPi * d / 8.0));
}

bool plant_active(const LinkProcess& link, EpochSeconds t) {
  if (link.params.plant_p <= 0) return false;
  const int64_t slot = floor_div(t, link.params.plant_slot_s);
  return hash_unit(link.episode_key, slot) < link.params.plant_p;
}

double available_share(const LinkProcess& link, EpochSeconds t, const DiurnalModel& diurnal) {
  const LinkParams& p = link.params;
  const double load =
      (p.diurnal_amplitude > 0 || p.flows_peak_extra > 0) ? diurnal.load(t) : 0.0;
  double cap = p.capacity_bps * (1.0 - p.diurnal_amplitude * load);
  if (plant_active(link, t)) cap *= p.plant_depth;
  const double flows =
      p.flows_base + static_cast<double>(std::llround(p.flows_peak_extra * load));
  return cap / flows;
}

PathState path_state(const Path& path, EpochSeconds t, const DiurnalModel& diurnal) {
  PathState st;
  st.min_share = std::numeric_limits<double>::infinity();
  for (const LinkProcess* link : path) {
    const double share = available_share(*link, t, diurnal);
    if (share < st.min_share) {
      st.min_share = share;
      st.noise_sigma = link->params.noise_sigma;
      st.initial_limiting = link->region == Region::INITIAL_SEGMENT;
    } else if (share == st.min_share && link->region == Region::INITIAL_SEGMENT) {
      st.initial_limiting = true;
    }
  }
  return st;
}

double path_throughput(const Path& path, EpochSeconds t, double tier_bps, Rng& rng,
                       const DiurnalModel& diurnal) {
  const PathState st = path_state(path, t, diurnal);
  double rate = st.min_share;
  if (st.noise_sigma > 0) {
    const double s = st.noise_sigma;
    // exp(s z - s^2/2) has mean one, so noise is unbiased.
    rate *= std::exp(s * rng.next_normal() - 0.5 * s * s);
  }
  return std::min(rate, tier_bps);
}

SimOutput simulate(const Scenario& sc) {
  SimOutput out;
  const DiurnalModel diurnal{sc.utc_offset_s};

  const LinkProcess core{"core", Region::PUBLIC_CORE, sc.core,
                         substream_seed(sc.seed, "link:core")};
  std::vector<LinkProcess> edges;
  edges.reserve(kSiteCount);
  for (int s = 0; s < kSiteCount; ++s) {
    std::string id = "edge:" + std::string(kSites[s]);
    edges.push_back(
        {id, Region::WEBSITE_EDGE, sc.edge, substream_seed(sc.seed, "link:" + id)});
  }

  for (const GroupSpec& spec : sc.groups) {
    GroupSpec g = spec;
    if (g.isps.empty()) g.isps = {"isp_" + g.name};
    std::vector<LinkProcess> middles;
    middles.reserve(g.middle_count);
    for (int j = 0; j < g.middle_count; ++j) {
      std::string id = g.name + ":middle:" + std::to_string(j);
      middles.push_back(
          {id, Region::MIDDLE_MILE, g.middle, substream_seed(sc.seed, "link:" + id)});
    }

    for (int i = 0; i < g.connections; ++i) {
      char suffix[16];
      std::snprintf(suffix, sizeof suffix, "%04d", i + 1);
      const std::string unit = g.name + "-" + suffix;

      const LinkProcess initial{unit + ":initial", Region::INITIAL_SEGMENT, g.initial,
                                substream_seed(sc.seed, "link:" + unit + ":initial")};
      const LinkProcess& middle = middles[static_cast<size_t>(i) % middles.size()];

      const Path bench_path{&initial, &middle, &core};
      std::array<Path, kSiteCount> site_paths;
      for (int s = 0; s < kSiteCount; ++s) {
        site_paths[s] = {&initial, &middle, &core, &edges[s]};
      }

      Connection conn;
      conn.unit_id = unit;
      conn.isp_id = g.isps[static_cast<size_t>(i) % g.isps.size()];
      conn.technology = g.technology;
      conn.advertised_tier_bps = g.tier_bps;
      conn.utc_offset_s = sc.utc_offset_s;
      out.connections.push_back(std::move(conn));

      Rng rng = Rng::seeded(substream_seed(sc.seed, "unit:" + unit));
      const auto offset = static_cast<int64_t>(rng.next_unit() * sc.cadence_s);

      for (int m = 0; m < sc.n_months; ++m) {
        const YearMonth ym = timeutil::add_months(sc.start_month, m);
        const EpochSeconds t0 = timeutil::month_start_epoch(ym);
        const EpochSeconds t1 = timeutil::month_start_epoch(timeutil::add_months(ym, 1));

        int64_t grid = 0, tight = 0, kept = 0, below = 0;
        for (EpochSeconds t = t0 + offset; t < t1; t += sc.cadence_s) {
          ++grid;

          // Truth first: link states are pure functions of time, no draws.
          bool is_tight = false;
          PathState st = path_state(bench_path, t, diurnal);
          if (st.initial_limiting && st.min_share < g.tier_bps) is_tight = true;
          for (int s = 0; !is_tight && s < kSiteCount; ++s) {
            PathState ss = path_state(site_paths[s], t, diurnal);
            if (ss.initial_limiting && ss.min_share < g.tier_bps) is_tight = true;
          }
          if (is_tight) ++tight;

          if (sc.drop_prob <= 0 || rng.next_unit() >= sc.drop_prob) {
            const double rate = path_throughput(bench_path, t, g.tier_bps, rng, diurnal);
            const auto last = static_cast<int64_t>(std::llround(rate * 5.0 / 8.0));
            const auto burst = static_cast<int64_t>(
                std::llround(rate * sc.burst_factor * 5.0 / 8.0));
            BenchmarkRun run;
            run.unit_id = unit;
            run.start_time = t;
            run.interval_bytes = {burst, burst, burst, burst, burst, last};
            out.benchmark_runs.push_back(std::move(run));
            ++kept;
            const double sustained = static_cast<double>(last) * 8.0 / 5.0;
            if (sustained / g.tier_bps < sc.rc_q) ++below;
          }

          for (int s = 0; s < kSiteCount; ++s) {
            if (sc.drop_prob > 0 && rng.next_unit() < sc.drop_prob) continue;
            const EpochSeconds tf = t + (s + 1) * sc.site_lag_s;
            const double speed = path_throughput(site_paths[s], tf, g.tier_bps, rng, diurnal);
            WebsiteFetch f;
            f.unit_id = unit;
            f.start_time = tf;
            f.site = s;
            f.total_time_s = static_cast<double>(sc.page_bytes) * 8.0 / speed;
            f.total_bytes = sc.page_bytes;
            out.website_fetches.push_back(std::move(f));
          }
        }

        TruthRow tr;
        tr.unit_id = unit;
        tr.ym = ym;
        tr.tight_fraction =
            grid > 0 ? static_cast<double>(tight) / static_cast<double>(grid) : 0.0;
        tr.tis_true = tr.tight_fraction >= sc.tis_tau;
        tr.rc_true =
            kept > 0 && static_cast<double>(below) / static_cast<double>(kept) > sc.rc_t;
        out.truth.push_back(std::move(tr));
      }
    }
  }
  return out;
}

void write_truth_csv(std::ostream& out, std::span<const TruthRow> rows) {
  out << "unit_id,year_month,tight_fraction,tis_true,rc_true\n";
  for (const auto& r : rows) {
    out << csv::join({r.unit_id, timeutil::format_year_month(r.ym),
                      numfmt::format_double(r.tight_fraction),
                      r.tis_true ? "true" : "false", r.rc_true ? "true" : "false"})
        << "\n";
  }
}

std::vector<TruthRow> read_truth_csv(std::istream& in, std::string_view filename) {
  csv::Reader reader(in);
  std::vector<std::string> fields;
  if (!reader.next(fields) ||
      csv::join(fields) != "unit_id,year_month,tight_fraction,tis_true,rc_true") {
    throw IngestError(std::string(filename) + ": missing or unexpected header");
  }
  auto bad = [&](std::string_view what) {
    return IngestError(std::string(filename) + ":" + std::to_string(reader.line()) + ": " +
                       std::string(what));
  };
  std::vector<TruthRow> rows;
  while (reader.next(fields)) {
    if (fields.size() != 5) throw bad("column count");
    TruthRow r;
    r.unit_id = fields[0];
    auto ym = timeutil::parse_year_month(fields[1]);
    auto frac = numfmt::parse_double(fields[2]);
    if (!ym || !frac || r.unit_id.empty()) throw bad("field value");
    if (fields[3] != "true" && fields[3] != "false") throw bad("field value");
    if (fields[4] != "true" && fields[4] != "false") throw bad("field value");
    r.ym = *ym;
    r.tight_fraction = *frac;
    r.tis_true = fields[3] == "true";
    r.rc_true = fields[4] == "true";
    rows.push_back(std::move(r));
  }
  return rows;
}

}  // namespace conloc::sim
