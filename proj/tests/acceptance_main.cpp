// Acceptance gate: nine end-to-end criteria, one PASS/FAIL line each.
// Usage: acceptance <cli-binary> <scenario-dir>

#include <sys/wait.h>
#include <unistd.h>

#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "conloc/correlation.hpp"
#include "conloc/ingest.hpp"
#include "conloc/metrics.hpp"
#include "conloc/pipeline.hpp"
#include "conloc/report.hpp"
#include "conloc/sim/evaluate.hpp"
#include "conloc/sim/rng.hpp"
#include "conloc/sim/scenario.hpp"
#include "conloc/sim/simulate.hpp"
#include "conloc/timeutil.hpp"
#include "conloc/tis.hpp"
#include "conloc/types.hpp"

namespace fs = std::filesystem;
using namespace conloc;

namespace {

std::string g_cli;
fs::path g_scenarios;

struct Failure : std::runtime_error {
  using std::runtime_error::runtime_error;
};

void require(bool cond, const std::string& msg) {
  if (!cond) throw Failure(msg);
}

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.4f", v);
  return buf;
}

sim::Scenario load_scenario(const std::string& name) {
  const fs::path path = g_scenarios / name;
  std::ifstream in(path, std::ios::binary);
  require(in.good(), "cannot open " + path.string());
  return sim::parse_scenario(in, path.string());
}

sim::Evaluation run_scenario_pipeline(const std::string& name,
                                      pipeline::AnalysisResult* analysis_out = nullptr) {
  auto out = sim::simulate(load_scenario(name));
  auto grouping = group_by_month(out.benchmark_runs, out.website_fetches, out.connections);
  require(grouping.rejects.empty(), "simulated store produced ingest rejects");
  auto analysis = pipeline::analyze_months(grouping.months, {});
  auto eval = sim::evaluate(analysis.rows, out.truth);
  if (analysis_out) *analysis_out = std::move(analysis);
  return eval;
}

// 1. Round-half-up percent arithmetic reproduces the published monthly
//    percentage cells (share congested, share tight, tight-and-congested
//    over tight) from their count cells, for all eight technology-months.
std::string criterion_table_arithmetic() {
  struct TableRow {
    Technology tech;
    int month;
    int64_t total, fc, ptis, inter;
    int pct_fc, pct_ptis, pct_inter_over_ptis;
  };
  const std::vector<TableRow> table{
      {Technology::CABLE, 3, 1559, 416, 55, 55, 27, 4, 100},
      {Technology::CABLE, 4, 1864, 454, 57, 52, 24, 3, 91},
      {Technology::CABLE, 5, 1818, 582, 49, 45, 32, 3, 92},
      {Technology::CABLE, 6, 1903, 519, 51, 50, 27, 3, 98},
      {Technology::DSL, 3, 860, 99, 55, 37, 12, 6, 67},
      {Technology::DSL, 4, 1031, 103, 75, 50, 10, 7, 67},
      {Technology::DSL, 5, 1059, 91, 56, 38, 9, 5, 68},
      {Technology::DSL, 6, 1012, 110, 68, 44, 11, 7, 65},
  };

  std::vector<report::VerdictRow> rows;
  for (const auto& r : table) {
    for (int64_t i = 0; i < r.total; ++i) {
      report::VerdictRow v;
      v.isp_id = "s";
      v.technology = r.tech;
      v.ym = {2013, r.month};
      v.eligible = true;
      v.rc_congested = i < r.fc;
      v.tight = i < r.inter || (i >= r.fc && i < r.fc + (r.ptis - r.inter));
      rows.push_back(v);
    }
  }

  auto summaries = report::summarize(rows, report::GroupBy::TECHNOLOGY);
  require(summaries.size() == table.size(), "expected 8 summary rows");

  int cells = 0;
  for (const auto& r : table) {
    const report::IspSummary* s = nullptr;
    for (const auto& cand : summaries) {
      if (cand.technology == technology_name(r.tech) && cand.year_month.month == r.month)
        s = &cand;
    }
    require(s != nullptr, "summary row missing");
    require(s->total == r.total && s->fc == r.fc && s->ptis == r.ptis &&
                s->fc_and_ptis == r.inter,
            "count cells did not survive summarize");
    require(report::percent_round_half_up(s->fc, s->total) == r.pct_fc,
            "share-congested percent mismatch");
    ++cells;
    require(report::percent_round_half_up(s->ptis, s->total) == r.pct_ptis,
            "share-tight percent mismatch");
    ++cells;
    require(report::percent_round_half_up(s->fc_and_ptis, s->ptis) == r.pct_inter_over_ptis,
            "inter-over-tight percent mismatch");
    ++cells;
  }
  require(cells == 24, "expected 24 percentage cells");
  return "24/24 percentage cells reproduced from count cells";
}

// 2. The below-fraction classifier agrees exactly with a naive recount on
//    random series, and is monotone in both thresholds.
std::string criterion_oracle_equivalence() {
  auto rng = sim::Rng::seeded(1362096000);
  for (int iter = 0; iter < 1000; ++iter) {
    const int n = 1 + static_cast<int>(rng.next() % 1000);
    const double tier = 1e6 * (1.0 + 99.0 * rng.next_unit());
    std::vector<double> samples(n);
    for (auto& s : samples) s = tier * 1.2 * rng.next_unit();
    metrics::RcParams p{0.05 + 0.9 * rng.next_unit(), 0.05 + 0.9 * rng.next_unit()};

    auto v = metrics::recurrent_congestion(samples, tier, p);
    int64_t below = 0;
    for (double s : samples) below += s / tier < p.q;
    require(v.n_samples == n, "sample count mismatch");
    require(v.below_fraction == static_cast<double>(below) / n, "recount mismatch");
    require(v.congested == (v.below_fraction > p.t), "threshold mismatch");

    metrics::RcParams stricter_q = p;
    stricter_q.q = std::min(1.0, p.q + 0.3 * rng.next_unit());
    auto vq = metrics::recurrent_congestion(samples, tier, stricter_q);
    require(vq.below_fraction >= v.below_fraction, "not monotone in q");
    require(!v.congested || vq.congested, "verdict not monotone in q");

    metrics::RcParams laxer_t = p;
    laxer_t.t = p.t + 0.3 * rng.next_unit();
    auto vt = metrics::recurrent_congestion(samples, tier, laxer_t);
    require(!vt.congested || v.congested, "verdict not monotone in t");
  }
  return "1000 random series: recount exact, monotone in q and t";
}

// 3. Tier inference flags every planted mid-month step and almost never
//    flags a stationary noisy month.
std::string criterion_tier_change() {
  auto rng = sim::Rng::seeded(20130301);
  constexpr EpochSeconds kMarch = 1362096000;

  auto make_month = [&](const std::function<double(int day)>& rate_of_day,
                        double sigma) {
    ConnectionMonth cm;
    cm.connection.unit_id = "u";
    cm.ym = {2013, 3};
    for (int day = 0; day < 31; ++day) {
      for (int k = 0; k < 8; ++k) {
        BenchmarkRun run;
        run.unit_id = "u";
        run.start_time = kMarch + day * 86400 + k * 10800;
        const double bps = rate_of_day(day) * std::exp(sigma * rng.next_normal());
        for (auto& b : run.interval_bytes) b = std::llround(bps * 5 / 8);
        cm.benchmark_runs.push_back(std::move(run));
      }
    }
    return cm;
  };

  int detected = 0;
  for (int m = 0; m < 500; ++m) {
    const double base = 2e6 * (1.0 + 9.0 * rng.next_unit());
    const double mult = 2.2 + 0.6 * rng.next_unit();
    const int step_day = 14 + static_cast<int>(rng.next() % 4);
    const bool upward = (m % 2) == 0;
    auto cm = make_month(
        [&](int day) {
          const bool late = day >= step_day;
          return (late == upward) ? base * mult : base;
        },
        0.04);
    auto est = metrics::infer_tier(cm);
    require(est.has_value(), "31-day month must be determinable");
    detected += est->changed;
  }
  require(detected == 500, "missed planted steps: " + std::to_string(500 - detected));

  int false_changes = 0;
  for (int m = 0; m < 500; ++m) {
    const double base = 2e6 * (1.0 + 9.0 * rng.next_unit());
    auto cm = make_month([&](int) { return base; }, 0.1);
    auto est = metrics::infer_tier(cm);
    require(est.has_value(), "31-day month must be determinable");
    false_changes += est->changed;
  }
  require(false_changes <= 25,
          "false-change rate above 5%: " + std::to_string(false_changes) + "/500");
  return "500/500 planted steps detected, " + std::to_string(false_changes) +
         "/500 stationary months flagged";
}

// 4. Correlation closed forms hold to 1e-12 and undefined margins never
//    leak NaN into a verdict.
std::string criterion_correlation_checks() {
  const std::vector<double> xs{1, 2, 3, 4, 5};
  const std::vector<double> ys{2, 1, 4, 3, 5};
  auto r = stats::pearson(xs, ys);
  require(r.has_value() && std::abs(*r - 0.8) <= 1e-12, "0.8 fixture failed");

  std::vector<double> line(5), anti(5);
  for (int i = 0; i < 5; ++i) {
    line[i] = 3.0 * xs[i] + 1.0;
    anti[i] = -2.0 * xs[i] + 7.0;
  }
  auto rp = stats::pearson(xs, line);
  require(rp.has_value() && std::abs(*rp - 1.0) <= 1e-12, "r=+1 failed");
  auto rm = stats::pearson(xs, anti);
  require(rm.has_value() && std::abs(*rm + 1.0) <= 1e-12, "r=-1 failed");

  const std::vector<double> flat{4, 4, 4, 4, 4};
  require(!stats::pearson(xs, flat).has_value(), "zero variance must be undefined");
  require(!stats::pearson(flat, xs).has_value(), "zero variance must be undefined");
  require(!stats::pearson({}, {}).has_value(), "empty must be undefined");

  // A month where four sites have constant speeds: their correlations must
  // come back undefined, not NaN, and must not poison the verdict.
  ConnectionMonth cm;
  cm.connection.unit_id = "u";
  cm.ym = {2013, 3};
  constexpr EpochSeconds kMarch = 1362096000;
  for (int c = 0; c < 200; ++c) {
    const EpochSeconds t = kMarch + static_cast<EpochSeconds>(c) * 7200;
    const double bps = (c % 2) ? 10e6 : 4e6;
    BenchmarkRun run;
    run.unit_id = "u";
    run.start_time = t;
    for (auto& b : run.interval_bytes) b = std::llround(bps * 5 / 8);
    cm.benchmark_runs.push_back(std::move(run));
    for (int s = 0; s < kSiteCount; ++s) {
      const double speed = s < 6 ? bps / 10 : 2e6;
      WebsiteFetch f;
      f.unit_id = "u";
      f.start_time = t + 30 * (s + 1);
      f.site = s;
      f.total_bytes = 1000000;
      f.total_time_s = 8e6 / speed;
      cm.website_fetches.push_back(std::move(f));
    }
  }
  auto verdict = tis::detect_tis(cm, {});
  require(verdict.eligible && verdict.tight, "synthetic month should be tight");
  for (int s = 0; s < kSiteCount; ++s) {
    const auto& c = verdict.correlations[s];
    if (s < 6) {
      require(c.has_value() && !std::isnan(*c), "correlated site must be defined");
    } else {
      require(!c.has_value(), "constant site must be undefined, not NaN");
    }
  }
  return "closed forms within 1e-12, undefined margins stay undefined";
}

// 5. Planted initial-segment bottleneck: detector true-positive rate.
std::string criterion_planted_initial() {
  auto eval = run_scenario_pipeline("initial-bottleneck.cfg");
  require(eval.joined >= 150, "too few eligible connection-months");
  require(eval.tis.tpr.has_value(), "TPR undefined");
  require(*eval.tis.tpr >= 0.90, "TIS TPR " + fmt(*eval.tis.tpr) + " < 0.90");
  return "TIS TPR " + fmt(*eval.tis.tpr) + " over " + std::to_string(eval.joined) +
         " connection-months";
}

// 6. Bottlenecks only at the website edge: detector false-positive rate.
std::string criterion_edge_only() {
  auto eval = run_scenario_pipeline("website-edge.cfg");
  require(eval.joined >= 150, "too few eligible connection-months");
  require(eval.tis.fpr.has_value(), "FPR undefined");
  require(*eval.tis.fpr <= 0.05, "TIS FPR " + fmt(*eval.tis.fpr) + " > 0.05");
  return "TIS FPR " + fmt(*eval.tis.fpr) + " over " + std::to_string(eval.joined) +
         " connection-months";
}

// 7. Shared middle-mile episodes: the known failure mode must be measured
//    and reported, not hidden. The gate is that the confusion report exists
//    and surfaces a positive false-positive rate.
std::string criterion_middle_mile() {
  auto eval = run_scenario_pipeline("middle-mile.cfg");
  std::ostringstream confusion;
  sim::write_confusion_csv(confusion, eval);
  require(confusion.str().rfind("metric,", 0) == 0, "confusion report missing");
  require(eval.tis.fpr.has_value(), "FPR undefined");
  require(*eval.tis.fpr > 0.0, "expected the failure mode to register as FPR > 0");
  return "failure mode surfaced: TIS FPR " + fmt(*eval.tis.fpr) + " reported honestly";
}

// 8. Two populations with opposite congestion locations: the share of
//    congested connections that also have a detected tight initial segment
//    must be far higher for the access-bottlenecked population.
std::string criterion_two_population() {
  pipeline::AnalysisResult analysis;
  run_scenario_pipeline("two-population.cfg", &analysis);
  auto rows = pipeline::to_verdict_rows(analysis.rows);
  auto summaries = report::summarize(rows, report::GroupBy::TECHNOLOGY);

  std::optional<double> dsl, cable;
  for (const auto& s : summaries) {
    if (s.technology == "DSL") dsl = s.ratio_inter_over_fc.value_or(-1);
    if (s.technology == "CABLE") cable = s.ratio_inter_over_fc.value_or(-1);
  }
  require(dsl.has_value() && *dsl >= 0, "DSL ratio missing");
  require(cable.has_value() && *cable >= 0, "cable ratio missing");
  require(*dsl > *cable, "expected DSL ratio above cable ratio");
  require(*dsl >= 3.0 * *cable,
          "gap too small: dsl " + fmt(*dsl) + " vs cable " + fmt(*cable));
  return "inter/congested ratio: dsl " + fmt(*dsl) + " vs cable " + fmt(*cable);
}

// 9. Two identical CLI pipelines in separate directories produce
//    byte-identical CSVs and manifests.
std::string criterion_determinism() {
  const fs::path base =
      fs::temp_directory_path() / ("conloc_accept_" + std::to_string(::getpid()));
  fs::remove_all(base);

  auto shell = [](const std::string& cmd) {
    const int status = std::system((cmd + " >/dev/null 2>&1").c_str());
    require(status != -1 && WIFEXITED(status) && WEXITSTATUS(status) == 0,
            "pipeline step failed: " + cmd);
  };

  const std::string scenario = (g_scenarios / "smoke.cfg").string();
  for (int i = 1; i <= 2; ++i) {
    const fs::path w = base / ("run" + std::to_string(i));
    fs::create_directories(w);
    const std::string cd = "cd \"" + w.string() + "\" && \"" + g_cli + "\" ";
    shell(cd + "simulate --scenario \"" + scenario + "\" --out sim");
    shell(cd +
          "ingest --benchmark sim/benchmark.csv --website sim/website.csv "
          "--connections sim/connections.csv --out store");
    shell(cd + "analyze --in store --out ana");
    shell(cd + "evaluate --verdicts ana/verdicts.csv --truth sim/truth.csv --out eval");
  }

  auto slurp = [](const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    require(in.good(), "cannot read " + p.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
  };

  int compared = 0;
  const fs::path run1 = base / "run1";
  const fs::path run2 = base / "run2";
  for (const auto& entry : fs::recursive_directory_iterator(run1)) {
    if (!entry.is_regular_file()) continue;
    const fs::path rel = fs::relative(entry.path(), run1);
    require(fs::exists(run2 / rel), "missing in second run: " + rel.string());
    require(slurp(entry.path()) == slurp(run2 / rel), "differs: " + rel.string());
    ++compared;
  }
  require(compared >= 16, "expected at least 16 output files");
  fs::remove_all(base);
  return std::to_string(compared) + " files byte-identical across runs";
}

struct Criterion {
  int id;
  const char* name;
  double budget_s;  // 0 = no stated budget
  std::function<std::string()> run;
};

}  // namespace

int main(int argc, char** argv) {
  if (argc < 3) {
    std::cerr << "usage: acceptance <cli-binary> <scenario-dir>\n";
    return 64;
  }
  g_cli = fs::absolute(argv[1]).string();
  g_scenarios = fs::absolute(argv[2]);

  const std::vector<Criterion> criteria{
      {1, "table arithmetic reproduction", 1, criterion_table_arithmetic},
      {2, "below-fraction oracle equivalence", 10, criterion_oracle_equivalence},
      {3, "tier-change detection", 30, criterion_tier_change},
      {4, "correlation unit checks", 0, criterion_correlation_checks},
      {5, "planted initial-segment detection", 120, criterion_planted_initial},
      {6, "website-edge false positives", 0, criterion_edge_only},
      {7, "middle-mile failure mode surfaced", 0, criterion_middle_mile},
      {8, "two-population directional finding", 300, criterion_two_population},
      {9, "end-to-end determinism", 0, criterion_determinism},
  };

  int passed = 0;
  for (const auto& c : criteria) {
    const auto start = std::chrono::steady_clock::now();
    std::string detail;
    std::string failure;
    try {
      detail = c.run();
    } catch (const std::exception& e) {
      failure = e.what();
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (failure.empty() && c.budget_s > 0 && secs > c.budget_s) {
      failure = "exceeded " + fmt(c.budget_s) + " s budget";
    }
    if (failure.empty()) {
      ++passed;
      std::printf("PASS criterion %d: %s: %s [%.2f s]\n", c.id, c.name, detail.c_str(), secs);
    } else {
      std::printf("FAIL criterion %d: %s: %s [%.2f s]\n", c.id, c.name, failure.c_str(), secs);
    }
    std::fflush(stdout);
  }

  std::printf("acceptance: %d/%zu criteria passed\n", passed, criteria.size());
  return passed == static_cast<int>(criteria.size()) ? 0 : 1;
}
