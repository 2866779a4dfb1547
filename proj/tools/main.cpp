#include <algorithm>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>
#include <openssl/evp.h>

#include "conloc/ingest.hpp"
#include "conloc/numfmt.hpp"
#include "conloc/pipeline.hpp"
#include "conloc/report.hpp"
#include "conloc/sim/evaluate.hpp"
#include "conloc/sim/scenario.hpp"
#include "conloc/sim/simulate.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace conloc;

namespace {

std::ifstream open_input(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IngestError(path.string() + ": cannot open");
  return in;
}

std::string sha256_file(const fs::path& path) {
  std::ifstream in = open_input(path);
  EVP_MD_CTX* ctx = EVP_MD_CTX_new();
  EVP_DigestInit_ex(ctx, EVP_sha256(), nullptr);
  char buf[65536];
  for (;;) {
    in.read(buf, sizeof buf);
    const std::streamsize n = in.gcount();
    if (n > 0) EVP_DigestUpdate(ctx, buf, static_cast<size_t>(n));
    if (n < static_cast<std::streamsize>(sizeof buf)) break;
  }
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  EVP_DigestFinal_ex(ctx, md, &len);
  EVP_MD_CTX_free(ctx);
  static constexpr char kHex[] = "0123456789abcdef";
  std::string out = "sha256:";
  for (unsigned i = 0; i < len; ++i) {
    out += kHex[md[i] >> 4];
    out += kHex[md[i] & 0xf];
  }
  return out;
}

void write_file_atomic(const fs::path& path, std::string_view content) {
  fs::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error(tmp.string() + ": cannot write");
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    out.close();
    if (!out) throw std::runtime_error(tmp.string() + ": write failed");
  }
  fs::rename(tmp, path);
}

// Files are staged in memory and land via rename so a crash never leaves a
// torn output; the manifest records inputs and parameters for reproduction.
class OutputSet {
 public:
  OutputSet(std::string command, fs::path dir) : command_(std::move(command)), dir_(std::move(dir)) {
    fs::create_directories(dir_);
  }

  void add(std::string_view name, std::string content) {
    files_.emplace_back(std::string(name), std::move(content));
  }

  void input(const fs::path& path) { inputs_[path.string()] = sha256_file(path); }
  void param(std::string_view key, json value) { params_[std::string(key)] = std::move(value); }

  void commit() {
    json outputs = json::array();
    for (const auto& [name, content] : files_) outputs.push_back(name);
    json manifest{{"command", command_},
                  {"parameters", params_},
                  {"inputs", inputs_},
                  {"outputs", outputs}};
    for (const auto& [name, content] : files_) write_file_atomic(dir_ / name, content);
    write_file_atomic(dir_ / "manifest.json", manifest.dump(2) + "\n");
  }

 private:
  std::string command_;
  fs::path dir_;
  std::vector<std::pair<std::string, std::string>> files_;
  json inputs_ = json::object();
  json params_ = json::object();
};

std::string render(const std::function<void(std::ostream&)>& fn) {
  std::ostringstream out;
  fn(out);
  return out.str();
}

struct AnalyzeFlags {
  pipeline::AnalysisParams params;
  std::string corr_method = "pearson";
  std::string group_by = "isp";
  std::string technology;
};

void add_detector_flags(CLI::App* cmd, AnalyzeFlags& flags) {
  cmd->add_option("--q", flags.params.rc.q, "Fraction-of-tier threshold")
      ->check(CLI::Range(0.0, 1.0))
      ->capture_default_str();
  cmd->add_option("--t", flags.params.rc.t, "Fraction-of-samples threshold")
      ->check(CLI::Range(0.0, 1.0))
      ->capture_default_str();
  cmd->add_option("--corr-threshold", flags.params.detector.corr_threshold,
                  "High-correlation cutoff")
      ->check(CLI::Range(0.0, 1.0))
      ->capture_default_str();
  cmd->add_option("--count-threshold", flags.params.detector.count_threshold,
                  "High correlations required for a tight verdict")
      ->check(CLI::Range(1, 10))
      ->capture_default_str();
  cmd->add_option("--min-cycles", flags.params.detector.min_cycles,
                  "Matched cycles required for eligibility")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  cmd->add_option("--pairing-window-s", flags.params.detector.pairing_window_s,
                  "Benchmark-to-fetch pairing window, seconds")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  cmd->add_option("--min-pairs-per-site", flags.params.detector.min_pairs_per_site,
                  "Pairs required before a correlation is defined")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  cmd->add_option("--corr-method", flags.corr_method, "pearson or spearman")
      ->transform(CLI::IsMember({"pearson", "spearman"}, CLI::ignore_case))
      ->capture_default_str();
  cmd->add_option("--min-days", flags.params.min_tier_days,
                  "Distinct days required for tier inference")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
}

void record_detector_params(OutputSet& outputs, const AnalyzeFlags& flags) {
  outputs.param("q", flags.params.rc.q);
  outputs.param("t", flags.params.rc.t);
  outputs.param("corr_threshold", flags.params.detector.corr_threshold);
  outputs.param("count_threshold", flags.params.detector.count_threshold);
  outputs.param("min_cycles", flags.params.detector.min_cycles);
  outputs.param("pairing_window_s", flags.params.detector.pairing_window_s);
  outputs.param("min_pairs_per_site", flags.params.detector.min_pairs_per_site);
  outputs.param("corr_method", flags.corr_method);
  outputs.param("min_days", flags.params.min_tier_days);
}

int cmd_ingest(const fs::path& benchmark, const fs::path& website, const fs::path& connections,
               const fs::path& out_dir) {
  OutputSet outputs("ingest", out_dir);
  outputs.input(benchmark);
  outputs.input(website);
  outputs.input(connections);

  auto bench_in = open_input(benchmark);
  auto bench = ingest_benchmarks(bench_in, benchmark.string());
  auto web_in = open_input(website);
  auto web = ingest_websites(web_in, website.string());
  auto conn_in = open_input(connections);
  auto conn = ingest_connections(conn_in, connections.string());

  std::vector<Reject> rejects = std::move(bench.rejects);
  rejects.insert(rejects.end(), web.rejects.begin(), web.rejects.end());
  rejects.insert(rejects.end(), conn.rejects.begin(), conn.rejects.end());

  outputs.add("benchmark.csv", render([&](std::ostream& o) { write_benchmarks(o, bench.records); }));
  outputs.add("website.csv", render([&](std::ostream& o) { write_websites(o, web.records); }));
  outputs.add("connections.csv",
              render([&](std::ostream& o) { write_connections(o, conn.records); }));
  outputs.add("rejects.csv", render([&](std::ostream& o) { write_rejects(o, rejects); }));
  outputs.commit();

  if (!rejects.empty()) {
    std::cerr << "warning: " << rejects.size() << " row(s) quarantined to rejects.csv\n";
  }
  std::cout << "ingested " << bench.records.size() << " benchmark runs, " << web.records.size()
            << " website fetches, " << conn.records.size() << " connections\n";
  return 0;
}

int cmd_analyze(const fs::path& in_dir, const fs::path& out_dir, AnalyzeFlags& flags) {
  const fs::path bench_path = in_dir / "benchmark.csv";
  const fs::path web_path = in_dir / "website.csv";
  const fs::path conn_path = in_dir / "connections.csv";

  OutputSet outputs("analyze", out_dir);
  outputs.input(bench_path);
  outputs.input(web_path);
  outputs.input(conn_path);
  record_detector_params(outputs, flags);
  outputs.param("group_by", flags.group_by);
  outputs.param("technology", flags.technology.empty() ? json() : json(flags.technology));

  flags.params.detector.corr_method = flags.corr_method == "spearman"
                                          ? tis::CorrMethod::SPEARMAN
                                          : tis::CorrMethod::PEARSON;

  auto bench_in = open_input(bench_path);
  auto bench = ingest_benchmarks(bench_in, bench_path.string());
  auto web_in = open_input(web_path);
  auto web = ingest_websites(web_in, web_path.string());
  auto conn_in = open_input(conn_path);
  auto conn = ingest_connections(conn_in, conn_path.string());

  auto grouping = group_by_month(bench.records, web.records, conn.records);

  std::vector<Reject> rejects = std::move(bench.rejects);
  rejects.insert(rejects.end(), web.rejects.begin(), web.rejects.end());
  rejects.insert(rejects.end(), conn.rejects.begin(), conn.rejects.end());
  rejects.insert(rejects.end(), grouping.rejects.begin(), grouping.rejects.end());

  if (!flags.technology.empty()) {
    auto tech = parse_technology(flags.technology);
    std::erase_if(grouping.months, [&](const ConnectionMonth& cm) {
      return cm.connection.technology != *tech;
    });
  }

  auto result = pipeline::analyze_months(grouping.months, flags.params);
  auto verdict_rows = pipeline::to_verdict_rows(result.rows);
  auto group_by = report::parse_group_by(flags.group_by);
  auto summaries = report::summarize(verdict_rows, *group_by);
  auto isp_summaries = report::summarize(verdict_rows, report::GroupBy::ISP);
  auto prev_rc = report::prevalence_series(isp_summaries, report::Metric::RC);
  auto prev_tis = report::prevalence_series(isp_summaries, report::Metric::TIS);
  prev_rc.insert(prev_rc.end(), prev_tis.begin(), prev_tis.end());

  outputs.add("verdicts.csv",
              render([&](std::ostream& o) { pipeline::write_verdicts_csv(o, result.rows); }));
  outputs.add("tis_verdicts.csv",
              render([&](std::ostream& o) { pipeline::write_tis_verdicts_csv(o, result.rows); }));
  outputs.add("exclusions.csv",
              render([&](std::ostream& o) { pipeline::write_exclusions_csv(o, result.excluded); }));
  outputs.add("summary.csv",
              render([&](std::ostream& o) { pipeline::write_summary_csv(o, summaries); }));
  outputs.add("prevalence.csv",
              render([&](std::ostream& o) { pipeline::write_prevalence_csv(o, prev_rc); }));
  outputs.add("rejects.csv", render([&](std::ostream& o) { write_rejects(o, rejects); }));
  outputs.commit();

  const bool any_eligible =
      std::any_of(result.rows.begin(), result.rows.end(),
                  [](const pipeline::AnalysisRow& r) { return r.tis.eligible; });
  if (!any_eligible) {
    std::cerr << "warning: zero eligible connection-months\n";
  }
  std::cout << "analyzed " << result.rows.size() << " connection-months ("
            << result.excluded.size() << " excluded)\n";
  if (!rejects.empty()) {
    std::cerr << "warning: " << rejects.size() << " input row(s) rejected\n";
    return 1;
  }
  return 0;
}

int cmd_simulate(const fs::path& scenario_path, std::optional<uint64_t> seed,
                 const fs::path& out_dir) {
  auto sc_in = open_input(scenario_path);
  sim::Scenario sc = sim::parse_scenario(sc_in, scenario_path.string());
  if (seed) sc.seed = *seed;

  OutputSet outputs("simulate", out_dir);
  outputs.input(scenario_path);
  outputs.param("scenario", scenario_path.string());
  outputs.param("seed", sc.seed);

  sim::SimOutput result = sim::simulate(sc);

  outputs.add("benchmark.csv",
              render([&](std::ostream& o) { write_benchmarks(o, result.benchmark_runs); }));
  outputs.add("website.csv",
              render([&](std::ostream& o) { write_websites(o, result.website_fetches); }));
  outputs.add("connections.csv",
              render([&](std::ostream& o) { write_connections(o, result.connections); }));
  outputs.add("truth.csv", render([&](std::ostream& o) { sim::write_truth_csv(o, result.truth); }));
  outputs.commit();

  std::cout << "simulated " << result.connections.size() << " connections, "
            << result.benchmark_runs.size() << " benchmark runs, "
            << result.website_fetches.size() << " website fetches\n";
  return 0;
}

int cmd_evaluate(const fs::path& verdicts_path, const fs::path& truth_path,
                 const fs::path& out_dir) {
  OutputSet outputs("evaluate", out_dir);
  outputs.input(verdicts_path);
  outputs.input(truth_path);

  auto verdicts_in = open_input(verdicts_path);
  auto verdicts = pipeline::read_verdicts_csv(verdicts_in, verdicts_path.string());
  auto truth_in = open_input(truth_path);
  auto truth = sim::read_truth_csv(truth_in, truth_path.string());

  sim::Evaluation eval = sim::evaluate(verdicts, truth);

  outputs.add("confusion.csv",
              render([&](std::ostream& o) { sim::write_confusion_csv(o, eval); }));
  outputs.commit();

  auto rate = [](const std::optional<double>& r) {
    return r ? numfmt::format_double(*r) : std::string("undefined");
  };
  std::cout << "scored " << eval.joined << " eligible connection-months\n"
            << "rc:  tp=" << eval.rc.tp << " fp=" << eval.rc.fp << " tn=" << eval.rc.tn
            << " fn=" << eval.rc.fn << " tpr=" << rate(eval.rc.tpr)
            << " fpr=" << rate(eval.rc.fpr) << " fnr=" << rate(eval.rc.fnr) << "\n"
            << "tis: tp=" << eval.tis.tp << " fp=" << eval.tis.fp << " tn=" << eval.tis.tn
            << " fn=" << eval.tis.fn << " tpr=" << rate(eval.tis.tpr)
            << " fpr=" << rate(eval.tis.fpr) << " fnr=" << rate(eval.tis.fnr) << "\n";
  return 0;
}

int cmd_report(const fs::path& verdicts_path, const fs::path& out_dir, const std::string& group_by,
               const std::string& technology, bool anonymize, bool svg) {
  OutputSet outputs("report", out_dir);
  outputs.input(verdicts_path);
  outputs.param("group_by", group_by);
  outputs.param("technology", technology.empty() ? json() : json(technology));
  outputs.param("anonymize", anonymize);
  outputs.param("svg", svg);

  auto verdicts_in = open_input(verdicts_path);
  auto analysis_rows = pipeline::read_verdicts_csv(verdicts_in, verdicts_path.string());
  auto rows = pipeline::to_verdict_rows(analysis_rows);
  if (!technology.empty()) {
    auto tech = parse_technology(technology);
    std::erase_if(rows,
                  [&](const report::VerdictRow& r) { return r.technology != *tech; });
  }

  auto summaries = report::summarize(rows, *report::parse_group_by(group_by));
  auto isp_summaries = report::summarize(rows, report::GroupBy::ISP);

  std::map<std::string, std::string> names;
  if (anonymize) {
    names = report::anonymize_isps(isp_summaries);
    for (auto& s : summaries) {
      if (auto it = names.find(s.isp_id); it != names.end()) s.isp_id = it->second;
    }
    for (auto& s : isp_summaries) s.isp_id = names.at(s.isp_id);
  }

  auto prevalence = report::prevalence_series(isp_summaries, report::Metric::RC);
  auto prev_tis = report::prevalence_series(isp_summaries, report::Metric::TIS);
  prevalence.insert(prevalence.end(), prev_tis.begin(), prev_tis.end());

  outputs.add("summary.csv",
              render([&](std::ostream& o) { pipeline::write_summary_csv(o, summaries); }));
  outputs.add("prevalence.csv",
              render([&](std::ostream& o) { pipeline::write_prevalence_csv(o, prevalence); }));

  if (svg) {
    std::vector<Technology> techs;
    for (const auto& r : rows) {
      if (std::find(techs.begin(), techs.end(), r.technology) == techs.end())
        techs.push_back(r.technology);
    }
    std::sort(techs.begin(), techs.end());
    for (Technology t : techs) {
      auto tech_rows = rows;
      std::erase_if(tech_rows,
                    [&](const report::VerdictRow& r) { return r.technology != t; });
      auto tech_summaries = report::summarize(tech_rows, report::GroupBy::ISP);
      if (anonymize) {
        for (auto& s : tech_summaries) {
          if (auto it = names.find(s.isp_id); it != names.end()) s.isp_id = it->second;
        }
      }
      const std::string tech_name(technology_name(t));
      for (auto metric : {report::Metric::RC, report::Metric::TIS}) {
        auto series = report::prevalence_series(tech_summaries, metric);
        const std::string label = metric == report::Metric::RC
                                      ? "Recurrent congestion prevalence"
                                      : "Tight initial segment prevalence";
        outputs.add("prevalence_" + std::string(report::metric_name(metric)) + "_" + tech_name +
                        ".svg",
                    report::render_prevalence_svg(series, metric, label + " (" + tech_name + ")"));
      }
    }
  }
  outputs.commit();

  std::cout << "reported " << summaries.size() << " summary row(s)\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Congestion localization toolkit for sparse broadband measurements"};
  app.require_subcommand(1);

  std::function<int()> run;

  // ingest
  auto* ingest = app.add_subcommand("ingest", "Validate raw CSVs into a normalized store");
  {
    static fs::path benchmark, website, connections, out_dir;
    ingest->add_option("--benchmark", benchmark, "benchmark.csv path")->required();
    ingest->add_option("--website", website, "website.csv path")->required();
    ingest->add_option("--connections", connections, "connections.csv path")->required();
    ingest->add_option("--out", out_dir, "Output directory")->required();
    ingest->callback([&] { run = [&] { return cmd_ingest(benchmark, website, connections, out_dir); }; });
  }

  // analyze
  auto* analyze = app.add_subcommand("analyze", "Run verdicts and reports over an ingested store");
  {
    static fs::path in_dir, out_dir;
    static AnalyzeFlags flags;
    analyze->add_option("--in", in_dir, "Ingested store directory")->required();
    analyze->add_option("--out", out_dir, "Output directory")->required();
    add_detector_flags(analyze, flags);
    analyze->add_option("--group-by", flags.group_by, "Summary grouping: isp, technology or all")
        ->transform(CLI::IsMember({"isp", "technology", "all"}, CLI::ignore_case))
        ->capture_default_str();
    analyze->add_option("--technology", flags.technology, "Restrict to one technology")
        ->transform(CLI::IsMember({"dsl", "cable", "other"}, CLI::ignore_case));
    analyze->callback([&] { run = [&] { return cmd_analyze(in_dir, out_dir, flags); }; });
  }

  // simulate
  auto* simulate = app.add_subcommand("simulate", "Generate synthetic measurements with ground truth");
  {
    static fs::path scenario, out_dir;
    static std::optional<uint64_t> seed;
    simulate->add_option("--scenario", scenario, "Scenario config path")->required();
    simulate->add_option("--seed", seed, "Override the scenario seed");
    simulate->add_option("--out", out_dir, "Output directory")->required();
    simulate->callback([&] { run = [&] { return cmd_simulate(scenario, seed, out_dir); }; });
  }

  // evaluate
  auto* evaluate = app.add_subcommand("evaluate", "Score verdicts against simulator ground truth");
  {
    static fs::path verdicts, truth, out_dir;
    evaluate->add_option("--verdicts", verdicts, "verdicts.csv path")->required();
    evaluate->add_option("--truth", truth, "truth.csv path")->required();
    evaluate->add_option("--out", out_dir, "Output directory")->required();
    evaluate->callback([&] { run = [&] { return cmd_evaluate(verdicts, truth, out_dir); }; });
  }

  // report
  auto* report_cmd = app.add_subcommand("report", "Re-aggregate saved verdicts into tables and plots");
  {
    static fs::path verdicts, out_dir;
    static std::string group_by = "isp";
    static std::string technology;
    static bool anonymize = false;
    static bool svg = false;
    report_cmd->add_option("--verdicts", verdicts, "verdicts.csv path")->required();
    report_cmd->add_option("--out", out_dir, "Output directory")->required();
    report_cmd->add_option("--group-by", group_by, "Summary grouping: isp, technology or all")
        ->transform(CLI::IsMember({"isp", "technology", "all"}, CLI::ignore_case))
        ->capture_default_str();
    report_cmd->add_option("--technology", technology, "Restrict to one technology")
        ->transform(CLI::IsMember({"dsl", "cable", "other"}, CLI::ignore_case));
    report_cmd->add_flag("--anonymize", anonymize, "Replace ISP ids with stable pseudonyms");
    report_cmd->add_flag("--svg", svg, "Emit per-technology prevalence bar charts");
    report_cmd->callback([&] {
      run = [&] { return cmd_report(verdicts, out_dir, group_by, technology, anonymize, svg); };
    });
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    return run();
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}
