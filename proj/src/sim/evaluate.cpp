#include "conloc/sim/evaluate.hpp"

#include <map>
#include <ostream>
#include <utility>

#include "conloc/csv.hpp"
#include "conloc/numfmt.hpp"

namespace conloc::sim {

Confusion confusion_from_counts(int64_t tp, int64_t fp, int64_t tn, int64_t fn) {
  Confusion c;
  c.tp = tp;
  c.fp = fp;
  c.tn = tn;
  c.fn = fn;
  if (tp + fn > 0) {
    c.tpr = static_cast<double>(tp) / static_cast<double>(tp + fn);
    c.fnr = static_cast<double>(fn) / static_cast<double>(tp + fn);
  }
  if (fp + tn > 0) c.fpr = static_cast<double>(fp) / static_cast<double>(fp + tn);
  return c;
}

Evaluation evaluate(std::span<const pipeline::AnalysisRow> verdicts,
                    std::span<const TruthRow> truth) {
  std::map<std::pair<std::string, YearMonth>, const TruthRow*> by_key;
  for (const auto& t : truth) by_key[{t.unit_id, t.ym}] = &t;

  int64_t rc_tp = 0, rc_fp = 0, rc_tn = 0, rc_fn = 0;
  int64_t tis_tp = 0, tis_fp = 0, tis_tn = 0, tis_fn = 0;
  std::string orphans;
  int64_t orphan_count = 0;
  int64_t joined = 0;

  for (const auto& v : verdicts) {
    if (!v.tis.eligible) continue;
    auto it = by_key.find({v.unit_id, v.ym});
    if (it == by_key.end()) {
      ++orphan_count;
      if (orphan_count <= 20) {
        if (!orphans.empty()) orphans += ", ";
        orphans += v.unit_id + ":" + timeutil::format_year_month(v.ym);
      }
      continue;
    }
    const TruthRow& t = *it->second;
    ++joined;
    if (v.rc_congested && t.rc_true) ++rc_tp;
    else if (v.rc_congested && !t.rc_true) ++rc_fp;
    else if (!v.rc_congested && !t.rc_true) ++rc_tn;
    else ++rc_fn;
    if (v.tis.tight && t.tis_true) ++tis_tp;
    else if (v.tis.tight && !t.tis_true) ++tis_fp;
    else if (!v.tis.tight && !t.tis_true) ++tis_tn;
    else ++tis_fn;
  }

  if (orphan_count > 0) {
    if (orphan_count > 20) orphans += ", ...";
    throw EvalError("no ground truth for " + std::to_string(orphan_count) +
                    " verdict(s): " + orphans);
  }

  Evaluation eval;
  eval.rc = confusion_from_counts(rc_tp, rc_fp, rc_tn, rc_fn);
  eval.tis = confusion_from_counts(tis_tp, tis_fp, tis_tn, tis_fn);
  eval.joined = joined;
  return eval;
}

namespace {

void write_row(std::ostream& out, std::string_view metric, const Confusion& c) {
  out << csv::join({std::string(metric), numfmt::format_int(c.tp), numfmt::format_int(c.fp),
                    numfmt::format_int(c.tn), numfmt::format_int(c.fn),
                    c.tpr ? numfmt::format_double(*c.tpr) : std::string(),
                    c.fpr ? numfmt::format_double(*c.fpr) : std::string(),
                    c.fnr ? numfmt::format_double(*c.fnr) : std::string()})
      << "\n";
}

}  // namespace

void write_confusion_csv(std::ostream& out, const Evaluation& eval) {
  out << "metric,tp,fp,tn,fn,tpr,fpr,fnr\n";
  write_row(out, "rc", eval.rc);
  write_row(out, "tis", eval.tis);
}

}  // namespace conloc::sim
