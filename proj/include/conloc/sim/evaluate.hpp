#pragma once

#include <iosfwd>
#include <optional>
#include <span>
#include <stdexcept>

#include "conloc/pipeline.hpp"
#include "conloc/sim/simulate.hpp"

namespace conloc::sim {

// Verdict rows whose (unit, month) key has no ground-truth row.
struct EvalError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Confusion {
  int64_t tp = 0, fp = 0, tn = 0, fn = 0;
  std::optional<double> tpr;  // tp / (tp + fn), undefined when no positives
  std::optional<double> fpr;  // fp / (fp + tn), undefined when no negatives
  std::optional<double> fnr;  // fn / (fn + tp)
};

Confusion confusion_from_counts(int64_t tp, int64_t fp, int64_t tn, int64_t fn);

struct Evaluation {
  Confusion rc;   // congestion verdicts vs rc_true
  Confusion tis;  // tightness verdicts vs tis_true
  int64_t joined = 0;  // eligible connection-months scored
};

// Joins eligible verdicts with truth on (unit_id, month). Every eligible
// verdict must have a truth row; extra truth rows are permitted (months the
// analyzer excluded still have labels). Throws EvalError listing orphans.
Evaluation evaluate(std::span<const pipeline::AnalysisRow> verdicts,
                    std::span<const TruthRow> truth);

// confusion.csv: metric,tp,fp,tn,fn,tpr,fpr,fnr with undefined rates empty.
void write_confusion_csv(std::ostream& out, const Evaluation& eval);

}  // namespace conloc::sim
