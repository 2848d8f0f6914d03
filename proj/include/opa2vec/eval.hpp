#pragma once

#include <iosfwd>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "opa2vec/errors.hpp"
#include "opa2vec/kb.hpp"

namespace opa2vec {

struct ScoredLabel {
    double score = 0.0;
    int label = 0; // 0 or 1
};

// ROC curve as ordered (fpr, tpr) points from (0,0) to (1,1). Tied scores
// share one threshold step, so the curve (and the trapezoidal AUC) matches
// the tie-aware Mann-Whitney statistic. thresholds[i] is the lowest score
// classified positive at point i; the (0,0) point carries +infinity.
struct RocResult {
    std::vector<double> fpr;
    std::vector<double> tpr;
    std::vector<double> thresholds;
    double auc = 0.0;
};

// Throws DegenerateLabels unless both classes are present.
RocResult roc_curve(std::span<const ScoredLabel> scored);

// Trapezoidal AUC; equal to the Mann-Whitney statistic with half credit
// for ties.
double auc_only(std::span<const ScoredLabel> scored);

// One method's scores over a labeled pair set.
struct MethodRun {
    std::string name;
    std::vector<std::pair<Iri, Iri>> pairs;
    std::vector<ScoredLabel> scored; // aligned with pairs
};

struct MethodSummary {
    std::string name;
    double auc = 0.0;
    std::size_t n_pos = 0;
    std::size_t n_neg = 0;
    RocResult roc;
};

// Per-method AUC summaries ordered by descending AUC. All runs must cover
// the same labeled pair set (order-insensitive); throws PairSetMismatch.
std::vector<MethodSummary> compare_methods(const std::vector<MethodRun>& runs);

// `method <tab> auc <tab> n_pos <tab> n_neg` rows.
void write_summary_tsv(const std::vector<MethodSummary>& summaries, std::ostream& out);

// `threshold,fpr,tpr` rows for external plotting.
void write_roc_csv(const RocResult& roc, std::ostream& out);

} // namespace opa2vec
