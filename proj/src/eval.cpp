#include "opa2vec/eval.hpp"

#include <algorithm>
#include <cstdio>
#include <limits>
#include <map>
#include <ostream>

namespace opa2vec {

RocResult roc_curve(std::span<const ScoredLabel> scored) {
    std::size_t positives = 0, negatives = 0;
    for (const auto& s : scored) (s.label ? positives : negatives)++;
    if (positives == 0 || negatives == 0) throw DegenerateLabels();

    std::vector<ScoredLabel> sorted(scored.begin(), scored.end());
    std::sort(sorted.begin(), sorted.end(),
              [](const ScoredLabel& a, const ScoredLabel& b) { return a.score > b.score; });

    RocResult roc;
    roc.fpr.push_back(0.0);
    roc.tpr.push_back(0.0);
    roc.thresholds.push_back(std::numeric_limits<double>::infinity());

    const double p = static_cast<double>(positives);
    const double n = static_cast<double>(negatives);
    std::size_t tp = 0, fp = 0;
    std::size_t i = 0;
    while (i < sorted.size()) {
        double threshold = sorted[i].score;
        while (i < sorted.size() && sorted[i].score == threshold) {
            (sorted[i].label ? tp : fp)++;
            ++i;
        }
        double x = fp / n;
        double y = tp / p;
        roc.auc += (x - roc.fpr.back()) * (y + roc.tpr.back()) / 2.0;
        roc.fpr.push_back(x);
        roc.tpr.push_back(y);
        roc.thresholds.push_back(threshold);
    }
    return roc;
}

double auc_only(std::span<const ScoredLabel> scored) { return roc_curve(scored).auc; }

std::vector<MethodSummary> compare_methods(const std::vector<MethodRun>& runs) {
    if (runs.empty()) return {};

    auto key_set = [](const MethodRun& run) {
        std::map<std::pair<Iri, Iri>, int> keys;
        for (std::size_t i = 0; i < run.pairs.size(); ++i) {
            auto [a, b] = run.pairs[i];
            if (b < a) std::swap(a, b);
            keys[{a, b}] = run.scored[i].label;
        }
        return keys;
    };

    auto reference = key_set(runs.front());
    for (std::size_t r = 1; r < runs.size(); ++r) {
        if (key_set(runs[r]) != reference)
            throw PairSetMismatch("method '" + runs[r].name +
                                  "' is scored over a different pair set than '" +
                                  runs.front().name + "'");
    }

    std::vector<MethodSummary> summaries;
    for (const auto& run : runs) {
        MethodSummary s;
        s.name = run.name;
        s.roc = roc_curve(run.scored);
        s.auc = s.roc.auc;
        for (const auto& sl : run.scored) (sl.label ? s.n_pos : s.n_neg)++;
        summaries.push_back(std::move(s));
    }
    std::stable_sort(summaries.begin(), summaries.end(),
                     [](const MethodSummary& a, const MethodSummary& b) { return a.auc > b.auc; });
    return summaries;
}

namespace {

std::string fmt(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

} // namespace

void write_summary_tsv(const std::vector<MethodSummary>& summaries, std::ostream& out) {
    out << "method\tauc\tn_pos\tn_neg\n";
    for (const auto& s : summaries)
        out << s.name << '\t' << fmt(s.auc) << '\t' << s.n_pos << '\t' << s.n_neg << '\n';
}

void write_roc_csv(const RocResult& roc, std::ostream& out) {
    out << "threshold,fpr,tpr\n";
    for (std::size_t i = 0; i < roc.fpr.size(); ++i)
        out << fmt(roc.thresholds[i]) << ',' << fmt(roc.fpr[i]) << ',' << fmt(roc.tpr[i]) << '\n';
}

} // namespace opa2vec
