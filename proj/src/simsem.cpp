#include "opa2vec/simsem.hpp"

#include <cmath>

namespace opa2vec {

double cosine(std::span<const double> a, std::span<const double> b) {
    if (a.size() != b.size())
        throw DimMismatch("cosine over vectors of size " + std::to_string(a.size()) + " and " +
                          std::to_string(b.size()));
    double ab = 0.0, aa = 0.0, bb = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        ab += a[i] * b[i];
        aa += a[i] * a[i];
        bb += b[i] * b[i];
    }
    if (aa == 0.0 || bb == 0.0) throw ZeroVector();
    return ab / (std::sqrt(aa) * std::sqrt(bb));
}

ConceptStats::ConceptStats(std::map<Iri, std::uint64_t> counts, std::uint64_t total)
    : counts_(std::move(counts)), total_(total) {}

std::uint64_t ConceptStats::count(const Iri& c) const {
    auto it = counts_.find(c);
    return it == counts_.end() ? 0 : it->second;
}

double ConceptStats::probability(const Iri& c) const {
    auto it = counts_.find(c);
    if (it == counts_.end() || total_ == 0) throw UnknownClass(c.str());
    return static_cast<double>(it->second) / static_cast<double>(total_);
}

double ConceptStats::ic(const Iri& c) const { return -std::log(probability(c)); }

ConceptStats information_content(const SubsumptionClosure& closure,
                                 const std::vector<AnnotatedEntity>& entities) {
    std::map<Iri, std::uint64_t> counts;
    for (const auto& entity : entities) {
        if (entity.annotations.empty()) throw EmptyAnnotations(entity.id.str());
        std::set<Iri> ancestors;
        for (const Iri& c : entity.annotations) {
            const auto& sup = superclasses(closure, c);
            ancestors.insert(sup.begin(), sup.end());
        }
        for (const Iri& a : ancestors) ++counts[a];
    }
    return ConceptStats(std::move(counts), entities.size());
}

double resnik(const ConceptStats& stats, const SubsumptionClosure& closure, const Iri& c1,
              const Iri& c2) {
    const auto& anc1 = superclasses(closure, c1);
    const auto& anc2 = superclasses(closure, c2);
    double best = 0.0;
    bool found = false;
    for (const Iri& a : anc1) {
        if (!anc2.contains(a) || !stats.has(a)) continue;
        double value = stats.ic(a);
        if (!found || value > best) {
            best = value;
            found = true;
        }
    }
    return found ? best : 0.0;
}

double bma(const AnnotatedEntity& e1, const AnnotatedEntity& e2,
           const std::function<double(const Iri&, const Iri&)>& sim) {
    if (e1.annotations.empty()) throw EmptyAnnotations(e1.id.str());
    if (e2.annotations.empty()) throw EmptyAnnotations(e2.id.str());

    auto best_average = [&](const std::set<Iri>& from, const std::set<Iri>& to, bool flipped) {
        double sum = 0.0;
        for (const Iri& c1 : from) {
            double best = 0.0;
            bool first = true;
            for (const Iri& c2 : to) {
                double value = flipped ? sim(c2, c1) : sim(c1, c2);
                if (first || value > best) {
                    best = value;
                    first = false;
                }
            }
            sum += best;
        }
        return sum / static_cast<double>(from.size());
    };

    return 0.5 * (best_average(e1.annotations, e2.annotations, false) +
                  best_average(e2.annotations, e1.annotations, true));
}

double resnik_bma(const ConceptStats& stats, const SubsumptionClosure& closure,
                  const AnnotatedEntity& e1, const AnnotatedEntity& e2) {
    return bma(e1, e2,
               [&](const Iri& a, const Iri& b) { return resnik(stats, closure, a, b); });
}

} // namespace opa2vec
