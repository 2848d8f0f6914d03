#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <set>
#include <span>
#include <vector>

#include "opa2vec/kb.hpp"
#include "opa2vec/reasoner.hpp"

namespace opa2vec {

// Cosine of the angle between two vectors: (a.b) / (|a| |b|).
// Throws DimMismatch and ZeroVector.
double cosine(std::span<const double> a, std::span<const double> b);

struct AnnotatedEntity {
    Iri id;
    std::set<Iri> annotations;
};

// Annotation-propagated concept statistics. counts(c) is the number of
// entities annotated to c or any of its descendants (each entity at most
// once per concept), p(c) = counts(c)/total, ic(c) = -ln p(c).
class ConceptStats {
public:
    ConceptStats() = default;
    ConceptStats(std::map<Iri, std::uint64_t> counts, std::uint64_t total);

    bool has(const Iri& c) const { return counts_.contains(c); }
    std::uint64_t count(const Iri& c) const;
    std::uint64_t total() const { return total_; }
    double probability(const Iri& c) const; // throws UnknownClass for unseen concepts
    double ic(const Iri& c) const;          // -ln p(c)

private:
    std::map<Iri, std::uint64_t> counts_;
    std::uint64_t total_ = 0;
};

// Throws EmptyAnnotations when an entity has no annotations and UnknownClass
// when an annotation class is missing from the closure.
ConceptStats information_content(const SubsumptionClosure& closure,
                                 const std::vector<AnnotatedEntity>& entities);

// Resnik similarity: ic of the most informative common ancestor. Concepts
// never seen in any annotation are excluded from MICA candidacy; no common
// (counted) ancestor yields 0.
double resnik(const ConceptStats& stats, const SubsumptionClosure& closure, const Iri& c1,
              const Iri& c2);

// Best Match Average of a pairwise class similarity over two annotation sets:
//   0.5 * (mean_{c1 in S1} max_{c2 in S2} sim + mean_{c2 in S2} max_{c1 in S1} sim)
double bma(const AnnotatedEntity& e1, const AnnotatedEntity& e2,
           const std::function<double(const Iri&, const Iri&)>& sim);

// BMA with Resnik as the pairwise measure.
double resnik_bma(const ConceptStats& stats, const SubsumptionClosure& closure,
                  const AnnotatedEntity& e1, const AnnotatedEntity& e2);

} // namespace opa2vec
