#include "opa2vec/reasoner.hpp"

#include <algorithm>
#include <deque>
#include <sstream>

#include "opa2vec/owl_parser.hpp"

namespace opa2vec {

SubsumptionClosure saturate(const KnowledgeBase& kb) {
    // Named subclass edges from asserted SubClassOf and EquivalentClasses.
    std::map<Iri, std::vector<Iri>> edges;
    std::set<Iri> domain = kb.classes;

    for (const auto& ax : kb.logical_axioms) {
        switch (ax.kind) {
        case AxiomKind::SubClassOf:
            domain.insert(ax.subject);
            if (ax.object.is_named()) {
                edges[ax.subject].push_back(ax.object.iri());
                domain.insert(ax.object.iri());
            }
            break;
        case AxiomKind::EquivalentClasses:
            domain.insert(ax.subject);
            if (ax.object.is_named()) {
                edges[ax.subject].push_back(ax.object.iri());
                edges[ax.object.iri()].push_back(ax.subject);
                domain.insert(ax.object.iri());
            }
            break;
        default:
            break;
        }
    }

    SubsumptionClosure closure;
    for (const Iri& c : domain) {
        std::set<Iri>& ancestors = closure.subsumptions[c];
        std::deque<Iri> queue{c};
        ancestors.insert(c);
        while (!queue.empty()) {
            Iri cur = std::move(queue.front());
            queue.pop_front();
            auto it = edges.find(cur);
            if (it == edges.end()) continue;
            for (const Iri& next : it->second)
                if (ancestors.insert(next).second) queue.push_back(next);
        }
    }

    std::set<LogicalAxiom> asserted(kb.logical_axioms.begin(), kb.logical_axioms.end());
    std::set<LogicalAxiom> inferred;

    for (const auto& [sub, ancestors] : closure.subsumptions) {
        for (const Iri& sup : ancestors) {
            if (sup == sub) continue;
            LogicalAxiom ax{AxiomKind::SubClassOf, sub, ClassExpression::named(sup),
                            Provenance::Inferred};
            if (!asserted.contains(ax)) inferred.insert(std::move(ax));
        }
    }

    // R3: propagate existential instance axioms up the class hierarchy.
    for (const auto& ax : kb.logical_axioms) {
        if (ax.kind != AxiomKind::InstanceOf) continue;
        if (!ax.object.is_existential() || !ax.object.filler().is_named()) continue;
        const Iri& relation = ax.object.iri();
        const Iri& filler = ax.object.filler().iri();
        auto it = closure.subsumptions.find(filler);
        if (it == closure.subsumptions.end()) continue;
        for (const Iri& sup : it->second) {
            if (sup == filler) continue;
            LogicalAxiom derived{AxiomKind::InstanceOf, ax.subject,
                                 ClassExpression::some(relation, ClassExpression::named(sup)),
                                 Provenance::Inferred};
            if (!asserted.contains(derived)) inferred.insert(std::move(derived));
        }
    }

    closure.inferred_axioms.assign(inferred.begin(), inferred.end());
    return closure;
}

const std::set<Iri>& superclasses(const SubsumptionClosure& closure, const Iri& c) {
    auto it = closure.subsumptions.find(c);
    if (it == closure.subsumptions.end()) throw UnknownClass(c.str());
    return it->second;
}

std::string dump_inferred(const SubsumptionClosure& closure) {
    std::ostringstream out;
    for (const auto& ax : closure.inferred_axioms) out << serialize_axiom(ax) << '\n';
    return out.str();
}

} // namespace opa2vec
