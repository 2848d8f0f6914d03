#pragma once

#include <map>
#include <set>
#include <string>
#include <vector>

#include "opa2vec/kb.hpp"

namespace opa2vec {

// Named-class subsumption closure plus the instance axioms it entails.
// `subsumptions` is reflexive and transitive; `inferred_axioms` holds exactly
// the derived axioms that are not asserted in the source knowledge base.
struct SubsumptionClosure {
    std::map<Iri, std::set<Iri>> subsumptions;
    std::vector<LogicalAxiom> inferred_axioms;
};

// Saturates the knowledge base under three rules:
//   R1  A ⊑ B, B ⊑ C            =>  A ⊑ C
//   R2  EquivalentClasses(A, B)  =>  A ⊑ B and B ⊑ A
//   R3  InstanceOf(e, r some C), C ⊑ D  =>  InstanceOf(e, r some D)
// Existential fillers propagate one level deep (named fillers only); nested
// existentials are left untouched. Cycles collapse into mutual subsumption.
// Per-class reachability is BFS, so the cost is O(|classes| * |edges|).
SubsumptionClosure saturate(const KnowledgeBase& kb);

// All named ancestors of c, including c itself. Throws UnknownClass.
const std::set<Iri>& superclasses(const SubsumptionClosure& closure, const Iri& c);

// Debug dump: one inferred axiom per line in functional syntax.
std::string dump_inferred(const SubsumptionClosure& closure);

} // namespace opa2vec
