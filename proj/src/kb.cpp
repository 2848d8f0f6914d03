#include "opa2vec/kb.hpp"

#include <algorithm>
#include <cctype>

namespace opa2vec {

Iri::Iri(std::string value) : value_(std::move(value)) {
    if (value_.empty()) throw Error("IRI must be non-empty");
    for (char c : value_) {
        if (std::isspace(static_cast<unsigned char>(c)))
            throw Error("IRI contains whitespace: '" + value_ + "'");
    }
}

bool is_curie(const std::string& text) {
    auto colon = text.find(':');
    if (colon == std::string::npos || colon == 0 || colon + 1 >= text.size()) return false;
    char first = text[0];
    if (!std::isalpha(static_cast<unsigned char>(first)) && first != '_') return false;
    for (std::size_t i = 1; i < colon; ++i) {
        char c = text[i];
        if (!std::isalnum(static_cast<unsigned char>(c)) && c != '_' && c != '-' && c != '.')
            return false;
    }
    // a second colon in the local part means this is a full IRI, not a CURIE
    if (text.find(':', colon + 1) != std::string::npos) return false;
    return true;
}

Iri expand_iri(const std::string& text, const PrefixMap& prefixes) {
    if (is_curie(text)) {
        auto colon = text.find(':');
        auto it = prefixes.find(text.substr(0, colon));
        if (it != prefixes.end()) return Iri(it->second + text.substr(colon + 1));
    }
    return Iri(text);
}

ClassExpression ClassExpression::named(Iri iri) {
    ClassExpression e;
    e.node_ = std::make_shared<Node>(Node{true, std::move(iri), nullptr});
    return e;
}

ClassExpression ClassExpression::some(Iri relation, ClassExpression filler) {
    ClassExpression e;
    e.node_ = std::make_shared<Node>(Node{false, std::move(relation), std::move(filler.node_)});
    return e;
}

int ClassExpression::depth() const {
    int d = 0;
    for (const Node* n = node_.get(); n; n = n->filler.get()) ++d;
    return d == 0 ? 1 : d;
}

int ClassExpression::compare(const Node* a, const Node* b) {
    if (!a || !b) return (a ? 1 : 0) - (b ? 1 : 0);
    if (a == b) return 0;
    if (a->named != b->named) return a->named ? -1 : 1;
    if (int c = a->iri.str().compare(b->iri.str()); c != 0) return c < 0 ? -1 : 1;
    if (a->named) return 0;
    return compare(a->filler.get(), b->filler.get());
}

namespace {

void declare_expression(const ClassExpression& expr, KnowledgeBase& kb) {
    if (expr.is_named()) {
        kb.classes.insert(expr.iri());
    } else if (expr.is_existential()) {
        kb.properties.insert(expr.iri());
        declare_expression(expr.filler(), kb);
    }
}

LogicalAxiom canonical(LogicalAxiom ax) {
    bool symmetric = ax.kind == AxiomKind::EquivalentClasses || ax.kind == AxiomKind::Disjoint;
    if (symmetric && ax.object.is_named() && ax.object.iri() < ax.subject) {
        Iri obj = ax.object.iri();
        ax.object = ClassExpression::named(ax.subject);
        ax.subject = std::move(obj);
    }
    return ax;
}

} // namespace

KnowledgeBase normalize(KnowledgeBase kb) {
    std::vector<LogicalAxiom> logical;
    logical.reserve(kb.logical_axioms.size());
    std::set<LogicalAxiom> seen;
    for (auto& ax : kb.logical_axioms) {
        if (ax.kind == AxiomKind::SubClassOf && ax.object.is_named() &&
            ax.object.iri() == ax.subject)
            continue; // tautological self-subsumption
        LogicalAxiom c = canonical(std::move(ax));
        if (seen.insert(c).second) logical.push_back(std::move(c));
    }
    kb.logical_axioms = std::move(logical);

    std::vector<AnnotationAxiom> annotations;
    annotations.reserve(kb.annotation_axioms.size());
    std::set<AnnotationAxiom> seen_ann;
    for (auto& ax : kb.annotation_axioms) {
        if (seen_ann.insert(ax).second) annotations.push_back(std::move(ax));
    }
    kb.annotation_axioms = std::move(annotations);

    std::vector<Association> assocs;
    assocs.reserve(kb.associations.size());
    std::set<Association> seen_assoc;
    for (auto& a : kb.associations) {
        if (seen_assoc.insert(a).second) assocs.push_back(std::move(a));
    }
    kb.associations = std::move(assocs);

    for (const auto& ax : kb.logical_axioms) {
        if (ax.kind == AxiomKind::InstanceOf)
            kb.individuals.insert(ax.subject);
        else
            kb.classes.insert(ax.subject);
        declare_expression(ax.object, kb);
    }
    for (const auto& ax : kb.annotation_axioms) {
        kb.properties.insert(ax.property);
        if (!kb.properties.contains(ax.subject) && !kb.individuals.contains(ax.subject))
            kb.classes.insert(ax.subject);
    }
    for (const auto& a : kb.associations) {
        kb.individuals.insert(a.entity);
        kb.properties.insert(a.relation);
    }
    return kb;
}

KnowledgeBase add_association_axioms(KnowledgeBase kb) {
    std::set<LogicalAxiom> existing(kb.logical_axioms.begin(), kb.logical_axioms.end());
    std::set<Association> distinct;
    for (const auto& a : kb.associations) {
        if (!kb.classes.contains(a.cls)) throw UnknownClass(a.cls.str());
        if (!distinct.insert(Association{a.entity, a.relation, a.cls, std::nullopt}).second) continue;
        LogicalAxiom ax{AxiomKind::InstanceOf, a.entity,
                        ClassExpression::some(a.relation, ClassExpression::named(a.cls)),
                        Provenance::Asserted};
        if (existing.insert(ax).second) kb.logical_axioms.push_back(std::move(ax));
    }
    for (const auto& a : kb.associations) {
        kb.individuals.insert(a.entity);
        kb.properties.insert(a.relation);
    }
    return kb;
}

KnowledgeBase filter_annotations_by_property(KnowledgeBase kb, const std::set<Iri>& allowed) {
    std::erase_if(kb.annotation_axioms,
                  [&](const AnnotationAxiom& ax) { return !allowed.contains(ax.property); });
    return kb;
}

KnowledgeBase filter_associations_by_evidence(KnowledgeBase kb, const std::set<std::string>& excluded) {
    std::erase_if(kb.associations, [&](const Association& a) {
        return a.evidence && excluded.contains(*a.evidence);
    });
    return kb;
}

} // namespace opa2vec
