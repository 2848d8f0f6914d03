#pragma once

#include <compare>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "opa2vec/errors.hpp"

namespace opa2vec {

// Identifier for a class, property, or individual. Holds either an absolute
// IRI or a CURIE-style token such as "GO:0007610"; comparison is plain string
// comparison on the stored (already expanded) form.
class Iri {
public:
    Iri() = default;
    explicit Iri(std::string value);

    const std::string& str() const { return value_; }
    bool empty() const { return value_.empty(); }

    auto operator<=>(const Iri&) const = default;

private:
    std::string value_;
};

using PrefixMap = std::map<std::string, std::string>;

// Expands "prefix:local" against the map; anything else (absolute IRIs,
// bare identifiers, unknown prefixes) passes through unchanged.
Iri expand_iri(const std::string& text, const PrefixMap& prefixes);

// True for "prefix:local" where prefix starts with a letter or underscore.
bool is_curie(const std::string& text);

// A named class or a (possibly nested) existential restriction.
class ClassExpression {
public:
    ClassExpression() = default;

    static ClassExpression named(Iri iri);
    static ClassExpression some(Iri relation, ClassExpression filler);

    bool is_named() const { return node_ && node_->named; }
    bool is_existential() const { return node_ && !node_->named; }

    // named: the class IRI; existential: the relation IRI
    const Iri& iri() const { return node_->iri; }

    // Existential filler; the returned expression shares ownership of the
    // underlying node, so references obtained from it stay valid while the
    // parent expression lives.
    ClassExpression filler() const {
        ClassExpression e;
        e.node_ = node_->filler;
        return e;
    }

    int depth() const;

    friend bool operator==(const ClassExpression& a, const ClassExpression& b) {
        return compare(a.node_.get(), b.node_.get()) == 0;
    }
    friend std::strong_ordering operator<=>(const ClassExpression& a, const ClassExpression& b) {
        int c = compare(a.node_.get(), b.node_.get());
        return c < 0 ? std::strong_ordering::less
             : c > 0 ? std::strong_ordering::greater
                     : std::strong_ordering::equal;
    }

private:
    struct Node {
        bool named = true;
        Iri iri;
        std::shared_ptr<const Node> filler; // null for named
    };
    static int compare(const Node* a, const Node* b);
    std::shared_ptr<const Node> node_;
};

enum class AxiomKind { SubClassOf, EquivalentClasses, Disjoint, InstanceOf };
enum class Provenance { Asserted, Inferred };

struct LogicalAxiom {
    AxiomKind kind = AxiomKind::SubClassOf;
    Iri subject;
    ClassExpression object;
    Provenance provenance = Provenance::Asserted;

    // Structural identity; provenance is metadata and does not take part.
    friend bool operator==(const LogicalAxiom& a, const LogicalAxiom& b) {
        return a.kind == b.kind && a.subject == b.subject && a.object == b.object;
    }
    friend std::strong_ordering operator<=>(const LogicalAxiom& a, const LogicalAxiom& b) {
        if (auto c = a.kind <=> b.kind; c != 0) return c;
        if (auto c = a.subject <=> b.subject; c != 0) return c;
        return a.object <=> b.object;
    }
};

// Annotation value is kept as its lexical form; datatype and language tags
// are already stripped by the parser.
struct AnnotationAxiom {
    Iri subject;
    Iri property;
    std::string value;

    auto operator<=>(const AnnotationAxiom&) const = default;
};

struct Association {
    Iri entity;
    Iri relation;
    Iri cls;
    std::optional<std::string> evidence; // uppercase code such as "IEA"

    auto operator<=>(const Association&) const = default;
};

struct KnowledgeBase {
    std::set<Iri> classes;
    std::set<Iri> properties; // object and annotation properties
    std::set<Iri> individuals;
    std::vector<LogicalAxiom> logical_axioms;
    std::vector<AnnotationAxiom> annotation_axioms;
    std::vector<Association> associations;

    bool operator==(const KnowledgeBase&) const = default;
};

// Canonicalizes symmetric axioms (EquivalentClasses/Disjoint get their lesser
// IRI as subject), drops structural duplicates, and registers every
// referenced IRI in the matching declaration set. Idempotent.
KnowledgeBase normalize(KnowledgeBase kb);

// Materializes each association (e, r, C) as InstanceOf(e, r some C).
// Throws UnknownClass when C is not a declared class. Idempotent.
KnowledgeBase add_association_axioms(KnowledgeBase kb);

// Keeps only annotation axioms whose property is in `allowed`.
KnowledgeBase filter_annotations_by_property(KnowledgeBase kb, const std::set<Iri>& allowed);

// Drops associations whose evidence code is in `excluded`; associations
// without an evidence code always pass.
KnowledgeBase filter_associations_by_evidence(KnowledgeBase kb, const std::set<std::string>& excluded);

} // namespace opa2vec
