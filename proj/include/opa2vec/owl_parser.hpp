#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "opa2vec/corpus.hpp"
#include "opa2vec/kb.hpp"

namespace opa2vec {

enum class Severity { Error, Warning };

struct ParseDiagnostic {
    std::string file;
    std::size_t line = 1;
    Severity severity = Severity::Error;
    std::string message;

    std::string to_string() const;
};

struct ParseResult {
    KnowledgeBase kb;
    std::vector<ParseDiagnostic> diagnostics;

    // Error diagnostics reject the document; the kb is only meaningful when ok.
    bool ok() const;
};

// Parses an OWL functional-style-syntax subset: Prefix, Ontology (as a
// transparent wrapper), Declaration, SubClassOf, EquivalentClasses,
// DisjointClasses, ObjectSomeValuesFrom, ClassAssertion and
// AnnotationAssertion. Unknown constructs are skipped with a warning.
// Abbreviated IRIs require a declared prefix (document declarations plus
// `extra_prefixes` from the run configuration); literals are stored as their
// lexical form with datatype/language tags stripped.
ParseResult parse_ontology(std::istream& in, const std::string& filename,
                           const PrefixMap& extra_prefixes = {});
ParseResult parse_ontology_text(std::string_view text, const std::string& filename = "<string>",
                                const PrefixMap& extra_prefixes = {});

// Functional-syntax serialization; parse_ontology(serialize_ontology(kb))
// round-trips to a structurally equal knowledge base.
std::string serialize_ontology(const KnowledgeBase& kb);
std::string serialize_axiom(const LogicalAxiom& ax);

struct GafResult {
    std::vector<Association> associations;
    std::vector<ParseDiagnostic> diagnostics;
    bool ok() const;
};

// GAF-like TSV: column 2 = entity id, column 5 = class, column 7 = evidence
// code; `!` starts a comment line. Rows missing mandatory columns are skipped
// with a warning; invalid UTF-8 rejects the file.
GafResult parse_gaf(std::istream& in, const std::string& filename, const Iri& relation,
                    const PrefixMap& prefixes = {});

struct LabeledPair {
    Iri a;
    Iri b;
    std::optional<int> label; // 0 or 1 when present
};

struct PairsResult {
    std::vector<LabeledPair> pairs;
    std::vector<ParseDiagnostic> diagnostics;
    bool ok() const;
};

// Two or three tab-separated columns; the optional third column must be 0 or 1.
PairsResult parse_pairs(std::istream& in, const std::string& filename);

// Plain text, one document per line, tokenized with corpus rules. Empty
// lines are skipped.
Corpus read_text_corpus(std::istream& in);

} // namespace opa2vec
