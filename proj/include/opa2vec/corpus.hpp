#pragma once

#include <cstddef>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "opa2vec/kb.hpp"
#include "opa2vec/reasoner.hpp"

namespace opa2vec {

enum class SourceTag { Logical, Annotation, Pretrain };

struct Sentence {
    std::vector<std::string> tokens;

    std::string joined() const;
    bool operator==(const Sentence&) const = default;
};

// Ordered sentence sequence with one source tag per sentence. Order is
// deterministic for a fixed input: sentences are sorted by their serialized
// form within each source block.
struct Corpus {
    std::vector<Sentence> sentences;
    std::vector<SourceTag> tags;

    void add(Sentence s, SourceTag tag);
    std::size_t count(SourceTag tag) const;
    std::size_t size() const { return sentences.size(); }
};

// Infix serialization of a logical axiom, e.g.
//   GO:0007610 SubClassOf: GO:0008150
//   P0AAF6 InstanceOf: hasFunction some GO:0007610
Sentence axiom_to_sentence(const LogicalAxiom& ax);

// [subject, property] followed by the tokenized annotation value. The whole
// value becomes one sentence regardless of internal punctuation.
Sentence annotation_to_sentence(const AnnotationAxiom& ax);

// Lowercases and splits on whitespace, stripping leading/trailing
// punctuation (.,;:!?()[]"'). Internal hyphens and underscores survive.
// IRI- and CURIE-shaped tokens keep their case.
std::vector<std::string> tokenize(std::string_view value);

// Asserted + inferred logical sentences (deduplicated, sorted) followed by
// annotation sentences (sorted).
Corpus build_corpus(const KnowledgeBase& kb, const SubsumptionClosure& closure);

// One sentence per line, single-space separated, UTF-8.
void write_corpus(const Corpus& corpus, std::ostream& out);

// Sentence counts per source tag as a small JSON object.
std::string corpus_stats_json(const Corpus& corpus);

} // namespace opa2vec
