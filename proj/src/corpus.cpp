#include "opa2vec/corpus.hpp"

#include <algorithm>
#include <cctype>
#include <ostream>
#include <set>
#include <sstream>

namespace opa2vec {

std::string Sentence::joined() const {
    std::string out;
    for (std::size_t i = 0; i < tokens.size(); ++i) {
        if (i) out += ' ';
        out += tokens[i];
    }
    return out;
}

void Corpus::add(Sentence s, SourceTag tag) {
    sentences.push_back(std::move(s));
    tags.push_back(tag);
}

std::size_t Corpus::count(SourceTag tag) const {
    return static_cast<std::size_t>(std::count(tags.begin(), tags.end(), tag));
}

namespace {

void expression_tokens(const ClassExpression& expr, std::vector<std::string>& out) {
    if (expr.is_named()) {
        out.push_back(expr.iri().str());
    } else {
        out.push_back(expr.iri().str());
        out.push_back("some");
        expression_tokens(expr.filler(), out);
    }
}

constexpr std::string_view kStrip = ".,;:!?()[]\"'";

bool looks_like_iri(const std::string& token) {
    return token.find("://") != std::string::npos || is_curie(token);
}

} // namespace

Sentence axiom_to_sentence(const LogicalAxiom& ax) {
    Sentence s;
    s.tokens.push_back(ax.subject.str());
    switch (ax.kind) {
    case AxiomKind::SubClassOf: s.tokens.push_back("SubClassOf:"); break;
    case AxiomKind::EquivalentClasses: s.tokens.push_back("EquivalentTo:"); break;
    case AxiomKind::Disjoint: s.tokens.push_back("DisjointWith:"); break;
    case AxiomKind::InstanceOf: s.tokens.push_back("InstanceOf:"); break;
    }
    expression_tokens(ax.object, s.tokens);
    return s;
}

std::vector<std::string> tokenize(std::string_view value) {
    std::vector<std::string> tokens;
    std::size_t i = 0;
    while (i < value.size()) {
        while (i < value.size() && std::isspace(static_cast<unsigned char>(value[i]))) ++i;
        std::size_t start = i;
        while (i < value.size() && !std::isspace(static_cast<unsigned char>(value[i]))) ++i;
        if (i == start) continue;
        std::string token(value.substr(start, i - start));

        std::size_t lo = 0, hi = token.size();
        while (lo < hi && kStrip.find(token[lo]) != std::string_view::npos) ++lo;
        while (hi > lo && kStrip.find(token[hi - 1]) != std::string_view::npos) --hi;
        token = token.substr(lo, hi - lo);
        if (token.empty()) continue;

        if (!looks_like_iri(token)) {
            for (char& c : token) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
        }
        tokens.push_back(std::move(token));
    }
    return tokens;
}

Sentence annotation_to_sentence(const AnnotationAxiom& ax) {
    Sentence s;
    s.tokens.push_back(ax.subject.str());
    s.tokens.push_back(ax.property.str());
    for (auto& tok : tokenize(ax.value)) s.tokens.push_back(std::move(tok));
    return s;
}

Corpus build_corpus(const KnowledgeBase& kb, const SubsumptionClosure& closure) {
    std::set<std::string> logical;
    for (const auto& ax : kb.logical_axioms) logical.insert(axiom_to_sentence(ax).joined());
    for (const auto& ax : closure.inferred_axioms) logical.insert(axiom_to_sentence(ax).joined());

    std::vector<std::string> annotation;
    annotation.reserve(kb.annotation_axioms.size());
    for (const auto& ax : kb.annotation_axioms) annotation.push_back(annotation_to_sentence(ax).joined());
    std::sort(annotation.begin(), annotation.end());

    auto split = [](const std::string& line) {
        Sentence s;
        std::istringstream in(line);
        std::string tok;
        while (in >> tok) s.tokens.push_back(tok);
        return s;
    };

    Corpus corpus;
    for (const auto& line : logical) corpus.add(split(line), SourceTag::Logical);
    for (const auto& line : annotation) corpus.add(split(line), SourceTag::Annotation);
    return corpus;
}

void write_corpus(const Corpus& corpus, std::ostream& out) {
    for (const auto& s : corpus.sentences) out << s.joined() << '\n';
}

std::string corpus_stats_json(const Corpus& corpus) {
    std::ostringstream out;
    out << "{\"annotation\": " << corpus.count(SourceTag::Annotation)
        << ", \"logical\": " << corpus.count(SourceTag::Logical)
        << ", \"pretrain\": " << corpus.count(SourceTag::Pretrain) << "}";
    return out.str();
}

} // namespace opa2vec
