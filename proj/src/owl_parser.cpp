#include "opa2vec/owl_parser.hpp"

#include <cctype>
#include <istream>
#include <sstream>

namespace opa2vec {

std::string ParseDiagnostic::to_string() const {
    std::ostringstream out;
    out << file << ':' << line << ": "
        << (severity == Severity::Error ? "error: " : "warning: ") << message;
    return out.str();
}

bool ParseResult::ok() const {
    for (const auto& d : diagnostics)
        if (d.severity == Severity::Error) return false;
    return true;
}

bool GafResult::ok() const {
    for (const auto& d : diagnostics)
        if (d.severity == Severity::Error) return false;
    return true;
}

bool PairsResult::ok() const {
    for (const auto& d : diagnostics)
        if (d.severity == Severity::Error) return false;
    return true;
}

namespace {

// Thrown internally to reject the document; converted into an Error
// diagnostic at the parse_ontology boundary.
struct ParseAbort {
    std::size_t line;
    std::string message;
};

bool valid_utf8(std::string_view bytes) {
    std::size_t i = 0;
    while (i < bytes.size()) {
        unsigned char c = static_cast<unsigned char>(bytes[i]);
        std::size_t extra;
        unsigned cp_min;
        if (c < 0x80) { ++i; continue; }
        else if ((c & 0xE0) == 0xC0) { extra = 1; cp_min = 0x80; }
        else if ((c & 0xF0) == 0xE0) { extra = 2; cp_min = 0x800; }
        else if ((c & 0xF8) == 0xF0) { extra = 3; cp_min = 0x10000; }
        else return false;
        if (i + extra >= bytes.size()) return false;
        unsigned cp = c & (0x3F >> extra);
        for (std::size_t k = 1; k <= extra; ++k) {
            unsigned char cc = static_cast<unsigned char>(bytes[i + k]);
            if ((cc & 0xC0) != 0x80) return false;
            cp = (cp << 6) | (cc & 0x3F);
        }
        if (cp < cp_min || cp > 0x10FFFF || (cp >= 0xD800 && cp <= 0xDFFF)) return false;
        i += extra + 1;
    }
    return true;
}

enum class TokKind { LParen, RParen, Bare, IriRef, Literal, End };

struct Token {
    TokKind kind = TokKind::End;
    std::string text; // bare token text, IRI body, or literal lexical form
    std::size_t line = 1;
};

class Lexer {
public:
    Lexer(std::istream& in) : in_(in) {}

    const Token& peek() {
        if (!buffered_) {
            tok_ = lex();
            buffered_ = true;
        }
        return tok_;
    }

    Token next() {
        peek();
        buffered_ = false;
        return std::move(tok_);
    }

    std::size_t line() const { return line_; }

private:
    int get() {
        int c = in_.get();
        if (c == '\n') ++line_;
        validate(c);
        return c;
    }

    int raw_peek() { return in_.peek(); }

    // Incremental UTF-8 check so arbitrary byte input fails cleanly.
    void validate(int c) {
        if (c == EOF) {
            if (utf8_pending_ > 0) throw ParseAbort{line_, "invalid UTF-8 sequence"};
            return;
        }
        unsigned char b = static_cast<unsigned char>(c);
        if (utf8_pending_ > 0) {
            if ((b & 0xC0) != 0x80) throw ParseAbort{line_, "invalid UTF-8 sequence"};
            --utf8_pending_;
            return;
        }
        if (b < 0x80) return;
        if ((b & 0xE0) == 0xC0) utf8_pending_ = 1;
        else if ((b & 0xF0) == 0xE0) utf8_pending_ = 2;
        else if ((b & 0xF8) == 0xF0) utf8_pending_ = 3;
        else throw ParseAbort{line_, "invalid UTF-8 sequence"};
    }

    Token lex() {
        int c = get();
        while (c != EOF && std::isspace(c)) c = get();
        std::size_t at = line_;
        if (c == EOF) return {TokKind::End, "", last_content_line_};
        last_content_line_ = at;
        if (c == '(') return {TokKind::LParen, "(", at};
        if (c == ')') return {TokKind::RParen, ")", at};
        if (c == '<') return lex_iriref(at);
        if (c == '"') return lex_literal(at);
        std::string text(1, static_cast<char>(c));
        while (true) {
            int p = raw_peek();
            if (p == EOF || std::isspace(p) || p == '(' || p == ')' || p == '<' || p == '"') break;
            text += static_cast<char>(get());
        }
        return {TokKind::Bare, std::move(text), at};
    }

    Token lex_iriref(std::size_t at) {
        std::string body;
        while (true) {
            int c = get();
            if (c == EOF) throw ParseAbort{at, "unterminated IRI reference"};
            if (c == '>') break;
            if (std::isspace(c)) throw ParseAbort{at, "whitespace inside IRI reference"};
            body += static_cast<char>(c);
        }
        if (body.empty()) throw ParseAbort{at, "empty IRI reference"};
        return {TokKind::IriRef, std::move(body), at};
    }

    Token lex_literal(std::size_t at) {
        std::string value;
        while (true) {
            int c = get();
            if (c == EOF) throw ParseAbort{at, "malformed literal: unterminated string"};
            if (c == '"') break;
            if (c == '\\') {
                int e = get();
                if (e == EOF) throw ParseAbort{at, "malformed literal: unterminated string"};
                if (e == '"' || e == '\\') value += static_cast<char>(e);
                else { value += '\\'; value += static_cast<char>(e); }
                continue;
            }
            value += static_cast<char>(c);
        }
        // strip a trailing datatype (^^...) or language tag (@...)
        if (raw_peek() == '^') {
            get();
            if (get() != '^') throw ParseAbort{at, "malformed literal: expected '^^'"};
            int p = raw_peek();
            if (p == '<') { get(); lex_iriref(at); }
            else {
                std::string dt;
                while (true) {
                    p = raw_peek();
                    if (p == EOF || std::isspace(p) || p == '(' || p == ')') break;
                    dt += static_cast<char>(get());
                }
                if (dt.empty()) throw ParseAbort{at, "malformed literal: missing datatype"};
            }
        } else if (raw_peek() == '@') {
            get();
            std::string lang;
            while (true) {
                int p = raw_peek();
                if (p == EOF || std::isspace(p) || p == '(' || p == ')') break;
                lang += static_cast<char>(get());
            }
            if (lang.empty()) throw ParseAbort{at, "malformed literal: missing language tag"};
        }
        return {TokKind::Literal, std::move(value), at};
    }

    std::istream& in_;
    Token tok_;
    bool buffered_ = false;
    std::size_t line_ = 1;
    std::size_t last_content_line_ = 1;
    int utf8_pending_ = 0;
};

class OntologyParser {
public:
    OntologyParser(std::istream& in, std::string filename, const PrefixMap& extra)
        : lex_(in), filename_(std::move(filename)), prefixes_(extra) {}

    ParseResult run() {
        ParseResult result;
        try {
            parse_constructs(/*inside_ontology=*/false);
            result.kb = normalize(std::move(kb_));
        } catch (const ParseAbort& abort) {
            result.diagnostics.push_back({filename_, abort.line, Severity::Error, abort.message});
        } catch (const Error& err) {
            result.diagnostics.push_back({filename_, lex_.line(), Severity::Error, err.what()});
        }
        result.diagnostics.insert(result.diagnostics.end(), warnings_.begin(), warnings_.end());
        return result;
    }

private:
    void warn(std::size_t line, std::string message) {
        warnings_.push_back({filename_, line, Severity::Warning, std::move(message)});
    }

    Token expect(TokKind kind, const char* what) {
        Token t = lex_.next();
        if (t.kind != kind) {
            if (t.kind == TokKind::End)
                throw ParseAbort{t.line, std::string("unbalanced parentheses: unexpected end of input while reading ") + what};
            throw ParseAbort{t.line, std::string("expected ") + what + ", got '" + t.text + "'"};
        }
        return t;
    }

    // Consume tokens until the construct opened at `open_line` closes.
    void skip_balanced(std::size_t open_line, int depth = 1) {
        while (depth > 0) {
            Token t = lex_.next();
            if (t.kind == TokKind::End)
                throw ParseAbort{open_line, "unbalanced parentheses"};
            if (t.kind == TokKind::LParen) ++depth;
            else if (t.kind == TokKind::RParen) --depth;
        }
    }

    Iri resolve(const Token& t) {
        if (t.kind == TokKind::IriRef) return Iri(t.text);
        if (is_curie(t.text)) {
            auto colon = t.text.find(':');
            std::string prefix = t.text.substr(0, colon);
            auto it = prefixes_.find(prefix);
            if (it == prefixes_.end())
                throw ParseAbort{t.line, "undeclared prefix '" + prefix + "' in '" + t.text + "'"};
            return Iri(it->second + t.text.substr(colon + 1));
        }
        return Iri(t.text);
    }

    // nullopt => unsupported constructor, already skipped (caller warns)
    std::optional<ClassExpression> parse_class_expression(std::string* unsupported) {
        Token t = lex_.next();
        if (t.kind == TokKind::Bare && lex_.peek().kind == TokKind::LParen) {
            Token open = lex_.next();
            if (t.text == "ObjectSomeValuesFrom") {
                Token prop = lex_.next();
                if (prop.kind != TokKind::Bare && prop.kind != TokKind::IriRef)
                    throw ParseAbort{prop.line, "expected object property in ObjectSomeValuesFrom"};
                auto filler = parse_class_expression(unsupported);
                if (!filler) { skip_balanced(open.line); return std::nullopt; }
                expect(TokKind::RParen, "')'");
                return ClassExpression::some(resolve(prop), std::move(*filler));
            }
            *unsupported = t.text;
            skip_balanced(open.line);
            return std::nullopt;
        }
        if (t.kind == TokKind::Bare || t.kind == TokKind::IriRef)
            return ClassExpression::named(resolve(t));
        throw ParseAbort{t.line, "expected class expression, got '" + t.text + "'"};
    }

    void parse_prefix(std::size_t line) {
        Token t = expect(TokKind::Bare, "prefix name");
        if (t.text.size() < 2 || t.text.substr(t.text.size() - 2) != ":=")
            throw ParseAbort{line, "malformed Prefix declaration"};
        std::string name = t.text.substr(0, t.text.size() - 2);
        Token iri = expect(TokKind::IriRef, "IRI in Prefix declaration");
        expect(TokKind::RParen, "')'");
        prefixes_[name] = iri.text;
    }

    void parse_declaration() {
        Token kind = expect(TokKind::Bare, "declaration kind");
        Token open = expect(TokKind::LParen, "'('");
        if (kind.text != "Class" && kind.text != "ObjectProperty" &&
            kind.text != "AnnotationProperty" && kind.text != "NamedIndividual") {
            warn(kind.line, "unsupported declaration kind '" + kind.text + "' skipped");
            skip_balanced(open.line);
            expect(TokKind::RParen, "')'");
            return;
        }
        Token entity = lex_.next();
        if (entity.kind != TokKind::Bare && entity.kind != TokKind::IriRef)
            throw ParseAbort{entity.line, "expected entity IRI in Declaration"};
        Iri iri = resolve(entity);
        expect(TokKind::RParen, "')'");
        expect(TokKind::RParen, "')'");
        if (kind.text == "Class") kb_.classes.insert(iri);
        else if (kind.text == "NamedIndividual") kb_.individuals.insert(iri);
        else kb_.properties.insert(iri);
    }

    void parse_subclassof(std::size_t line) {
        std::string unsupported;
        auto sub = parse_class_expression(&unsupported);
        if (!sub) {
            warn(line, "unsupported class expression '" + unsupported + "' in SubClassOf skipped");
            skip_balanced(line);
            return;
        }
        auto sup = parse_class_expression(&unsupported);
        if (!sup) {
            warn(line, "unsupported class expression '" + unsupported + "' in SubClassOf skipped");
            skip_balanced(line);
            return;
        }
        expect(TokKind::RParen, "')'");
        if (!sub->is_named()) {
            warn(line, "SubClassOf with a complex subclass expression skipped");
            return;
        }
        if (sup->is_named() && sub->iri() == sup->iri()) {
            warn(line, "SubClassOf with identical subject and object skipped");
            return;
        }
        kb_.logical_axioms.push_back({AxiomKind::SubClassOf, sub->iri(), std::move(*sup),
                                      Provenance::Asserted});
    }

    void parse_nary(std::size_t line, AxiomKind axiom_kind, const char* name) {
        std::vector<ClassExpression> members;
        while (lex_.peek().kind != TokKind::RParen) {
            if (lex_.peek().kind == TokKind::End) throw ParseAbort{line, "unbalanced parentheses"};
            std::string unsupported;
            auto expr = parse_class_expression(&unsupported);
            if (!expr) {
                warn(line, std::string("unsupported class expression '") + unsupported + "' in " +
                               name + " skipped");
                skip_balanced(line);
                return;
            }
            members.push_back(std::move(*expr));
        }
        lex_.next(); // ')'
        if (members.size() < 2) {
            warn(line, std::string(name) + " with fewer than two members skipped");
            return;
        }
        for (std::size_t i = 0; i < members.size(); ++i) {
            for (std::size_t j = i + 1; j < members.size(); ++j) {
                const auto& a = members[i];
                const auto& b = members[j];
                if (a.is_named()) {
                    kb_.logical_axioms.push_back({axiom_kind, a.iri(), b, Provenance::Asserted});
                } else if (b.is_named()) {
                    kb_.logical_axioms.push_back({axiom_kind, b.iri(), a, Provenance::Asserted});
                } else {
                    warn(line, std::string(name) + " pair without a named member skipped");
                }
            }
        }
    }

    void parse_classassertion(std::size_t line) {
        std::string unsupported;
        auto expr = parse_class_expression(&unsupported);
        if (!expr) {
            warn(line, "unsupported class expression '" + unsupported + "' in ClassAssertion skipped");
            skip_balanced(line);
            return;
        }
        Token individual = lex_.next();
        if (individual.kind != TokKind::Bare && individual.kind != TokKind::IriRef)
            throw ParseAbort{individual.line, "expected individual IRI in ClassAssertion"};
        Iri entity = resolve(individual);
        expect(TokKind::RParen, "')'");
        kb_.individuals.insert(entity);
        kb_.logical_axioms.push_back({AxiomKind::InstanceOf, std::move(entity), std::move(*expr),
                                      Provenance::Asserted});
    }

    void parse_annotationassertion(std::size_t line) {
        Token prop = lex_.next();
        // OBO exports often annotate the assertion itself (provenance,
        // dbxrefs); those forms are outside the subset and skipped whole.
        if (prop.kind == TokKind::Bare && prop.text == "Annotation" &&
            lex_.peek().kind == TokKind::LParen) {
            warn(line, "AnnotationAssertion with axiom annotations skipped");
            skip_balanced(line);
            return;
        }
        if (prop.kind != TokKind::Bare && prop.kind != TokKind::IriRef)
            throw ParseAbort{prop.line, "expected annotation property"};
        Token subj = lex_.next();
        if (subj.kind != TokKind::Bare && subj.kind != TokKind::IriRef)
            throw ParseAbort{subj.line, "expected annotation subject"};
        Token value = lex_.next();
        std::string lexical;
        if (value.kind == TokKind::Literal) lexical = value.text;
        else if (value.kind == TokKind::Bare || value.kind == TokKind::IriRef) lexical = resolve(value).str();
        else throw ParseAbort{value.line, "expected annotation value"};
        expect(TokKind::RParen, "')'");
        if (lexical.empty()) {
            warn(line, "annotation with empty value skipped");
            return;
        }
        kb_.annotation_axioms.push_back({resolve(subj), resolve(prop), std::move(lexical)});
    }

    void parse_constructs(bool inside_ontology) {
        while (true) {
            Token t = lex_.next();
            if (t.kind == TokKind::End) {
                if (inside_ontology) throw ParseAbort{t.line, "unbalanced parentheses: Ontology not closed"};
                return;
            }
            if (t.kind == TokKind::RParen) {
                if (inside_ontology) return;
                throw ParseAbort{t.line, "unbalanced parentheses: unexpected ')'"};
            }
            if (t.kind != TokKind::Bare)
                throw ParseAbort{t.line, "expected an axiom, got '" + t.text + "'"};
            Token open = expect(TokKind::LParen, "'(' after construct name");

            if (t.text == "Prefix") parse_prefix(open.line);
            else if (t.text == "Ontology") {
                // optional ontology IRI and version IRI, then nested axioms
                while (lex_.peek().kind == TokKind::IriRef || lex_.peek().kind == TokKind::Bare) {
                    if (lex_.peek().kind == TokKind::Bare && lex_.peek().text.find(':') == std::string::npos) break;
                    lex_.next();
                }
                parse_constructs(/*inside_ontology=*/true);
            } else if (t.text == "Declaration") parse_declaration();
            else if (t.text == "SubClassOf") parse_subclassof(open.line);
            else if (t.text == "EquivalentClasses") parse_nary(open.line, AxiomKind::EquivalentClasses, "EquivalentClasses");
            else if (t.text == "DisjointClasses") parse_nary(open.line, AxiomKind::Disjoint, "DisjointClasses");
            else if (t.text == "ClassAssertion") parse_classassertion(open.line);
            else if (t.text == "AnnotationAssertion") parse_annotationassertion(open.line);
            else {
                warn(t.line, "unsupported construct '" + t.text + "' skipped");
                skip_balanced(open.line);
            }
        }
    }

    Lexer lex_;
    std::string filename_;
    PrefixMap prefixes_;
    KnowledgeBase kb_;
    std::vector<ParseDiagnostic> warnings_;
};

std::string escape_literal(const std::string& value) {
    std::string out;
    out.reserve(value.size() + 2);
    for (char c : value) {
        if (c == '"' || c == '\\') out += '\\';
        out += c;
    }
    return out;
}

std::string bracketed(const Iri& iri) { return "<" + iri.str() + ">"; }

void serialize_expression(const ClassExpression& expr, std::string& out) {
    if (expr.is_named()) {
        out += bracketed(expr.iri());
    } else {
        out += "ObjectSomeValuesFrom(" + bracketed(expr.iri()) + " ";
        serialize_expression(expr.filler(), out);
        out += ")";
    }
}

} // namespace

std::string serialize_axiom(const LogicalAxiom& ax) {
    std::string out;
    switch (ax.kind) {
    case AxiomKind::SubClassOf: out = "SubClassOf("; break;
    case AxiomKind::EquivalentClasses: out = "EquivalentClasses("; break;
    case AxiomKind::Disjoint: out = "DisjointClasses("; break;
    case AxiomKind::InstanceOf: out = "ClassAssertion("; break;
    }
    if (ax.kind == AxiomKind::InstanceOf) {
        serialize_expression(ax.object, out);
        out += " " + bracketed(ax.subject);
    } else {
        out += bracketed(ax.subject) + " ";
        serialize_expression(ax.object, out);
    }
    out += ")";
    return out;
}

std::string serialize_ontology(const KnowledgeBase& kb) {
    std::ostringstream out;
    for (const auto& c : kb.classes) out << "Declaration(Class(" << bracketed(c) << "))\n";
    for (const auto& p : kb.properties) out << "Declaration(ObjectProperty(" << bracketed(p) << "))\n";
    for (const auto& i : kb.individuals) out << "Declaration(NamedIndividual(" << bracketed(i) << "))\n";
    for (const auto& ax : kb.logical_axioms) out << serialize_axiom(ax) << '\n';
    for (const auto& ax : kb.annotation_axioms)
        out << "AnnotationAssertion(" << bracketed(ax.property) << ' ' << bracketed(ax.subject)
            << " \"" << escape_literal(ax.value) << "\")\n";
    return out.str();
}

ParseResult parse_ontology(std::istream& in, const std::string& filename,
                           const PrefixMap& extra_prefixes) {
    OntologyParser parser(in, filename, extra_prefixes);
    return parser.run();
}

ParseResult parse_ontology_text(std::string_view text, const std::string& filename,
                                const PrefixMap& extra_prefixes) {
    std::istringstream in{std::string(text)};
    return parse_ontology(in, filename, extra_prefixes);
}

namespace {

std::vector<std::string> split_tabs(const std::string& line) {
    std::vector<std::string> cols;
    std::size_t start = 0;
    while (true) {
        std::size_t tab = line.find('\t', start);
        if (tab == std::string::npos) {
            cols.push_back(line.substr(start));
            return cols;
        }
        cols.push_back(line.substr(start, tab - start));
        start = tab + 1;
    }
}

std::string chomp_cr(std::string line) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    return line;
}

} // namespace

GafResult parse_gaf(std::istream& in, const std::string& filename, const Iri& relation,
                    const PrefixMap& prefixes) {
    GafResult result;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        line = chomp_cr(line);
        if (!valid_utf8(line)) {
            result.diagnostics.push_back({filename, lineno, Severity::Error, "invalid UTF-8 sequence"});
            return result;
        }
        if (line.empty() || line[0] == '!') continue;
        auto cols = split_tabs(line);
        if (cols.size() < 7) {
            result.diagnostics.push_back(
                {filename, lineno, Severity::Warning, "row has fewer than 7 columns, skipped"});
            continue;
        }
        const std::string& entity = cols[1];
        const std::string& cls = cols[4];
        std::string evidence = cols[6];
        if (entity.empty() || cls.empty()) {
            result.diagnostics.push_back(
                {filename, lineno, Severity::Warning, "row missing entity or class id, skipped"});
            continue;
        }
        for (char& c : evidence) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
        Association a{expand_iri(entity, prefixes), relation, expand_iri(cls, prefixes),
                      evidence.empty() ? std::nullopt : std::optional<std::string>(evidence)};
        result.associations.push_back(std::move(a));
    }
    return result;
}

PairsResult parse_pairs(std::istream& in, const std::string& filename) {
    PairsResult result;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        line = chomp_cr(line);
        if (line.empty()) continue;
        if (!valid_utf8(line)) {
            result.diagnostics.push_back({filename, lineno, Severity::Error, "invalid UTF-8 sequence"});
            return result;
        }
        auto cols = split_tabs(line);
        if (cols.size() < 2 || cols.size() > 3 || cols[0].empty() || cols[1].empty()) {
            result.diagnostics.push_back(
                {filename, lineno, Severity::Error, "expected 2 or 3 tab-separated columns"});
            return result;
        }
        std::optional<int> label;
        if (cols.size() == 3) {
            if (cols[2] == "0") label = 0;
            else if (cols[2] == "1") label = 1;
            else {
                result.diagnostics.push_back(
                    {filename, lineno, Severity::Error, "label column must be 0 or 1, got '" + cols[2] + "'"});
                return result;
            }
        }
        result.pairs.push_back({Iri(cols[0]), Iri(cols[1]), label});
    }
    return result;
}

Corpus read_text_corpus(std::istream& in) {
    Corpus corpus;
    std::string line;
    while (std::getline(in, line)) {
        auto tokens = tokenize(chomp_cr(line));
        if (tokens.empty()) continue;
        corpus.add(Sentence{std::move(tokens)}, SourceTag::Pretrain);
    }
    return corpus;
}

} // namespace opa2vec
