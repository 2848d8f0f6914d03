#include <doctest.h>

#include <sstream>

#include "opa2vec/owl_parser.hpp"
#include "testutil.hpp"

using namespace opa2vec;

namespace {

// identity-style prefixes keep CURIE tokens readable end to end
const char* kPrelude =
    "Prefix(GO:=<GO:>)\n"
    "Prefix(rdfs:=<rdfs:>)\n"
    "Prefix(obo:=<obo:>)\n"
    "Prefix(oboInOwl:=<oboInOwl:>)\n";

ParseResult parse(const std::string& body) {
    return parse_ontology_text(std::string(kPrelude) + body, "test.ofn");
}

bool has_error_containing(const ParseResult& r, const std::string& needle) {
    for (const auto& d : r.diagnostics)
        if (d.severity == Severity::Error && d.message.find(needle) != std::string::npos)
            return true;
    return false;
}

} // namespace

TEST_CASE("parse_ontology reads SubClassOf axioms") {
    auto r = parse("SubClassOf(GO:0007610 GO:0008150)\n");
    REQUIRE(r.ok());
    REQUIRE(r.kb.logical_axioms.size() == 1);
    const auto& ax = r.kb.logical_axioms[0];
    CHECK(ax.kind == AxiomKind::SubClassOf);
    CHECK(ax.subject == Iri("GO:0007610"));
    CHECK(ax.object.iri() == Iri("GO:0008150"));
    CHECK(ax.provenance == Provenance::Asserted);
    CHECK(r.kb.classes.contains(Iri("GO:0007610")));
}

TEST_CASE("parse_ontology reads annotation assertions") {
    auto r = parse("AnnotationAssertion(rdfs:label GO:0007610 \"behavior\")\n");
    REQUIRE(r.ok());
    REQUIRE(r.kb.annotation_axioms.size() == 1);
    const auto& ax = r.kb.annotation_axioms[0];
    CHECK(ax.subject == Iri("GO:0007610"));
    CHECK(ax.property == Iri("rdfs:label"));
    CHECK(ax.value == "behavior");
}

TEST_CASE("literal datatype and language tags are stripped to the lexical form") {
    auto r = parse("AnnotationAssertion(rdfs:label GO:1 \"behavior\"@en)\n"
                   "AnnotationAssertion(oboInOwl:creation_date GO:1 \"2007-11-15\"^^xsd:dateTime)\n"
                   "AnnotationAssertion(obo:IAO_0000115 GO:1 \"has \\\"quotes\\\" and \\\\\")\n");
    REQUIRE(r.ok());
    REQUIRE(r.kb.annotation_axioms.size() == 3);
    CHECK(r.kb.annotation_axioms[0].value == "behavior");
    CHECK(r.kb.annotation_axioms[1].value == "2007-11-15");
    CHECK(r.kb.annotation_axioms[2].value == "has \"quotes\" and \\");
}

TEST_CASE("unbalanced parentheses are an error with the offending line") {
    auto r = parse("SubClassOf(GO:1 GO:2\n");
    CHECK(!r.ok());
    REQUIRE(!r.diagnostics.empty());
    CHECK(r.diagnostics[0].severity == Severity::Error);
    CHECK(has_error_containing(r, "unbalanced parentheses"));
    CHECK(r.diagnostics[0].line == 5); // after the 4 prefix lines
}

TEST_CASE("undeclared prefixes are an error") {
    auto r = parse("SubClassOf(XX:1 GO:2)\n");
    CHECK(!r.ok());
    CHECK(has_error_containing(r, "undeclared prefix 'XX'"));
}

TEST_CASE("malformed literals are an error") {
    auto r = parse("AnnotationAssertion(rdfs:label GO:1 \"oops)\n");
    CHECK(!r.ok());
    CHECK(has_error_containing(r, "malformed literal"));
}

TEST_CASE("annotation assertions carrying axiom annotations are skipped") {
    auto r = parse("AnnotationAssertion(Annotation(oboInOwl:hasDbXref \"GOC:x\") "
                   "oboInOwl:hasExactSynonym GO:1 \"syn\")\n"
                   "AnnotationAssertion(rdfs:label GO:1 \"plain\")\n");
    REQUIRE(r.ok());
    REQUIRE(r.kb.annotation_axioms.size() == 1);
    CHECK(r.kb.annotation_axioms[0].value == "plain");
    CHECK(!r.diagnostics.empty());
}

TEST_CASE("unknown constructs are skipped with a warning") {
    auto r = parse("SubObjectPropertyOf(obo:p obo:q)\n"
                   "SubClassOf(GO:1 GO:2)\n");
    REQUIRE(r.ok());
    CHECK(r.kb.logical_axioms.size() == 1);
    bool warned = false;
    for (const auto& d : r.diagnostics)
        warned |= d.severity == Severity::Warning &&
                  d.message.find("SubObjectPropertyOf") != std::string::npos;
    CHECK(warned);
}

TEST_CASE("unsupported class expressions skip the whole axiom with a warning") {
    auto r = parse("EquivalentClasses(GO:1 ObjectIntersectionOf(GO:2 GO:3))\n"
                   "SubClassOf(GO:4 GO:5)\n");
    REQUIRE(r.ok());
    REQUIRE(r.kb.logical_axioms.size() == 1);
    CHECK(r.kb.logical_axioms[0].subject == Iri("GO:4"));
    CHECK(!r.diagnostics.empty());
}

TEST_CASE("Ontology wrapper, declarations, and nested existentials parse") {
    auto r = parse("Ontology(<http://example.org/onto>\n"
                   "Declaration(Class(GO:1))\n"
                   "Declaration(ObjectProperty(obo:part_of))\n"
                   "Declaration(NamedIndividual(obo:P1))\n"
                   "SubClassOf(GO:1 ObjectSomeValuesFrom(obo:part_of GO:2))\n"
                   "ClassAssertion(ObjectSomeValuesFrom(obo:part_of "
                   "ObjectSomeValuesFrom(obo:part_of GO:2)) obo:P1)\n"
                   ")\n");
    REQUIRE(r.ok());
    CHECK(r.kb.classes.contains(Iri("GO:1")));
    CHECK(r.kb.properties.contains(Iri("obo:part_of")));
    CHECK(r.kb.individuals.contains(Iri("obo:P1")));
    REQUIRE(r.kb.logical_axioms.size() == 2);
    CHECK(r.kb.logical_axioms[0].object.is_existential());
    CHECK(r.kb.logical_axioms[1].object.filler().is_existential());
    CHECK(r.kb.logical_axioms[1].object.depth() == 3);
}

TEST_CASE("n-ary EquivalentClasses decomposes into unordered pairs") {
    auto r = parse("EquivalentClasses(GO:2 GO:1 GO:3)\n");
    REQUIRE(r.ok());
    CHECK(r.kb.logical_axioms.size() == 3);
    for (const auto& ax : r.kb.logical_axioms) {
        CHECK(ax.kind == AxiomKind::EquivalentClasses);
        CHECK(ax.subject < ax.object.iri()); // canonical order after normalize
    }
}

TEST_CASE("error diagnostics index a real line") {
    std::string text = std::string(kPrelude) + "SubClassOf(GO:1 GO:2)\nSubClassOf(XX:1 GO:2)\n";
    auto r = parse_ontology_text(text, "test.ofn");
    CHECK(!r.ok());
    std::size_t lines = 1 + std::count(text.begin(), text.end(), '\n');
    for (const auto& d : r.diagnostics) {
        CHECK(d.line >= 1);
        CHECK(d.line <= lines);
    }
    CHECK(r.diagnostics[0].line == 6);
}

TEST_CASE("round-trip: serialize then parse gives a structurally equal kb") {
    Rng rng(21);
    for (int i = 0; i < 30; ++i) {
        auto kb = testutil::random_kb(rng, 10, 25, 4);
        for (int a = 0; a < 4; ++a)
            kb.annotation_axioms.push_back(
                {testutil::cls(static_cast<int>(rng.next_below(10))), Iri("rdfs:label"),
                 testutil::random_literal(rng)});
        kb.associations.clear(); // associations live in GAF files, not in the ontology
        kb = normalize(std::move(kb));

        auto text = serialize_ontology(kb);
        auto reparsed = parse_ontology_text(text, "roundtrip.ofn");
        REQUIRE(reparsed.ok());
        CHECK(reparsed.kb == kb);
    }
}

TEST_CASE("parser survives arbitrary byte input") {
    Rng rng(0xFEED);
    for (int i = 0; i < 300; ++i) {
        std::string junk;
        std::size_t len = rng.next_below(200);
        for (std::size_t b = 0; b < len; ++b)
            junk += static_cast<char>(rng.next_below(256));
        auto r = parse_ontology_text(junk, "fuzz.ofn");
        (void)r; // errors allowed; crashes are not
    }
    // structured mutations of a valid document
    std::string base = std::string(kPrelude) + "SubClassOf(GO:1 ObjectSomeValuesFrom(obo:p GO:2))\n";
    for (int i = 0; i < 300; ++i) {
        std::string mutated = base;
        std::size_t at = rng.next_below(mutated.size());
        mutated[at] = static_cast<char>(rng.next_below(256));
        auto r = parse_ontology_text(mutated, "fuzz.ofn");
        (void)r;
    }
}

TEST_CASE("parse_gaf maps columns and keeps evidence codes") {
    std::istringstream in("!gaf-version: 2.1\n"
                          "UniProtKB\tP0AAF6\tygiF\tenables\tGO:0007610\tGO_REF:01\tIEA\t\tF\t\t\t"
                          "protein\ttaxon:83333\t20170926\tUniProt\t\t\n"
                          "UniProtKB\tP12345\tabcD\t\tGO:0008150\tGO_REF:02\tida\t\tP\t\t\t"
                          "protein\ttaxon:83333\t20170926\tUniProt\t\t\n");
    auto r = parse_gaf(in, "test.gaf", Iri("has-function"));
    REQUIRE(r.ok());
    REQUIRE(r.associations.size() == 2);
    CHECK(r.associations[0].entity == Iri("P0AAF6"));
    CHECK(r.associations[0].cls == Iri("GO:0007610"));
    CHECK(r.associations[0].relation == Iri("has-function"));
    CHECK(r.associations[0].evidence == "IEA");
    CHECK(r.associations[1].evidence == "IDA"); // uppercased
}

TEST_CASE("parse_gaf skips comments and short rows, and handles empty input") {
    std::istringstream empty("");
    CHECK(parse_gaf(empty, "e.gaf", Iri("r")).associations.empty());

    std::istringstream in("!comment only\nDB\tP1\tx\n");
    auto r = parse_gaf(in, "short.gaf", Iri("r"));
    CHECK(r.ok());
    CHECK(r.associations.empty());
    REQUIRE(r.diagnostics.size() == 1);
    CHECK(r.diagnostics[0].severity == Severity::Warning);
    CHECK(r.diagnostics[0].line == 2);
}

TEST_CASE("parse_gaf rejects invalid UTF-8") {
    std::string bad = "DB\tP1\tx\t\tGO:1\tref\tIEA\t\tF\t\t\tp\tt\td\ts\t\t\n";
    bad[3] = static_cast<char>(0xFF);
    std::istringstream in(bad);
    auto r = parse_gaf(in, "bad.gaf", Iri("r"));
    CHECK(!r.ok());
}

TEST_CASE("parse_gaf expands class CURIEs through the prefix map") {
    PrefixMap prefixes{{"GO", "http://purl.obolibrary.org/obo/GO_"}};
    std::istringstream in("DB\tP1\tx\t\tGO:42\tref\tIDA\t\tF\t\t\tp\tt\td\ts\t\t\n");
    auto r = parse_gaf(in, "x.gaf", Iri("has-function"), prefixes);
    REQUIRE(r.associations.size() == 1);
    CHECK(r.associations[0].cls == Iri("http://purl.obolibrary.org/obo/GO_42"));
}

TEST_CASE("parse_pairs handles labeled, unlabeled, and invalid rows") {
    std::istringstream ok("P1\tP2\t1\nP3\tP4\nP5\tP6\t0\n");
    auto r = parse_pairs(ok, "pairs.tsv");
    REQUIRE(r.ok());
    REQUIRE(r.pairs.size() == 3);
    CHECK(r.pairs[0].label == 1);
    CHECK(!r.pairs[1].label.has_value());
    CHECK(r.pairs[2].label == 0);

    std::istringstream bad("P1\tP2\t7\n");
    auto rbad = parse_pairs(bad, "pairs.tsv");
    CHECK(!rbad.ok());
    CHECK(rbad.diagnostics[0].line == 1);
}

TEST_CASE("read_text_corpus tokenizes one document per line") {
    std::istringstream in("protein binding regulates growth\n\nSecond Doc.\n");
    auto corpus = read_text_corpus(in);
    REQUIRE(corpus.size() == 2);
    CHECK(corpus.sentences[0].tokens ==
          std::vector<std::string>{"protein", "binding", "regulates", "growth"});
    CHECK(corpus.sentences[1].tokens == std::vector<std::string>{"second", "doc"});
    CHECK(corpus.tags[0] == SourceTag::Pretrain);
}

TEST_CASE("read_text_corpus collapses whitespace like the reference split") {
    // oracle: plain whitespace split + lowercase, for punctuation-free text
    std::string messy = "alpha\tbeta  gamma \t delta";
    std::istringstream in(messy);
    auto corpus = read_text_corpus(in);

    std::vector<std::string> expected;
    std::istringstream ref(messy);
    std::string word;
    while (ref >> word) {
        for (char& c : word) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
        expected.push_back(word);
    }
    REQUIRE(corpus.size() == 1);
    CHECK(corpus.sentences[0].tokens == expected);
}
