#include "opa2vec/pipeline.hpp"

#include <algorithm>
#include <cctype>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <set>
#include <sstream>

#include "opa2vec/eval.hpp"
#include "opa2vec/owl_parser.hpp"
#include "opa2vec/reasoner.hpp"
#include "opa2vec/rng.hpp"
#include "opa2vec/simsem.hpp"

namespace fs = std::filesystem;

namespace opa2vec {

namespace {

constexpr std::uint64_t kDatasetSalt = 0x70616972ULL; // dataset sampling stream
constexpr std::uint64_t kMlpSalt = 0x6D6C70ULL;       // classifier init/shuffle stream

std::string trim(const std::string& s) {
    std::size_t lo = 0, hi = s.size();
    while (lo < hi && std::isspace(static_cast<unsigned char>(s[lo]))) ++lo;
    while (hi > lo && std::isspace(static_cast<unsigned char>(s[hi - 1]))) --hi;
    return s.substr(lo, hi - lo);
}

std::vector<std::string> split_list(const std::string& value) {
    std::vector<std::string> out;
    std::string item;
    std::istringstream in(value);
    while (std::getline(in, item, ',')) {
        item = trim(item);
        if (!item.empty()) out.push_back(item);
    }
    return out;
}

std::string join_list(const std::vector<std::string>& items) {
    std::string out;
    for (std::size_t i = 0; i < items.size(); ++i) {
        if (i) out += ',';
        out += items[i];
    }
    return out;
}

int parse_int(const std::string& key, const std::string& value) {
    try {
        std::size_t pos = 0;
        int v = std::stoi(value, &pos);
        if (pos != value.size()) throw std::invalid_argument(value);
        return v;
    } catch (const std::exception&) {
        throw ConfigError("config key '" + key + "' expects an integer, got '" + value + "'");
    }
}

double parse_double(const std::string& key, const std::string& value) {
    try {
        std::size_t pos = 0;
        double v = std::stod(value, &pos);
        if (pos != value.size()) throw std::invalid_argument(value);
        return v;
    } catch (const std::exception&) {
        throw ConfigError("config key '" + key + "' expects a number, got '" + value + "'");
    }
}

bool parse_bool(const std::string& key, const std::string& value) {
    if (value == "true" || value == "1" || value == "yes") return true;
    if (value == "false" || value == "0" || value == "no") return false;
    throw ConfigError("config key '" + key + "' expects true/false, got '" + value + "'");
}

std::string fmt_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

std::string fmt_hash(std::uint64_t h) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

} // namespace

PipelineConfig PipelineConfig::from_text(const std::string& text, const std::string& name) {
    PipelineConfig cfg;
    std::istringstream in(text);
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        std::string stripped = trim(line);
        if (stripped.empty() || stripped[0] == '#') continue;
        auto eq = stripped.find('=');
        if (eq == std::string::npos)
            throw ConfigError(name + ":" + std::to_string(lineno) + ": expected 'key = value'");
        std::string key = trim(stripped.substr(0, eq));
        std::string value = trim(stripped.substr(eq + 1));

        if (key == "ontology") cfg.ontology_path = value;
        else if (key == "associations") cfg.associations_path = value;
        else if (key == "pairs") cfg.pairs_path = value;
        else if (key == "pretrain_corpus") cfg.pretrain_path = value;
        else if (key == "output") cfg.output_dir = value;
        else if (key.rfind("prefix.", 0) == 0) cfg.prefixes[key.substr(7)] = value;
        else if (key == "annotation_properties") cfg.annotation_properties = split_list(value);
        else if (key == "exclude_evidence") cfg.exclude_evidence = split_list(value);
        else if (key == "association_relation") cfg.association_relation = value;
        else if (key == "size") cfg.training.size = parse_int(key, value);
        else if (key == "window") cfg.training.window = parse_int(key, value);
        else if (key == "iterations" || key == "iter") cfg.training.iter = parse_int(key, value);
        else if (key == "negative") cfg.training.negative = parse_int(key, value);
        else if (key == "alpha") cfg.training.alpha = parse_double(key, value);
        else if (key == "min_count") cfg.training.min_count = parse_int(key, value);
        else if (key == "min_count_pretrain") cfg.min_count_pretrain = parse_int(key, value);
        else if (key == "sg") cfg.training.skip_gram = parse_int(key, value) != 0;
        else if (key == "mlp_hidden1") cfg.mlp.hidden1 = parse_int(key, value);
        else if (key == "mlp_hidden2") cfg.mlp.hidden2 = parse_int(key, value);
        else if (key == "mlp_epochs") cfg.mlp.epochs = parse_int(key, value);
        else if (key == "mlp_batch_size") cfg.mlp.batch_size = parse_int(key, value);
        else if (key == "mlp_learning_rate") cfg.mlp.learning_rate = parse_double(key, value);
        else if (key == "split_fraction") cfg.split_fraction = parse_double(key, value);
        else if (key == "split_mode") {
            if (value == "entity") cfg.split_mode = SplitMode::ByEntity;
            else if (value == "pair") cfg.split_mode = SplitMode::ByPair;
            else throw ConfigError("split_mode must be 'entity' or 'pair', got '" + value + "'");
        }
        else if (key == "classifier") cfg.use_classifier = parse_bool(key, value);
        else if (key == "symmetric") cfg.symmetric_scores = parse_bool(key, value);
        else if (key == "dump_inferred") cfg.dump_inferred = parse_bool(key, value);
        else if (key == "seed") cfg.seed = static_cast<std::uint64_t>(parse_int(key, value));
        else if (key == "workers") cfg.workers = parse_int(key, value);
        else if (key == "ablate_properties") cfg.ablate_properties = split_list(value);
        else throw ConfigError(name + ":" + std::to_string(lineno) + ": unknown config key '" + key + "'");
    }
    cfg.finalize();
    return cfg;
}

PipelineConfig PipelineConfig::from_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file: " + path);
    std::ostringstream text;
    text << in.rdbuf();
    return from_text(text.str(), path);
}

void PipelineConfig::finalize() {
    training.seed = seed;
    training.workers = workers;
    mlp.seed = seed ^ kMlpSalt;
    mlp.input_units = 2 * training.size;
}

std::string PipelineConfig::canonical_text() const {
    std::ostringstream out;
    out << "ontology=" << ontology_path << '\n'
        << "associations=" << associations_path << '\n'
        << "pairs=" << pairs_path << '\n'
        << "pretrain_corpus=" << pretrain_path << '\n';
    for (const auto& [name, base] : prefixes) out << "prefix." << name << '=' << base << '\n';
    out << "annotation_properties="
        << (annotation_properties ? join_list(*annotation_properties) : std::string("<all>")) << '\n'
        << "exclude_evidence=" << join_list(exclude_evidence) << '\n'
        << "association_relation=" << association_relation << '\n'
        << "sg=" << (training.skip_gram ? 1 : 0) << '\n'
        << "size=" << training.size << '\n'
        << "window=" << training.window << '\n'
        << "iterations=" << training.iter << '\n'
        << "negative=" << training.negative << '\n'
        << "alpha=" << fmt_double(training.alpha) << '\n'
        << "min_count=" << training.min_count << '\n'
        << "min_count_pretrain=" << min_count_pretrain << '\n'
        << "mlp_hidden1=" << mlp.hidden1 << '\n'
        << "mlp_hidden2=" << mlp.hidden2 << '\n'
        << "mlp_epochs=" << mlp.epochs << '\n'
        << "mlp_batch_size=" << mlp.batch_size << '\n'
        << "mlp_learning_rate=" << fmt_double(mlp.learning_rate) << '\n'
        << "split_fraction=" << fmt_double(split_fraction) << '\n'
        << "split_mode=" << (split_mode == SplitMode::ByEntity ? "entity" : "pair") << '\n'
        << "classifier=" << (use_classifier ? "true" : "false") << '\n'
        << "symmetric=" << (symmetric_scores ? "true" : "false") << '\n'
        << "dump_inferred=" << (dump_inferred ? "true" : "false") << '\n'
        << "seed=" << seed << '\n'
        << "workers=" << workers << '\n'
        << "ablate_properties=" << join_list(ablate_properties) << '\n';
    return out.str();
}

namespace {

std::string artifact(const PipelineConfig& cfg, const std::string& name) {
    return (fs::path(cfg.output_dir) / name).string();
}

void ensure_output_dir(const PipelineConfig& cfg) {
    std::error_code ec;
    fs::create_directories(cfg.output_dir, ec);
    if (ec) throw ConfigError("cannot create output directory '" + cfg.output_dir + "': " + ec.message());
}

void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot open for writing: " + path);
    out << content;
    if (!out) throw Error("failed writing: " + path);
}

void report_warnings(const std::vector<ParseDiagnostic>& diagnostics) {
    for (const auto& d : diagnostics)
        if (d.severity == Severity::Warning) std::cerr << d.to_string() << '\n';
}

[[noreturn]] void fail_parse(const std::vector<ParseDiagnostic>& diagnostics) {
    for (const auto& d : diagnostics)
        if (d.severity == Severity::Error) throw ConfigError(d.to_string());
    throw ConfigError("parse failed");
}

// Parses the ontology and association inputs and applies the configured
// filters. Annotation filtering is skipped for stages that do not feed the
// corpus (Resnik works off the class hierarchy and associations only).
KnowledgeBase load_kb(const PipelineConfig& cfg, bool apply_annotation_filter) {
    if (cfg.ontology_path.empty()) throw ConfigError("missing 'ontology' path in configuration");
    std::ifstream in(cfg.ontology_path, std::ios::binary);
    if (!in) throw ConfigError("cannot open ontology: " + cfg.ontology_path);
    auto parsed = parse_ontology(in, cfg.ontology_path, cfg.prefixes);
    report_warnings(parsed.diagnostics);
    if (!parsed.ok()) fail_parse(parsed.diagnostics);
    KnowledgeBase kb = std::move(parsed.kb);

    if (!cfg.associations_path.empty()) {
        std::ifstream gin(cfg.associations_path, std::ios::binary);
        if (!gin) throw ConfigError("cannot open associations: " + cfg.associations_path);
        Iri relation = expand_iri(cfg.association_relation, cfg.prefixes);
        auto gaf = parse_gaf(gin, cfg.associations_path, relation, cfg.prefixes);
        report_warnings(gaf.diagnostics);
        if (!gaf.ok()) fail_parse(gaf.diagnostics);
        kb.associations.insert(kb.associations.end(), gaf.associations.begin(),
                               gaf.associations.end());
    }

    kb = normalize(std::move(kb));
    if (!cfg.exclude_evidence.empty()) {
        std::set<std::string> excluded(cfg.exclude_evidence.begin(), cfg.exclude_evidence.end());
        kb = filter_associations_by_evidence(std::move(kb), excluded);
    }
    if (apply_annotation_filter && cfg.annotation_properties) {
        std::set<Iri> allowed;
        for (const auto& raw : *cfg.annotation_properties)
            allowed.insert(expand_iri(raw, cfg.prefixes));
        kb = filter_annotations_by_property(std::move(kb), allowed);
    }
    try {
        kb = add_association_axioms(std::move(kb));
    } catch (const UnknownClass& e) {
        throw ConfigError(std::string("association references a class missing from the ontology: ") +
                          e.what());
    }
    return kb;
}

Corpus read_sentences_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot open corpus file: " + path + " (run the corpus stage first)");
    Corpus corpus;
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        Sentence s;
        std::istringstream ls(line);
        std::string tok;
        while (ls >> tok) s.tokens.push_back(tok);
        if (!s.tokens.empty()) corpus.add(std::move(s), SourceTag::Logical);
    }
    return corpus;
}

EmbeddingModel load_embeddings(const PipelineConfig& cfg) {
    std::string path = artifact(cfg, "embeddings.model");
    if (!fs::exists(path))
        throw ConfigError("missing " + path + " (run the embed stage first)");
    return EmbeddingModel::load_file(path);
}

// Builds the evaluation dataset from the configured pair file and writes
// train_pairs.tsv / test_pairs.tsv. Rebuilt identically by every stage that
// needs it (seeded), so stages stay independently runnable.
PairDataset ensure_datasets(const PipelineConfig& cfg) {
    if (cfg.pairs_path.empty()) throw ConfigError("missing 'pairs' path in configuration");
    std::ifstream in(cfg.pairs_path, std::ios::binary);
    if (!in) throw ConfigError("cannot open pairs: " + cfg.pairs_path);
    auto parsed = parse_pairs(in, cfg.pairs_path);
    report_warnings(parsed.diagnostics);
    if (!parsed.ok()) fail_parse(parsed.diagnostics);

    std::set<Iri> universe;
    std::vector<std::pair<Iri, Iri>> positives;
    std::size_t explicit_negatives = 0;
    for (const auto& p : parsed.pairs) {
        universe.insert(p.a);
        universe.insert(p.b);
        if (!p.label || *p.label == 1) positives.emplace_back(p.a, p.b);
        else ++explicit_negatives;
    }
    if (explicit_negatives > 0)
        std::cerr << "warning: ignored " << explicit_negatives << " rows labeled 0 in "
                  << cfg.pairs_path << "; negatives are sampled to balance the positives\n";
    if (!cfg.associations_path.empty()) {
        std::ifstream gin(cfg.associations_path, std::ios::binary);
        if (!gin) throw ConfigError("cannot open associations: " + cfg.associations_path);
        Iri relation = expand_iri(cfg.association_relation, cfg.prefixes);
        auto gaf = parse_gaf(gin, cfg.associations_path, relation, cfg.prefixes);
        if (!gaf.ok()) fail_parse(gaf.diagnostics);
        std::set<std::string> excluded(cfg.exclude_evidence.begin(), cfg.exclude_evidence.end());
        for (const auto& a : gaf.associations)
            if (!a.evidence || !excluded.contains(*a.evidence)) universe.insert(a.entity);
    }

    PairDataset ds = build_pair_dataset(positives, {universe.begin(), universe.end()},
                                        cfg.seed ^ kDatasetSalt, cfg.split_fraction, cfg.split_mode);

    ensure_output_dir(cfg);
    auto dump = [&](Split split, const std::string& name) {
        std::ostringstream out;
        for (const auto& p : ds.of_split(split))
            out << p.a.str() << '\t' << p.b.str() << '\t' << p.label << '\n';
        write_file(artifact(cfg, name), out.str());
    };
    dump(Split::Train, "train_pairs.tsv");
    dump(Split::Test, "test_pairs.tsv");
    return ds;
}

std::vector<ScoredLabel> to_scored_labels(const std::vector<ScoredPair>& scores) {
    std::vector<ScoredLabel> out;
    out.reserve(scores.size());
    for (const auto& s : scores) out.push_back({s.score, s.label.value_or(0)});
    return out;
}

} // namespace

void write_scores_tsv(const std::vector<ScoredPair>& scores, const std::string& path) {
    std::ostringstream out;
    for (const auto& s : scores)
        out << s.a.str() << '\t' << s.b.str() << '\t' << s.label.value_or(0) << '\t'
            << fmt_double(s.score) << '\n';
    write_file(path, out.str());
}

std::vector<ScoredPair> read_scores_tsv(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot open scores file: " + path);
    std::vector<ScoredPair> out;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        std::istringstream ls(line);
        std::string a, b, label, score;
        if (!std::getline(ls, a, '\t') || !std::getline(ls, b, '\t') ||
            !std::getline(ls, label, '\t') || !std::getline(ls, score))
            throw FormatError(path + ":" + std::to_string(lineno) + ": expected 4 columns");
        ScoredPair sp;
        sp.a = Iri(a);
        sp.b = Iri(b);
        sp.label = parse_int("label", label);
        sp.score = parse_double("score", score);
        out.push_back(std::move(sp));
    }
    return out;
}

void cmd_corpus(const PipelineConfig& cfg) {
    KnowledgeBase kb = load_kb(cfg, /*apply_annotation_filter=*/true);
    SubsumptionClosure closure = saturate(kb);
    Corpus corpus = build_corpus(kb, closure);

    ensure_output_dir(cfg);
    std::ostringstream text;
    write_corpus(corpus, text);
    write_file(artifact(cfg, "corpus.txt"), text.str());
    write_file(artifact(cfg, "corpus_stats.json"), corpus_stats_json(corpus) + "\n");
    if (cfg.dump_inferred) write_file(artifact(cfg, "inferred.ofn"), dump_inferred(closure));
    std::cout << "corpus: " << corpus.count(SourceTag::Logical) << " logical + "
              << corpus.count(SourceTag::Annotation) << " annotation sentences\n";
}

void cmd_pretrain(const PipelineConfig& cfg) {
    if (cfg.pretrain_path.empty())
        throw ConfigError("missing 'pretrain_corpus' path in configuration");
    std::ifstream in(cfg.pretrain_path, std::ios::binary);
    if (!in) throw ConfigError("cannot open pretrain corpus: " + cfg.pretrain_path);
    Corpus corpus = read_text_corpus(in);

    TrainingConfig tc = cfg.training;
    tc.min_count = cfg.min_count_pretrain;
    EmbeddingModel model = train(corpus, tc);
    ensure_output_dir(cfg);
    model.save_file(artifact(cfg, "pretrain.model"));
    std::cout << "pretrain: " << model.vocab.size() << " tokens, " << corpus.size()
              << " sentences\n";
}

void cmd_embed(const PipelineConfig& cfg) {
    Corpus corpus = read_sentences_file(artifact(cfg, "corpus.txt"));

    std::optional<EmbeddingModel> init;
    if (!cfg.pretrain_path.empty()) {
        std::string path = artifact(cfg, "pretrain.model");
        if (!fs::exists(path))
            throw ConfigError("pretraining is configured but " + path +
                              " is missing (run the pretrain stage first)");
        init = EmbeddingModel::load_file(path);
    }

    EmbeddingModel model = train(corpus, cfg.training, init ? &*init : nullptr);
    ensure_output_dir(cfg);
    model.save_file(artifact(cfg, "embeddings.model"));
    std::ostringstream text;
    model.export_text(text);
    write_file(artifact(cfg, "embeddings.txt"), text.str());
    std::cout << "embed: " << model.vocab.size() << " vectors of size " << cfg.training.size
              << '\n';
}

void cmd_similarity(const PipelineConfig& cfg) {
    EmbeddingModel model = load_embeddings(cfg);
    PairDataset ds = ensure_datasets(cfg);

    std::vector<ScoredPair> scores;
    for (const auto& p : ds.of_split(Split::Test)) {
        double s = cosine(model.vector_of(p.a.str()), model.vector_of(p.b.str()));
        scores.push_back({p.a, p.b, p.label, s});
    }
    write_scores_tsv(scores, artifact(cfg, "cosine_scores.tsv"));
    std::cout << "similarity: scored " << scores.size() << " test pairs\n";
}

void cmd_resnik(const PipelineConfig& cfg) {
    KnowledgeBase kb = load_kb(cfg, /*apply_annotation_filter=*/false);
    SubsumptionClosure closure = saturate(kb);

    std::map<Iri, AnnotatedEntity> entities;
    for (const auto& a : kb.associations) {
        auto& e = entities[a.entity];
        e.id = a.entity;
        e.annotations.insert(a.cls);
    }
    std::vector<AnnotatedEntity> flat;
    flat.reserve(entities.size());
    for (auto& [id, e] : entities) flat.push_back(e);
    if (flat.empty()) throw ConfigError("no annotated entities; Resnik needs associations");
    ConceptStats stats = information_content(closure, flat);

    PairDataset ds = ensure_datasets(cfg);
    std::vector<ScoredPair> scores;
    for (const auto& p : ds.of_split(Split::Test)) {
        auto ea = entities.find(p.a);
        auto eb = entities.find(p.b);
        if (ea == entities.end() || eb == entities.end())
            throw StageError("resnik", "pair entity has no annotations: " +
                                           (ea == entities.end() ? p.a : p.b).str());
        scores.push_back({p.a, p.b, p.label, resnik_bma(stats, closure, ea->second, eb->second)});
    }
    write_scores_tsv(scores, artifact(cfg, "resnik_scores.tsv"));
    std::cout << "resnik: scored " << scores.size() << " test pairs\n";
}

void cmd_classify(const PipelineConfig& cfg) {
    EmbeddingModel model = load_embeddings(cfg);
    PairDataset ds = ensure_datasets(cfg);

    PairClassifier clf = train_mlp(ds, model, cfg.mlp);
    ensure_output_dir(cfg);
    {
        std::ofstream out(artifact(cfg, "mlp.checkpoint"), std::ios::binary);
        if (!out) throw Error("cannot open for writing: " + artifact(cfg, "mlp.checkpoint"));
        clf.save(out);
    }
    auto scores = score_pairs(clf, ds.of_split(Split::Test), model, cfg.symmetric_scores);
    write_scores_tsv(scores, artifact(cfg, "mlp_scores.tsv"));
    std::cout << "classify: trained on " << ds.of_split(Split::Train).size() << " pairs, scored "
              << scores.size() << " test pairs\n";
}

void cmd_evaluate(const PipelineConfig& cfg) {
    std::vector<MethodRun> runs;
    for (const char* method : {"cosine", "resnik", "mlp"}) {
        std::string path = artifact(cfg, std::string(method) + "_scores.tsv");
        if (!fs::exists(path)) continue;
        MethodRun run;
        run.name = method;
        for (auto& sp : read_scores_tsv(path)) {
            run.pairs.emplace_back(sp.a, sp.b);
            run.scored.push_back({sp.score, sp.label.value_or(0)});
        }
        runs.push_back(std::move(run));
    }
    if (runs.empty())
        throw ConfigError("no *_scores.tsv artifacts found in " + cfg.output_dir +
                          " (run similarity/resnik/classify first)");

    auto summaries = compare_methods(runs);
    std::ostringstream table;
    write_summary_tsv(summaries, table);
    write_file(artifact(cfg, "summary.tsv"), table.str());
    for (const auto& s : summaries) {
        std::ostringstream roc;
        write_roc_csv(s.roc, roc);
        write_file(artifact(cfg, "roc_" + s.name + ".csv"), roc.str());
        std::cout << "evaluate: " << s.name << " auc=" << fmt_double(s.auc) << " (" << s.n_pos
                  << " pos, " << s.n_neg << " neg)\n";
    }
}

namespace {

const char* kManifestArtifacts[] = {
    "corpus.txt",        "corpus_stats.json", "inferred.ofn",    "pretrain.model",
    "embeddings.model",  "embeddings.txt",    "train_pairs.tsv", "test_pairs.tsv",
    "cosine_scores.tsv", "resnik_scores.tsv", "mlp_scores.tsv",  "mlp.checkpoint",
    "summary.tsv",       "roc_cosine.csv",    "roc_resnik.csv",  "roc_mlp.csv",
};

void write_manifest(const PipelineConfig& cfg) {
    std::ostringstream out;
    out << "config_hash=" << fmt_hash(fnv1a64(cfg.canonical_text().data(), cfg.canonical_text().size()))
        << '\n'
        << "seed=" << cfg.seed << '\n'
        << "workers=" << cfg.workers << '\n';
    for (const char* name : kManifestArtifacts) {
        std::string path = artifact(cfg, name);
        if (!fs::exists(path)) continue;
        std::ifstream in(path, std::ios::binary);
        std::ostringstream bytes;
        bytes << in.rdbuf();
        std::string content = bytes.str();
        out << "artifact " << name << ' ' << fmt_hash(fnv1a64(content.data(), content.size()))
            << '\n';
    }
    write_file(artifact(cfg, "manifest.txt"), out.str());
}

template <typename Fn>
void run_stage(const char* name, Fn&& fn) {
    try {
        fn();
    } catch (const ConfigError&) {
        throw; // configuration problems keep their exit-code-2 meaning
    } catch (const StageError&) {
        throw;
    } catch (const std::exception& e) {
        throw StageError(name, e.what());
    }
}

} // namespace

void cmd_all(const PipelineConfig& cfg) {
    run_stage("corpus", [&] { cmd_corpus(cfg); });
    if (!cfg.pretrain_path.empty()) run_stage("pretrain", [&] { cmd_pretrain(cfg); });
    run_stage("embed", [&] { cmd_embed(cfg); });
    run_stage("similarity", [&] { cmd_similarity(cfg); });
    if (!cfg.associations_path.empty()) run_stage("resnik", [&] { cmd_resnik(cfg); });
    if (cfg.use_classifier) run_stage("classify", [&] { cmd_classify(cfg); });
    run_stage("evaluate", [&] { cmd_evaluate(cfg); });
    run_stage("manifest", [&] { write_manifest(cfg); });
}

namespace {

std::string sanitize(const std::string& name) {
    std::string out;
    for (char c : name)
        out += std::isalnum(static_cast<unsigned char>(c)) ? c : '_';
    return out;
}

} // namespace

std::vector<AblationRow> cmd_ablate(const PipelineConfig& cfg, std::vector<std::string> properties) {
    if (properties.empty()) properties = cfg.ablate_properties;

    std::vector<std::string> unique;
    std::set<std::string> seen;
    for (const auto& p : properties) {
        if (seen.insert(p).second) unique.push_back(p);
        else std::cerr << "warning: duplicate ablation property '" << p << "' ignored\n";
    }

    KnowledgeBase kb = load_kb(cfg, /*apply_annotation_filter=*/false);
    for (const auto& p : unique) {
        Iri expanded = expand_iri(p, cfg.prefixes);
        if (!kb.properties.contains(expanded))
            throw ConfigError("unknown annotation property: " + p);
    }

    std::vector<AblationRow> rows;
    auto run_restricted = [&](const std::string& label, std::vector<std::string> allowed) {
        PipelineConfig sub = cfg;
        sub.output_dir = (fs::path(cfg.output_dir) / ("ablate_" + sanitize(label))).string();
        sub.annotation_properties = std::move(allowed);
        run_stage("corpus", [&] { cmd_corpus(sub); });
        if (!sub.pretrain_path.empty()) run_stage("pretrain", [&] { cmd_pretrain(sub); });
        run_stage("embed", [&] { cmd_embed(sub); });
        run_stage("similarity", [&] { cmd_similarity(sub); });
        auto scores = read_scores_tsv((fs::path(sub.output_dir) / "cosine_scores.tsv").string());
        rows.push_back({label, auc_only(to_scored_labels(scores))});
    };

    if (unique.empty()) {
        // no annotation properties at all: the Onto2Vec-equivalent run
        run_restricted("none", {});
    } else {
        for (const auto& p : unique) run_restricted(p, {p});
    }

    ensure_output_dir(cfg);
    std::ostringstream out;
    out << "property\tauc\n";
    for (const auto& row : rows) out << row.property << '\t' << fmt_double(row.auc) << '\n';
    write_file(artifact(cfg, "ablation.tsv"), out.str());
    for (const auto& row : rows)
        std::cout << "ablate: " << row.property << " auc=" << fmt_double(row.auc) << '\n';
    return rows;
}

} // namespace opa2vec
