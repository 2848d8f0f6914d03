#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "opa2vec/embed.hpp"
#include "opa2vec/kb.hpp"
#include "opa2vec/pairnet.hpp"

namespace opa2vec {

// Flat key-value run configuration; see README for the file format.
struct PipelineConfig {
    std::string ontology_path;
    std::string associations_path;
    std::string pairs_path;
    std::string pretrain_path;
    std::string output_dir = ".";

    PrefixMap prefixes;
    // absent -> keep all annotation properties; empty -> drop all (Onto2Vec mode)
    std::optional<std::vector<std::string>> annotation_properties;
    std::vector<std::string> exclude_evidence;
    std::string association_relation = "has-function";

    TrainingConfig training;      // ontology-corpus training (min_count defaults to 1)
    int min_count_pretrain = 25;  // pre-training corpus min_count
    MlpConfig mlp;

    double split_fraction = 0.6;
    SplitMode split_mode = SplitMode::ByEntity;
    bool use_classifier = true;
    bool symmetric_scores = true;
    bool dump_inferred = false; // also write inferred.ofn from the corpus stage
    std::uint64_t seed = 1;
    int workers = 1;
    std::vector<std::string> ablate_properties;

    static PipelineConfig from_file(const std::string& path); // throws ConfigError
    static PipelineConfig from_text(const std::string& text, const std::string& name = "<config>");

    // Deterministic serialization of every field; hashed into the manifest.
    std::string canonical_text() const;

    // Pushes seed/workers into the nested configs and derives mlp.input_units.
    void finalize();
};

// Stage entry points. Each stage reads its inputs (raw input files or
// artifacts produced by earlier stages) and writes its artifacts into
// output_dir. ConfigError means unusable configuration or input (CLI exit
// code 2); StageError means a runtime failure (exit code 1).
void cmd_corpus(const PipelineConfig& cfg);     // corpus.txt, corpus_stats.json
void cmd_pretrain(const PipelineConfig& cfg);   // pretrain.model
void cmd_embed(const PipelineConfig& cfg);      // embeddings.model, embeddings.txt
void cmd_similarity(const PipelineConfig& cfg); // train/test_pairs.tsv, cosine_scores.tsv
void cmd_resnik(const PipelineConfig& cfg);     // resnik_scores.tsv
void cmd_classify(const PipelineConfig& cfg);   // mlp.checkpoint, mlp_scores.tsv
void cmd_evaluate(const PipelineConfig& cfg);   // summary.tsv, roc_<method>.csv
void cmd_all(const PipelineConfig& cfg);        // full chain + manifest.txt

struct AblationRow {
    std::string property;
    double auc = 0.0;
};
std::vector<AblationRow> cmd_ablate(const PipelineConfig& cfg,
                                    std::vector<std::string> properties); // ablation.tsv

// Scored-pair TSV (entity_a entity_b label score) helpers shared by stages
// and tests.
void write_scores_tsv(const std::vector<ScoredPair>& scores, const std::string& path);
std::vector<ScoredPair> read_scores_tsv(const std::string& path);

} // namespace opa2vec
