#include <cstdint>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "opa2vec/pipeline.hpp"

namespace {

struct CommonOptions {
    std::string config_path;
    std::string output_dir;
    std::int64_t seed = -1;
    int workers = 0;
};

void add_common(CLI::App* cmd, CommonOptions& opts) {
    cmd->add_option("--config", opts.config_path, "configuration file (key = value lines)")
        ->required();
    cmd->add_option("--output", opts.output_dir, "override the configured output directory");
    cmd->add_option("--seed", opts.seed, "override the configured seed");
    cmd->add_option("--workers", opts.workers, "override the configured worker count");
}

opa2vec::PipelineConfig load_config(const CommonOptions& opts) {
    auto cfg = opa2vec::PipelineConfig::from_file(opts.config_path);
    if (!opts.output_dir.empty()) cfg.output_dir = opts.output_dir;
    if (opts.seed >= 0) cfg.seed = static_cast<std::uint64_t>(opts.seed);
    if (opts.workers > 0) cfg.workers = opts.workers;
    cfg.finalize();
    return cfg;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"OPA2Vec: ontology plus annotation embeddings and similarity-based "
                 "link prediction"};
    app.require_subcommand(1);

    CommonOptions opts;
    std::vector<std::string> ablate_properties;

    auto* corpus = app.add_subcommand("corpus", "generate the training corpus from the ontology");
    auto* pretrain = app.add_subcommand("pretrain", "train embeddings on the plain-text corpus");
    auto* embed = app.add_subcommand("embed", "train embeddings on the ontology corpus");
    auto* similarity = app.add_subcommand("similarity", "score evaluation pairs with cosine");
    auto* resnik = app.add_subcommand("resnik", "score evaluation pairs with Resnik/BMA");
    auto* classify = app.add_subcommand("classify", "train the pair classifier and score pairs");
    auto* evaluate = app.add_subcommand("evaluate", "compute ROC/AUC reports for scored pairs");
    auto* ablate = app.add_subcommand("ablate", "per-annotation-property contribution study");
    auto* all = app.add_subcommand("all", "run the full pipeline");

    for (auto* cmd : {corpus, pretrain, embed, similarity, resnik, classify, evaluate, ablate, all})
        add_common(cmd, opts);
    ablate->add_option("--property", ablate_properties,
                       "annotation property to ablate (repeatable; default from config)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        auto cfg = load_config(opts);
        if (corpus->parsed()) opa2vec::cmd_corpus(cfg);
        else if (pretrain->parsed()) opa2vec::cmd_pretrain(cfg);
        else if (embed->parsed()) opa2vec::cmd_embed(cfg);
        else if (similarity->parsed()) opa2vec::cmd_similarity(cfg);
        else if (resnik->parsed()) opa2vec::cmd_resnik(cfg);
        else if (classify->parsed()) opa2vec::cmd_classify(cfg);
        else if (evaluate->parsed()) opa2vec::cmd_evaluate(cfg);
        else if (ablate->parsed()) opa2vec::cmd_ablate(cfg, ablate_properties);
        else if (all->parsed()) opa2vec::cmd_all(cfg);
        return 0;
    } catch (const opa2vec::ConfigError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const opa2vec::StageError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
}
