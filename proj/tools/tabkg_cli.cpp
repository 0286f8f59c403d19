// tabkg: command-line driver for table interpretation and slot filling.

#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "tabkg/errors.hpp"
#include "tabkg/pipeline.hpp"

namespace {

struct Flags {
    std::string kg, kg_format = "ntriples", tables, gold, out, index, model, interpretations, triples;
    std::vector<std::string> aux_labels, label_sources{"primary", "redirect", "disambiguation"};
    std::string norm = "l1", model_format = "text";
    bool no_embeddings = false, no_normalize = false;
};

void add_options(CLI::App& cmd, Flags& f, tabkg::PipelineConfig& cfg, tabkg::Command command) {
    using tabkg::Command;
    cmd.add_option("--kg", f.kg, "Knowledge graph file")->envname("TABKG_KG_PATH");
    cmd.add_option("--kg-format", f.kg_format, "ntriples or tsv")->capture_default_str();
    cmd.add_option("--aux-labels", f.aux_labels, "Extra label files (entity, label, source)");
    cmd.add_option("--label-sources", f.label_sources, "primary, redirect, disambiguation")
        ->capture_default_str();
    cmd.add_option("--out", f.out, "Output directory")->envname("TABKG_OUTPUT_DIR");
    cmd.add_option("--index", f.index, "Label index snapshot")->envname("TABKG_INDEX_PATH");
    cmd.add_option("--seed", cfg.seed, "Random seed")->capture_default_str();
    cmd.add_option("--workers", cfg.workers, "Worker threads")->capture_default_str();

    if (command != Command::build_index && command != Command::train_embeddings)
        cmd.add_option("--tables", f.tables, "Directory of .csv/.json tables")->envname("TABKG_TABLES_DIR");
    if (command == Command::interpret || command == Command::slotfill || command == Command::pipeline) {
        cmd.add_option("--gap", cfg.retrieval.gap_ratio, "Top-1 score gap ratio")->capture_default_str();
        cmd.add_option("--max-labels", cfg.retrieval.max_labels, "Labels retrieved per query")
            ->capture_default_str();
        cmd.add_option("--keep-labels", cfg.retrieval.keep_labels, "Labels kept for ambiguous key cells")
            ->capture_default_str();
    }
    if (command == Command::interpret || command == Command::pipeline) {
        cmd.add_option("--lbp-iterations", cfg.lbp.iterations, "Belief propagation passes")->capture_default_str();
        cmd.add_flag("--no-row-normalization", f.no_normalize, "Use raw priors in the message");
    }
    if (command == Command::slotfill || command == Command::pipeline) {
        cmd.add_option("--slot-labels", cfg.slot_labels, "Labels kept for ambiguous slot cells")
            ->capture_default_str();
        cmd.add_option("--tau", cfg.tau, "Minimum row confidence for slot extraction")->capture_default_str();
        cmd.add_option("--model", f.model, "Embedding model")->envname("TABKG_MODEL_PATH");
        cmd.add_flag("--no-embeddings", f.no_embeddings, "Rank slot candidates by the index only");
    }
    if (command == Command::slotfill || command == Command::evaluate)
        cmd.add_option("--interpretations", f.interpretations, "Directory of interpretation JSON")
            ->envname("TABKG_INTERPRETATIONS_DIR");
    if (command == Command::evaluate)
        cmd.add_option("--triples", f.triples, "Triples sidecar JSON")->envname("TABKG_TRIPLES_PATH");
    if (command == Command::evaluate || command == Command::pipeline) {
        cmd.add_option("--gold", f.gold, "Directory of gold annotation JSON")->envname("TABKG_GOLD_DIR");
        cmd.add_option("--thresholds", cfg.thresholds, "Confidence thresholds for the PR sweep");
    }
    if (command == Command::train_embeddings || command == Command::pipeline) {
        if (command == Command::train_embeddings)
            cmd.add_option("--model", f.model, "Embedding model output")->envname("TABKG_MODEL_PATH");
        cmd.add_option("--dimension", cfg.train.dimension, "Embedding dimension")->capture_default_str();
        cmd.add_option("--margin", cfg.train.margin, "Hinge margin")->capture_default_str();
        cmd.add_option("--learning-rate", cfg.train.learning_rate, "SGD step")->capture_default_str();
        cmd.add_option("--epochs", cfg.train.epochs, "Training epochs")->capture_default_str();
        cmd.add_option("--negatives", cfg.train.negatives, "Corruptions per fact")->capture_default_str();
        cmd.add_option("--norm", f.norm, "l1 or l2")->capture_default_str();
        cmd.add_option("--model-format", f.model_format, "text or binary")->capture_default_str();
    }
}

void finish(const Flags& f, tabkg::PipelineConfig& cfg) {
    cfg.kg_path = f.kg;
    cfg.kg_format = tabkg::parse_kg_format(f.kg_format);
    for (const auto& a : f.aux_labels) cfg.labels.aux_label_files.emplace_back(a);
    cfg.label_sources = {};
    for (const auto& s : f.label_sources) {
        auto source = tabkg::parse_label_source(s);
        if (!source) throw tabkg::ConfigError("--label-sources: unknown source '" + s + "'");
        cfg.label_sources.insert(*source);
    }
    cfg.tables_dir = f.tables;
    cfg.gold_dir = f.gold;
    cfg.output_dir = f.out;
    cfg.index_path = f.index;
    cfg.model_path = f.model;
    cfg.interpretations_dir = f.interpretations;
    cfg.triples_path = f.triples;
    cfg.use_embeddings = !f.no_embeddings;
    cfg.lbp.normalize_rows = !f.no_normalize;
    cfg.train.norm = tabkg::parse_distance_norm(f.norm);
    if (f.model_format == "binary")
        cfg.model_format = tabkg::ModelFormat::binary;
    else if (f.model_format != "text")
        throw tabkg::ConfigError("--model-format must be text or binary");
}

}  // namespace

int main(int argc, char** argv) {
    using tabkg::Command;
    CLI::App app{"Interpret web tables against a knowledge graph and extract new facts"};
    app.require_subcommand(1);
    app.set_version_flag("--version", std::string(tabkg::kVersion));

    struct Entry {
        Command command;
        const char* help;
        Flags flags;
        tabkg::PipelineConfig config;
        CLI::App* app = nullptr;
    };
    std::vector<Entry> entries;
    entries.reserve(6);
    entries.push_back({Command::build_index, "Build and persist the label index", {}, {}});
    entries.push_back({Command::train_embeddings, "Train TransE embeddings on the KG", {}, {}});
    entries.push_back({Command::interpret, "Assign entities to rows and relations to columns", {}, {}});
    entries.push_back({Command::slotfill, "Turn interpretations into triples", {}, {}});
    entries.push_back({Command::evaluate, "Score interpretations and triples against gold", {}, {}});
    entries.push_back({Command::pipeline, "Run every stage in order", {}, {}});
    for (auto& e : entries) {
        e.app = app.add_subcommand(std::string(tabkg::to_string(e.command)), e.help);
        add_options(*e.app, e.flags, e.config, e.command);
    }

    CLI11_PARSE(app, argc, argv);

    for (auto& e : entries) {
        if (!e.app->parsed()) continue;
        try {
            finish(e.flags, e.config);
        } catch (const tabkg::ConfigError& err) {
            std::cerr << "tabkg: error: " << err.what() << '\n';
            return 2;
        }
        return tabkg::run(e.command, e.config, std::cerr);
    }
    return 2;
}
