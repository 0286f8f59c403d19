#include "tabkg/pipeline.hpp"

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <exception>
#include <fstream>
#include <map>
#include <mutex>
#include <optional>
#include <ostream>
#include <set>
#include <sstream>
#include <thread>

#include <Eigen/Core>

#include "tabkg/errors.hpp"
#include "tabkg/evaluator.hpp"
#include "tabkg/interpreter.hpp"
#include "tabkg/slot_filler.hpp"
#include "tabkg/table.hpp"

namespace tabkg {

namespace fs = std::filesystem;

std::string_view to_string(Command command) {
    switch (command) {
        case Command::build_index: return "build-index";
        case Command::train_embeddings: return "train-embeddings";
        case Command::interpret: return "interpret";
        case Command::slotfill: return "slotfill";
        case Command::evaluate: return "evaluate";
        case Command::pipeline: return "pipeline";
    }
    return "pipeline";
}

Command parse_command(std::string_view name) {
    for (auto c : {Command::build_index, Command::train_embeddings, Command::interpret, Command::slotfill,
                   Command::evaluate, Command::pipeline})
        if (to_string(c) == name) return c;
    throw ConfigError("unknown command '" + std::string(name) + "'");
}

std::string fnv1a_hex(std::string_view bytes) {
    std::uint64_t h = 0xcbf29ce484222325ull;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 0x100000001b3ull;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

namespace {

const char* kg_format_name(KgFormat f) { return f == KgFormat::tsv ? "tsv" : "ntriples"; }

void require_file(const fs::path& p, const char* flag, const char* env) {
    if (p.empty()) throw ConfigError(std::string("missing ") + flag + " (or set " + env + ")");
    if (!fs::is_regular_file(p))
        throw ConfigError(std::string(flag) + ": file not found: " + p.string() + " (or set " + env + ")");
}

void require_dir(const fs::path& p, const char* flag, const char* env) {
    if (p.empty()) throw ConfigError(std::string("missing ") + flag + " (or set " + env + ")");
    if (!fs::is_directory(p))
        throw ConfigError(std::string(flag) + ": not a directory: " + p.string() + " (or set " + env + ")");
}

bool consumes(Command command, Command stage) { return command == stage || command == Command::pipeline; }

}  // namespace

void PipelineConfig::validate(Command command) const {
    if (output_dir.empty()) throw ConfigError("missing --out (or set TABKG_OUTPUT_DIR)");
    require_file(kg_path, "--kg", "TABKG_KG_PATH");
    for (const auto& f : labels.aux_label_files)
        if (!fs::is_regular_file(f)) throw ConfigError("--aux-labels: file not found: " + f.string());
    if (label_sources.empty()) throw ConfigError("--label-sources: at least one source is required");

    if (command != Command::build_index && command != Command::train_embeddings)
        require_dir(tables_dir, "--tables", "TABKG_TABLES_DIR");
    if (command == Command::evaluate) require_dir(gold_dir, "--gold", "TABKG_GOLD_DIR");
    if (command == Command::pipeline && !gold_dir.empty()) require_dir(gold_dir, "--gold", "TABKG_GOLD_DIR");

    if (!index_path.empty() && command != Command::build_index && command != Command::pipeline &&
        command != Command::train_embeddings)
        require_file(index_path, "--index", "TABKG_INDEX_PATH");
    if (!model_path.empty() && command == Command::slotfill)
        require_file(model_path, "--model", "TABKG_MODEL_PATH");
    if (command == Command::slotfill || command == Command::evaluate)
        require_dir(resolved_interpretations(), "--interpretations", "TABKG_INTERPRETATIONS_DIR");

    if (!(retrieval.gap_ratio >= 1.0)) throw ConfigError("--gap must be >= 1");
    if (retrieval.max_labels == 0) throw ConfigError("--max-labels must be >= 1");
    if (retrieval.keep_labels == 0) throw ConfigError("--keep-labels must be >= 1");
    if (slot_labels == 0) throw ConfigError("--slot-labels must be >= 1");
    if (lbp.iterations == 0) throw ConfigError("--lbp-iterations must be >= 1");
    if (!(tau >= 0.0 && tau <= 1.0)) throw ConfigError("--tau must lie in [0, 1]");
    if (workers == 0) throw ConfigError("--workers must be >= 1");
    for (double t : thresholds)
        if (!(t >= 0.0 && t <= 1.0)) throw ConfigError("--thresholds values must lie in [0, 1]");
    if (consumes(command, Command::train_embeddings)) train.validate();
}

Json PipelineConfig::to_json() const {
    Json aux = Json::array();
    for (const auto& f : labels.aux_label_files) aux.push_back(f.generic_string());
    Json doc;
    doc["kg"] = {{"path", kg_path.generic_string()},
                 {"format", kg_format_name(kg_format)},
                 {"label_relations", labels.label_relations},
                 {"aux_label_files", aux}};
    doc["label_sources"] = label_sources.names();
    doc["retrieval"] = {{"gap_ratio", retrieval.gap_ratio},
                        {"max_labels", retrieval.max_labels},
                        {"keep_labels", retrieval.keep_labels},
                        {"slot_labels", slot_labels}};
    doc["lbp"] = {{"iterations", lbp.iterations},
                  {"normalize_rows", lbp.normalize_rows},
                  {"log_space_rows", lbp.log_space_rows}};
    doc["tau"] = tau;
    doc["use_embeddings"] = use_embeddings;
    doc["train"] = {{"dimension", train.dimension},       {"margin", train.margin},
                    {"learning_rate", train.learning_rate}, {"epochs", train.epochs},
                    {"negatives", train.negatives},       {"norm", std::string(to_string(train.norm))},
                    {"format", model_format == ModelFormat::binary ? "binary" : "text"}};
    doc["thresholds"] = thresholds.empty() ? default_thresholds() : thresholds;
    doc["paths"] = {{"tables", tables_dir.generic_string()},
                    {"gold", gold_dir.generic_string()},
                    {"output", output_dir.generic_string()},
                    {"index", resolved_index().generic_string()},
                    {"model", resolved_model().generic_string()},
                    {"interpretations", resolved_interpretations().generic_string()},
                    {"triples", resolved_triples().generic_string()}};
    doc["workers"] = workers;
    doc["seed"] = seed;
    return doc;
}

std::string PipelineConfig::hash() const { return fnv1a_hex(to_json().dump()); }

fs::path PipelineConfig::resolved_index() const {
    return index_path.empty() ? output_dir / artifact::index : index_path;
}
fs::path PipelineConfig::resolved_model() const {
    return model_path.empty() ? output_dir / artifact::model : model_path;
}
fs::path PipelineConfig::resolved_interpretations() const {
    return interpretations_dir.empty() ? output_dir / artifact::interpretations : interpretations_dir;
}
fs::path PipelineConfig::resolved_triples() const {
    return triples_path.empty() ? output_dir / artifact::triples_sidecar : triples_path;
}

void parallel_for(std::size_t n, std::size_t workers, const std::function<void(std::size_t)>& fn) {
    if (workers <= 1 || n <= 1) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    std::vector<std::thread> pool;
    const std::size_t count = std::min(workers, n);
    pool.reserve(count);
    for (std::size_t w = 0; w < count; ++w) {
        pool.emplace_back([&] {
            for (std::size_t i = next.fetch_add(1); i < n; i = next.fetch_add(1)) {
                try {
                    fn(i);
                } catch (...) {
                    std::lock_guard lock(failure_mutex);
                    if (!failure) failure = std::current_exception();
                }
            }
        });
    }
    for (auto& t : pool) t.join();
    if (failure) std::rethrow_exception(failure);
}

namespace {

void write_file(const fs::path& path, const std::string& content) {
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << content;
    if (!out) throw std::runtime_error("write failed: " + path.string());
}

std::string json_text(const Json& doc) { return doc.dump(2) + "\n"; }

Json read_json_file(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot read " + path.string());
    try {
        return Json::parse(in);
    } catch (const Json::parse_error& e) {
        throw ParseError(path.filename().string() + ": " + e.what());
    }
}

std::vector<fs::path> list_files(const fs::path& dir, std::initializer_list<std::string_view> extensions) {
    std::vector<fs::path> out;
    for (const auto& entry : fs::directory_iterator(dir)) {
        if (!entry.is_regular_file()) continue;
        const auto ext = entry.path().extension().string();
        for (auto e : extensions)
            if (ext == e) out.push_back(entry.path());
    }
    std::sort(out.begin(), out.end());
    return out;
}

/// Table ids become file names; anything outside [A-Za-z0-9._-] is replaced.
std::string file_stem_for(const std::string& id) {
    std::string out = id;
    for (char& c : out) {
        const bool ok = (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') ||
                        c == '.' || c == '_' || c == '-';
        if (!ok) c = '_';
    }
    if (out.empty() || out == "." || out == "..") out = "table";
    return out;
}

struct LoadedTable {
    fs::path file;
    std::optional<Table> table;
    std::string error;
};

class Session {
public:
    Session(Command command, const PipelineConfig& config, std::ostream& log)
        : command_(command), cfg_(config), log_(log) {}

    const KnowledgeGraph& kg() {
        if (!kg_) {
            LabelConfig labels = cfg_.labels;
            kg_ = load_kg_file(cfg_.kg_path, cfg_.kg_format, labels);
            note("loaded KG: " + std::to_string(kg_->entity_count()) + " entities, " +
                 std::to_string(kg_->fact_count()) + " facts");
        }
        return *kg_;
    }

    const LabelIndex& index() {
        if (index_) return *index_;
        const auto path = cfg_.resolved_index();
        if (fs::is_regular_file(path)) {
            std::ifstream in(path, std::ios::binary);
            auto loaded = LabelIndex::load(in, kg());
            if (loaded.sources() == cfg_.label_sources) {
                index_ = std::move(loaded);
                note("loaded label index " + path.string());
                return *index_;
            }
            warn("index snapshot " + path.string() + " was built with other label sources; rebuilding");
        }
        index_ = LabelIndex::build(kg(), cfg_.label_sources);
        return *index_;
    }

    const EmbeddingModel* model() {
        if (!cfg_.use_embeddings) return nullptr;
        if (model_) return &*model_;
        if (model_missing_) return nullptr;
        const auto path = cfg_.resolved_model();
        if (!fs::is_regular_file(path)) {
            warn("no embedding model at " + path.string() + "; slot filling falls back to index ranking");
            model_missing_ = true;
            return nullptr;
        }
        std::ifstream in(path, std::ios::binary);
        char magic[8] = {};
        in.read(magic, sizeof magic);
        in.clear();
        in.seekg(0);
        model_ = std::string_view(magic, sizeof magic) == "TKGTRNE1" ? EmbeddingModel::load_binary(in)
                                                                      : EmbeddingModel::load_text(in);
        note("loaded embedding model " + path.string());
        return &*model_;
    }

    void build_index_stage() {
        index_ = LabelIndex::build(kg(), cfg_.label_sources);
        std::ostringstream out;
        index_->save(out, kg());
        write_file(cfg_.resolved_index(), out.str());
        produced(cfg_.resolved_index());
        stats_["index"] = {{"labels", index_->document_count()}, {"label_sources", cfg_.label_sources.names()}};
    }

    void train_stage() {
        TrainConfig train = cfg_.train;
        train.seed = cfg_.seed;
        train.workers = cfg_.workers;
        auto result = train_transe(kg(), train);
        std::ostringstream out;
        if (cfg_.model_format == ModelFormat::binary)
            result.model.save_binary(out);
        else
            result.model.save_text(out);
        write_file(cfg_.resolved_model(), out.str());
        produced(cfg_.resolved_model());

        Json report;
        report["epoch_loss"] = result.report.epoch_loss;
        report["exhausted_corruptions"] = result.report.exhausted_corruptions;
        const auto training_path = cfg_.output_dir / artifact::training;
        write_file(training_path, json_text(report));
        produced(training_path);
        stats_["training"] = {{"epochs", result.report.epoch_loss.size()},
                              {"final_loss", result.report.epoch_loss.empty() ? 0.0
                                                                              : result.report.epoch_loss.back()}};
        model_ = std::move(result.model);
    }

    void interpret_stage() {
        const auto& tables = load_tables();
        const auto& graph = kg();
        const auto& idx = index();
        InterpreterConfig icfg;
        icfg.retrieval = cfg_.retrieval;
        icfg.lbp = cfg_.lbp;
        icfg.link_label_sources = cfg_.label_sources;

        std::vector<std::optional<Interpretation>> results(tables.size());
        std::vector<std::string> errors(tables.size());
        parallel_for(tables.size(), cfg_.workers, [&](std::size_t i) {
            if (!tables[i].table) return;
            try {
                results[i] = interpret_table(*tables[i].table, graph, idx, icfg);
            } catch (const std::exception& e) {
                errors[i] = e.what();
            }
        });

        Json summary;
        std::size_t interpreted = 0, rejected = 0, skipped = 0, matched_rows = 0, unmatched_rows = 0;
        Json error_list = Json::array();
        std::set<std::string> written;
        const auto dir = cfg_.resolved_interpretations();
        fs::create_directories(dir);
        interpretations_.clear();
        for (std::size_t i = 0; i < tables.size(); ++i) {
            const auto name = tables[i].file.filename().string();
            std::string error = tables[i].error.empty() ? errors[i] : tables[i].error;
            if (error.empty() && results[i] && !written.insert(file_stem_for(results[i]->table_id)).second)
                error = "duplicate table id '" + results[i]->table_id + "'";
            if (!error.empty() || !results[i]) {
                ++skipped;
                error_list.push_back({{"file", name}, {"message", error}});
                warn("skipping " + name + ": " + error);
                continue;
            }
            const auto& interp = *results[i];
            if (interp.status == InterpretationStatus::ok) {
                ++interpreted;
                matched_rows += interp.rows.size();
                unmatched_rows += interp.unmatched.size();
            } else {
                ++rejected;
            }
            const auto path = dir / (file_stem_for(interp.table_id) + ".json");
            write_file(path, json_text(to_json(interp)));
            produced(path);
            interpretations_.push_back(interp);
        }
        summary["tables"] = tables.size();
        summary["interpreted"] = interpreted;
        summary["rejected"] = rejected;
        summary["skipped"] = skipped;
        summary["rows"] = {{"matched", matched_rows}, {"unmatched", unmatched_rows}};
        summary["errors"] = error_list;
        const auto summary_path = cfg_.output_dir / artifact::summary;
        write_file(summary_path, json_text(summary));
        produced(summary_path);
        have_interpretations_ = true;
        stats_["interpret"] = {{"tables", tables.size()}, {"interpreted", interpreted},
                               {"rejected", rejected},    {"skipped", skipped}};
    }

    void slotfill_stage() {
        const auto& graph = kg();
        const auto& idx = index();
        const EmbeddingModel* embeddings = model();
        const auto& interps = interpretations();
        const auto tables = tables_by_id();

        SlotFillOptions options;
        options.retrieval = cfg_.retrieval;
        options.retrieval.keep_labels = cfg_.slot_labels;
        options.use_embeddings = embeddings != nullptr;

        struct TableFill {
            std::vector<ExtractedTriple> triples;
            std::vector<Slot> unfilled;
            std::string error;
        };
        std::vector<TableFill> fills(interps.size());
        parallel_for(interps.size(), cfg_.workers, [&](std::size_t i) {
            auto it = tables.find(interps[i].table_id);
            if (it == tables.end()) {
                fills[i].error = "no table with id '" + interps[i].table_id + "'";
                return;
            }
            try {
                for (auto& slot : extract_slots(interps[i], *it->second, cfg_.tau)) {
                    if (auto t = fill_slot(slot, idx, embeddings, graph, options))
                        fills[i].triples.push_back(std::move(*t));
                    else
                        fills[i].unfilled.push_back(std::move(slot));
                }
            } catch (const std::exception& e) {
                fills[i].error = e.what();
                fills[i].triples.clear();
                fills[i].unfilled.clear();
            }
        });

        std::vector<ExtractedTriple> triples;
        Json sidecar;
        sidecar["triples"] = Json::array();
        sidecar["unfilled"] = Json::array();
        Json error_list = Json::array();
        std::map<std::string, std::size_t> by_method;
        for (std::size_t i = 0; i < fills.size(); ++i) {
            if (!fills[i].error.empty()) {
                warn("skipping slots of " + interps[i].table_id + ": " + fills[i].error);
                error_list.push_back({{"table_id", interps[i].table_id}, {"message", fills[i].error}});
                continue;
            }
            for (auto& t : fills[i].triples) {
                sidecar["triples"].push_back(to_json(t));
                ++by_method[std::string(to_string(t.method))];
                triples.push_back(std::move(t));
            }
            for (const auto& s : fills[i].unfilled)
                sidecar["unfilled"].push_back({{"table_id", s.table_id},
                                               {"row", s.row},
                                               {"column", s.column},
                                               {"subject", s.subject},
                                               {"relation", s.relation},
                                               {"cell", s.cell.front()}});
        }
        sidecar["errors"] = error_list;

        std::ostringstream nt;
        write_ntriples(nt, triples);
        const auto nt_path = cfg_.output_dir / artifact::triples;
        write_file(nt_path, nt.str());
        produced(nt_path);
        write_file(cfg_.resolved_triples(), json_text(sidecar));
        produced(cfg_.resolved_triples());
        triples_ = std::move(triples);
        have_triples_ = true;
        stats_["slotfill"] = {{"triples", triples_.size()},
                              {"unfilled", sidecar["unfilled"].size()},
                              {"methods", by_method},
                              {"embeddings", embeddings != nullptr}};
    }

    void evaluate_stage() {
        const auto& graph = kg();
        const auto& idx = index();
        const auto& interps = interpretations();
        const auto tables = tables_by_id();
        std::vector<std::string> warnings;

        std::vector<GoldTable> gold;
        for (const auto& file : list_files(cfg_.gold_dir, {".json"})) {
            try {
                gold.push_back(gold_from_json(read_json_file(file)));
            } catch (const std::exception& e) {
                warnings.push_back("skipping gold file " + file.filename().string() + ": " + e.what());
            }
        }
        std::sort(gold.begin(), gold.end(),
                  [](const GoldTable& a, const GoldTable& b) { return a.table_id < b.table_id; });

        const auto thresholds = cfg_.thresholds.empty() ? default_thresholds() : cfg_.thresholds;
        const auto assignments = evaluate_assignments(interps, gold, thresholds);

        std::vector<TripleKey> gold_triples;
        for (const auto& g : gold) {
            auto it = tables.find(g.table_id);
            if (it == tables.end()) {
                warnings.push_back("no table for gold annotation " + g.table_id + "; its triples are not derived");
                continue;
            }
            auto derived = derive_gold_triples(*it->second, g, graph, idx);
            gold_triples.insert(gold_triples.end(), derived.begin(), derived.end());
        }
        std::vector<ScoredTriple> predicted;
        for (const auto& t : triples()) predicted.push_back(ScoredTriple{t.triple, t.confidence});
        const auto triple_report = evaluate_triples(predicted, gold_triples, graph, idx, thresholds);

        for (const auto& w : warnings) warn(w);
        Json report;
        report["assignments"] = to_json(assignments);
        report["triples"] = to_json(triple_report);
        report["warnings"] = warnings;
        const auto report_path = cfg_.output_dir / artifact::report;
        write_file(report_path, json_text(report));
        produced(report_path);

        std::ostringstream csv;
        write_curve_csv(csv, "assignments", assignments, true);
        write_curve_csv(csv, "triples-novel", triple_report.novel, false);
        write_curve_csv(csv, "triples-redundant", triple_report.redundant, false);
        write_curve_csv(csv, "triples-overall", triple_report.overall, false);
        const auto curves_path = cfg_.output_dir / artifact::curves;
        write_file(curves_path, csv.str());
        produced(curves_path);
        stats_["evaluate"] = {{"gold_tables", gold.size()},
                              {"best_assignment_f1", assignments.best.f1},
                              {"best_triple_f1", triple_report.overall.best.f1},
                              {"warnings", assignments.warnings.size() + warnings.size() +
                                               triple_report.warnings.size()}};
    }

    void write_manifest(const std::vector<Command>& stages) {
        Json manifest;
        manifest["tool"] = "tabkg";
        manifest["version"] = std::string(kVersion);
        manifest["command"] = std::string(to_string(command_));
        Json stage_names = Json::array();
        for (auto s : stages) stage_names.push_back(std::string(to_string(s)));
        manifest["stages"] = stage_names;
        manifest["config"] = cfg_.to_json();
        manifest["config_hash"] = cfg_.hash();
        char eigen[32];
        std::snprintf(eigen, sizeof eigen, "%d.%d.%d", EIGEN_WORLD_VERSION, EIGEN_MAJOR_VERSION,
                      EIGEN_MINOR_VERSION);
        char json_version[32];
        std::snprintf(json_version, sizeof json_version, "%d.%d.%d", NLOHMANN_JSON_VERSION_MAJOR,
                      NLOHMANN_JSON_VERSION_MINOR, NLOHMANN_JSON_VERSION_PATCH);
        manifest["versions"] = {{"tabkg", std::string(kVersion)},
                                {"index_snapshot", 1},
                                {"model_format", 1},
                                {"eigen", eigen},
                                {"nlohmann_json", json_version}};
        manifest["artifacts"] = Json(artifacts_);
        manifest["stats"] = stats_;
        write_file(cfg_.output_dir / artifact::manifest, json_text(manifest));
    }

private:
    void note(const std::string& message) { log_ << "tabkg: " << message << '\n'; }
    void warn(const std::string& message) { log_ << "tabkg: warning: " << message << '\n'; }

    void produced(const fs::path& path) {
        const auto rel = path.lexically_relative(cfg_.output_dir);
        const auto name = (!rel.empty() && *rel.begin() != "..") ? rel.generic_string() : path.generic_string();
        if (std::find(artifacts_.begin(), artifacts_.end(), name) == artifacts_.end()) artifacts_.push_back(name);
    }

    const std::vector<LoadedTable>& load_tables() {
        if (tables_loaded_) return tables_;
        for (const auto& file : list_files(cfg_.tables_dir, {".csv", ".json"})) {
            LoadedTable t{file, std::nullopt, {}};
            try {
                t.table = load_table_file(file);
            } catch (const std::exception& e) {
                t.error = e.what();
            }
            tables_.push_back(std::move(t));
        }
        tables_loaded_ = true;
        return tables_;
    }

    std::map<std::string, const Table*> tables_by_id() {
        std::map<std::string, const Table*> out;
        for (const auto& t : load_tables())
            if (t.table) out.emplace(t.table->id, &*t.table);
        return out;
    }

    const std::vector<Interpretation>& interpretations() {
        if (have_interpretations_) return interpretations_;
        for (const auto& file : list_files(cfg_.resolved_interpretations(), {".json"})) {
            try {
                interpretations_.push_back(interpretation_from_json(read_json_file(file)));
            } catch (const std::exception& e) {
                warn("skipping interpretation " + file.filename().string() + ": " + e.what());
            }
        }
        std::sort(interpretations_.begin(), interpretations_.end(),
                  [](const Interpretation& a, const Interpretation& b) { return a.table_id < b.table_id; });
        have_interpretations_ = true;
        return interpretations_;
    }

    const std::vector<ExtractedTriple>& triples() {
        if (have_triples_) return triples_;
        const auto path = cfg_.resolved_triples();
        if (!fs::is_regular_file(path)) {
            warn("no triples sidecar at " + path.string() + "; triple evaluation sees no predictions");
        } else {
            const auto doc = read_json_file(path);
            for (const auto& t : doc.value("triples", Json::array())) triples_.push_back(extracted_triple_from_json(t));
        }
        have_triples_ = true;
        return triples_;
    }

    Command command_;
    const PipelineConfig& cfg_;
    std::ostream& log_;
    std::optional<KnowledgeGraph> kg_;
    std::optional<LabelIndex> index_;
    std::optional<EmbeddingModel> model_;
    bool model_missing_ = false;
    std::vector<LoadedTable> tables_;
    bool tables_loaded_ = false;
    std::vector<Interpretation> interpretations_;
    bool have_interpretations_ = false;
    std::vector<ExtractedTriple> triples_;
    bool have_triples_ = false;
    std::vector<std::string> artifacts_;
    Json stats_ = Json::object();
};

}  // namespace

int run(Command command, const PipelineConfig& config, std::ostream& log) {
    try {
        config.validate(command);
        fs::create_directories(config.output_dir);
        Session session(command, config, log);
        std::vector<Command> stages;
        switch (command) {
            case Command::pipeline:
                session.build_index_stage();
                stages.push_back(Command::build_index);
                if (config.use_embeddings) {
                    try {
                        session.train_stage();
                        stages.push_back(Command::train_embeddings);
                    } catch (const ConfigError& e) {
                        log << "tabkg: warning: embeddings not trained: " << e.what() << '\n';
                    }
                }
                session.interpret_stage();
                stages.push_back(Command::interpret);
                session.slotfill_stage();
                stages.push_back(Command::slotfill);
                if (!config.gold_dir.empty()) {
                    session.evaluate_stage();
                    stages.push_back(Command::evaluate);
                }
                break;
            case Command::build_index: session.build_index_stage(); stages.push_back(command); break;
            case Command::train_embeddings: session.train_stage(); stages.push_back(command); break;
            case Command::interpret: session.interpret_stage(); stages.push_back(command); break;
            case Command::slotfill: session.slotfill_stage(); stages.push_back(command); break;
            case Command::evaluate: session.evaluate_stage(); stages.push_back(command); break;
        }
        session.write_manifest(stages);
        return 0;
    } catch (const ConfigError& e) {
        log << "tabkg: error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        log << "tabkg: error: " << e.what() << '\n';
        return 1;
    }
}

}  // namespace tabkg
