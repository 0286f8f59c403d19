#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "tabkg/embeddings.hpp"
#include "tabkg/kg_io.hpp"
#include "tabkg/label_index.hpp"
#include "tabkg/lbp.hpp"
#include "tabkg/serialize.hpp"

namespace tabkg {

inline constexpr std::string_view kVersion = "0.1.0";

enum class Command { build_index, train_embeddings, interpret, slotfill, evaluate, pipeline };

std::string_view to_string(Command command);
Command parse_command(std::string_view name);

/// Artifact names, relative to the output directory.
namespace artifact {
inline constexpr std::string_view index = "label_index.snapshot";
inline constexpr std::string_view model = "model.transe";
inline constexpr std::string_view training = "training.json";
inline constexpr std::string_view interpretations = "interpretations";
inline constexpr std::string_view summary = "summary.json";
inline constexpr std::string_view triples = "triples.nt";
inline constexpr std::string_view triples_sidecar = "triples.json";
inline constexpr std::string_view report = "report.json";
inline constexpr std::string_view curves = "curves.csv";
inline constexpr std::string_view manifest = "manifest.json";
}  // namespace artifact

enum class ModelFormat { text, binary };

struct PipelineConfig {
    std::filesystem::path kg_path;
    KgFormat kg_format = KgFormat::ntriples;
    LabelConfig labels;
    LabelSourceSet label_sources = LabelSourceSet::all();

    RetrievalOptions retrieval;
    std::size_t slot_labels = 3;  // labels kept per ambiguous slot cell
    LbpOptions lbp;
    double tau = 0.0;             // minimum row confidence for slot extraction
    bool use_embeddings = true;
    TrainConfig train;
    ModelFormat model_format = ModelFormat::text;
    std::vector<double> thresholds;  // empty: 0, 0.05, ..., 1

    std::filesystem::path tables_dir;
    std::filesystem::path gold_dir;
    std::filesystem::path output_dir;
    // Optional overrides; the defaults live under output_dir.
    std::filesystem::path index_path;
    std::filesystem::path model_path;
    std::filesystem::path interpretations_dir;
    std::filesystem::path triples_path;  // the JSON sidecar

    std::size_t workers = 1;
    std::uint64_t seed = 1;

    /// ConfigError naming the offending option when `command` cannot run.
    void validate(Command command) const;

    /// Canonical form hashed into the manifest.
    Json to_json() const;
    std::string hash() const;

    std::filesystem::path resolved_index() const;
    std::filesystem::path resolved_model() const;
    std::filesystem::path resolved_interpretations() const;
    std::filesystem::path resolved_triples() const;
};

/// 64-bit FNV-1a, lowercase hex.
std::string fnv1a_hex(std::string_view bytes);

/// Runs `command` and writes its artifacts. Returns the process exit status:
/// 0 on success (including per-table skips), 2 for configuration errors or
/// missing inputs, 1 for any other failure. Diagnostics go to `log`.
int run(Command command, const PipelineConfig& config, std::ostream& log);

/// Calls fn(i) for i in [0, n) on up to `workers` threads.
void parallel_for(std::size_t n, std::size_t workers, const std::function<void(std::size_t)>& fn);

}  // namespace tabkg
