#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "tabkg/kg.hpp"

namespace tabkg {

enum class DistanceNorm : std::uint8_t { l1 = 1, l2 = 2 };

std::string_view to_string(DistanceNorm norm);
DistanceNorm parse_distance_norm(std::string_view name);

struct TrainConfig {
    std::size_t dimension = 50;
    double margin = 1.0;
    double learning_rate = 0.01;
    std::size_t epochs = 100;
    std::size_t negatives = 1;
    std::uint64_t seed = 1;
    /// More than one worker trains lock-free; results are then not reproducible.
    std::size_t workers = 1;
    DistanceNorm norm = DistanceNorm::l1;

    void validate() const;
};

/// Dense entity and relation vectors addressed by identifier.
class EmbeddingModel {
public:
    EmbeddingModel() = default;
    EmbeddingModel(std::vector<std::string> entities, std::vector<std::string> relations,
                   std::size_t dimension, DistanceNorm norm);

    std::size_t dimension() const { return dimension_; }
    DistanceNorm norm() const { return norm_; }
    std::size_t entity_count() const { return entities_.size(); }
    std::size_t relation_count() const { return relations_.size(); }
    const std::string& entity_name(std::size_t i) const { return entities_.at(i); }
    const std::string& relation_name(std::size_t i) const { return relations_.at(i); }

    std::optional<std::size_t> entity_index(std::string_view name) const;
    std::optional<std::size_t> relation_index(std::string_view name) const;

    std::span<double> entity_vector(std::size_t i);
    std::span<const double> entity_vector(std::size_t i) const;
    std::span<double> relation_vector(std::size_t i);
    std::span<const double> relation_vector(std::size_t i) const;

    /// ||s + r - o|| under the model norm.
    double distance(std::size_t s, std::size_t r, std::size_t o) const;
    /// Same, by identifier; unknown identifiers are a ContractViolation naming the id.
    double triple_distance(std::string_view s, std::string_view r, std::string_view o) const;

    void save_text(std::ostream& out) const;
    void save_binary(std::ostream& out) const;
    static EmbeddingModel load_text(std::istream& in);
    static EmbeddingModel load_binary(std::istream& in);

    bool operator==(const EmbeddingModel& other) const;

    // Raw parameter blocks, row-major by index.
    std::vector<double>& entity_data() { return entity_data_; }
    std::vector<double>& relation_data() { return relation_data_; }

private:
    void index_names();

    std::size_t dimension_ = 0;
    DistanceNorm norm_ = DistanceNorm::l1;
    std::vector<std::string> entities_;
    std::vector<std::string> relations_;
    std::unordered_map<std::string, std::size_t> entity_ids_;
    std::unordered_map<std::string, std::size_t> relation_ids_;
    std::vector<double> entity_data_;
    std::vector<double> relation_data_;
};

/// Entity vectors are drawn from U[-6/sqrt(d), 6/sqrt(d)] and scaled to unit L2;
/// relation vectors from the same range, unscaled. One row per KG identifier.
EmbeddingModel initialize_model(const KnowledgeGraph& kg, const TrainConfig& config);

struct TrainingReport {
    std::vector<double> epoch_loss;  // mean hinge loss per (positive, negative) pair
    std::size_t exhausted_corruptions = 0;
};

struct TrainResult {
    EmbeddingModel model;
    TrainingReport report;
};

/// Margin-ranking SGD over entity-object facts; literal facts are skipped.
TrainResult train_transe(const KnowledgeGraph& kg, const TrainConfig& config);

enum class CorruptSide { head, tail };

struct Corruption {
    Fact fact;
    bool replaced_head = false;
    /// Retry budget ran out and the last sample (possibly a true fact) was accepted.
    bool exhausted = false;
};

inline constexpr std::size_t kCorruptionRetries = 100;

/// Replaces head or tail (fair coin) with a uniform entity, resampling while the
/// result is in F.
Corruption sample_corruption(const Fact& fact, const KnowledgeGraph& kg, std::mt19937_64& rng);
Corruption sample_corruption(const Fact& fact, const KnowledgeGraph& kg, std::mt19937_64& rng,
                             CorruptSide side);

/// Model-index triple, as used by the loss.
struct IndexedTriple {
    std::size_t subject;
    std::size_t relation;
    std::size_t object;
};

/// [margin + d(pos) - d(neg)]_+
double margin_loss(const EmbeddingModel& model, const IndexedTriple& positive,
                   const IndexedTriple& negative, double margin);

struct PairGradient {
    std::map<std::size_t, std::vector<double>> entities;
    std::map<std::size_t, std::vector<double>> relations;
};

/// Subgradient of margin_loss; empty when the hinge is inactive.
PairGradient margin_loss_gradient(const EmbeddingModel& model, const IndexedTriple& positive,
                                  const IndexedTriple& negative, double margin);

/// Filtered hits@k for tail prediction: other known tails of (s, r, ?) are skipped.
double filtered_hits_at_k(const EmbeddingModel& model, const KnowledgeGraph& kg,
                          std::span<const Fact> test, std::size_t k);

}  // namespace tabkg
