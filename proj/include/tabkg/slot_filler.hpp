#pragma once

#include <compare>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "tabkg/embeddings.hpp"
#include "tabkg/interpreter.hpp"
#include "tabkg/kg.hpp"
#include "tabkg/label_index.hpp"
#include "tabkg/table.hpp"

namespace tabkg {

/// A partial triple (subject, relation, ?) and the cell that should fill it.
struct Slot {
    std::string table_id;
    std::string subject;
    std::string relation;
    std::vector<std::string> cell;  // CellValueSet, whole cell first
    std::size_t row = 0;
    std::size_t column = 0;
    double confidence = 0.0;  // confidence of the row assignment
};

/// One slot per (row with confidence >= min_confidence, assigned column) with a non-empty cell.
std::vector<Slot> extract_slots(const Interpretation& interpretation, const Table& table,
                                double min_confidence);

/// Object of an extracted triple: an entity IRI or a literal lexical form.
struct ObjectTerm {
    ValueKind kind = ValueKind::entity;
    std::string value;

    auto operator<=>(const ObjectTerm&) const = default;
};

/// Subject and relation IRIs plus object; the identity used for evaluation.
struct TripleKey {
    std::string subject;
    std::string relation;
    ObjectTerm object;

    auto operator<=>(const TripleKey&) const = default;
};

enum class FillMethod { literal_passthrough, index_top1, embedding_rerank };

std::string_view to_string(FillMethod method);
FillMethod parse_fill_method(std::string_view name);

struct ExtractedTriple {
    TripleKey triple;
    FillMethod method = FillMethod::literal_passthrough;
    /// Translation distance for embedding-rerank, label score for index-top1, 1 for literals.
    double score = 0.0;
    double confidence = 0.0;
    std::string table_id;
    std::size_t row = 0;
    std::size_t column = 0;
};

struct SlotFillOptions {
    RetrievalOptions retrieval;
    /// Re-rank label candidates by distance(subject + relation, candidate).
    bool use_embeddings = true;
};

struct RankedCandidate {
    EntityId entity = 0;
    double index_score = 0.0;
    std::optional<double> distance;  // absent when the model lacks a vector
};

/// Candidates for an entity-valued cell in final order: model-known candidates by
/// ascending distance (ties: higher index score, then smaller IRI), then the rest
/// by index score. Without a usable model: index score order.
std::vector<RankedCandidate> rank_candidates(const Slot& slot, const LabelIndex& index,
                                             const EmbeddingModel* model, const KnowledgeGraph& kg,
                                             const SlotFillOptions& options = {});

/// std::nullopt when an entity-valued cell retrieves no candidate (slot left unfilled).
std::optional<ExtractedTriple> fill_slot(const Slot& slot, const LabelIndex& index,
                                         const EmbeddingModel* model, const KnowledgeGraph& kg,
                                         const SlotFillOptions& options = {});

}  // namespace tabkg
