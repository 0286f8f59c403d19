#pragma once

#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "tabkg/interpreter.hpp"
#include "tabkg/kg.hpp"
#include "tabkg/label_index.hpp"
#include "tabkg/slot_filler.hpp"
#include "tabkg/table.hpp"

namespace tabkg {

struct GoldTable {
    std::string table_id;
    std::optional<std::size_t> key_column;
    std::map<std::size_t, std::string> row_entities;
    std::map<std::size_t, std::string> column_relations;
};

struct CurvePoint {
    double threshold = 0.0;
    double precision = 1.0;
    double recall = 0.0;
    double f1 = 0.0;
    std::size_t predicted = 0;
    std::size_t correct = 0;
    std::size_t gold = 0;
};

/// Precision of an empty prediction set is reported as 1 (recall 0).
inline constexpr std::string_view kEmptyPredictionConvention =
    "empty prediction set: precision=1, recall=0";

struct EvalReport {
    std::vector<CurvePoint> curve;  // strictly increasing thresholds
    CurvePoint best;                // maximum F1, lowest threshold on ties
    std::vector<std::string> warnings;
};

/// 0, 0.05, ..., 1.
std::vector<double> default_thresholds();

/// An item counts as predicted at threshold t iff confidence >= t.
struct ScoredOutcome {
    double confidence = 0.0;
    bool correct = false;
};
EvalReport sweep(std::span<const ScoredOutcome> outcomes, std::size_t gold_count,
                 std::span<const double> thresholds);

/// Row-entity assignment quality. Missing predictions cost recall; rows without
/// a gold entity are not scored.
EvalReport evaluate_assignments(std::span<const Interpretation> predictions,
                                std::span<const GoldTable> gold, std::span<const double> thresholds);

/// Whether the KG already states (s, r, o') with o' == o or o' carrying a label
/// that matches o's surface form under the index.
bool is_redundant(const TripleKey& triple, const KnowledgeGraph& kg, const LabelIndex& index);

struct NoveltySplit {
    std::vector<TripleKey> novel;
    std::vector<TripleKey> redundant;
};

NoveltySplit partition_novelty(std::span<const TripleKey> triples, const KnowledgeGraph& kg,
                               const LabelIndex& index);

struct ScoredTriple {
    TripleKey triple;
    double confidence = 0.0;
};

struct TripleEvalReport {
    EvalReport novel;
    EvalReport redundant;
    EvalReport overall;
    std::size_t predicted_novel = 0;
    std::size_t predicted_redundant = 0;
    std::size_t gold_novel = 0;
    std::size_t gold_redundant = 0;
    std::vector<std::string> label_sources;
    std::vector<std::string> warnings;
};

/// P/R/F1 on the novel and redundant partitions separately. A prediction is
/// correct iff it equals a gold triple exactly.
TripleEvalReport evaluate_triples(std::span<const ScoredTriple> predicted,
                                  std::span<const TripleKey> gold, const KnowledgeGraph& kg,
                                  const LabelIndex& index, std::span<const double> thresholds);

/// Gold triples implied by gold row entities, gold column relations and the cells.
std::vector<TripleKey> derive_gold_triples(const Table& table, const GoldTable& gold,
                                           const KnowledgeGraph& kg, const LabelIndex& index);

}  // namespace tabkg
