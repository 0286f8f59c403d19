#pragma once

#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "tabkg/kg.hpp"
#include "tabkg/label_index.hpp"
#include "tabkg/lbp.hpp"
#include "tabkg/table.hpp"

namespace tabkg {

/// |tokens(a) ∩ tokens(b)| / |tokens(a) ∪ tokens(b)|, 0 for an empty union.
double token_jaccard(std::string_view a, std::string_view b);

/// Best Jaccard between any cell value and any label of e's r-links.
double match_score(const KnowledgeGraph& kg, std::span<const std::string> cell_values, EntityId e,
                   RelationId r, LabelSourceSet sources = LabelSourceSet::all());

/// Mean match over the candidate set; 0 for no candidates.
double cell_score(const KnowledgeGraph& kg, std::span<const std::string> cell_values,
                  std::span<const EntityId> candidates, RelationId r,
                  LabelSourceSet sources = LabelSourceSet::all());

struct LinkStatistics {
    double link_total = 0.0;
    double cover = 0.0;
    double salience = 0.0;
    double link_score = 0.0;
};

/// Priors and entity similarities for one table, given its candidate sets.
///
/// Rows with an empty candidate set take no part in any aggregate. All
/// relation sums range over relations that occur in some candidate's links.
class TableScorer {
public:
    TableScorer(const KnowledgeGraph& kg, const Table& table, std::size_t key_column,
                std::vector<CandidateSet> candidates,
                LabelSourceSet sources = LabelSourceSet::all());

    std::span<const std::size_t> attribute_columns() const { return attribute_columns_; }
    std::span<const RelationId> relation_universe() const { return relations_; }
    const CandidateSet& candidates(std::size_t row) const { return candidates_.at(row); }
    /// Sorted union of all candidates; the column order of the prior matrix.
    std::span<const EntityId> entity_columns() const { return entities_; }

    double match_score(std::size_t column, std::size_t row, EntityId e, RelationId r) const;
    double cell_score(std::size_t column, std::size_t row, RelationId r) const;
    double col_score(std::size_t column, RelationId r) const;
    double row_score(std::size_t row, EntityId e) const;
    LinkStatistics link_statistics(const AttributeLink& link) const;
    double entity_similarity(EntityId a, EntityId b) const;

    /// L: rows x entity_columns() of RowScore values.
    PriorMatrix prior_matrix() const;
    /// S over entity_columns(), built from link scores.
    SimilarityMatrix similarity_matrix() const;

private:
    struct Match {
        std::size_t column;
        RelationId relation;
        double score;
    };

    void compute_matches(LabelSourceSet sources);
    void compute_col_scores();
    void compute_row_scores();
    void compute_link_statistics();
    std::size_t attribute_slot(std::size_t column) const;
    std::size_t candidate_slot(std::size_t row, EntityId e) const;

    const KnowledgeGraph& kg_;
    const Table& table_;
    std::size_t key_column_;
    std::vector<CandidateSet> candidates_;
    std::vector<std::size_t> attribute_columns_;
    std::vector<RelationId> relations_;
    std::vector<EntityId> entities_;
    // matches_[row][candidate slot]: non-zero matches only
    std::vector<std::vector<std::vector<Match>>> matches_;
    // per attribute slot: relation -> ColScore
    std::vector<std::map<RelationId, double>> col_scores_;
    // per attribute slot, per row: relation -> CellScore
    std::vector<std::vector<std::map<RelationId, double>>> cell_scores_;
    std::vector<std::vector<double>> row_scores_;  // [row][candidate slot]
    std::map<AttributeLink, LinkStatistics> link_stats_;
    std::map<AttributeLink, std::vector<std::size_t>> link_holders_;  // entity column indices
};

struct InterpreterConfig {
    RetrievalOptions retrieval;
    LbpOptions lbp;
    LabelSourceSet link_label_sources = LabelSourceSet::all();
};

struct RowAssignment {
    std::size_t row = 0;
    std::string entity;
    double confidence = 0.0;

    bool operator==(const RowAssignment&) const = default;
};

struct ColumnAssignment {
    std::size_t column = 0;
    std::string relation;
    double score = 0.0;

    bool operator==(const ColumnAssignment&) const = default;
};

enum class InterpretationStatus { ok, rejected_no_key_column };

std::string_view to_string(InterpretationStatus status);

struct Interpretation {
    std::string table_id;
    std::optional<std::size_t> key_column;
    InterpretationStatus status = InterpretationStatus::ok;
    std::vector<RowAssignment> rows;        // ascending row
    std::vector<ColumnAssignment> columns;  // ascending column
    std::vector<std::size_t> unmatched;

    const RowAssignment* row(std::size_t index) const;
    const ColumnAssignment* column(std::size_t index) const;

    bool operator==(const Interpretation&) const = default;
};

/// Retrieval, priors, similarities, one LBP pass, then row and column argmaxes.
Interpretation interpret_table(const Table& table, const KnowledgeGraph& kg, const LabelIndex& index,
                               const InterpreterConfig& config = {});

}  // namespace tabkg
