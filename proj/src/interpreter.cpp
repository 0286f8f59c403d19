#include "tabkg/interpreter.hpp"

#include <algorithm>
#include <string>
#include <unordered_map>

#include "tabkg/errors.hpp"
#include "tabkg/text.hpp"

namespace tabkg {
namespace {

using TokenSet = std::vector<std::string>;  // sorted, unique

TokenSet token_set(std::string_view text) {
    auto tokens = tokenize(text);
    std::sort(tokens.begin(), tokens.end());
    tokens.erase(std::unique(tokens.begin(), tokens.end()), tokens.end());
    return tokens;
}

double jaccard(const TokenSet& a, const TokenSet& b) {
    if (a.empty() && b.empty()) return 0.0;
    std::size_t shared = 0;
    auto ia = a.begin();
    auto ib = b.begin();
    while (ia != a.end() && ib != b.end()) {
        if (*ia < *ib) {
            ++ia;
        } else if (*ib < *ia) {
            ++ib;
        } else {
            ++shared;
            ++ia;
            ++ib;
        }
    }
    const std::size_t united = a.size() + b.size() - shared;
    return static_cast<double>(shared) / static_cast<double>(united);
}

class TokenCache {
public:
    const TokenSet& get(const std::string& text) {
        auto it = cache_.find(text);
        if (it == cache_.end()) it = cache_.emplace(text, token_set(text)).first;
        return it->second;
    }

private:
    std::unordered_map<std::string, TokenSet> cache_;
};

double best_jaccard(const std::vector<TokenSet>& cells, const std::vector<std::string>& labels,
                    TokenCache& cache) {
    double best = 0.0;
    for (const auto& label : labels) {
        const auto& label_tokens = cache.get(label);
        for (const auto& cell : cells) best = std::max(best, jaccard(cell, label_tokens));
    }
    return best;
}

}  // namespace

double token_jaccard(std::string_view a, std::string_view b) {
    return jaccard(token_set(a), token_set(b));
}

double match_score(const KnowledgeGraph& kg, std::span<const std::string> cell_values, EntityId e,
                   RelationId r, LabelSourceSet sources) {
    if (cell_values.empty()) return 0.0;
    const auto labels = kg.link_labels(e, r, sources);
    if (labels.empty()) return 0.0;
    std::vector<TokenSet> cells;
    for (const auto& v : cell_values) cells.push_back(token_set(v));
    TokenCache cache;
    return best_jaccard(cells, labels, cache);
}

double cell_score(const KnowledgeGraph& kg, std::span<const std::string> cell_values,
                  std::span<const EntityId> candidates, RelationId r, LabelSourceSet sources) {
    if (candidates.empty()) return 0.0;
    double sum = 0.0;
    for (EntityId e : candidates) sum += match_score(kg, cell_values, e, r, sources);
    return sum / static_cast<double>(candidates.size());
}

TableScorer::TableScorer(const KnowledgeGraph& kg, const Table& table, std::size_t key_column,
                         std::vector<CandidateSet> candidates, LabelSourceSet sources)
    : kg_(kg), table_(table), key_column_(key_column), candidates_(std::move(candidates)) {
    if (key_column_ >= table_.column_count())
        throw ContractViolation("key column " + std::to_string(key_column_) + " out of range");
    if (candidates_.size() != table_.row_count())
        throw ContractViolation("expected one candidate set per table row");
    for (std::size_t c = 0; c < table_.column_count(); ++c)
        if (c != key_column_) attribute_columns_.push_back(c);

    for (const auto& cand : candidates_)
        for (const auto& [e, score] : cand.candidates) entities_.push_back(e);
    std::sort(entities_.begin(), entities_.end());
    entities_.erase(std::unique(entities_.begin(), entities_.end()), entities_.end());

    compute_matches(sources);
    compute_col_scores();
    compute_row_scores();
    compute_link_statistics();
}

std::size_t TableScorer::attribute_slot(std::size_t column) const {
    auto it = std::lower_bound(attribute_columns_.begin(), attribute_columns_.end(), column);
    if (it == attribute_columns_.end() || *it != column)
        throw ContractViolation("column " + std::to_string(column) + " is not an attribute column");
    return static_cast<std::size_t>(it - attribute_columns_.begin());
}

std::size_t TableScorer::candidate_slot(std::size_t row, EntityId e) const {
    const auto& cands = candidates_.at(row).candidates;
    auto it = std::lower_bound(cands.begin(), cands.end(), e,
                               [](const auto& c, EntityId id) { return c.first < id; });
    if (it == cands.end() || it->first != e)
        throw ContractViolation("entity " + kg_.entity_iri(e) + " is not a candidate of row " +
                                std::to_string(row));
    return static_cast<std::size_t>(it - cands.begin());
}

void TableScorer::compute_matches(LabelSourceSet sources) {
    TokenCache cache;
    std::vector<RelationId> relations;
    matches_.resize(table_.row_count());
    for (std::size_t row = 0; row < table_.row_count(); ++row) {
        const auto& cands = candidates_[row].candidates;
        if (cands.empty()) continue;

        std::vector<std::vector<TokenSet>> cells(attribute_columns_.size());
        for (std::size_t slot = 0; slot < attribute_columns_.size(); ++slot)
            for (const auto& v : cell_values(table_, attribute_columns_[slot], row))
                cells[slot].push_back(token_set(v));

        matches_[row].resize(cands.size());
        for (std::size_t k = 0; k < cands.size(); ++k) {
            const EntityId e = cands[k].first;
            const auto links = kg_.links(e);
            for (std::size_t i = 0; i < links.size();) {
                const RelationId r = links[i].relation;
                while (i < links.size() && links[i].relation == r) ++i;
                relations.push_back(r);
                const auto labels = kg_.link_labels(e, r, sources);
                for (std::size_t slot = 0; slot < attribute_columns_.size(); ++slot) {
                    if (cells[slot].empty()) continue;
                    const double score = best_jaccard(cells[slot], labels, cache);
                    if (score > 0.0) matches_[row][k].push_back(Match{attribute_columns_[slot], r, score});
                }
            }
        }
    }
    std::sort(relations.begin(), relations.end());
    relations.erase(std::unique(relations.begin(), relations.end()), relations.end());
    relations_ = std::move(relations);
}

void TableScorer::compute_col_scores() {
    cell_scores_.assign(attribute_columns_.size(),
                        std::vector<std::map<RelationId, double>>(table_.row_count()));
    for (std::size_t row = 0; row < table_.row_count(); ++row) {
        const std::size_t n_cands = candidates_[row].size();
        if (n_cands == 0) continue;
        for (std::size_t k = 0; k < n_cands; ++k)
            for (const auto& m : matches_[row][k])
                cell_scores_[attribute_slot(m.column)][row][m.relation] += m.score;
        for (auto& per_column : cell_scores_)
            for (auto& [r, sum] : per_column[row]) sum /= static_cast<double>(n_cands);
    }

    col_scores_.assign(attribute_columns_.size(), {});
    for (std::size_t slot = 0; slot < attribute_columns_.size(); ++slot) {
        std::map<RelationId, double> numerators;
        double denominator = 0.0;
        for (std::size_t row = 0; row < table_.row_count(); ++row) {
            for (const auto& [r, score] : cell_scores_[slot][row]) {
                numerators[r] += score;
                denominator += score;
            }
        }
        if (denominator <= 0.0) continue;
        for (const auto& [r, numerator] : numerators) col_scores_[slot][r] = numerator / denominator;
    }
}

void TableScorer::compute_row_scores() {
    const double m = static_cast<double>(attribute_columns_.size());
    row_scores_.resize(table_.row_count());
    for (std::size_t row = 0; row < table_.row_count(); ++row) {
        const auto& cands = candidates_[row].candidates;
        row_scores_[row].assign(cands.size(), 0.0);
        if (cands.empty()) continue;

        if (attribute_columns_.empty()) {
            double top = 0.0;
            for (const auto& [e, s] : cands) top = std::max(top, s);
            for (std::size_t k = 0; k < cands.size(); ++k)
                row_scores_[row][k] = top > 0.0 ? cands[k].second / top : 0.0;
            continue;
        }

        for (std::size_t k = 0; k < cands.size(); ++k) {
            std::vector<double> best(attribute_columns_.size(), 0.0);
            for (const auto& match : matches_[row][k]) {
                const std::size_t slot = attribute_slot(match.column);
                const auto it = col_scores_[slot].find(match.relation);
                if (it == col_scores_[slot].end()) continue;
                best[slot] = std::max(best[slot], it->second * match.score);
            }
            double sum = 0.0;
            for (double b : best) sum += b;
            row_scores_[row][k] = sum / m;
        }
    }
}

void TableScorer::compute_link_statistics() {
    std::map<AttributeLink, double> totals;
    std::map<AttributeLink, std::size_t> rows_holding;
    for (std::size_t row = 0; row < table_.row_count(); ++row) {
        const auto& cands = candidates_[row].candidates;
        if (cands.empty()) continue;
        std::map<AttributeLink, double> best;
        for (std::size_t k = 0; k < cands.size(); ++k) {
            for (const auto& link : kg_.links(cands[k].first)) {
                auto [it, inserted] = best.emplace(link, row_scores_[row][k]);
                if (!inserted) it->second = std::max(it->second, row_scores_[row][k]);
            }
        }
        for (const auto& [link, value] : best) {
            totals[link] += value;
            ++rows_holding[link];
        }
    }
    for (const auto& [link, total] : totals) {
        LinkStatistics stats;
        stats.link_total = total;
        const std::size_t rows = rows_holding[link];
        const std::size_t holders = kg_.holder_count(link);
        stats.cover = rows > 0 ? total / static_cast<double>(rows) : 0.0;
        stats.salience = holders > 0 ? total / static_cast<double>(holders) : 0.0;
        stats.link_score = stats.cover * stats.salience;
        link_stats_.emplace(link, stats);
    }
    for (std::size_t col = 0; col < entities_.size(); ++col)
        for (const auto& link : kg_.links(entities_[col])) link_holders_[link].push_back(col);
}

double TableScorer::match_score(std::size_t column, std::size_t row, EntityId e, RelationId r) const {
    const std::size_t k = candidate_slot(row, e);
    for (const auto& m : matches_[row][k])
        if (m.column == column && m.relation == r) return m.score;
    attribute_slot(column);  // contract check
    return 0.0;
}

double TableScorer::cell_score(std::size_t column, std::size_t row, RelationId r) const {
    const auto& scores = cell_scores_[attribute_slot(column)].at(row);
    auto it = scores.find(r);
    return it == scores.end() ? 0.0 : it->second;
}

double TableScorer::col_score(std::size_t column, RelationId r) const {
    const auto& scores = col_scores_[attribute_slot(column)];
    auto it = scores.find(r);
    return it == scores.end() ? 0.0 : it->second;
}

double TableScorer::row_score(std::size_t row, EntityId e) const {
    return row_scores_[row][candidate_slot(row, e)];
}

LinkStatistics TableScorer::link_statistics(const AttributeLink& link) const {
    auto it = link_stats_.find(link);
    return it == link_stats_.end() ? LinkStatistics{} : it->second;
}

double TableScorer::entity_similarity(EntityId a, EntityId b) const {
    const auto la = kg_.links(a);
    const auto lb = kg_.links(b);
    double sum = 0.0;
    auto ia = la.begin();
    auto ib = lb.begin();
    while (ia != la.end() && ib != lb.end()) {
        if (*ia < *ib) {
            ++ia;
        } else if (*ib < *ia) {
            ++ib;
        } else {
            auto it = link_stats_.find(*ia);
            if (it != link_stats_.end() && it->second.link_score != 0.0) sum += it->second.link_score;
            ++ia;
            ++ib;
        }
    }
    return sum;
}

PriorMatrix TableScorer::prior_matrix() const {
    std::vector<Eigen::Triplet<double>> entries;
    for (std::size_t row = 0; row < table_.row_count(); ++row) {
        const auto& cands = candidates_[row].candidates;
        for (std::size_t k = 0; k < cands.size(); ++k) {
            const auto col = std::lower_bound(entities_.begin(), entities_.end(), cands[k].first) -
                             entities_.begin();
            entries.emplace_back(static_cast<int>(row), static_cast<int>(col), row_scores_[row][k]);
        }
    }
    PriorMatrix prior(static_cast<Eigen::Index>(table_.row_count()),
                      static_cast<Eigen::Index>(entities_.size()));
    prior.setFromTriplets(entries.begin(), entries.end());
    return prior;
}

SimilarityMatrix TableScorer::similarity_matrix() const {
    const auto size = static_cast<Eigen::Index>(entities_.size());
    SimilarityMatrix s = SimilarityMatrix::Zero(size, size);
    for (const auto& [link, holders] : link_holders_) {
        auto it = link_stats_.find(link);
        if (it == link_stats_.end() || it->second.link_score == 0.0) continue;
        const double score = it->second.link_score;
        for (std::size_t a : holders)
            for (std::size_t b : holders)
                s(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b)) += score;
    }
    return s;
}

std::string_view to_string(InterpretationStatus status) {
    switch (status) {
        case InterpretationStatus::ok: return "ok";
        case InterpretationStatus::rejected_no_key_column: return "rejected_no_key_column";
    }
    return "ok";
}

const RowAssignment* Interpretation::row(std::size_t index) const {
    for (const auto& r : rows)
        if (r.row == index) return &r;
    return nullptr;
}

const ColumnAssignment* Interpretation::column(std::size_t index) const {
    for (const auto& c : columns)
        if (c.column == index) return &c;
    return nullptr;
}

namespace {

struct Choice {
    std::size_t slot = 0;
    double confidence = 0.0;
};

// Argmax with smallest-id tie-break (candidates are id-sorted, so first wins);
// confidence is the winner's share of the row mass.
std::optional<Choice> choose(const std::vector<double>& values) {
    double sum = 0.0;
    for (double v : values) sum += v;
    if (!(sum > 0.0)) return std::nullopt;
    Choice best;
    for (std::size_t k = 1; k < values.size(); ++k)
        if (values[k] > values[best.slot]) best.slot = k;
    best.confidence = values[best.slot] / sum;
    return best;
}

}  // namespace

Interpretation interpret_table(const Table& table, const KnowledgeGraph& kg, const LabelIndex& index,
                               const InterpreterConfig& config) {
    Interpretation out;
    out.table_id = table.id;
    out.key_column = table.key_column ? table.key_column : detect_key_column(table);
    if (!out.key_column) {
        out.status = InterpretationStatus::rejected_no_key_column;
        return out;
    }
    const std::size_t key = *out.key_column;

    std::vector<CandidateSet> candidates(table.row_count());
    for (std::size_t row = 0; row < table.row_count(); ++row) {
        const auto& cell = table.cell(row, key);
        if (!cell.empty()) candidates[row] = index.candidates(cell, config.retrieval);
        candidates[row].row = row;
    }

    const TableScorer scorer(kg, table, key, candidates, config.link_label_sources);
    const auto coherence = lbp_pass(scorer.prior_matrix(), scorer.similarity_matrix(), config.lbp);
    const auto columns = scorer.entity_columns();

    std::vector<CandidateSet> chosen(table.row_count());
    for (std::size_t row = 0; row < table.row_count(); ++row) {
        chosen[row].row = row;
        const auto& cands = candidates[row].candidates;
        if (cands.empty()) {
            out.unmatched.push_back(row);
            continue;
        }
        std::vector<double> c_values(cands.size(), 0.0);
        std::vector<double> l_values(cands.size(), 0.0);
        std::vector<double> r_values(cands.size(), 0.0);
        for (PriorMatrix::InnerIterator it(coherence.coherence, static_cast<Eigen::Index>(row)); it; ++it) {
            const EntityId e = columns[static_cast<std::size_t>(it.col())];
            auto pos = std::lower_bound(cands.begin(), cands.end(), e,
                                        [](const auto& c, EntityId id) { return c.first < id; });
            c_values[static_cast<std::size_t>(pos - cands.begin())] = it.value();
        }
        for (std::size_t k = 0; k < cands.size(); ++k) {
            l_values[k] = scorer.row_score(row, cands[k].first);
            r_values[k] = cands[k].second;
        }
        auto pick = choose(c_values);
        if (!pick) pick = choose(l_values);
        if (!pick) pick = choose(r_values);
        const Choice decided = pick.value_or(Choice{0, 0.0});
        const auto& [entity, retrieval] = cands[decided.slot];
        out.rows.push_back(RowAssignment{row, kg.entity_iri(entity), decided.confidence});
        chosen[row].candidates.emplace_back(entity, retrieval);
    }

    const TableScorer resolved(kg, table, key, std::move(chosen), config.link_label_sources);
    for (std::size_t column : resolved.attribute_columns()) {
        std::optional<RelationId> best;
        double best_score = 0.0;
        for (RelationId r : resolved.relation_universe()) {
            const double s = resolved.col_score(column, r);
            if (s > best_score) {
                best = r;
                best_score = s;
            }
        }
        if (best) out.columns.push_back(ColumnAssignment{column, kg.relation_iri(*best), best_score});
    }
    return out;
}

}  // namespace tabkg
