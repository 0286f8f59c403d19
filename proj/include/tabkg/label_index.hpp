#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "tabkg/kg.hpp"

namespace tabkg {

using LabelId = std::uint32_t;

struct LabelHit {
    LabelId label = 0;
    double score = 0.0;
};

/// Cand(row): entities retrieved for one key cell, each with its best label score.
struct CandidateSet {
    std::size_t row = 0;
    std::vector<std::pair<EntityId, double>> candidates;  // sorted by entity id

    bool empty() const { return candidates.empty(); }
    std::size_t size() const { return candidates.size(); }
    bool contains(EntityId e) const;
};

struct RetrievalOptions {
    /// Keep only the first label when its score is at least this multiple of the runner-up.
    double gap_ratio = 2.0;
    /// Labels retrieved per query before the first/top-N rule.
    std::size_t max_labels = 50;
    /// Labels kept when the first one does not dominate.
    std::size_t keep_labels = 3;
};

/// Inverted index over KG labels with length-normalised smoothed TF-IDF ranking.
///
/// A document is a distinct label string; it maps to every entity carrying it.
/// Label ids follow lexicographic label order so ids double as tie-breakers.
class LabelIndex {
public:
    LabelIndex() = default;

    static LabelIndex build(const KnowledgeGraph& kg, LabelSourceSet sources);

    /// N, the number of indexed labels.
    std::size_t document_count() const { return labels_.size(); }
    std::size_t document_frequency(std::string_view token) const;
    LabelSourceSet sources() const { return sources_; }

    const std::string& label_text(LabelId id) const { return labels_.at(id).text; }
    std::span<const EntityId> label_entities(LabelId id) const { return labels_.at(id).entities; }

    /// Sum over shared tokens of (1 + ln tf) * ln((N+1)/(df+1)), divided by
    /// sqrt(label token count). Ordered by score desc, label text asc, smallest entity asc.
    std::vector<LabelHit> query(std::string_view text, std::size_t k) const;

    CandidateSet candidates(std::string_view cell_text, const RetrievalOptions& options = {}) const;

    /// Entities owning a label whose token sequence equals that of `text`.
    std::vector<EntityId> exact_label_entities(std::string_view text) const;

    /// Line-based snapshot; entity references are written as IRIs and resolved
    /// against `kg` on load.
    void save(std::ostream& out, const KnowledgeGraph& kg) const;
    static LabelIndex load(std::istream& in, const KnowledgeGraph& kg);

    bool operator==(const LabelIndex& other) const;

private:
    struct LabelRecord {
        std::string text;
        std::vector<EntityId> entities;  // sorted
        std::uint32_t token_count = 0;

        bool operator==(const LabelRecord&) const = default;
    };
    struct Posting {
        LabelId label;
        std::uint32_t tf;

        bool operator==(const Posting&) const = default;
    };

    void index_labels();

    LabelSourceSet sources_;
    std::vector<LabelRecord> labels_;
    std::unordered_map<std::string, std::vector<Posting>> postings_;
    std::unordered_map<std::string, std::vector<LabelId>> exact_;
};

}  // namespace tabkg
