#include "tabkg/slot_filler.hpp"

#include <algorithm>

#include "tabkg/errors.hpp"
#include "tabkg/text.hpp"

namespace tabkg {

std::string_view to_string(FillMethod method) {
    switch (method) {
        case FillMethod::literal_passthrough: return "literal-passthrough";
        case FillMethod::index_top1: return "index-top1";
        case FillMethod::embedding_rerank: return "embedding-rerank";
    }
    return "literal-passthrough";
}

FillMethod parse_fill_method(std::string_view name) {
    if (name == "literal-passthrough") return FillMethod::literal_passthrough;
    if (name == "index-top1") return FillMethod::index_top1;
    if (name == "embedding-rerank") return FillMethod::embedding_rerank;
    throw ParseError("unknown fill method '" + std::string(name) + "'");
}

std::vector<Slot> extract_slots(const Interpretation& interpretation, const Table& table,
                                double min_confidence) {
    std::vector<Slot> slots;
    if (interpretation.status != InterpretationStatus::ok) return slots;
    if (interpretation.table_id != table.id)
        throw ContractViolation("interpretation " + interpretation.table_id + " does not belong to table " +
                                table.id);
    for (const auto& row : interpretation.rows) {
        if (row.confidence < min_confidence) continue;
        for (const auto& column : interpretation.columns) {
            auto values = cell_values(table, column.column, row.row);
            if (values.empty()) continue;
            slots.push_back(Slot{table.id, row.entity, column.relation, std::move(values), row.row,
                                 column.column, row.confidence});
        }
    }
    return slots;
}

std::vector<RankedCandidate> rank_candidates(const Slot& slot, const LabelIndex& index,
                                             const EmbeddingModel* model, const KnowledgeGraph& kg,
                                             const SlotFillOptions& options) {
    std::vector<RankedCandidate> ranked;
    if (slot.cell.empty()) return ranked;
    const auto candidates = index.candidates(slot.cell.front(), options.retrieval);

    std::optional<std::size_t> subject, relation;
    if (model && options.use_embeddings) {
        subject = model->entity_index(slot.subject);
        relation = model->relation_index(slot.relation);
    }
    for (const auto& [entity, score] : candidates.candidates) {
        RankedCandidate c{entity, score, std::nullopt};
        if (subject && relation) {
            if (auto object = model->entity_index(kg.entity_iri(entity)))
                c.distance = model->distance(*subject, *relation, *object);
        }
        ranked.push_back(c);
    }
    std::sort(ranked.begin(), ranked.end(), [](const RankedCandidate& a, const RankedCandidate& b) {
        if (a.distance.has_value() != b.distance.has_value()) return a.distance.has_value();
        if (a.distance && *a.distance != *b.distance) return *a.distance < *b.distance;
        if (a.index_score != b.index_score) return a.index_score > b.index_score;
        return a.entity < b.entity;
    });
    return ranked;
}

std::optional<ExtractedTriple> fill_slot(const Slot& slot, const LabelIndex& index,
                                         const EmbeddingModel* model, const KnowledgeGraph& kg,
                                         const SlotFillOptions& options) {
    if (slot.cell.empty()) return std::nullopt;
    ExtractedTriple out;
    out.triple.subject = slot.subject;
    out.triple.relation = slot.relation;
    out.confidence = slot.confidence;
    out.table_id = slot.table_id;
    out.row = slot.row;
    out.column = slot.column;

    const std::string& whole = slot.cell.front();
    if (is_datatype_value(whole)) {
        out.triple.object = ObjectTerm{ValueKind::literal, whole};
        out.method = FillMethod::literal_passthrough;
        out.score = 1.0;
        return out;
    }

    const auto ranked = rank_candidates(slot, index, model, kg, options);
    if (ranked.empty()) return std::nullopt;
    const auto& best = ranked.front();
    out.triple.object = ObjectTerm{ValueKind::entity, kg.entity_iri(best.entity)};
    if (best.distance) {
        out.method = FillMethod::embedding_rerank;
        out.score = *best.distance;
    } else {
        out.method = FillMethod::index_top1;
        out.score = best.index_score;
    }
    return out;
}

}  // namespace tabkg
