#include "tabkg/evaluator.hpp"

#include <algorithm>
#include <set>

#include "tabkg/text.hpp"

namespace tabkg {

std::vector<double> default_thresholds() {
    std::vector<double> out;
    for (int i = 0; i <= 20; ++i) out.push_back(i / 20.0);
    return out;
}

EvalReport sweep(std::span<const ScoredOutcome> outcomes, std::size_t gold_count,
                 std::span<const double> thresholds) {
    std::vector<double> ts(thresholds.begin(), thresholds.end());
    if (ts.empty()) ts = default_thresholds();
    std::sort(ts.begin(), ts.end());
    ts.erase(std::unique(ts.begin(), ts.end()), ts.end());

    EvalReport report;
    for (double t : ts) {
        CurvePoint p;
        p.threshold = t;
        p.gold = gold_count;
        for (const auto& o : outcomes) {
            if (o.confidence < t) continue;
            ++p.predicted;
            if (o.correct) ++p.correct;
        }
        p.precision = p.predicted ? static_cast<double>(p.correct) / static_cast<double>(p.predicted) : 1.0;
        p.recall = gold_count ? static_cast<double>(p.correct) / static_cast<double>(gold_count) : 0.0;
        p.f1 = p.precision + p.recall > 0.0 ? 2.0 * p.precision * p.recall / (p.precision + p.recall) : 0.0;
        report.curve.push_back(p);
    }
    report.best = report.curve.front();
    for (const auto& p : report.curve)
        if (p.f1 > report.best.f1) report.best = p;
    if (gold_count == 0) report.warnings.push_back("empty gold set: recall undefined, reported as 0");
    return report;
}

EvalReport evaluate_assignments(std::span<const Interpretation> predictions,
                                std::span<const GoldTable> gold, std::span<const double> thresholds) {
    std::map<std::string, const Interpretation*> by_id;
    for (const auto& p : predictions) by_id.emplace(p.table_id, &p);

    std::vector<ScoredOutcome> outcomes;
    std::size_t gold_rows = 0;
    std::vector<std::string> warnings;
    std::set<std::string> gold_ids;
    for (const auto& g : gold) {
        gold_ids.insert(g.table_id);
        gold_rows += g.row_entities.size();
        auto it = by_id.find(g.table_id);
        if (it == by_id.end()) {
            warnings.push_back("no prediction for gold table " + g.table_id);
            continue;
        }
        for (const auto& [row, entity] : g.row_entities) {
            if (const auto* assigned = it->second->row(row))
                outcomes.push_back(ScoredOutcome{assigned->confidence, assigned->entity == entity});
        }
    }
    for (const auto& [id, p] : by_id)
        if (!gold_ids.count(id)) warnings.push_back("prediction for table " + id + " has no gold annotation");

    auto report = sweep(outcomes, gold_rows, thresholds);
    report.warnings.insert(report.warnings.begin(), warnings.begin(), warnings.end());
    return report;
}

bool is_redundant(const TripleKey& triple, const KnowledgeGraph& kg, const LabelIndex& index) {
    const auto subject = kg.find_entity(triple.subject);
    const auto relation = kg.find_relation(triple.relation);
    if (!subject || !relation) return false;

    std::vector<std::string> surfaces;
    if (triple.object.kind == ValueKind::literal)
        surfaces.push_back(triple.object.value);
    else
        surfaces = kg.entity_labels(triple.object.value, index.sources());

    for (const auto& link : kg.links(*subject)) {
        if (link.relation != *relation) continue;
        const Value existing = link.value;
        if (existing.kind == triple.object.kind && kg.value_text(existing) == triple.object.value) return true;
        for (const auto& surface : surfaces) {
            if (existing.is_entity()) {
                const auto owners = index.exact_label_entities(surface);
                if (std::binary_search(owners.begin(), owners.end(), existing.id)) return true;
            } else {
                const auto key = normalized_key(surface);
                if (!key.empty() && key == normalized_key(kg.literal(existing.id).lexical)) return true;
            }
        }
    }
    return false;
}

NoveltySplit partition_novelty(std::span<const TripleKey> triples, const KnowledgeGraph& kg,
                               const LabelIndex& index) {
    NoveltySplit split;
    for (const auto& t : triples) (is_redundant(t, kg, index) ? split.redundant : split.novel).push_back(t);
    return split;
}

TripleEvalReport evaluate_triples(std::span<const ScoredTriple> predicted,
                                  std::span<const TripleKey> gold, const KnowledgeGraph& kg,
                                  const LabelIndex& index, std::span<const double> thresholds) {
    TripleEvalReport report;
    report.label_sources = index.sources().names();

    std::map<TripleKey, double> predictions;
    for (const auto& p : predicted) {
        auto [it, inserted] = predictions.emplace(p.triple, p.confidence);
        if (!inserted) it->second = std::max(it->second, p.confidence);
    }
    const std::set<TripleKey> gold_set(gold.begin(), gold.end());

    std::vector<ScoredOutcome> novel, redundant, overall;
    for (const auto& [triple, confidence] : predictions) {
        const ScoredOutcome outcome{confidence, gold_set.count(triple) > 0};
        overall.push_back(outcome);
        if (is_redundant(triple, kg, index)) {
            redundant.push_back(outcome);
            ++report.predicted_redundant;
        } else {
            novel.push_back(outcome);
            ++report.predicted_novel;
        }
    }
    for (const auto& g : gold_set) {
        if (is_redundant(g, kg, index))
            ++report.gold_redundant;
        else
            ++report.gold_novel;
    }

    report.novel = sweep(novel, report.gold_novel, thresholds);
    report.redundant = sweep(redundant, report.gold_redundant, thresholds);
    report.overall = sweep(overall, gold_set.size(), thresholds);
    if (gold_set.empty()) report.warnings.push_back("empty gold triple set: recall reported as 0");
    return report;
}

std::vector<TripleKey> derive_gold_triples(const Table& table, const GoldTable& gold,
                                           const KnowledgeGraph& kg, const LabelIndex& index) {
    std::vector<TripleKey> out;
    for (const auto& [row, entity] : gold.row_entities) {
        if (row >= table.row_count()) continue;
        for (const auto& [column, relation] : gold.column_relations) {
            if (column >= table.column_count() || (gold.key_column && column == *gold.key_column)) continue;
            const std::string& cell = table.cell(row, column);
            if (cell.empty()) continue;
            TripleKey key{entity, relation, ObjectTerm{ValueKind::literal, cell}};
            if (!is_datatype_value(cell)) {
                const auto s = kg.find_entity(entity);
                const auto r = kg.find_relation(relation);
                if (s && r) {
                    const auto owners = index.exact_label_entities(cell);
                    for (const auto& link : kg.links(*s)) {
                        if (link.relation != *r || !link.value.is_entity()) continue;
                        if (std::binary_search(owners.begin(), owners.end(), link.value.id)) {
                            key.object = ObjectTerm{ValueKind::entity, kg.entity_iri(link.value.id)};
                            break;
                        }
                    }
                }
            }
            out.push_back(std::move(key));
        }
    }
    return out;
}

}  // namespace tabkg
