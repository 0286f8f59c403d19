#include "tabkg/kg.hpp"

#include <algorithm>
#include <map>

#include "tabkg/errors.hpp"

namespace tabkg {

std::string_view to_string(LabelSource source) {
    switch (source) {
        case LabelSource::primary: return "primary";
        case LabelSource::redirect: return "redirect";
        case LabelSource::disambiguation: return "disambiguation";
    }
    return "primary";
}

std::optional<LabelSource> parse_label_source(std::string_view text) {
    if (text == "primary") return LabelSource::primary;
    if (text == "redirect") return LabelSource::redirect;
    if (text == "disambiguation") return LabelSource::disambiguation;
    return std::nullopt;
}

std::vector<std::string> LabelSourceSet::names() const {
    std::vector<std::string> out;
    for (auto s : {LabelSource::primary, LabelSource::redirect, LabelSource::disambiguation})
        if (contains(s)) out.emplace_back(to_string(s));
    return out;
}

const std::string& KnowledgeGraph::entity_iri(EntityId e) const {
    if (e >= entities_.size()) throw ContractViolation("entity id out of range: " + std::to_string(e));
    return entities_[e];
}

const std::string& KnowledgeGraph::relation_iri(RelationId r) const {
    if (r >= relations_.size())
        throw ContractViolation("relation id out of range: " + std::to_string(r));
    return relations_[r];
}

const Literal& KnowledgeGraph::literal(LiteralId l) const {
    if (l >= literals_.size()) throw ContractViolation("literal id out of range: " + std::to_string(l));
    return literals_[l];
}

std::optional<EntityId> KnowledgeGraph::find_entity(std::string_view iri) const {
    auto it = entity_ids_.find(std::string(iri));
    if (it == entity_ids_.end()) return std::nullopt;
    return it->second;
}

std::optional<RelationId> KnowledgeGraph::find_relation(std::string_view iri) const {
    auto it = relation_ids_.find(std::string(iri));
    if (it == relation_ids_.end()) return std::nullopt;
    return it->second;
}

bool KnowledgeGraph::contains(const Fact& fact) const {
    return std::binary_search(facts_.begin(), facts_.end(), fact);
}

std::span<const AttributeLink> KnowledgeGraph::links(EntityId e) const {
    if (e >= entities_.size()) return {};
    return std::span<const AttributeLink>(links_).subspan(link_offsets_[e],
                                                          link_offsets_[e + 1] - link_offsets_[e]);
}

std::span<const Label> KnowledgeGraph::labels(EntityId e) const {
    if (e >= labels_.size()) return {};
    return labels_[e];
}

std::vector<std::string> KnowledgeGraph::entity_labels(EntityId e, LabelSourceSet sources) const {
    std::vector<std::string> out;
    for (const auto& label : labels(e))
        if (sources.contains(label.source)) out.push_back(label.text);
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

std::vector<std::string> KnowledgeGraph::entity_labels(std::string_view iri,
                                                       LabelSourceSet sources) const {
    auto e = find_entity(iri);
    if (!e) return {};
    return entity_labels(*e, sources);
}

std::vector<std::string> KnowledgeGraph::value_labels(Value v, LabelSourceSet sources) const {
    if (v.is_literal()) return {literal(v.id).lexical};
    return entity_labels(v.id, sources);
}

std::vector<std::string> KnowledgeGraph::link_labels(EntityId e, RelationId r,
                                                     LabelSourceSet sources) const {
    std::vector<std::string> out;
    const auto all = links(e);
    auto first = std::lower_bound(all.begin(), all.end(), AttributeLink{r, Value{ValueKind::entity, 0}});
    for (auto it = first; it != all.end() && it->relation == r; ++it) {
        auto labels_of_value = value_labels(it->value, sources);
        out.insert(out.end(), labels_of_value.begin(), labels_of_value.end());
    }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

std::size_t KnowledgeGraph::holder_count(const AttributeLink& link) const {
    auto it = holders_.find(link);
    return it == holders_.end() ? 0 : it->second;
}

const std::string& KnowledgeGraph::value_text(Value v) const {
    return v.is_entity() ? entity_iri(v.id) : literal(v.id).lexical;
}

bool KnowledgeGraph::operator==(const KnowledgeGraph& other) const {
    return entities_ == other.entities_ && relations_ == other.relations_ &&
           literals_ == other.literals_ && facts_ == other.facts_ && labels_ == other.labels_;
}

void KnowledgeGraph::Builder::add_entity(std::string_view iri) { extra_entities_.emplace_back(iri); }

void KnowledgeGraph::Builder::add_fact(std::string_view subject, std::string_view relation,
                                       std::string_view object) {
    facts_.push_back(RawFact{std::string(subject), std::string(relation), std::string(object), false, {}});
}

void KnowledgeGraph::Builder::add_literal_fact(std::string_view subject, std::string_view relation,
                                               Literal object) {
    facts_.push_back(RawFact{std::string(subject), std::string(relation), {}, true, std::move(object)});
}

void KnowledgeGraph::Builder::add_label(std::string_view entity, std::string text,
                                        LabelSource source) {
    labels_.emplace_back(std::string(entity), Label{std::move(text), source});
}

namespace {

template <typename T>
std::vector<T> sorted_unique(std::vector<T> values) {
    std::sort(values.begin(), values.end());
    values.erase(std::unique(values.begin(), values.end()), values.end());
    return values;
}

template <typename T>
std::uint32_t index_of(const std::vector<T>& sorted, const T& value) {
    return static_cast<std::uint32_t>(std::lower_bound(sorted.begin(), sorted.end(), value) -
                                      sorted.begin());
}

}  // namespace

KnowledgeGraph KnowledgeGraph::Builder::build() && {
    KnowledgeGraph kg;

    std::vector<std::string> entities = std::move(extra_entities_);
    std::vector<std::string> relations;
    std::vector<Literal> literals;
    for (const auto& f : facts_) {
        entities.push_back(f.subject);
        relations.push_back(f.relation);
        if (f.literal)
            literals.push_back(f.literal_value);
        else
            entities.push_back(f.object);
    }
    for (const auto& [entity, label] : labels_) entities.push_back(entity);

    kg.entities_ = sorted_unique(std::move(entities));
    kg.relations_ = sorted_unique(std::move(relations));
    kg.literals_ = sorted_unique(std::move(literals));
    for (std::size_t i = 0; i < kg.entities_.size(); ++i)
        kg.entity_ids_.emplace(kg.entities_[i], static_cast<EntityId>(i));
    for (std::size_t i = 0; i < kg.relations_.size(); ++i)
        kg.relation_ids_.emplace(kg.relations_[i], static_cast<RelationId>(i));

    kg.facts_.reserve(facts_.size());
    for (const auto& f : facts_) {
        const Value object = f.literal ? Value::literal(index_of(kg.literals_, f.literal_value))
                                       : Value::entity(kg.entity_ids_.at(f.object));
        kg.facts_.push_back(Fact{kg.entity_ids_.at(f.subject), kg.relation_ids_.at(f.relation), object});
    }
    kg.facts_ = sorted_unique(std::move(kg.facts_));

    kg.link_offsets_.assign(kg.entities_.size() + 1, 0);
    kg.links_.reserve(kg.facts_.size());
    for (const auto& f : kg.facts_) {
        ++kg.link_offsets_[f.subject + 1];
        kg.links_.push_back(AttributeLink{f.relation, f.object});
        ++kg.holders_[AttributeLink{f.relation, f.object}];
    }
    for (std::size_t i = 1; i < kg.link_offsets_.size(); ++i)
        kg.link_offsets_[i] += kg.link_offsets_[i - 1];

    kg.labels_.resize(kg.entities_.size());
    for (auto& [entity, label] : labels_)
        kg.labels_[kg.entity_ids_.at(entity)].push_back(std::move(label));
    for (auto& labels : kg.labels_) labels = sorted_unique(std::move(labels));

    facts_.clear();
    labels_.clear();
    return kg;
}

}  // namespace tabkg
