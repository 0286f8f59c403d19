#pragma once

#include <compare>
#include <cstdint>
#include <initializer_list>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace tabkg {

using EntityId = std::uint32_t;
using RelationId = std::uint32_t;
using LiteralId = std::uint32_t;

enum class LabelSource : std::uint8_t { primary = 0, redirect = 1, disambiguation = 2 };

std::string_view to_string(LabelSource source);
std::optional<LabelSource> parse_label_source(std::string_view text);

class LabelSourceSet {
public:
    constexpr LabelSourceSet() = default;
    constexpr LabelSourceSet(std::initializer_list<LabelSource> sources) {
        for (auto s : sources) insert(s);
    }
    static constexpr LabelSourceSet all() {
        return {LabelSource::primary, LabelSource::redirect, LabelSource::disambiguation};
    }

    constexpr void insert(LabelSource s) { bits_ |= bit(s); }
    constexpr bool contains(LabelSource s) const { return (bits_ & bit(s)) != 0; }
    constexpr bool empty() const { return bits_ == 0; }
    constexpr std::uint8_t bits() const { return bits_; }
    constexpr bool operator==(const LabelSourceSet&) const = default;

    std::vector<std::string> names() const;

private:
    static constexpr std::uint8_t bit(LabelSource s) {
        return static_cast<std::uint8_t>(1u << static_cast<unsigned>(s));
    }
    std::uint8_t bits_ = 0;
};

enum class ValueKind : std::uint8_t { entity = 0, literal = 1 };

/// Object position of a fact: an entity id or a literal id.
struct Value {
    ValueKind kind = ValueKind::entity;
    std::uint32_t id = 0;

    static constexpr Value entity(EntityId e) { return {ValueKind::entity, e}; }
    static constexpr Value literal(LiteralId l) { return {ValueKind::literal, l}; }
    constexpr bool is_entity() const { return kind == ValueKind::entity; }
    constexpr bool is_literal() const { return kind == ValueKind::literal; }

    auto operator<=>(const Value&) const = default;
};

struct Literal {
    std::string lexical;
    std::string datatype;  // empty for plain literals
    std::string language;

    auto operator<=>(const Literal&) const = default;
};

struct AttributeLink {
    RelationId relation = 0;
    Value value;

    auto operator<=>(const AttributeLink&) const = default;
};

struct AttributeLinkHash {
    std::size_t operator()(const AttributeLink& link) const noexcept {
        std::uint64_t h = (static_cast<std::uint64_t>(link.relation) << 33) ^
                          (static_cast<std::uint64_t>(link.value.kind) << 32) ^ link.value.id;
        h ^= h >> 29;
        h *= 0xBF58476D1CE4E5B9ULL;
        h ^= h >> 32;
        return static_cast<std::size_t>(h);
    }
};

struct Fact {
    EntityId subject = 0;
    RelationId relation = 0;
    Value object;

    auto operator<=>(const Fact&) const = default;
};

struct Label {
    std::string text;
    LabelSource source = LabelSource::primary;

    auto operator<=>(const Label&) const = default;
};

/// Immutable K = (E, R, F) with per-entity label sets.
///
/// Identifiers are interned so that id order equals lexicographic IRI order;
/// "smallest IRI" tie-breaks elsewhere reduce to "smallest id".
class KnowledgeGraph {
public:
    class Builder;

    KnowledgeGraph() = default;

    std::size_t entity_count() const { return entities_.size(); }
    std::size_t relation_count() const { return relations_.size(); }
    std::size_t literal_count() const { return literals_.size(); }
    std::size_t fact_count() const { return facts_.size(); }

    /// Sorted by (subject, relation, object).
    std::span<const Fact> facts() const { return facts_; }

    const std::string& entity_iri(EntityId e) const;
    const std::string& relation_iri(RelationId r) const;
    const Literal& literal(LiteralId l) const;
    std::span<const std::string> entity_iris() const { return entities_; }
    std::span<const std::string> relation_iris() const { return relations_; }

    std::optional<EntityId> find_entity(std::string_view iri) const;
    std::optional<RelationId> find_relation(std::string_view iri) const;

    bool contains(const Fact& fact) const;

    /// Links(e): every (relation, value) with (e, relation, value) in F, sorted.
    std::span<const AttributeLink> links(EntityId e) const;

    std::span<const Label> labels(EntityId e) const;

    /// Sorted, de-duplicated label texts of e whose source is in `sources`.
    std::vector<std::string> entity_labels(EntityId e, LabelSourceSet sources) const;
    /// Unknown IRIs yield an empty set.
    std::vector<std::string> entity_labels(std::string_view iri, LabelSourceSet sources) const;

    /// Labels(v): an entity's labels, or the lexical form of a literal.
    std::vector<std::string> value_labels(Value v,
                                          LabelSourceSet sources = LabelSourceSet::all()) const;

    /// LinkLabels(e, r): labels at the far end of e's r-links.
    std::vector<std::string> link_labels(EntityId e, RelationId r,
                                         LabelSourceSet sources = LabelSourceSet::all()) const;

    /// Number of entities in E holding the link.
    std::size_t holder_count(const AttributeLink& link) const;

    /// IRI for entities, lexical form for literals.
    const std::string& value_text(Value v) const;

    bool operator==(const KnowledgeGraph& other) const;

private:
    std::vector<std::string> entities_;
    std::vector<std::string> relations_;
    std::vector<Literal> literals_;
    std::unordered_map<std::string, EntityId> entity_ids_;
    std::unordered_map<std::string, RelationId> relation_ids_;
    std::vector<Fact> facts_;
    std::vector<std::size_t> link_offsets_;  // size entity_count + 1
    std::vector<AttributeLink> links_;
    std::vector<std::vector<Label>> labels_;
    std::unordered_map<AttributeLink, std::uint32_t, AttributeLinkHash> holders_;
};

class KnowledgeGraph::Builder {
public:
    void add_entity(std::string_view iri);
    void add_fact(std::string_view subject, std::string_view relation, std::string_view object);
    void add_literal_fact(std::string_view subject, std::string_view relation, Literal object);
    void add_label(std::string_view entity, std::string text, LabelSource source);

    KnowledgeGraph build() &&;

private:
    struct RawFact {
        std::string subject;
        std::string relation;
        std::string object;
        bool literal = false;
        Literal literal_value;
    };
    std::vector<std::string> extra_entities_;
    std::vector<RawFact> facts_;
    std::vector<std::pair<std::string, Label>> labels_;
};

}  // namespace tabkg
