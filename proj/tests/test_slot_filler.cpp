#include <algorithm>
#include <random>

#include "doctest.h"

#include "ambiguity.hpp"
#include "fixtures.hpp"
#include "generators.hpp"
#include "tabkg/embeddings.hpp"
#include "tabkg/errors.hpp"
#include "tabkg/interpreter.hpp"
#include "tabkg/slot_filler.hpp"

using namespace tabkg;

namespace {

const EmbeddingModel& minimovies_model() {
    static const auto model = [] {
        TrainConfig c;
        c.dimension = 8;
        c.epochs = 50;
        return train_transe(fixture::minimovies(), c).model;
    }();
    return model;
}

Slot slot(const std::string& subject, const std::string& relation, const std::string& cell) {
    Slot s;
    s.table_id = "T1";
    s.subject = subject;
    s.relation = relation;
    s.cell = {cell};
    s.confidence = 1.0;
    return s;
}

struct AmbiguityWorld {
    KnowledgeGraph kg;
    LabelIndex index;
    EmbeddingModel model;
};

const AmbiguityWorld& ambiguity_world() {
    static const AmbiguityWorld w = [] {
        auto kg = ambiguity::kg();
        auto index = LabelIndex::build(kg, LabelSourceSet::all());
        auto model = train_transe(kg, ambiguity::train_config()).model;
        return AmbiguityWorld{std::move(kg), std::move(index), std::move(model)};
    }();
    return w;
}

}  // namespace

TEST_CASE("T1 yields one slot per row and attribute column") {
    const auto t = fixture::t1();
    const auto interp = interpret_table(t, fixture::minimovies(), fixture::minimovies_index());
    const auto slots = extract_slots(interp, t, 0.0);
    REQUIRE(slots.size() == 4);
    for (const auto& s : slots) {
        CHECK(s.table_id == "T1");
        CHECK(s.cell.front() == t.cell(s.row, s.column));
        CHECK(s.subject == interp.row(s.row)->entity);
        CHECK(s.relation == interp.column(s.column)->relation);
    }
    CHECK(extract_slots(interp, t, 1.01).empty());

    auto blank = t;
    blank.rows[1][2] = "";
    CHECK(extract_slots(interp, blank, 0.0).size() == 3);

    auto other = t;
    other.id = "T2";
    CHECK_THROWS_AS(extract_slots(interp, other, 0.0), ContractViolation);

    Interpretation rejected;
    rejected.table_id = "T1";
    rejected.status = InterpretationStatus::rejected_no_key_column;
    CHECK(extract_slots(rejected, t, 0.0).empty());
}

TEST_CASE("datatype cells pass through as literals") {
    const auto r = fill_slot(slot(fixture::E1, fixture::year, "1970"), fixture::minimovies_index(),
                             &minimovies_model(), fixture::minimovies());
    REQUIRE(r.has_value());
    CHECK(r->triple.object.kind == ValueKind::literal);
    CHECK(r->triple.object.value == "1970");
    CHECK(r->method == FillMethod::literal_passthrough);
    CHECK(r->score == 1.0);

    const auto date = fill_slot(slot(fixture::E1, fixture::year, "1970-01-25"), fixture::minimovies_index(),
                                nullptr, fixture::minimovies());
    REQUIRE(date.has_value());
    CHECK(date->method == FillMethod::literal_passthrough);
}

TEST_CASE("entity cells resolve through the label index") {
    const auto s = slot(fixture::E1, fixture::director, "Robert Altman");
    const auto reranked = fill_slot(s, fixture::minimovies_index(), &minimovies_model(), fixture::minimovies());
    REQUIRE(reranked.has_value());
    CHECK(reranked->triple.subject == fixture::E1);
    CHECK(reranked->triple.relation == fixture::director);
    CHECK(reranked->triple.object == ObjectTerm{ValueKind::entity, fixture::E5});
    CHECK(reranked->method == FillMethod::embedding_rerank);
    CHECK(reranked->score == doctest::Approx(minimovies_model().triple_distance(fixture::E1, fixture::director, fixture::E5)));

    const auto plain = fill_slot(s, fixture::minimovies_index(), nullptr, fixture::minimovies());
    REQUIRE(plain.has_value());
    CHECK(plain->triple.object.value == fixture::E5);
    CHECK(plain->method == FillMethod::index_top1);

    SlotFillOptions off;
    off.use_embeddings = false;
    CHECK(fill_slot(s, fixture::minimovies_index(), &minimovies_model(), fixture::minimovies(), off)->method ==
          FillMethod::index_top1);

    CHECK_FALSE(fill_slot(slot(fixture::E1, fixture::director, "zzz qqq"), fixture::minimovies_index(),
                          &minimovies_model(), fixture::minimovies())
                    .has_value());
}

TEST_CASE("re-ranking resolves shared labels by translation distance") {
    const auto& w = ambiguity_world();
    for (const auto& c : ambiguity::cases()) {
        CAPTURE(c.gold);
        const auto ranked = rank_candidates(c.slot, w.index, &w.model, w.kg);
        REQUIRE(ranked.size() == 2);

        // Exhaustive Rank(k) over the candidates.
        const auto s = *w.model.entity_index(c.slot.subject);
        const auto r = *w.model.relation_index(c.slot.relation);
        std::string closest;
        double best = 1e300;
        for (const auto& cand : ranked) {
            const double d = w.model.distance(s, r, *w.model.entity_index(w.kg.entity_iri(cand.entity)));
            REQUIRE(cand.distance.has_value());
            CHECK(*cand.distance == d);
            if (d < best) best = d, closest = w.kg.entity_iri(cand.entity);
        }
        const auto filled = fill_slot(c.slot, w.index, &w.model, w.kg);
        REQUIRE(filled.has_value());
        CHECK(filled->triple.object.value == closest);
        CHECK(filled->triple.object.value == c.gold);
        CHECK(filled->method == FillMethod::embedding_rerank);

        // Both candidates carry the same label, so index order falls back to the IRI.
        const auto top1 = fill_slot(c.slot, w.index, nullptr, w.kg);
        REQUIRE(top1.has_value());
        CHECK(top1->triple.object.value == std::min(w.kg.entity_iri(ranked[0].entity), w.kg.entity_iri(ranked[1].entity)));
    }
}

TEST_CASE("candidates unknown to the model rank last") {
    const auto& w = ambiguity_world();
    const auto c = ambiguity::cases().front();
    // Drop the gold city from a copy of the model.
    std::vector<std::string> entities;
    for (std::size_t i = 0; i < w.model.entity_count(); ++i)
        if (w.model.entity_name(i) != c.gold) entities.push_back(w.model.entity_name(i));
    std::vector<std::string> relations;
    for (std::size_t i = 0; i < w.model.relation_count(); ++i) relations.push_back(w.model.relation_name(i));
    EmbeddingModel partial(entities, relations, w.model.dimension(), w.model.norm());
    for (std::size_t i = 0; i < entities.size(); ++i) {
        const auto src = w.model.entity_vector(*w.model.entity_index(entities[i]));
        std::copy(src.begin(), src.end(), partial.entity_vector(i).begin());
    }
    for (std::size_t i = 0; i < relations.size(); ++i) {
        const auto src = w.model.relation_vector(i);
        std::copy(src.begin(), src.end(), partial.relation_vector(i).begin());
    }

    const auto ranked = rank_candidates(c.slot, w.index, &partial, w.kg);
    REQUIRE(ranked.size() == 2);
    CHECK(ranked[0].distance.has_value());
    CHECK_FALSE(ranked[1].distance.has_value());
    CHECK(w.kg.entity_iri(ranked[1].entity) == c.gold);

    // A model without the subject falls back to index order.
    auto orphan = c.slot;
    orphan.subject = "http://example.org/geo/Nowhere";
    const auto fallback = rank_candidates(orphan, w.index, &w.model, w.kg);
    for (const auto& cand : fallback) CHECK_FALSE(cand.distance.has_value());
}

TEST_CASE("filled triples keep the slot's subject and relation") {
    std::mt19937_64 rng(23);
    for (int trial = 0; trial < 40; ++trial) {
        const auto world = gen::random_world(rng);
        const auto index = LabelIndex::build(world.kg, LabelSourceSet::all());
        TrainConfig tc;
        tc.dimension = 6;
        tc.epochs = 5;
        tc.seed = static_cast<std::uint64_t>(trial) + 1;
        std::optional<EmbeddingModel> model;
        try {
            model = train_transe(world.kg, tc).model;
        } catch (const ConfigError&) {
        }
        const auto table = gen::random_table(rng, world);
        const auto interp = interpret_table(table, world.kg, index);
        for (const auto& s : extract_slots(interp, table, 0.0)) {
            const std::vector<const EmbeddingModel*> models = {model ? &*model : nullptr, nullptr};
            for (const EmbeddingModel* m : models) {
                const auto filled = fill_slot(s, index, m, world.kg);
                if (!filled) continue;
                CHECK(filled->triple.subject == s.subject);
                CHECK(filled->triple.relation == s.relation);
                CHECK(filled->row == s.row);
                CHECK(filled->column == s.column);
                CHECK((filled->triple.object.kind == ValueKind::literal) ==
                      (filled->method == FillMethod::literal_passthrough));
                if (filled->method == FillMethod::literal_passthrough) continue;

                const auto cands = index.candidates(s.cell.front()).candidates;
                REQUIRE_FALSE(cands.empty());
                if (filled->method == FillMethod::index_top1 && m == nullptr) {
                    double top = 0.0;
                    for (const auto& [e, score] : cands) top = std::max(top, score);
                    CHECK(filled->score == top);
                }
                if (filled->method == FillMethod::embedding_rerank) {
                    const auto si = *m->entity_index(s.subject);
                    const auto ri = *m->relation_index(s.relation);
                    for (const auto& [e, score] : cands)
                        if (auto oi = m->entity_index(world.kg.entity_iri(e)))
                            CHECK(filled->score <= m->distance(si, ri, *oi));
                }
            }
        }
    }
}

TEST_CASE("fill method names round-trip") {
    for (auto m : {FillMethod::literal_passthrough, FillMethod::index_top1, FillMethod::embedding_rerank})
        CHECK(parse_fill_method(to_string(m)) == m);
    CHECK(to_string(FillMethod::embedding_rerank) == "embedding-rerank");
    CHECK_THROWS_AS(parse_fill_method("oracle"), ParseError);
}
