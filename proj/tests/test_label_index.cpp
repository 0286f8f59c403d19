#include <algorithm>
#include <cmath>
#include <map>
#include <random>
#include <set>
#include <sstream>

#include "doctest.h"

#include "fixtures.hpp"
#include "tabkg/errors.hpp"
#include "tabkg/text.hpp"

using namespace tabkg;
using fixture::id;

namespace {

// Straightforward re-derivation of the ranking: every distinct label text is a
// document; score = sum_t (1 + ln tf) * ln((N+1)/(df+1)) / sqrt(|tokens(label)|).
struct OracleHit {
    std::string text;
    double score;
};

std::vector<OracleHit> oracle_query(const KnowledgeGraph& kg, LabelSourceSet sources, std::string_view text) {
    std::set<std::string> docs;
    for (EntityId e = 0; e < kg.entity_count(); ++e)
        for (const auto& l : kg.labels(e))
            if (sources.contains(l.source)) docs.insert(l.text);
    std::map<std::string, std::size_t> df;
    for (const auto& d : docs) {
        auto tokens = tokenize(d);
        std::set<std::string> unique(tokens.begin(), tokens.end());
        for (const auto& t : unique) ++df[t];
    }
    auto q = tokenize(text);
    std::set<std::string> query(q.begin(), q.end());
    const double n = static_cast<double>(docs.size());
    std::vector<OracleHit> out;
    for (const auto& d : docs) {
        const auto tokens = tokenize(d);
        double sum = 0.0;
        bool shared = false;
        for (const auto& t : query) {
            const auto tf = std::count(tokens.begin(), tokens.end(), t);
            if (tf == 0) continue;
            shared = true;
            sum += (1.0 + std::log(static_cast<double>(tf))) * std::log((n + 1.0) / (static_cast<double>(df[t]) + 1.0));
        }
        if (shared) out.push_back({d, sum / std::sqrt(static_cast<double>(tokens.size()))});
    }
    std::sort(out.begin(), out.end(), [](const OracleHit& a, const OracleHit& b) {
        if (a.score != b.score) return a.score > b.score;
        return a.text < b.text;
    });
    return out;
}

KnowledgeGraph random_label_graph(std::mt19937_64& rng) {
    static const std::vector<std::string> words = {"red", "blue", "river", "city", "old", "new", "park", "x"};
    KnowledgeGraph::Builder b;
    const int n = 1 + static_cast<int>(rng() % 8);
    for (int i = 0; i < n; ++i) {
        const auto e = "e" + std::to_string(i);
        b.add_entity(e);
        for (int k = static_cast<int>(rng() % 3); k >= 0; --k) {
            std::string label;
            for (int w = static_cast<int>(rng() % 3); w >= 0; --w) label += words[rng() % words.size()] + " ";
            b.add_label(e, std::string(trim(label)), static_cast<LabelSource>(rng() % 3));
        }
    }
    return std::move(b).build();
}

}  // namespace

TEST_CASE("index size follows the source filter") {
    const auto& kg = fixture::minimovies();
    // Two labels each for E1 and E3, one for the other five entities.
    CHECK(LabelIndex::build(kg, {LabelSource::primary}).document_count() == 9);
    CHECK(LabelIndex::build(kg, {}).document_count() == 0);
    CHECK(LabelIndex::build(KnowledgeGraph{}, LabelSourceSet::all()).document_count() == 0);
    CHECK(fixture::minimovies_index().document_frequency("producers") == 2);
    CHECK(fixture::minimovies_index().document_frequency("film") == 3);
    CHECK(fixture::minimovies_index().document_frequency("nothing") == 0);
}

TEST_CASE("query examples") {
    const auto& index = fixture::minimovies_index();
    const auto mel = index.query("Mel Brooks", 10);
    REQUIRE_FALSE(mel.empty());
    CHECK(index.label_text(mel[0].label) == "Mel Brooks");
    CHECK(std::vector<EntityId>(index.label_entities(mel[0].label).begin(), index.label_entities(mel[0].label).end()) ==
          std::vector<EntityId>{id(fixture::E4)});
    CHECK(index.query("zzz", 10).empty());
    CHECK(index.query("", 10).empty());

    const auto producers = index.query("The Producers", 10);
    REQUIRE(producers.size() == 2);
    CHECK(index.label_text(producers[0].label) == "The Producers");
    CHECK(index.label_text(producers[1].label) == "The Producers (1968 film)");
    CHECK(producers[0].score > producers[1].score);
}

TEST_CASE("candidate rule examples") {
    const auto& index = fixture::minimovies_index();
    const auto mel = index.candidates("Mel Brooks");
    REQUIRE(mel.size() == 1);
    CHECK(mel.contains(id(fixture::E4)));

    // Both M*A*S*H labels share all four query tokens; the ratio of their scores
    // is sqrt(5)/2, below the gap of 2, so both are kept.
    const auto mash = index.candidates("M*A*S*H");
    REQUIRE(mash.size() == 2);
    CHECK(mash.contains(id(fixture::E1)));
    CHECK(mash.contains(id(fixture::E2)));
    const double idf = std::log(10.0 / 3.0);
    for (const auto& [e, score] : mash.candidates) {
        if (e == id(fixture::E2)) CHECK(score == doctest::Approx(2.0 * idf).epsilon(1e-12));
        if (e == id(fixture::E1)) CHECK(score == doctest::Approx(4.0 * idf / std::sqrt(5.0)).epsilon(1e-12));
    }

    CHECK(index.candidates("").empty());
    CHECK(index.candidates("MASH").size() == 1);

    RetrievalOptions loose;
    loose.gap_ratio = 1.05;
    CHECK(index.candidates("M*A*S*H", loose).size() == 1);
    RetrievalOptions narrow;
    narrow.keep_labels = 1;
    CHECK(index.candidates("M*A*S*H", narrow).size() == 1);
}

TEST_CASE("exact labels rank first on the fixture") {
    const auto& index = fixture::minimovies_index();
    for (LabelId l = 0; l < index.document_count(); ++l) {
        const auto hits = index.query(index.label_text(l), 50);
        REQUIRE_FALSE(hits.empty());
        CHECK_MESSAGE(hits[0].label == l, index.label_text(l));
    }
}

TEST_CASE("query matches the brute-force scorer on random graphs") {
    std::mt19937_64 rng(3);
    const std::vector<std::string> queries = {"red", "blue river", "old city park", "x x", "new", "park x red",
                                              "zzz", "River, City"};
    for (int trial = 0; trial < 80; ++trial) {
        const auto kg = random_label_graph(rng);
        const LabelSourceSet sources = trial % 3 ? LabelSourceSet::all() : LabelSourceSet{LabelSource::redirect};
        const auto index = LabelIndex::build(kg, sources);
        for (const auto& q : queries) {
            const auto expected = oracle_query(kg, sources, q);
            const auto got = index.query(q, 1000);
            REQUIRE(got.size() == expected.size());
            for (std::size_t i = 0; i < got.size(); ++i) {
                CHECK(index.label_text(got[i].label) == expected[i].text);
                CHECK(got[i].score == doctest::Approx(expected[i].score).epsilon(1e-12));
            }
            // Deterministic, and every candidate shares a token with the query.
            const auto a = index.candidates(q);
            const auto b = index.candidates(q);
            CHECK(a.candidates == b.candidates);
            const auto q_tokens = tokenize(q);
            for (const auto& [e, score] : a.candidates) {
                CHECK(score >= 0.0);
                bool shares = false;
                for (const auto& label : kg.entity_labels(e, sources))
                    for (const auto& t : tokenize(label))
                        shares = shares || std::find(q_tokens.begin(), q_tokens.end(), t) != q_tokens.end();
                CHECK(shares);
            }
        }
        for (LabelId l = 0; l < index.document_count(); ++l) {
            std::size_t df_check = 0;
            const auto first = tokenize(index.label_text(l));
            if (first.empty()) continue;
            for (LabelId m = 0; m < index.document_count(); ++m) {
                const auto toks = tokenize(index.label_text(m));
                df_check += std::find(toks.begin(), toks.end(), first[0]) != toks.end();
            }
            CHECK(index.document_frequency(first[0]) == df_check);
        }
    }
}

TEST_CASE("top-k truncation keeps the best labels") {
    const auto& index = fixture::minimovies_index();
    const auto all = index.query("film", 10);
    const auto top = index.query("film", 2);
    REQUIRE(top.size() == 2);
    CHECK(top[0].label == all[0].label);
    CHECK(top[1].label == all[1].label);
}

TEST_CASE("exact_label_entities ignores case and punctuation") {
    const auto& index = fixture::minimovies_index();
    CHECK(index.exact_label_entities("robert   ALTMAN") == std::vector<EntityId>{id(fixture::E5)});
    CHECK(index.exact_label_entities("m a s h") == std::vector<EntityId>{id(fixture::E2)});
    CHECK(index.exact_label_entities("Altman").empty());
}

TEST_CASE("snapshot round-trips") {
    std::mt19937_64 rng(5);
    for (int trial = 0; trial < 30; ++trial) {
        const auto kg = random_label_graph(rng);
        const auto index = LabelIndex::build(kg, trial % 2 ? LabelSourceSet::all() : LabelSourceSet{LabelSource::primary});
        std::stringstream buf;
        index.save(buf, kg);
        const auto loaded = LabelIndex::load(buf, kg);
        CHECK(loaded == index);
        CHECK(loaded.sources() == index.sources());
    }
    std::stringstream garbage("not an index\n");
    CHECK_THROWS_AS((void)LabelIndex::load(garbage, fixture::minimovies()), ParseError);

    const auto& mm = fixture::minimovies_index();
    std::stringstream buf;
    mm.save(buf, fixture::minimovies());
    const auto back = LabelIndex::load(buf, fixture::minimovies());
    CHECK(back.query("Mel Brooks", 5)[0].score == mm.query("Mel Brooks", 5)[0].score);
}
