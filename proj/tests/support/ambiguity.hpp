#pragma once

// Shared-label fixture: two cities named "Paris" and two named "Florence", each
// belonging to a different region. Region -> city facts for the ambiguous
// cities are held out; only city -> region facts tie them to their region.

#include <string>
#include <vector>

#include "tabkg/embeddings.hpp"
#include "tabkg/kg.hpp"
#include "tabkg/slot_filler.hpp"

namespace ambiguity {

inline std::string geo(const std::string& local) { return "http://example.org/geo/" + local; }

inline const std::string has_city = geo("hasCity");
inline const std::string located_in = geo("locatedIn");

struct Region {
    std::string name;
    std::vector<std::string> cities;
    std::string ambiguous_city;  // IRI local name
    std::string ambiguous_label;
};

inline const std::vector<Region>& regions() {
    static const std::vector<Region> r = {
        {"France", {"Lyon", "Marseille", "Toulouse", "Nice", "Nantes"}, "Paris_France", "Paris"},
        {"Texas", {"Dallas", "Houston", "Austin", "El_Paso", "Waco"}, "Paris_Texas", "Paris"},
        {"Italy", {"Rome", "Milan", "Naples", "Turin", "Venice"}, "Florence_Italy", "Florence"},
        {"Alabama", {"Mobile", "Huntsville", "Montgomery", "Auburn", "Selma"}, "Florence_Alabama", "Florence"},
    };
    return r;
}

inline std::string spaced(std::string s) {
    for (auto& c : s)
        if (c == '_') c = ' ';
    return s;
}

inline tabkg::KnowledgeGraph kg() {
    tabkg::KnowledgeGraph::Builder b;
    for (const auto& region : regions()) {
        const auto r = geo(region.name);
        b.add_label(r, region.name, tabkg::LabelSource::primary);
        for (const auto& city : region.cities) {
            const auto c = geo(city);
            b.add_label(c, spaced(city), tabkg::LabelSource::primary);
            b.add_fact(r, has_city, c);
            b.add_fact(c, located_in, r);
        }
        const auto a = geo(region.ambiguous_city);
        b.add_label(a, region.ambiguous_label, tabkg::LabelSource::primary);
        b.add_fact(a, located_in, r);
    }
    return std::move(b).build();
}

struct Case {
    tabkg::Slot slot;
    std::string gold;
};

/// One (region, hasCity, ambiguous label) slot per region.
inline std::vector<Case> cases() {
    std::vector<Case> out;
    std::size_t row = 0;
    for (const auto& region : regions()) {
        tabkg::Slot s;
        s.table_id = "cities";
        s.subject = geo(region.name);
        s.relation = has_city;
        s.cell = {region.ambiguous_label};
        s.row = row++;
        s.column = 1;
        s.confidence = 1.0;
        out.push_back({s, geo(region.ambiguous_city)});
    }
    return out;
}

inline tabkg::TrainConfig train_config() {
    tabkg::TrainConfig c;
    c.dimension = 20;
    c.margin = 1.0;
    c.learning_rate = 0.01;
    c.epochs = 300;
    c.negatives = 2;
    c.seed = 1;
    c.norm = tabkg::DistanceNorm::l2;
    return c;
}

}  // namespace ambiguity
