#pragma once

#include <filesystem>
#include <string>

#include "tabkg/kg_io.hpp"
#include "tabkg/label_index.hpp"
#include "tabkg/table.hpp"

namespace fixture {

inline std::filesystem::path data_dir() { return TABKG_TEST_DATA; }
inline std::filesystem::path minimovies_dir() { return data_dir() / "minimovies"; }

inline std::string ex(const std::string& local) { return "http://example.org/" + local; }

inline const std::string E1 = ex("MASH_film");
inline const std::string E2 = ex("MASH_series");
inline const std::string E3 = ex("Producers_film");
inline const std::string E4 = ex("MelBrooks");
inline const std::string E5 = ex("RobertAltman");
inline const std::string E6 = ex("Film");
inline const std::string E7 = ex("TVSeries");
inline const std::string director = ex("director");
inline const std::string type = ex("type");
inline const std::string year = ex("year");

inline const tabkg::KnowledgeGraph& minimovies() {
    static const auto kg = tabkg::load_kg_file(minimovies_dir() / "kg.nt", tabkg::KgFormat::ntriples);
    return kg;
}

inline const tabkg::LabelIndex& minimovies_index() {
    static const auto index = tabkg::LabelIndex::build(minimovies(), tabkg::LabelSourceSet::all());
    return index;
}

inline tabkg::Table t1() { return tabkg::load_table_file(minimovies_dir() / "tables" / "T1.csv"); }

inline tabkg::EntityId id(const std::string& iri) { return minimovies().find_entity(iri).value(); }
inline tabkg::RelationId rel(const std::string& iri) { return minimovies().find_relation(iri).value(); }

}  // namespace fixture
