#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "tabkg/kg.hpp"

namespace tabkg {

enum class KgFormat { ntriples, tsv };

/// "ntriples"/"nt" or "tsv"; anything else is a ConfigError.
KgFormat parse_kg_format(std::string_view name);

inline constexpr std::string_view kRdfsLabel = "http://www.w3.org/2000/01/rdf-schema#label";

struct LabelConfig {
    /// Relations whose literal objects are absorbed as primary labels instead of facts.
    std::vector<std::string> label_relations{std::string(kRdfsLabel), "rdfs:label"};
    /// Tab-separated: entity IRI, label, source tag (primary|redirect|disambiguation).
    std::vector<std::filesystem::path> aux_label_files;
};

/// Parses a whole graph. Malformed lines raise ParseError carrying the line number.
KnowledgeGraph load_kg(std::istream& in, KgFormat format, const LabelConfig& labels = {});
KnowledgeGraph load_kg_file(const std::filesystem::path& path, KgFormat format,
                            const LabelConfig& labels = {});

void read_ntriples(std::istream& in, const LabelConfig& labels, KnowledgeGraph::Builder& builder);
void read_tsv(std::istream& in, const LabelConfig& labels, KnowledgeGraph::Builder& builder);
void read_aux_labels(std::istream& in, KnowledgeGraph::Builder& builder);

/// N-Triples term serialization, used for extracted-triple output.
std::string ntriples_iri(std::string_view iri);
std::string ntriples_literal(std::string_view lexical, std::string_view datatype = {},
                             std::string_view language = {});

}  // namespace tabkg
