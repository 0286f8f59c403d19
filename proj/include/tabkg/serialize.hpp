#pragma once

#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"

#include "tabkg/evaluator.hpp"
#include "tabkg/interpreter.hpp"
#include "tabkg/slot_filler.hpp"

namespace tabkg {

using Json = nlohmann::json;

Json to_json(const Interpretation& interpretation);
Interpretation interpretation_from_json(const Json& doc);

/// {table_id, key_column, row_entities: {row: IRI}, column_relations: {col: IRI}}
Json to_json(const GoldTable& gold);
GoldTable gold_from_json(const Json& doc);

Json to_json(const CurvePoint& point);
Json to_json(const EvalReport& report);
Json to_json(const TripleEvalReport& report);

Json to_json(const ExtractedTriple& triple);
ExtractedTriple extracted_triple_from_json(const Json& doc);

/// One line per triple; literals are plain strings.
void write_ntriples(std::ostream& out, std::span<const ExtractedTriple> triples);

/// threshold,precision,recall,f1,predicted,correct,gold
void write_curve_csv(std::ostream& out, const std::string& series, const EvalReport& report,
                     bool header = true);

}  // namespace tabkg
