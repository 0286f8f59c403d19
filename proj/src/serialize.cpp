#include "tabkg/serialize.hpp"

#include <cstdio>
#include <ostream>

#include "tabkg/errors.hpp"
#include "tabkg/kg_io.hpp"

namespace tabkg {

Json to_json(const Interpretation& interpretation) {
    Json doc;
    doc["table_id"] = interpretation.table_id;
    doc["status"] = std::string(to_string(interpretation.status));
    doc["key_column"] = interpretation.key_column ? Json(*interpretation.key_column) : Json(nullptr);
    doc["rows"] = Json::array();
    for (const auto& r : interpretation.rows)
        doc["rows"].push_back({{"row", r.row}, {"entity", r.entity}, {"confidence", r.confidence}});
    doc["columns"] = Json::array();
    for (const auto& c : interpretation.columns)
        doc["columns"].push_back({{"column", c.column}, {"relation", c.relation}, {"score", c.score}});
    doc["unmatched"] = interpretation.unmatched;
    return doc;
}

Interpretation interpretation_from_json(const Json& doc) {
    try {
        Interpretation out;
        out.table_id = doc.at("table_id").get<std::string>();
        const auto status = doc.value("status", std::string("ok"));
        if (status == "ok")
            out.status = InterpretationStatus::ok;
        else if (status == "rejected_no_key_column")
            out.status = InterpretationStatus::rejected_no_key_column;
        else
            throw ParseError("unknown interpretation status '" + status + "'");
        if (doc.contains("key_column") && !doc["key_column"].is_null())
            out.key_column = doc["key_column"].get<std::size_t>();
        for (const auto& r : doc.at("rows"))
            out.rows.push_back(RowAssignment{r.at("row").get<std::size_t>(), r.at("entity").get<std::string>(),
                                             r.at("confidence").get<double>()});
        for (const auto& c : doc.at("columns"))
            out.columns.push_back(ColumnAssignment{c.at("column").get<std::size_t>(),
                                                   c.at("relation").get<std::string>(),
                                                   c.at("score").get<double>()});
        out.unmatched = doc.value("unmatched", std::vector<std::size_t>{});
        return out;
    } catch (const Json::exception& e) {
        throw ParseError(std::string("malformed interpretation JSON: ") + e.what());
    }
}

Json to_json(const GoldTable& gold) {
    Json doc;
    doc["table_id"] = gold.table_id;
    doc["key_column"] = gold.key_column ? Json(*gold.key_column) : Json(nullptr);
    doc["row_entities"] = Json::object();
    for (const auto& [row, iri] : gold.row_entities) doc["row_entities"][std::to_string(row)] = iri;
    doc["column_relations"] = Json::object();
    for (const auto& [col, iri] : gold.column_relations) doc["column_relations"][std::to_string(col)] = iri;
    return doc;
}

GoldTable gold_from_json(const Json& doc) {
    const auto index_of = [](const std::string& key) {
        std::size_t pos = 0;
        const auto value = std::stoull(key, &pos);
        if (pos != key.size()) throw ParseError("gold index '" + key + "' is not an integer");
        return static_cast<std::size_t>(value);
    };
    try {
        GoldTable gold;
        gold.table_id = doc.at("table_id").get<std::string>();
        if (doc.contains("key_column") && !doc["key_column"].is_null())
            gold.key_column = doc["key_column"].get<std::size_t>();
        const Json rows = doc.value("row_entities", Json::object());
        const Json columns = doc.value("column_relations", Json::object());
        for (const auto& [key, value] : rows.items())
            gold.row_entities[index_of(key)] = value.get<std::string>();
        for (const auto& [key, value] : columns.items())
            gold.column_relations[index_of(key)] = value.get<std::string>();
        return gold;
    } catch (const Json::exception& e) {
        throw ParseError(std::string("malformed gold JSON: ") + e.what());
    } catch (const std::invalid_argument&) {
        throw ParseError("gold indices must be integers");
    }
}

Json to_json(const CurvePoint& p) {
    return {{"threshold", p.threshold}, {"precision", p.precision}, {"recall", p.recall},
            {"f1", p.f1},               {"predicted", p.predicted}, {"correct", p.correct},
            {"gold", p.gold}};
}

Json to_json(const EvalReport& report) {
    Json doc;
    doc["best"] = to_json(report.best);
    doc["curve"] = Json::array();
    for (const auto& p : report.curve) doc["curve"].push_back(to_json(p));
    doc["warnings"] = report.warnings;
    doc["convention"] = std::string(kEmptyPredictionConvention);
    return doc;
}

Json to_json(const TripleEvalReport& report) {
    Json doc;
    doc["novel"] = to_json(report.novel);
    doc["redundant"] = to_json(report.redundant);
    doc["overall"] = to_json(report.overall);
    doc["counts"] = {{"predicted_novel", report.predicted_novel},
                     {"predicted_redundant", report.predicted_redundant},
                     {"gold_novel", report.gold_novel},
                     {"gold_redundant", report.gold_redundant}};
    doc["label_sources"] = report.label_sources;
    doc["warnings"] = report.warnings;
    return doc;
}

Json to_json(const ExtractedTriple& t) {
    return {{"subject", t.triple.subject},
            {"relation", t.triple.relation},
            {"object", t.triple.object.value},
            {"object_kind", t.triple.object.kind == ValueKind::entity ? "entity" : "literal"},
            {"method", std::string(to_string(t.method))},
            {"score", t.score},
            {"confidence", t.confidence},
            {"table_id", t.table_id},
            {"row", t.row},
            {"column", t.column}};
}

ExtractedTriple extracted_triple_from_json(const Json& doc) {
    try {
        ExtractedTriple t;
        t.triple.subject = doc.at("subject").get<std::string>();
        t.triple.relation = doc.at("relation").get<std::string>();
        const auto kind = doc.at("object_kind").get<std::string>();
        if (kind != "entity" && kind != "literal") throw ParseError("object_kind must be entity or literal");
        t.triple.object = ObjectTerm{kind == "entity" ? ValueKind::entity : ValueKind::literal,
                                     doc.at("object").get<std::string>()};
        t.method = parse_fill_method(doc.at("method").get<std::string>());
        t.score = doc.at("score").get<double>();
        t.confidence = doc.at("confidence").get<double>();
        t.table_id = doc.value("table_id", std::string{});
        t.row = doc.value("row", std::size_t{0});
        t.column = doc.value("column", std::size_t{0});
        return t;
    } catch (const Json::exception& e) {
        throw ParseError(std::string("malformed triple record: ") + e.what());
    }
}

void write_ntriples(std::ostream& out, std::span<const ExtractedTriple> triples) {
    for (const auto& t : triples) {
        out << ntriples_iri(t.triple.subject) << ' ' << ntriples_iri(t.triple.relation) << ' ';
        if (t.triple.object.kind == ValueKind::entity)
            out << ntriples_iri(t.triple.object.value);
        else
            out << ntriples_literal(t.triple.object.value);
        out << " .\n";
    }
}

void write_curve_csv(std::ostream& out, const std::string& series, const EvalReport& report, bool header) {
    if (header) out << "series,threshold,precision,recall,f1,predicted,correct,gold\n";
    char buf[160];
    for (const auto& p : report.curve) {
        std::snprintf(buf, sizeof buf, ",%.17g,%.17g,%.17g,%.17g,%zu,%zu,%zu\n", p.threshold, p.precision,
                      p.recall, p.f1, p.predicted, p.correct, p.gold);
        out << series << buf;
    }
}

}  // namespace tabkg
