#include "tabkg/table.hpp"

#include <algorithm>
#include <fstream>
#include <istream>
#include <iterator>
#include <set>

#include "json.hpp"

#include "tabkg/errors.hpp"
#include "tabkg/text.hpp"

namespace tabkg {

TableFormat parse_table_format(std::string_view name) {
    if (name == "csv") return TableFormat::csv;
    if (name == "json") return TableFormat::json;
    throw ConfigError("unknown table format '" + std::string(name) + "' (expected csv or json)");
}

TableFormat table_format_for(const std::filesystem::path& path) {
    auto ext = path.extension().string();
    std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char c) { return std::tolower(c); });
    if (ext == ".csv") return TableFormat::csv;
    if (ext == ".json") return TableFormat::json;
    throw ConfigError("cannot infer table format of " + path.string());
}

const std::string& Table::cell(std::size_t row, std::size_t column) const {
    if (row >= rows.size() || column >= header.size())
        throw ContractViolation("cell (" + std::to_string(row) + ", " + std::to_string(column) +
                                ") outside " + std::to_string(rows.size()) + "x" +
                                std::to_string(header.size()) + " table " + id);
    return rows[row][column];
}

namespace {

std::vector<std::vector<std::string>> parse_csv_records(std::string_view data) {
    std::vector<std::vector<std::string>> records;
    std::vector<std::string> record;
    std::string field;
    bool in_quotes = false;
    bool field_started = false;
    std::size_t line = 1;

    const auto end_field = [&] {
        record.push_back(std::move(field));
        field.clear();
        field_started = false;
    };
    const auto end_record = [&] {
        end_field();
        const bool blank = record.size() == 1 && record[0].empty();
        if (!blank) records.push_back(std::move(record));
        record.clear();
    };

    for (std::size_t i = 0; i < data.size(); ++i) {
        const char c = data[i];
        if (in_quotes) {
            if (c == '"') {
                if (i + 1 < data.size() && data[i + 1] == '"') {
                    field.push_back('"');
                    ++i;
                } else {
                    in_quotes = false;
                }
            } else {
                if (c == '\n') ++line;
                field.push_back(c);
            }
            continue;
        }
        if (c == '"' && !field_started) {
            in_quotes = true;
            field_started = true;
        } else if (c == ',') {
            end_field();
        } else if (c == '\r') {
            if (i + 1 < data.size() && data[i + 1] == '\n') continue;
            end_record();
            ++line;
        } else if (c == '\n') {
            end_record();
            ++line;
        } else {
            field.push_back(c);
            if (c != ' ' && c != '\t') field_started = true;
        }
    }
    if (in_quotes) throw ParseError("unterminated quoted CSV field", line);
    if (!field.empty() || !record.empty()) end_record();
    return records;
}

void normalize(Table& table) {
    std::size_t width = table.header.size();
    for (const auto& row : table.rows) width = std::max(width, row.size());
    if (width == 0) throw ParseError("table " + table.id + " has zero columns");
    for (std::size_t j = table.header.size(); j < width; ++j)
        table.header.push_back("col" + std::to_string(j));
    for (auto& name : table.header) name = std::string(trim(name));
    for (auto& row : table.rows) {
        row.resize(width);
        for (auto& cell : row) cell = std::string(trim(cell));
    }
}

std::string json_cell(const nlohmann::json& value) {
    if (value.is_string()) return value.get<std::string>();
    if (value.is_null()) return {};
    return value.dump();
}

Table parse_json_table(std::string_view data, std::string default_id) {
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(data);
    } catch (const nlohmann::json::parse_error& e) {
        throw ParseError(std::string("invalid table JSON: ") + e.what());
    }
    if (!doc.is_object()) throw ParseError("table JSON must be an object");
    Table table;
    table.id = doc.contains("id") && doc["id"].is_string() ? doc["id"].get<std::string>()
                                                           : std::move(default_id);
    if (!doc.contains("header") || !doc["header"].is_array())
        throw ParseError("table JSON requires a 'header' array");
    for (const auto& h : doc["header"]) table.header.push_back(json_cell(h));
    if (doc.contains("rows")) {
        if (!doc["rows"].is_array()) throw ParseError("'rows' must be an array");
        for (const auto& r : doc["rows"]) {
            if (!r.is_array()) throw ParseError("each row must be an array");
            std::vector<std::string> row;
            for (const auto& c : r) row.push_back(json_cell(c));
            table.rows.push_back(std::move(row));
        }
    }
    if (doc.contains("key_column") && !doc["key_column"].is_null()) {
        if (!doc["key_column"].is_number_unsigned()) throw ParseError("'key_column' must be a column index");
        table.key_column = doc["key_column"].get<std::size_t>();
    }
    return table;
}

}  // namespace

Table parse_table(std::istream& in, TableFormat format, std::string default_id) {
    const std::string data{std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
    Table table;
    if (format == TableFormat::json) {
        table = parse_json_table(data, std::move(default_id));
    } else {
        auto records = parse_csv_records(data);
        table.id = std::move(default_id);
        if (!records.empty()) {
            table.header = std::move(records.front());
            table.rows.assign(std::make_move_iterator(records.begin() + 1),
                              std::make_move_iterator(records.end()));
        }
    }
    normalize(table);
    if (table.key_column && *table.key_column >= table.column_count())
        throw ParseError("key column " + std::to_string(*table.key_column) + " outside the table");
    return table;
}

Table load_table_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot open table " + path.string());
    return parse_table(in, table_format_for(path), path.stem().string());
}

std::optional<std::size_t> detect_key_column(const Table& table) {
    std::optional<std::size_t> best;
    std::size_t best_unique = 0;
    for (std::size_t c = 0; c < table.column_count(); ++c) {
        std::size_t non_empty = 0;
        std::size_t non_numeric = 0;
        std::set<std::string_view> distinct;
        for (const auto& row : table.rows) {
            const auto& cell = row[c];
            if (cell.empty()) continue;
            ++non_empty;
            if (!is_numeric(cell)) {
                ++non_numeric;
                distinct.insert(cell);
            }
        }
        if (non_empty == 0 || 2 * non_numeric < non_empty) continue;
        if (!best || distinct.size() > best_unique) {
            best = c;
            best_unique = distinct.size();
        }
    }
    return best;
}

std::vector<std::string> split_cell(std::string_view cell) {
    std::vector<std::string> values;
    const auto whole = trim(cell);
    if (whole.empty()) return values;
    values.emplace_back(whole);
    if (whole.find_first_of(kCellDelimiters) == std::string_view::npos) return values;
    std::size_t start = 0;
    while (start <= whole.size()) {
        const std::size_t end = whole.find_first_of(kCellDelimiters, start);
        const auto part = trim(whole.substr(start, end == std::string_view::npos ? end : end - start));
        if (!part.empty() && std::find(values.begin(), values.end(), part) == values.end())
            values.emplace_back(part);
        if (end == std::string_view::npos) break;
        start = end + 1;
    }
    return values;
}

std::vector<std::string> cell_values(const Table& table, std::size_t column, std::size_t row) {
    return split_cell(table.cell(row, column));
}

}  // namespace tabkg
