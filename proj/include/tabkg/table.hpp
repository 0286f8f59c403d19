#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace tabkg {

enum class TableFormat { csv, json };

TableFormat parse_table_format(std::string_view name);
/// From the file extension (.csv, .json); ConfigError otherwise.
TableFormat table_format_for(const std::filesystem::path& path);

/// An n x m grid of trimmed cell strings with a header row.
struct Table {
    std::string id;
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;
    std::optional<std::size_t> key_column;

    std::size_t row_count() const { return rows.size(); }
    std::size_t column_count() const { return header.size(); }

    /// Contract-checked Cell(row, column).
    const std::string& cell(std::size_t row, std::size_t column) const;
};

/// Parses CSV (first row is the header, RFC-4180 quoting) or JSON
/// ({"id", "header", "rows"}). Short rows are padded; long rows widen the table.
Table parse_table(std::istream& in, TableFormat format, std::string default_id = {});
Table load_table_file(const std::filesystem::path& path);

/// Leftmost column with the most distinct non-numeric values among columns
/// whose non-empty cells are at least half non-numeric.
std::optional<std::size_t> detect_key_column(const Table& table);

/// Sub-value delimiters for multi-valued cells.
inline constexpr std::string_view kCellDelimiters = "|;\n";

/// The whole cell first, then its delimiter-separated parts; empty cells give an empty list.
std::vector<std::string> cell_values(const Table& table, std::size_t column, std::size_t row);
std::vector<std::string> split_cell(std::string_view cell);

}  // namespace tabkg
