#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace tabkg {

// Tokens are maximal runs of alphanumeric code points, lowercased. Non-ASCII
// letters count as alphanumeric; Latin-1/Latin Extended-A, Greek and Cyrillic
// capitals are folded. Punctuation and symbol blocks separate tokens.
std::vector<std::string> tokenize(std::string_view text);

/// Tokens joined by single spaces; two strings with equal keys are the same label.
std::string normalized_key(std::string_view text);

std::string_view trim(std::string_view text);

/// Decimal number after stripping commas, currency symbols and surrounding whitespace.
bool is_numeric(std::string_view text);

/// ISO-8601 date/datetime (YYYY-MM-DD[Thh:mm[:ss]], YYYY-MM) or DD-MM-YYYY with -, / or . separators.
bool is_date(std::string_view text);

/// Values written to the KG verbatim during slot filling.
inline bool is_datatype_value(std::string_view text) { return is_numeric(text) || is_date(text); }

}  // namespace tabkg
