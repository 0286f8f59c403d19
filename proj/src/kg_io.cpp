#include "tabkg/kg_io.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <istream>
#include <optional>

#include "tabkg/errors.hpp"
#include "tabkg/text.hpp"

namespace tabkg {

KgFormat parse_kg_format(std::string_view name) {
    if (name == "ntriples" || name == "nt") return KgFormat::ntriples;
    if (name == "tsv") return KgFormat::tsv;
    throw ConfigError("unknown KG format '" + std::string(name) + "' (expected ntriples or tsv)");
}

namespace {

bool is_label_relation(const LabelConfig& config, std::string_view relation) {
    return std::find(config.label_relations.begin(), config.label_relations.end(), relation) !=
           config.label_relations.end();
}

void append_code_point(std::string& out, char32_t cp) {
    if (cp < 0x80) {
        out.push_back(static_cast<char>(cp));
    } else if (cp < 0x800) {
        out.push_back(static_cast<char>(0xC0 | (cp >> 6)));
        out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    } else if (cp < 0x10000) {
        out.push_back(static_cast<char>(0xE0 | (cp >> 12)));
        out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
        out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    } else {
        out.push_back(static_cast<char>(0xF0 | (cp >> 18)));
        out.push_back(static_cast<char>(0x80 | ((cp >> 12) & 0x3F)));
        out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
        out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    }
}

struct Term {
    enum class Kind { iri, blank, literal } kind;
    std::string value;
    Literal literal;
};

class LineScanner {
public:
    LineScanner(std::string_view line, std::size_t line_no) : line_(line), line_no_(line_no) {}

    void skip_space() {
        while (pos_ < line_.size() && (line_[pos_] == ' ' || line_[pos_] == '\t')) ++pos_;
    }
    bool at_end() {
        skip_space();
        return pos_ >= line_.size() || line_[pos_] == '#';
    }
    [[noreturn]] void fail(const std::string& what) const { throw ParseError(what, line_no_); }

    Term term() {
        skip_space();
        if (pos_ >= line_.size()) fail("unexpected end of line");
        const char c = line_[pos_];
        if (c == '<') return Term{Term::Kind::iri, iri(), {}};
        if (c == '_' && pos_ + 1 < line_.size() && line_[pos_ + 1] == ':') {
            const std::size_t start = pos_;
            pos_ += 2;
            while (pos_ < line_.size() && line_[pos_] != ' ' && line_[pos_] != '\t' &&
                   line_[pos_] != '.')
                ++pos_;
            if (pos_ == start + 2) fail("empty blank node label");
            return Term{Term::Kind::blank, std::string(line_.substr(start, pos_ - start)), {}};
        }
        if (c == '"') return Term{Term::Kind::literal, {}, literal()};
        fail(std::string("unexpected character '") + c + "'");
    }

    void expect_dot() {
        skip_space();
        if (pos_ >= line_.size() || line_[pos_] != '.') fail("expected '.' terminating the triple");
        ++pos_;
        if (!at_end()) fail("trailing content after '.'");
    }

private:
    std::string iri() {
        ++pos_;  // '<'
        std::string out;
        while (pos_ < line_.size() && line_[pos_] != '>') {
            const char c = line_[pos_];
            if (c == ' ' || c == '"' || c == '<') fail("invalid character in IRI");
            if (c == '\\') {
                out += unicode_escape();
                continue;
            }
            out.push_back(c);
            ++pos_;
        }
        if (pos_ >= line_.size()) fail("unterminated IRI");
        ++pos_;
        return out;
    }

    std::string unicode_escape() {
        // pos_ at backslash
        if (pos_ + 1 >= line_.size()) fail("dangling escape");
        const char kind = line_[pos_ + 1];
        const std::size_t digits = kind == 'u' ? 4 : kind == 'U' ? 8 : 0;
        if (digits == 0) fail(std::string("invalid escape '\\") + kind + "'");
        if (pos_ + 2 + digits > line_.size()) fail("truncated unicode escape");
        char32_t cp = 0;
        for (std::size_t i = 0; i < digits; ++i) {
            const char h = line_[pos_ + 2 + i];
            cp <<= 4;
            if (h >= '0' && h <= '9') cp |= static_cast<char32_t>(h - '0');
            else if (h >= 'a' && h <= 'f') cp |= static_cast<char32_t>(h - 'a' + 10);
            else if (h >= 'A' && h <= 'F') cp |= static_cast<char32_t>(h - 'A' + 10);
            else fail("invalid hex digit in escape");
        }
        pos_ += 2 + digits;
        std::string out;
        append_code_point(out, cp);
        return out;
    }

    Literal literal() {
        ++pos_;  // opening quote
        Literal lit;
        bool closed = false;
        while (pos_ < line_.size()) {
            const char c = line_[pos_];
            if (c == '"') {
                ++pos_;
                closed = true;
                break;
            }
            if (c == '\\') {
                if (pos_ + 1 >= line_.size()) fail("dangling escape");
                const char e = line_[pos_ + 1];
                switch (e) {
                    case 't': lit.lexical.push_back('\t'); break;
                    case 'b': lit.lexical.push_back('\b'); break;
                    case 'n': lit.lexical.push_back('\n'); break;
                    case 'r': lit.lexical.push_back('\r'); break;
                    case 'f': lit.lexical.push_back('\f'); break;
                    case '"': lit.lexical.push_back('"'); break;
                    case '\'': lit.lexical.push_back('\''); break;
                    case '\\': lit.lexical.push_back('\\'); break;
                    case 'u':
                    case 'U': lit.lexical += unicode_escape(); continue;
                    default: fail(std::string("invalid escape '\\") + e + "'");
                }
                pos_ += 2;
                continue;
            }
            lit.lexical.push_back(c);
            ++pos_;
        }
        if (!closed) fail("unterminated literal");
        if (pos_ < line_.size() && line_[pos_] == '@') {
            const std::size_t start = ++pos_;
            while (pos_ < line_.size() &&
                   (std::isalnum(static_cast<unsigned char>(line_[pos_])) || line_[pos_] == '-'))
                ++pos_;
            if (pos_ == start) fail("empty language tag");
            lit.language = std::string(line_.substr(start, pos_ - start));
        } else if (line_.substr(pos_, 2) == "^^") {
            pos_ += 2;
            if (pos_ >= line_.size() || line_[pos_] != '<') fail("datatype must be an IRI");
            lit.datatype = iri();
        }
        return lit;
    }

    std::string_view line_;
    std::size_t line_no_;
    std::size_t pos_ = 0;
};

std::vector<std::string_view> split_tabs(std::string_view line) {
    std::vector<std::string_view> fields;
    std::size_t start = 0;
    while (true) {
        const std::size_t tab = line.find('\t', start);
        fields.push_back(line.substr(start, tab == std::string_view::npos ? tab : tab - start));
        if (tab == std::string_view::npos) break;
        start = tab + 1;
    }
    return fields;
}

std::string_view strip_brackets(std::string_view iri) {
    if (iri.size() >= 2 && iri.front() == '<' && iri.back() == '>') return iri.substr(1, iri.size() - 2);
    return iri;
}

std::string_view chomp(std::string_view line) {
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    return line;
}

}  // namespace

void read_ntriples(std::istream& in, const LabelConfig& labels, KnowledgeGraph::Builder& builder) {
    std::string raw;
    std::size_t line_no = 0;
    while (std::getline(in, raw)) {
        ++line_no;
        LineScanner scan(chomp(raw), line_no);
        if (scan.at_end()) continue;
        Term subject = scan.term();
        if (subject.kind == Term::Kind::literal) scan.fail("subject must be an IRI or blank node");
        Term relation = scan.term();
        if (relation.kind != Term::Kind::iri) scan.fail("predicate must be an IRI");
        Term object = scan.term();
        scan.expect_dot();

        if (object.kind == Term::Kind::literal) {
            if (is_label_relation(labels, relation.value))
                builder.add_label(subject.value, std::move(object.literal.lexical), LabelSource::primary);
            else
                builder.add_literal_fact(subject.value, relation.value, std::move(object.literal));
        } else {
            builder.add_fact(subject.value, relation.value, object.value);
        }
    }
}

void read_tsv(std::istream& in, const LabelConfig& labels, KnowledgeGraph::Builder& builder) {
    std::string raw;
    std::size_t line_no = 0;
    while (std::getline(in, raw)) {
        ++line_no;
        const std::string_view line = chomp(raw);
        if (trim(line).empty() || line.front() == '#') continue;
        const auto fields = split_tabs(line);
        if (fields.size() != 4)
            throw ParseError("expected 4 tab-separated fields (subject, relation, object, kind), got " +
                                 std::to_string(fields.size()),
                             line_no);
        const auto subject = strip_brackets(fields[0]);
        const auto relation = strip_brackets(fields[1]);
        if (subject.empty() || relation.empty())
            throw ParseError("empty subject or relation", line_no);
        if (fields[3] == "entity") {
            const auto object = strip_brackets(fields[2]);
            if (object.empty()) throw ParseError("empty entity object", line_no);
            builder.add_fact(subject, relation, object);
        } else if (fields[3] == "literal") {
            if (is_label_relation(labels, relation))
                builder.add_label(subject, std::string(fields[2]), LabelSource::primary);
            else
                builder.add_literal_fact(subject, relation, Literal{std::string(fields[2]), {}, {}});
        } else {
            throw ParseError("object kind must be 'entity' or 'literal', got '" +
                                 std::string(fields[3]) + "'",
                             line_no);
        }
    }
}

void read_aux_labels(std::istream& in, KnowledgeGraph::Builder& builder) {
    std::string raw;
    std::size_t line_no = 0;
    while (std::getline(in, raw)) {
        ++line_no;
        const std::string_view line = chomp(raw);
        if (trim(line).empty() || line.front() == '#') continue;
        const auto fields = split_tabs(line);
        if (fields.size() != 3)
            throw ParseError("expected 3 tab-separated fields (entity, label, source)", line_no);
        const auto source = parse_label_source(fields[2]);
        if (!source) throw ParseError("unknown label source '" + std::string(fields[2]) + "'", line_no);
        builder.add_label(strip_brackets(fields[0]), std::string(fields[1]), *source);
    }
}

KnowledgeGraph load_kg(std::istream& in, KgFormat format, const LabelConfig& labels) {
    KnowledgeGraph::Builder builder;
    if (format == KgFormat::ntriples)
        read_ntriples(in, labels, builder);
    else
        read_tsv(in, labels, builder);
    for (const auto& path : labels.aux_label_files) {
        std::ifstream aux(path);
        if (!aux) throw ConfigError("cannot open label file " + path.string());
        read_aux_labels(aux, builder);
    }
    return std::move(builder).build();
}

KnowledgeGraph load_kg_file(const std::filesystem::path& path, KgFormat format,
                            const LabelConfig& labels) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open KG file " + path.string());
    return load_kg(in, format, labels);
}

std::string ntriples_iri(std::string_view iri) {
    std::string out = "<";
    for (char c : iri) {
        if (c == '>' || c == '<' || c == '"' || c == ' ' || c == '\\') {
            static constexpr char kHex[] = "0123456789ABCDEF";
            out += "\\u00";
            out.push_back(kHex[(static_cast<unsigned char>(c) >> 4) & 0xF]);
            out.push_back(kHex[static_cast<unsigned char>(c) & 0xF]);
        } else {
            out.push_back(c);
        }
    }
    out.push_back('>');
    return out;
}

std::string ntriples_literal(std::string_view lexical, std::string_view datatype,
                             std::string_view language) {
    std::string out = "\"";
    for (char c : lexical) {
        switch (c) {
            case '"': out += "\\\""; break;
            case '\\': out += "\\\\"; break;
            case '\n': out += "\\n"; break;
            case '\r': out += "\\r"; break;
            case '\t': out += "\\t"; break;
            default: out.push_back(c);
        }
    }
    out.push_back('"');
    if (!language.empty()) {
        out += "@";
        out += language;
    } else if (!datatype.empty()) {
        out += "^^" + ntriples_iri(datatype);
    }
    return out;
}

}  // namespace tabkg
