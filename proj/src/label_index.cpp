#include "tabkg/label_index.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <map>
#include <ostream>
#include <set>

#include "tabkg/errors.hpp"
#include "tabkg/text.hpp"

namespace tabkg {

bool CandidateSet::contains(EntityId e) const {
    auto it = std::lower_bound(candidates.begin(), candidates.end(), e,
                               [](const auto& c, EntityId id) { return c.first < id; });
    return it != candidates.end() && it->first == e;
}

LabelIndex LabelIndex::build(const KnowledgeGraph& kg, LabelSourceSet sources) {
    std::map<std::string, std::set<EntityId>> grouped;
    for (EntityId e = 0; e < kg.entity_count(); ++e)
        for (const auto& label : kg.labels(e))
            if (sources.contains(label.source)) grouped[label.text].insert(e);

    LabelIndex index;
    index.sources_ = sources;
    index.labels_.reserve(grouped.size());
    for (auto& [text, entities] : grouped)
        index.labels_.push_back(LabelRecord{text, {entities.begin(), entities.end()}, 0});
    index.index_labels();
    return index;
}

void LabelIndex::index_labels() {
    postings_.clear();
    exact_.clear();
    for (LabelId id = 0; id < labels_.size(); ++id) {
        auto& record = labels_[id];
        const auto tokens = tokenize(record.text);
        record.token_count = static_cast<std::uint32_t>(tokens.size());
        std::map<std::string, std::uint32_t> tf;
        for (const auto& t : tokens) ++tf[t];
        for (const auto& [token, count] : tf) postings_[token].push_back(Posting{id, count});
        if (!tokens.empty()) exact_[normalized_key(record.text)].push_back(id);
    }
}

std::size_t LabelIndex::document_frequency(std::string_view token) const {
    auto it = postings_.find(std::string(token));
    return it == postings_.end() ? 0 : it->second.size();
}

std::vector<LabelHit> LabelIndex::query(std::string_view text, std::size_t k) const {
    auto tokens = tokenize(text);
    std::sort(tokens.begin(), tokens.end());
    tokens.erase(std::unique(tokens.begin(), tokens.end()), tokens.end());
    if (tokens.empty() || k == 0) return {};

    const double n_plus_one = static_cast<double>(labels_.size()) + 1.0;
    std::unordered_map<LabelId, double> sums;
    for (const auto& token : tokens) {
        auto it = postings_.find(token);
        if (it == postings_.end()) continue;
        const double idf = std::log(n_plus_one / (static_cast<double>(it->second.size()) + 1.0));
        for (const auto& posting : it->second)
            sums[posting.label] += (1.0 + std::log(static_cast<double>(posting.tf))) * idf;
    }

    std::vector<LabelHit> hits;
    hits.reserve(sums.size());
    for (const auto& [label, sum] : sums)
        hits.push_back(LabelHit{label, sum / std::sqrt(static_cast<double>(labels_[label].token_count))});

    const auto better = [this](const LabelHit& a, const LabelHit& b) {
        if (a.score != b.score) return a.score > b.score;
        const auto& la = labels_[a.label];
        const auto& lb = labels_[b.label];
        if (la.text != lb.text) return la.text < lb.text;
        return la.entities.front() < lb.entities.front();
    };
    if (hits.size() > k) {
        std::partial_sort(hits.begin(), hits.begin() + static_cast<std::ptrdiff_t>(k), hits.end(), better);
        hits.resize(k);
    } else {
        std::sort(hits.begin(), hits.end(), better);
    }
    return hits;
}

CandidateSet LabelIndex::candidates(std::string_view cell_text, const RetrievalOptions& options) const {
    CandidateSet out;
    const auto hits = query(cell_text, std::max<std::size_t>(options.max_labels, 1));
    if (hits.empty()) return out;

    std::size_t keep = std::min(options.keep_labels, hits.size());
    if (hits.size() == 1 || hits[0].score >= options.gap_ratio * hits[1].score) keep = 1;

    std::map<EntityId, double> best;
    for (std::size_t i = 0; i < keep; ++i) {
        for (EntityId e : labels_[hits[i].label].entities) {
            auto [it, inserted] = best.emplace(e, hits[i].score);
            if (!inserted) it->second = std::max(it->second, hits[i].score);
        }
    }
    out.candidates.assign(best.begin(), best.end());
    return out;
}

std::vector<EntityId> LabelIndex::exact_label_entities(std::string_view text) const {
    auto it = exact_.find(normalized_key(text));
    if (it == exact_.end()) return {};
    std::set<EntityId> out;
    for (LabelId id : it->second) out.insert(labels_[id].entities.begin(), labels_[id].entities.end());
    return {out.begin(), out.end()};
}

bool LabelIndex::operator==(const LabelIndex& other) const {
    return sources_ == other.sources_ && labels_ == other.labels_ && postings_ == other.postings_;
}

// Snapshot layout:
//   tabkg-label-index 1
//   sources <bits>
//   labels <N>
//   then per label: "<entity count>\t<escaped label>" followed by one IRI per line.
namespace {

constexpr std::string_view kMagic = "tabkg-label-index";

std::string escape(std::string_view s) {
    std::string out;
    for (char c : s) {
        switch (c) {
            case '\\': out += "\\\\"; break;
            case '\n': out += "\\n"; break;
            case '\r': out += "\\r"; break;
            case '\t': out += "\\t"; break;
            default: out.push_back(c);
        }
    }
    return out;
}

std::string unescape(std::string_view s, std::size_t line) {
    std::string out;
    for (std::size_t i = 0; i < s.size(); ++i) {
        if (s[i] != '\\') {
            out.push_back(s[i]);
            continue;
        }
        if (++i >= s.size()) throw ParseError("dangling escape in label snapshot", line);
        switch (s[i]) {
            case '\\': out.push_back('\\'); break;
            case 'n': out.push_back('\n'); break;
            case 'r': out.push_back('\r'); break;
            case 't': out.push_back('\t'); break;
            default: throw ParseError("invalid escape in label snapshot", line);
        }
    }
    return out;
}

}  // namespace

void LabelIndex::save(std::ostream& out, const KnowledgeGraph& kg) const {
    out << kMagic << " 1\n";
    out << "sources " << static_cast<unsigned>(sources_.bits()) << "\n";
    out << "labels " << labels_.size() << "\n";
    for (const auto& record : labels_) {
        out << record.entities.size() << '\t' << escape(record.text) << '\n';
        for (EntityId e : record.entities) out << kg.entity_iri(e) << '\n';
    }
}

LabelIndex LabelIndex::load(std::istream& in, const KnowledgeGraph& kg) {
    std::string line;
    std::size_t line_no = 0;
    const auto next = [&]() -> std::string& {
        if (!std::getline(in, line)) throw ParseError("truncated label index snapshot", line_no + 1);
        ++line_no;
        return line;
    };
    if (next() != std::string(kMagic) + " 1") throw ParseError("not a label index snapshot (v1)", line_no);

    LabelIndex index;
    {
        const auto& l = next();
        if (l.rfind("sources ", 0) != 0) throw ParseError("expected sources line", line_no);
        const unsigned bits = static_cast<unsigned>(std::stoul(l.substr(8)));
        for (auto s : {LabelSource::primary, LabelSource::redirect, LabelSource::disambiguation})
            if (bits & (1u << static_cast<unsigned>(s))) index.sources_.insert(s);
    }
    const auto& count_line = next();
    if (count_line.rfind("labels ", 0) != 0) throw ParseError("expected labels line", line_no);
    const std::size_t count = std::stoull(count_line.substr(7));
    index.labels_.reserve(count);
    for (std::size_t i = 0; i < count; ++i) {
        const auto& header = next();
        const auto tab = header.find('\t');
        if (tab == std::string::npos) throw ParseError("malformed label record", line_no);
        const std::size_t entity_count = std::stoull(header.substr(0, tab));
        LabelRecord record{unescape(std::string_view(header).substr(tab + 1), line_no), {}, 0};
        for (std::size_t j = 0; j < entity_count; ++j) {
            const auto& iri = next();
            if (auto e = kg.find_entity(iri)) record.entities.push_back(*e);
        }
        std::sort(record.entities.begin(), record.entities.end());
        if (!record.entities.empty()) index.labels_.push_back(std::move(record));
    }
    index.index_labels();
    return index;
}

}  // namespace tabkg
