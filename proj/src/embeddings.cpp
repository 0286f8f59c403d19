#include "tabkg/embeddings.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <istream>
#include <numeric>
#include <ostream>
#include <sstream>
#include <thread>

#include "tabkg/errors.hpp"

namespace tabkg {

std::string_view to_string(DistanceNorm norm) { return norm == DistanceNorm::l1 ? "l1" : "l2"; }

DistanceNorm parse_distance_norm(std::string_view name) {
    if (name == "l1" || name == "L1") return DistanceNorm::l1;
    if (name == "l2" || name == "L2") return DistanceNorm::l2;
    throw ConfigError("unknown distance norm '" + std::string(name) + "' (expected l1 or l2)");
}

void TrainConfig::validate() const {
    if (dimension < 1) throw ConfigError("embedding dimension must be >= 1");
    if (!(margin >= 0.0)) throw ConfigError("margin must be >= 0");
    if (!(learning_rate > 0.0)) throw ConfigError("learning rate must be > 0");
    if (negatives < 1) throw ConfigError("need at least one negative sample per positive");
    if (workers < 1) throw ConfigError("need at least one worker");
}

EmbeddingModel::EmbeddingModel(std::vector<std::string> entities, std::vector<std::string> relations,
                               std::size_t dimension, DistanceNorm norm)
    : dimension_(dimension),
      norm_(norm),
      entities_(std::move(entities)),
      relations_(std::move(relations)),
      entity_data_(entities_.size() * dimension, 0.0),
      relation_data_(relations_.size() * dimension, 0.0) {
    index_names();
}

void EmbeddingModel::index_names() {
    entity_ids_.clear();
    relation_ids_.clear();
    for (std::size_t i = 0; i < entities_.size(); ++i) entity_ids_.emplace(entities_[i], i);
    for (std::size_t i = 0; i < relations_.size(); ++i) relation_ids_.emplace(relations_[i], i);
}

std::optional<std::size_t> EmbeddingModel::entity_index(std::string_view name) const {
    auto it = entity_ids_.find(std::string(name));
    if (it == entity_ids_.end()) return std::nullopt;
    return it->second;
}

std::optional<std::size_t> EmbeddingModel::relation_index(std::string_view name) const {
    auto it = relation_ids_.find(std::string(name));
    if (it == relation_ids_.end()) return std::nullopt;
    return it->second;
}

std::span<double> EmbeddingModel::entity_vector(std::size_t i) {
    return std::span<double>(entity_data_).subspan(i * dimension_, dimension_);
}
std::span<const double> EmbeddingModel::entity_vector(std::size_t i) const {
    return std::span<const double>(entity_data_).subspan(i * dimension_, dimension_);
}
std::span<double> EmbeddingModel::relation_vector(std::size_t i) {
    return std::span<double>(relation_data_).subspan(i * dimension_, dimension_);
}
std::span<const double> EmbeddingModel::relation_vector(std::size_t i) const {
    return std::span<const double>(relation_data_).subspan(i * dimension_, dimension_);
}

double EmbeddingModel::distance(std::size_t s, std::size_t r, std::size_t o) const {
    const auto vs = entity_vector(s);
    const auto vr = relation_vector(r);
    const auto vo = entity_vector(o);
    double acc = 0.0;
    for (std::size_t i = 0; i < dimension_; ++i) {
        const double x = vs[i] + vr[i] - vo[i];
        acc += norm_ == DistanceNorm::l1 ? std::abs(x) : x * x;
    }
    return norm_ == DistanceNorm::l1 ? acc : std::sqrt(acc);
}

double EmbeddingModel::triple_distance(std::string_view s, std::string_view r, std::string_view o) const {
    const auto need_entity = [&](std::string_view name) {
        auto i = entity_index(name);
        if (!i) throw ContractViolation("entity not in embedding model: " + std::string(name));
        return *i;
    };
    const auto rel = relation_index(r);
    if (!rel) throw ContractViolation("relation not in embedding model: " + std::string(r));
    return distance(need_entity(s), *rel, need_entity(o));
}

bool EmbeddingModel::operator==(const EmbeddingModel& other) const {
    return dimension_ == other.dimension_ && norm_ == other.norm_ && entities_ == other.entities_ &&
           relations_ == other.relations_ && entity_data_ == other.entity_data_ &&
           relation_data_ == other.relation_data_;
}

// Text snapshot:
//   tabkg-transe 1
//   dimension <d> norm <l1|l2> entities <n> relations <m>
//   E\t<iri>\t<v_1> ... <v_d>      (n lines)
//   R\t<iri>\t<v_1> ... <v_d>      (m lines)
// Values use 17 significant digits so parsing restores every bit.
namespace {

constexpr std::string_view kTextMagic = "tabkg-transe 1";
constexpr char kBinaryMagic[8] = {'T', 'K', 'G', 'T', 'R', 'N', 'E', '1'};

void write_row(std::ostream& out, char tag, const std::string& name, std::span<const double> v) {
    out << tag << '\t' << name << '\t';
    char buf[32];
    for (std::size_t i = 0; i < v.size(); ++i) {
        std::snprintf(buf, sizeof buf, "%.17g", v[i]);
        if (i) out << ' ';
        out << buf;
    }
    out << '\n';
}

void read_row(const std::string& line, char tag, std::size_t dimension, std::string& name,
              std::vector<double>& data, std::size_t line_no) {
    if (line.size() < 2 || line[0] != tag || line[1] != '\t')
        throw ParseError(std::string("expected '") + tag + "' record", line_no);
    const auto tab = line.find('\t', 2);
    if (tab == std::string::npos) throw ParseError("missing vector", line_no);
    name = line.substr(2, tab - 2);
    const char* p = line.c_str() + tab + 1;
    for (std::size_t i = 0; i < dimension; ++i) {
        char* end = nullptr;
        const double v = std::strtod(p, &end);
        if (end == p) throw ParseError("expected " + std::to_string(dimension) + " components", line_no);
        data.push_back(v);
        p = end;
    }
    while (*p == ' ') ++p;
    if (*p != '\0') throw ParseError("too many components", line_no);
}

template <typename T>
void put(std::ostream& out, T value) {
    out.write(reinterpret_cast<const char*>(&value), sizeof value);
}

template <typename T>
T get(std::istream& in) {
    T value{};
    if (!in.read(reinterpret_cast<char*>(&value), sizeof value))
        throw ParseError("truncated binary embedding snapshot");
    return value;
}

}  // namespace

void EmbeddingModel::save_text(std::ostream& out) const {
    out << kTextMagic << '\n';
    out << "dimension " << dimension_ << " norm " << to_string(norm_) << " entities "
        << entities_.size() << " relations " << relations_.size() << '\n';
    for (std::size_t i = 0; i < entities_.size(); ++i) write_row(out, 'E', entities_[i], entity_vector(i));
    for (std::size_t i = 0; i < relations_.size(); ++i)
        write_row(out, 'R', relations_[i], relation_vector(i));
}

EmbeddingModel EmbeddingModel::load_text(std::istream& in) {
    std::string line;
    std::size_t line_no = 0;
    const auto next = [&]() -> const std::string& {
        if (!std::getline(in, line)) throw ParseError("truncated embedding snapshot", line_no + 1);
        ++line_no;
        return line;
    };
    if (next() != kTextMagic) throw ParseError("not a text embedding snapshot (v1)", 1);

    std::istringstream header(next());
    std::string k_dim, k_norm, norm_name, k_ent, k_rel;
    std::size_t dimension = 0, n_entities = 0, n_relations = 0;
    if (!(header >> k_dim >> dimension >> k_norm >> norm_name >> k_ent >> n_entities >> k_rel >> n_relations) ||
        k_dim != "dimension" || k_norm != "norm" || k_ent != "entities" || k_rel != "relations")
        throw ParseError("malformed snapshot header", line_no);

    EmbeddingModel model;
    model.dimension_ = dimension;
    model.norm_ = parse_distance_norm(norm_name);
    model.entity_data_.reserve(n_entities * dimension);
    model.relation_data_.reserve(n_relations * dimension);
    std::string name;
    for (std::size_t i = 0; i < n_entities; ++i) {
        read_row(next(), 'E', dimension, name, model.entity_data_, line_no);
        model.entities_.push_back(name);
    }
    for (std::size_t i = 0; i < n_relations; ++i) {
        read_row(next(), 'R', dimension, name, model.relation_data_, line_no);
        model.relations_.push_back(name);
    }
    model.index_names();
    return model;
}

void EmbeddingModel::save_binary(std::ostream& out) const {
    out.write(kBinaryMagic, sizeof kBinaryMagic);
    put<std::uint64_t>(out, dimension_);
    put<std::uint8_t>(out, static_cast<std::uint8_t>(norm_));
    put<std::uint64_t>(out, entities_.size());
    put<std::uint64_t>(out, relations_.size());
    const auto write_block = [&](const std::vector<std::string>& names, const std::vector<double>& data) {
        for (std::size_t i = 0; i < names.size(); ++i) {
            put<std::uint64_t>(out, names[i].size());
            out.write(names[i].data(), static_cast<std::streamsize>(names[i].size()));
            out.write(reinterpret_cast<const char*>(data.data() + i * dimension_),
                      static_cast<std::streamsize>(dimension_ * sizeof(double)));
        }
    };
    write_block(entities_, entity_data_);
    write_block(relations_, relation_data_);
}

EmbeddingModel EmbeddingModel::load_binary(std::istream& in) {
    char magic[sizeof kBinaryMagic];
    if (!in.read(magic, sizeof magic) || std::memcmp(magic, kBinaryMagic, sizeof magic) != 0)
        throw ParseError("not a binary embedding snapshot (v1)");
    EmbeddingModel model;
    model.dimension_ = get<std::uint64_t>(in);
    const auto norm = get<std::uint8_t>(in);
    if (norm != 1 && norm != 2) throw ParseError("invalid norm in binary snapshot");
    model.norm_ = static_cast<DistanceNorm>(norm);
    const auto n_entities = get<std::uint64_t>(in);
    const auto n_relations = get<std::uint64_t>(in);
    const auto read_block = [&](std::uint64_t count, std::vector<std::string>& names, std::vector<double>& data) {
        data.resize(count * model.dimension_);
        for (std::uint64_t i = 0; i < count; ++i) {
            const auto length = get<std::uint64_t>(in);
            std::string name(length, '\0');
            if (!in.read(name.data(), static_cast<std::streamsize>(length)) ||
                !in.read(reinterpret_cast<char*>(data.data() + i * model.dimension_),
                         static_cast<std::streamsize>(model.dimension_ * sizeof(double))))
                throw ParseError("truncated binary embedding snapshot");
            names.push_back(std::move(name));
        }
    };
    read_block(n_entities, model.entities_, model.entity_data_);
    read_block(n_relations, model.relations_, model.relation_data_);
    model.index_names();
    return model;
}

namespace {

void normalize_l2(std::span<double> v) {
    double sq = 0.0;
    for (double x : v) sq += x * x;
    if (sq <= 0.0) return;
    const double inv = 1.0 / std::sqrt(sq);
    for (double& x : v) x *= inv;
}

double sign(double x) { return x > 0.0 ? 1.0 : x < 0.0 ? -1.0 : 0.0; }

// d/dx ||x|| for the configured norm.
void distance_gradient(std::span<const double> x, DistanceNorm norm, std::vector<double>& out) {
    out.assign(x.size(), 0.0);
    if (norm == DistanceNorm::l1) {
        for (std::size_t i = 0; i < x.size(); ++i) out[i] = sign(x[i]);
        return;
    }
    double sq = 0.0;
    for (double v : x) sq += v * v;
    if (sq <= 0.0) return;
    const double inv = 1.0 / std::sqrt(sq);
    for (std::size_t i = 0; i < x.size(); ++i) out[i] = x[i] * inv;
}

double norm_of(std::span<const double> x, DistanceNorm norm) {
    double acc = 0.0;
    for (double v : x) acc += norm == DistanceNorm::l1 ? std::abs(v) : v * v;
    return norm == DistanceNorm::l1 ? acc : std::sqrt(acc);
}

std::vector<Fact> trainable_facts(const KnowledgeGraph& kg) {
    std::vector<Fact> out;
    for (const auto& f : kg.facts())
        if (f.object.is_entity()) out.push_back(f);
    return out;
}

// Parameter access shared by all workers. Relaxed atomics: no locks, updates
// from concurrent workers may interleave or be lost.
class SharedParameters {
public:
    SharedParameters(EmbeddingModel& model) : model_(model), dim_(model.dimension()) {}

    void load_entity(std::size_t i, std::vector<double>& out) { load(model_.entity_data(), i, out); }
    void load_relation(std::size_t i, std::vector<double>& out) { load(model_.relation_data(), i, out); }

    void add_entity(std::size_t i, const std::vector<double>& delta) { add(model_.entity_data(), i, delta); }
    void add_relation(std::size_t i, const std::vector<double>& delta) {
        add(model_.relation_data(), i, delta);
    }

    void normalize_entity(std::size_t i) {
        std::vector<double> v;
        load(model_.entity_data(), i, v);
        normalize_l2(v);
        auto& data = model_.entity_data();
        for (std::size_t j = 0; j < dim_; ++j)
            std::atomic_ref<double>(data[i * dim_ + j]).store(v[j], std::memory_order_relaxed);
    }

private:
    void load(std::vector<double>& data, std::size_t i, std::vector<double>& out) {
        out.resize(dim_);
        for (std::size_t j = 0; j < dim_; ++j)
            out[j] = std::atomic_ref<double>(data[i * dim_ + j]).load(std::memory_order_relaxed);
    }
    void add(std::vector<double>& data, std::size_t i, const std::vector<double>& delta) {
        for (std::size_t j = 0; j < dim_; ++j) {
            std::atomic_ref<double> slot(data[i * dim_ + j]);
            slot.store(slot.load(std::memory_order_relaxed) + delta[j], std::memory_order_relaxed);
        }
    }

    EmbeddingModel& model_;
    std::size_t dim_;
};

struct WorkerTotals {
    double loss = 0.0;
    std::size_t pairs = 0;
    std::size_t exhausted = 0;
};

void train_slice(SharedParameters& params, const KnowledgeGraph& kg, const TrainConfig& config,
                 std::span<const Fact> facts, std::span<const std::size_t> order, std::mt19937_64& rng,
                 WorkerTotals& totals) {
    std::vector<double> s, r, o, sn, on, x_pos, x_neg, g_pos, g_neg, delta;
    const std::size_t dim = config.dimension;
    for (std::size_t idx : order) {
        const Fact& fact = facts[idx];
        for (std::size_t n = 0; n < config.negatives; ++n) {
            const Corruption corruption = sample_corruption(fact, kg, rng);
            if (corruption.exhausted) ++totals.exhausted;
            const Fact& neg = corruption.fact;

            params.load_entity(fact.subject, s);
            params.load_relation(fact.relation, r);
            params.load_entity(fact.object.id, o);
            params.load_entity(neg.subject, sn);
            params.load_entity(neg.object.id, on);

            x_pos.resize(dim);
            x_neg.resize(dim);
            for (std::size_t j = 0; j < dim; ++j) {
                x_pos[j] = s[j] + r[j] - o[j];
                x_neg[j] = sn[j] + r[j] - on[j];
            }
            const double loss = config.margin + norm_of(x_pos, config.norm) - norm_of(x_neg, config.norm);
            ++totals.pairs;
            if (loss <= 0.0) continue;
            totals.loss += loss;

            distance_gradient(x_pos, config.norm, g_pos);
            distance_gradient(x_neg, config.norm, g_neg);
            const double lr = config.learning_rate;
            delta.resize(dim);

            for (std::size_t j = 0; j < dim; ++j) delta[j] = -lr * g_pos[j];
            params.add_entity(fact.subject, delta);
            for (std::size_t j = 0; j < dim; ++j) delta[j] = lr * g_pos[j];
            params.add_entity(fact.object.id, delta);
            for (std::size_t j = 0; j < dim; ++j) delta[j] = -lr * (g_pos[j] - g_neg[j]);
            params.add_relation(fact.relation, delta);
            for (std::size_t j = 0; j < dim; ++j) delta[j] = lr * g_neg[j];
            params.add_entity(neg.subject, delta);
            for (std::size_t j = 0; j < dim; ++j) delta[j] = -lr * g_neg[j];
            params.add_entity(neg.object.id, delta);

            params.normalize_entity(fact.subject);
            params.normalize_entity(fact.object.id);
            params.normalize_entity(neg.subject);
            params.normalize_entity(neg.object.id);
        }
    }
}

}  // namespace

EmbeddingModel initialize_model(const KnowledgeGraph& kg, const TrainConfig& config) {
    config.validate();
    EmbeddingModel model({kg.entity_iris().begin(), kg.entity_iris().end()},
                         {kg.relation_iris().begin(), kg.relation_iris().end()}, config.dimension,
                         config.norm);
    std::mt19937_64 rng(config.seed);
    const double bound = 6.0 / std::sqrt(static_cast<double>(config.dimension));
    std::uniform_real_distribution<double> uniform(-bound, bound);
    for (auto& x : model.relation_data()) x = uniform(rng);
    for (auto& x : model.entity_data()) x = uniform(rng);
    for (std::size_t i = 0; i < model.entity_count(); ++i) normalize_l2(model.entity_vector(i));
    return model;
}

TrainResult train_transe(const KnowledgeGraph& kg, const TrainConfig& config) {
    config.validate();
    const auto facts = trainable_facts(kg);
    if (facts.empty()) throw ConfigError("no entity-object facts to train embeddings on");

    TrainResult result{initialize_model(kg, config), {}};
    SharedParameters params(result.model);

    // Streams: one for the epoch shuffle, one per worker for corruptions.
    std::mt19937_64 shuffle_rng(config.seed ^ 0x9E3779B97F4A7C15ULL);
    std::vector<std::mt19937_64> worker_rngs;
    for (std::size_t w = 0; w < config.workers; ++w) worker_rngs.emplace_back(config.seed + 1 + w);

    std::vector<std::size_t> order(facts.size());
    std::iota(order.begin(), order.end(), 0);
    for (std::size_t epoch = 0; epoch < config.epochs; ++epoch) {
        std::shuffle(order.begin(), order.end(), shuffle_rng);
        std::vector<WorkerTotals> totals(config.workers);
        if (config.workers == 1) {
            train_slice(params, kg, config, facts, order, worker_rngs[0], totals[0]);
        } else {
            std::vector<std::thread> threads;
            const std::size_t chunk = (order.size() + config.workers - 1) / config.workers;
            for (std::size_t w = 0; w < config.workers; ++w) {
                const std::size_t begin = std::min(order.size(), w * chunk);
                const std::size_t end = std::min(order.size(), begin + chunk);
                threads.emplace_back([&, w, begin, end] {
                    train_slice(params, kg, config, facts,
                                std::span<const std::size_t>(order).subspan(begin, end - begin),
                                worker_rngs[w], totals[w]);
                });
            }
            for (auto& t : threads) t.join();
        }
        WorkerTotals sum;
        for (const auto& t : totals) {
            sum.loss += t.loss;
            sum.pairs += t.pairs;
            sum.exhausted += t.exhausted;
        }
        result.report.epoch_loss.push_back(sum.pairs ? sum.loss / static_cast<double>(sum.pairs) : 0.0);
        result.report.exhausted_corruptions += sum.exhausted;
    }
    return result;
}

Corruption sample_corruption(const Fact& fact, const KnowledgeGraph& kg, std::mt19937_64& rng) {
    std::bernoulli_distribution coin(0.5);
    return sample_corruption(fact, kg, rng, coin(rng) ? CorruptSide::head : CorruptSide::tail);
}

Corruption sample_corruption(const Fact& fact, const KnowledgeGraph& kg, std::mt19937_64& rng,
                             CorruptSide side) {
    if (!fact.object.is_entity()) throw ContractViolation("cannot corrupt a literal-object fact");
    if (kg.entity_count() == 0) throw ContractViolation("cannot corrupt against an empty entity set");
    std::uniform_int_distribution<EntityId> pick(0, static_cast<EntityId>(kg.entity_count() - 1));
    Corruption out{fact, side == CorruptSide::head, false};
    for (std::size_t attempt = 0; attempt < kCorruptionRetries; ++attempt) {
        out.fact = fact;
        if (out.replaced_head)
            out.fact.subject = pick(rng);
        else
            out.fact.object = Value::entity(pick(rng));
        if (!kg.contains(out.fact)) return out;
    }
    out.exhausted = true;
    return out;
}

double margin_loss(const EmbeddingModel& model, const IndexedTriple& positive,
                   const IndexedTriple& negative, double margin) {
    const double value = margin + model.distance(positive.subject, positive.relation, positive.object) -
                         model.distance(negative.subject, negative.relation, negative.object);
    return std::max(0.0, value);
}

PairGradient margin_loss_gradient(const EmbeddingModel& model, const IndexedTriple& positive,
                                  const IndexedTriple& negative, double margin) {
    PairGradient grad;
    if (margin_loss(model, positive, negative, margin) <= 0.0) return grad;
    const std::size_t dim = model.dimension();
    const auto residual = [&](const IndexedTriple& t) {
        std::vector<double> x(dim);
        const auto vs = model.entity_vector(t.subject);
        const auto vr = model.relation_vector(t.relation);
        const auto vo = model.entity_vector(t.object);
        for (std::size_t j = 0; j < dim; ++j) x[j] = vs[j] + vr[j] - vo[j];
        return x;
    };
    std::vector<double> g_pos, g_neg;
    distance_gradient(residual(positive), model.norm(), g_pos);
    distance_gradient(residual(negative), model.norm(), g_neg);

    const auto accumulate = [dim](std::map<std::size_t, std::vector<double>>& into, std::size_t id,
                                  const std::vector<double>& g, double scale) {
        auto& v = into[id];
        v.resize(dim, 0.0);
        for (std::size_t j = 0; j < dim; ++j) v[j] += scale * g[j];
    };
    accumulate(grad.entities, positive.subject, g_pos, 1.0);
    accumulate(grad.entities, positive.object, g_pos, -1.0);
    accumulate(grad.relations, positive.relation, g_pos, 1.0);
    accumulate(grad.entities, negative.subject, g_neg, -1.0);
    accumulate(grad.entities, negative.object, g_neg, 1.0);
    accumulate(grad.relations, negative.relation, g_neg, -1.0);
    return grad;
}

double filtered_hits_at_k(const EmbeddingModel& model, const KnowledgeGraph& kg,
                          std::span<const Fact> test, std::size_t k) {
    if (test.empty()) return 0.0;
    std::size_t hits = 0;
    for (const auto& fact : test) {
        if (!fact.object.is_entity()) continue;
        const auto s = model.entity_index(kg.entity_iri(fact.subject));
        const auto r = model.relation_index(kg.relation_iri(fact.relation));
        const auto o = model.entity_index(kg.entity_iri(fact.object.id));
        if (!s || !r || !o) continue;
        const double truth = model.distance(*s, *r, *o);
        std::size_t rank = 1;
        for (EntityId e = 0; e < kg.entity_count(); ++e) {
            if (e == fact.object.id) continue;
            if (kg.contains(Fact{fact.subject, fact.relation, Value::entity(e)})) continue;
            const auto idx = model.entity_index(kg.entity_iri(e));
            if (idx && model.distance(*s, *r, *idx) < truth) ++rank;
        }
        if (rank <= k) ++hits;
    }
    return static_cast<double>(hits) / static_cast<double>(test.size());
}

}  // namespace tabkg
