#pragma once

// Independent reference computations used by unit and acceptance tests.

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include "tabkg/evaluator.hpp"
#include "tabkg/lbp.hpp"
#include "tabkg/text.hpp"

namespace oracle {

using Dense = std::vector<std::vector<double>>;

struct NaiveLbp {
    std::vector<double> q;
    Dense c;
};

/// q_e = prod_rho sum_e' L[rho][e'] * S[e][e'];  C = L o q.
inline NaiveLbp naive_lbp(const Dense& L, const Dense& S) {
    const std::size_t n = L.size();
    const std::size_t m = S.size();
    NaiveLbp out;
    out.q.assign(m, 1.0);
    for (std::size_t e = 0; e < m; ++e) {
        for (std::size_t rho = 0; rho < n; ++rho) {
            double sum = 0.0;
            for (std::size_t e2 = 0; e2 < m; ++e2) sum += L[rho][e2] * S[e][e2];
            out.q[e] *= sum;
        }
    }
    out.c.assign(n, std::vector<double>(m, 0.0));
    for (std::size_t rho = 0; rho < n; ++rho)
        for (std::size_t e = 0; e < m; ++e) out.c[rho][e] = L[rho][e] * out.q[e];
    return out;
}

inline tabkg::PriorMatrix to_sparse(const Dense& L, std::size_t columns) {
    std::vector<Eigen::Triplet<double>> entries;
    for (std::size_t r = 0; r < L.size(); ++r)
        for (std::size_t c = 0; c < columns; ++c)
            if (L[r][c] != 0.0) entries.emplace_back(static_cast<int>(r), static_cast<int>(c), L[r][c]);
    tabkg::PriorMatrix out(static_cast<Eigen::Index>(L.size()), static_cast<Eigen::Index>(columns));
    out.setFromTriplets(entries.begin(), entries.end());
    return out;
}

inline tabkg::SimilarityMatrix to_dense(const Dense& S) {
    tabkg::SimilarityMatrix out(static_cast<Eigen::Index>(S.size()), static_cast<Eigen::Index>(S.size()));
    for (std::size_t i = 0; i < S.size(); ++i)
        for (std::size_t j = 0; j < S.size(); ++j)
            out(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = S[i][j];
    return out;
}

/// Random LBP instance: every row has at least one positive prior and S is
/// symmetric with a positive diagonal, so every (L S) row has positive mass.
struct LbpInstance {
    Dense L;
    Dense S;
};

inline LbpInstance random_lbp_instance(std::mt19937_64& rng, std::size_t max_rows = 5,
                                       std::size_t max_entities = 8) {
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    LbpInstance inst;
    const std::size_t n = 1 + rng() % max_rows;
    const std::size_t m = 1 + rng() % max_entities;
    inst.L.assign(n, std::vector<double>(m, 0.0));
    for (auto& row : inst.L) {
        for (auto& v : row)
            if (rng() % 2) v = unit(rng);
        row[rng() % m] = 0.05 + unit(rng);
        for (auto& v : row) v = std::min(v, 1.0);
    }
    inst.S.assign(m, std::vector<double>(m, 0.0));
    for (std::size_t i = 0; i < m; ++i) {
        inst.S[i][i] = 0.1 + 2.0 * unit(rng);
        for (std::size_t j = i + 1; j < m; ++j)
            if (rng() % 2) inst.S[i][j] = inst.S[j][i] = 2.0 * unit(rng);
    }
    return inst;
}

/// First index of the row maximum.
inline std::size_t argmax(const std::vector<double>& row) {
    return static_cast<std::size_t>(std::max_element(row.begin(), row.end()) - row.begin());
}

inline double relative_error(double got, double expected) {
    const double scale = std::max(std::abs(expected), 1e-300);
    return got == expected ? 0.0 : std::abs(got - expected) / scale;
}

/// Redundancy by enumeration: any existing (s, r, o') whose object equals the
/// predicted object, or whose object's surface forms and the predicted object's
/// surface forms agree after normalization.
inline bool redundant_by_enumeration(const tabkg::TripleKey& t, const tabkg::KnowledgeGraph& kg,
                                     tabkg::LabelSourceSet sources) {
    using namespace tabkg;
    std::vector<std::string> predicted_forms;
    if (t.object.kind == ValueKind::literal) {
        predicted_forms.push_back(t.object.value);
    } else {
        predicted_forms = kg.entity_labels(t.object.value, sources);
    }
    for (const auto& f : kg.facts()) {
        if (kg.entity_iri(f.subject) != t.subject || kg.relation_iri(f.relation) != t.relation) continue;
        const bool same_kind = f.object.is_entity() == (t.object.kind == ValueKind::entity);
        if (same_kind && kg.value_text(f.object) == t.object.value) return true;
        std::vector<std::string> existing_forms;
        if (f.object.is_entity())
            existing_forms = kg.entity_labels(f.object.id, sources);
        else
            existing_forms.push_back(kg.literal(f.object.id).lexical);
        for (const auto& a : predicted_forms) {
            const auto ka = normalized_key(a);
            if (ka.empty()) continue;
            for (const auto& b : existing_forms)
                if (ka == normalized_key(b)) return true;
        }
    }
    return false;
}

}  // namespace oracle
