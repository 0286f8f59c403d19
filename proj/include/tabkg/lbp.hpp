#pragma once

#include <cstddef>

#include <Eigen/Dense>
#include <Eigen/SparseCore>

namespace tabkg {

/// Rows are table rows, columns index the union of candidate entities.
using PriorMatrix = Eigen::SparseMatrix<double, Eigen::RowMajor>;
using SimilarityMatrix = Eigen::MatrixXd;

struct LbpOptions {
    /// Scale each row of L*S to sum 1 before the product across rows.
    bool normalize_rows = true;
    /// Number of message passes; each later pass replaces L by C.
    std::size_t iterations = 1;
    /// With normalization on, products over more rows than this run in log space.
    std::size_t log_space_rows = 64;
};

struct LbpResult {
    Eigen::VectorXd message;  // q, one entry per entity column
    PriorMatrix coherence;    // C = L o q, same sparsity as L
};

/// Single vector-valued message for identical edge potentials:
///   q_e = prod_rows (L S)_{row, e},  C_{row, e} = L_{row, e} * q_e.
/// Rows whose (L S) row is all zero carry no message and are left out of the product.
LbpResult lbp_pass(const PriorMatrix& prior, const SimilarityMatrix& similarity,
                   const LbpOptions& options = {});

}  // namespace tabkg
