#include "tabkg/lbp.hpp"

#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "tabkg/errors.hpp"

namespace tabkg {

LbpResult lbp_pass(const PriorMatrix& prior, const SimilarityMatrix& similarity,
                   const LbpOptions& options) {
    if (similarity.rows() != similarity.cols())
        throw ContractViolation("similarity matrix must be square");
    if (prior.cols() != similarity.rows())
        throw ContractViolation("prior has " + std::to_string(prior.cols()) +
                                " entity columns but similarity is " +
                                std::to_string(similarity.rows()) + " wide");
    if (options.iterations == 0) throw ContractViolation("lbp_pass needs at least one iteration");

    const Eigen::Index entities = prior.cols();
    LbpResult result;
    result.coherence = prior;
    result.message = Eigen::VectorXd::Zero(entities);

    for (std::size_t pass = 0; pass < options.iterations; ++pass) {
        Eigen::MatrixXd messages = result.coherence * similarity;

        std::vector<Eigen::Index> active;
        for (Eigen::Index row = 0; row < messages.rows(); ++row) {
            const double sum = messages.row(row).sum();
            if (sum <= 0.0) continue;
            if (options.normalize_rows) messages.row(row) /= sum;
            active.push_back(row);
        }

        Eigen::VectorXd q = Eigen::VectorXd::Zero(entities);
        if (!active.empty()) {
            if (options.normalize_rows && active.size() > options.log_space_rows) {
                constexpr double kNegInf = -std::numeric_limits<double>::infinity();
                Eigen::VectorXd log_q = Eigen::VectorXd::Zero(entities);
                for (Eigen::Index e = 0; e < entities; ++e) {
                    for (Eigen::Index row : active) {
                        const double m = messages(row, e);
                        if (m <= 0.0) {
                            log_q[e] = kNegInf;
                            break;
                        }
                        log_q[e] += std::log(m);
                    }
                }
                const double peak = log_q.maxCoeff();
                if (peak != kNegInf)
                    for (Eigen::Index e = 0; e < entities; ++e)
                        q[e] = log_q[e] == kNegInf ? 0.0 : std::exp(log_q[e] - peak);
            } else {
                q.setOnes();
                for (Eigen::Index row : active) q.array() *= messages.row(row).transpose().array();
            }
        }

        PriorMatrix next = result.coherence;
        for (Eigen::Index row = 0; row < next.outerSize(); ++row)
            for (PriorMatrix::InnerIterator it(next, row); it; ++it) it.valueRef() *= q[it.col()];
        result.coherence = std::move(next);
        result.message = std::move(q);
    }
    return result;
}

}  // namespace tabkg
