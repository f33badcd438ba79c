#include "wft/ols.hpp"

#include <cmath>
#include <map>

namespace wft {

OlsFit ols(const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
           const std::vector<std::string>& column_names) {
    if (X.rows() == 0 || X.cols() == 0) throw UsageError("empty design matrix");
    if (X.rows() != y.rows())
        throw UsageError("design has " + std::to_string(X.rows()) + " rows but response has " +
                         std::to_string(y.rows()));
    if (X.rows() < X.cols())
        throw UsageError("underdetermined system: " + std::to_string(X.rows()) + " rows, " +
                         std::to_string(X.cols()) + " columns");
    if (!column_names.empty() && static_cast<Eigen::Index>(column_names.size()) != X.cols())
        throw UsageError("column_names size does not match design columns");

    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(X);
    qr.setThreshold(1e-10);
    if (qr.rank() < X.cols()) {
        // The pivot permutation orders independent columns first; the tail
        // entries name columns expressible from the others.
        std::vector<std::string> offenders;
        const auto& perm = qr.colsPermutation().indices();
        for (Eigen::Index i = qr.rank(); i < X.cols(); ++i) {
            const Eigen::Index col = perm(i);
            offenders.push_back(column_names.empty()
                                    ? "col" + std::to_string(col)
                                    : column_names[static_cast<std::size_t>(col)]);
        }
        throw RankDeficient(offenders);
    }

    OlsFit fit;
    fit.coefficients = qr.solve(y);
    fit.fitted = X * fit.coefficients;
    fit.residuals = y - fit.fitted;
    fit.n = X.rows();
    fit.k = X.cols();
    fit.design = X;
    const Eigen::MatrixXd xtx = X.transpose() * X;
    fit.xtx_inverse = xtx.ldlt().solve(Eigen::MatrixXd::Identity(X.cols(), X.cols()));
    return fit;
}

Eigen::MatrixXd OlsFit::covariance(CovarianceKind kind,
                                   const std::vector<int>& cluster_ids) const {
    switch (kind) {
        case CovarianceKind::iid:
            return sigma2() * xtx_inverse;

        case CovarianceKind::hc_robust: {
            Eigen::MatrixXd meat = Eigen::MatrixXd::Zero(k, k);
            for (Eigen::Index i = 0; i < n; ++i) {
                const double e2 = residuals(i) * residuals(i);
                meat.noalias() += e2 * design.row(i).transpose() * design.row(i);
            }
            const double adj = static_cast<double>(n) / static_cast<double>(n - k);
            return adj * xtx_inverse * meat * xtx_inverse;
        }

        case CovarianceKind::cluster_by_unit: {
            if (static_cast<Eigen::Index>(cluster_ids.size()) != n)
                throw UsageError("cluster covariance needs one cluster id per observation");
            std::map<int, Eigen::VectorXd> scores;
            for (Eigen::Index i = 0; i < n; ++i) {
                auto& s = scores.try_emplace(cluster_ids[static_cast<std::size_t>(i)],
                                             Eigen::VectorXd::Zero(k))
                              .first->second;
                s.noalias() += residuals(i) * design.row(i).transpose();
            }
            const auto g = static_cast<double>(scores.size());
            if (g < 2) throw UsageError("cluster covariance needs at least 2 clusters");
            Eigen::MatrixXd meat = Eigen::MatrixXd::Zero(k, k);
            for (const auto& [id, s] : scores) meat.noalias() += s * s.transpose();
            const double adj = g / (g - 1.0) * static_cast<double>(n - 1) /
                               static_cast<double>(n - k);
            return adj * xtx_inverse * meat * xtx_inverse;
        }
    }
    throw UsageError("unknown covariance kind");
}

double OlsFit::standard_error(Eigen::Index coefficient, CovarianceKind kind,
                              const std::vector<int>& cluster_ids) const {
    if (coefficient < 0 || coefficient >= k)
        throw UsageError("coefficient index out of range");
    return std::sqrt(covariance(kind, cluster_ids)(coefficient, coefficient));
}

double normal_p_value(double estimate, double standard_error) {
    // Degenerate spread: the sampling distribution is a point mass, so any
    // nonzero estimate is infinitely many "standard errors" from zero.
    if (!(standard_error > 0.0)) return estimate == 0.0 ? 1.0 : 0.0;
    const double z = std::abs(estimate / standard_error);
    return std::erfc(z / std::sqrt(2.0));
}

} // namespace wft
