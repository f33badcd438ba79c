#pragma once

// Dense least-squares core shared by every estimator: column-pivoted QR
// factorization (rank-revealing), residuals, and three covariance estimators
// (spherical, heteroskedasticity-robust HC1, cluster-robust CR1).

#include "wft/errors.hpp"

#include <Eigen/Dense>

#include <string>
#include <vector>

namespace wft {

enum class CovarianceKind { iid, hc_robust, cluster_by_unit };

struct OlsFit {
    Eigen::VectorXd coefficients;
    Eigen::VectorXd fitted;
    Eigen::VectorXd residuals;
    Eigen::Index n = 0;   // observations
    Eigen::Index k = 0;   // regressors (all full rank on success)
    Eigen::MatrixXd design;          // retained for sandwich covariances
    Eigen::MatrixXd xtx_inverse;

    double rss() const { return residuals.squaredNorm(); }
    /// Residual variance with the usual n-k correction.
    double sigma2() const { return rss() / static_cast<double>(n - k); }

    /// Covariance of the coefficient vector.  cluster_by_unit requires one
    /// cluster id per observation.  Small-sample factors: HC1 scales the meat
    /// by n/(n-k); CR1 scales by G/(G-1) * (n-1)/(n-k).
    Eigen::MatrixXd covariance(CovarianceKind kind,
                               const std::vector<int>& cluster_ids = {}) const;

    double standard_error(Eigen::Index coefficient, CovarianceKind kind,
                          const std::vector<int>& cluster_ids = {}) const;
};

/// Ordinary least squares.  Throws RankDeficient naming the dependent
/// columns (by the given names when provided, else "col<j>") and
/// UsageError on shape mismatches.
OlsFit ols(const Eigen::MatrixXd& design, const Eigen::VectorXd& response,
           const std::vector<std::string>& column_names = {});

/// Two-sided p-value for coefficient/se under a standard normal reference.
double normal_p_value(double estimate, double standard_error);

/// Upper-tail critical value used for 95% intervals.
inline constexpr double kNormal975 = 1.959963984540054;

} // namespace wft
