#pragma once

// Panel policy-evaluation engine: two-way fixed-effects
// difference-in-differences, DiD of means, event studies, pre-trend and
// student-load adjustments, wild cluster bootstrap inference, and synthetic
// control weights.  All estimators work on a rectangular unit-by-year matrix
// of rates (RatePanel) extracted from a PanelDataset for one staff group.

#include "wft/errors.hpp"
#include "wft/ols.hpp"
#include "wft/panel.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace wft {

/// Unit-by-year outcome matrix (balanced by construction: PanelDataset is a
/// balanced grid).  `student_fte` is carried alongside for adjustments.
struct RatePanel {
    std::vector<std::string> units;   // sorted
    std::vector<int> years;           // ascending, contiguous
    Eigen::MatrixXd values;           // units.size() x years.size()
    Eigen::MatrixXd student_fte;      // same shape; zero when not supplied

    static RatePanel from_panel(const PanelDataset& data, StaffGroup group);

    Eigen::Index unit_index(const std::string& unit) const;   // throws EmptySelection
    Eigen::Index year_index(int year) const;                  // throws EmptySelection
};

/// What to estimate: one treated unit, a policy year splitting pre from post,
/// and a pivot year for event studies.  Unset windows default to
/// [first year, policy-1] and [policy, last year].
struct DesignSpec {
    std::string treated_unit;
    int policy_year = 2012;
    int base_year = 2012;
    std::optional<std::pair<int, int>> pre_window;    // inclusive
    std::optional<std::pair<int, int>> post_window;   // inclusive
    StaffGroup group = StaffGroup::established_academic;

    std::pair<int, int> effective_pre(const RatePanel& panel) const;
    std::pair<int, int> effective_post(const RatePanel& panel) const;

    /// Validates treated unit presence, window containment/order, and that
    /// both windows are nonempty.  Throws EmptySelection / DataError /
    /// DegenerateDesign (when no donor unit exists).
    void validate(const RatePanel& panel) const;
};

// ---- core estimators ------------------------------------------------------

struct TwfeDidFit {
    double delta = 0.0;              // treatment coefficient
    double standard_error = 0.0;
    double p_value = 0.0;            // normal reference on delta/se
    CovarianceKind se_kind = CovarianceKind::cluster_by_unit;
    std::map<std::string, double> unit_effects;
    std::map<int, double> year_effects;   // first sample year normalized to 0
    std::vector<int> sample_years;        // pre-window union post-window years
    Eigen::MatrixXd residuals;            // units x sample_years
    double sigma2 = 0.0;                  // residual variance, n-k corrected
    Eigen::Index n = 0, k = 0;
};

/// OLS of the rate on unit dummies, year dummies, and the treated-post
/// indicator.  Fails with DegenerateDesign when the indicator has no
/// variation left (no pre years, no post years, or no donors).
TwfeDidFit fit_twfe_did(const RatePanel& panel, const DesignSpec& spec,
                        CovarianceKind se_kind = CovarianceKind::cluster_by_unit);

/// The same treatment coefficient by explicit double-demeaning (balanced
/// panels): used as an algebraic cross-check and by the bootstrap fast path.
double twfe_delta_within(const RatePanel& panel, const DesignSpec& spec);

/// Difference of window means: (treated post-mean - treated pre-mean) minus
/// (donor post-mean - donor pre-mean), donor means taken per unit over time
/// first, then across units.  Numerically identical to the two-way
/// fixed-effects coefficient on balanced panels with one treated block.
double did_of_means(const RatePanel& panel, const DesignSpec& spec);

TwfeDidFit fit_twfe_did(const PanelDataset& data, const DesignSpec& spec,
                        CovarianceKind se_kind = CovarianceKind::cluster_by_unit);
double did_of_means(const PanelDataset& data, const DesignSpec& spec);

// ---- event study ----------------------------------------------------------

enum class EventPivot {
    base_year,         // difference against the pivot year; estimate there is 0
    pre_period_mean,   // difference against the pre-window mean gap
};

struct EventStudyPoint {
    int year = 0;
    double estimate = 0.0;
    double standard_error = 0.0;
    double lower = 0.0;   // 95% band, normal reference
    double upper = 0.0;
};

struct EventStudySeries {
    std::vector<EventStudyPoint> points;   // one per panel year, in order
    int base_year = 0;
    EventPivot pivot = EventPivot::base_year;
    CovarianceKind se_kind = CovarianceKind::cluster_by_unit;
    /// Caveat recorded with every series: with a single treated unit the
    /// bands lean on the donor-pool residuals and are indicative, not exact.
    std::string warning;
};

/// Per-year treated-vs-donors gaps relative to the pivot.  Standard errors
/// treat each point as a linear functional of the cell rates, with variance
/// evaluated under se_kind using the two-way fixed-effects residuals.
/// Throws MissingBaseYear when the pivot year is absent.
EventStudySeries event_study(const RatePanel& panel, const DesignSpec& spec,
                             EventPivot pivot = EventPivot::base_year,
                             CovarianceKind se_kind = CovarianceKind::cluster_by_unit);

// ---- adjustments ----------------------------------------------------------

struct UnitTrend {
    double intercept = 0.0;   // level at the policy year
    double slope = 0.0;       // per year
};

struct DetrendResult {
    RatePanel adjusted;
    std::map<std::string, UnitTrend> unit_trends;
    /// The first-stage fit is taken as known downstream: report intervals do
    /// not carry the detrending noise, so they understate uncertainty.
    bool variance_propagated = false;
    std::string warning;
};

/// Fit each unit's linear trend on its pre-policy years only (at least 3
/// required; InsufficientPrePeriod otherwise) and subtract it from every
/// year.  A unit whose pre-policy path is exactly linear has exactly zero
/// adjusted values in its pre window.
DetrendResult detrend_pre(const RatePanel& panel, const DesignSpec& spec);

struct StudentAdjustResult {
    RatePanel adjusted;
    double pooled_slope = 0.0;                    // beta on log student FTE
    std::map<std::string, double> unit_slopes;    // per-unit mode only
    bool per_unit = false;
    bool variance_propagated = false;
    std::string warning;
};

/// Remove the student-load gradient: regress the rate on (1, log S) over
/// pre-policy cells (pooled by default, per unit otherwise) and subtract
/// slope * log S everywhere.  Throws NonpositiveStudentFTE naming the first
/// offending cell; RankDeficient when log S has no variation.
StudentAdjustResult student_adjust(const RatePanel& panel, const DesignSpec& spec,
                                   bool per_unit = false);

/// Hiring growth implied by a student series under a constant
/// staff-student ratio: successive differences of log S (length size-1).
/// Throws NonpositiveStudentFTE (with a blank unit) on nonpositive entries.
std::vector<double> implied_hire_growth(const std::vector<double>& student_series);

// ---- wild cluster bootstrap -----------------------------------------------

enum class BootstrapClustering { by_unit, by_observation };

struct BootstrapResult {
    double observed_delta = 0.0;
    double p_value = 0.0;              // (1 + #{|delta*| >= |observed|}) / (R+1)
    int replications = 0;
    std::uint64_t seed = 0;
    BootstrapClustering clustering = BootstrapClustering::by_unit;
    std::vector<double> replicate_deltas;
};

/// Wild cluster bootstrap with the null imposed: residuals come from the
/// fixed-effects fit WITHOUT the treatment term, each cluster's residuals are
/// flipped by an independent Rademacher sign, and the treatment coefficient
/// is re-estimated on every synthetic panel.  Signs for replicate b derive
/// from substream(seed, b), so p-values are bit-identical across runs and
/// scheduling.  Requires replications >= 99 (UsageError).
BootstrapResult wild_cluster_bootstrap(const RatePanel& panel, const DesignSpec& spec,
                                       int replications, std::uint64_t seed,
                                       BootstrapClustering clustering =
                                           BootstrapClustering::by_unit);

// ---- synthetic control ----------------------------------------------------

struct SyntheticControlResult {
    std::vector<std::string> donors;
    Eigen::VectorXd weights;             // simplex: nonnegative, sums to 1
    double pre_fit_rmse = 0.0;
    std::vector<int> years;
    std::vector<double> gap_series;      // treated - synthetic, every year
    int iterations = 0;
    bool converged = false;
};

/// Donor weights minimizing pre-window squared error subject to the simplex
/// constraint, by accelerated projected gradient (uniform start, exact
/// simplex projection, fixed step 1/L with L the quadratic's largest
/// curvature, momentum with function-value restart; stops when the
/// projected-gradient-map norm falls below 1e-8 or after 1e5 iterations),
/// followed by a deterministic active-face least-squares polish kept only
/// when it does not increase the objective.  Throws NoDonors when the panel
/// has no donor units.
SyntheticControlResult synthetic_control(const RatePanel& panel, const DesignSpec& spec);

/// Euclidean projection onto the probability simplex (exposed for tests).
Eigen::VectorXd project_to_simplex(const Eigen::VectorXd& v);

} // namespace wft
