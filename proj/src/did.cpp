#include "wft/did.hpp"
#include "wft/rng.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace wft {

// ---- RatePanel ------------------------------------------------------------

RatePanel RatePanel::from_panel(const PanelDataset& data, StaffGroup group) {
    RatePanel p;
    p.units = data.institutions;
    p.years.reserve(data.years.size());
    for (const auto& y : data.years) p.years.push_back(y.start_year);
    const auto nu = static_cast<Eigen::Index>(p.units.size());
    const auto ny = static_cast<Eigen::Index>(p.years.size());
    p.values.resize(nu, ny);
    p.student_fte.resize(nu, ny);
    for (Eigen::Index i = 0; i < nu; ++i)
        for (Eigen::Index t = 0; t < ny; ++t) {
            const auto& obs =
                data.at(p.units[static_cast<std::size_t>(i)],
                        AcademicYear{p.years[static_cast<std::size_t>(t)]}, group);
            p.values(i, t) = job_creation_rate(obs);
            p.student_fte(i, t) = obs.student_fte;
        }
    return p;
}

Eigen::Index RatePanel::unit_index(const std::string& unit) const {
    auto it = std::find(units.begin(), units.end(), unit);
    if (it == units.end()) throw EmptySelection("unit " + unit + " not in panel");
    return static_cast<Eigen::Index>(it - units.begin());
}

Eigen::Index RatePanel::year_index(int year) const {
    auto it = std::find(years.begin(), years.end(), year);
    if (it == years.end())
        throw EmptySelection("year " + std::to_string(year) + " not in panel");
    return static_cast<Eigen::Index>(it - years.begin());
}

// ---- DesignSpec -----------------------------------------------------------

std::pair<int, int> DesignSpec::effective_pre(const RatePanel& panel) const {
    if (pre_window) return *pre_window;
    return {panel.years.front(), policy_year - 1};
}

std::pair<int, int> DesignSpec::effective_post(const RatePanel& panel) const {
    if (post_window) return *post_window;
    return {policy_year, panel.years.back()};
}

void DesignSpec::validate(const RatePanel& panel) const {
    if (panel.units.size() < 2)
        throw DegenerateDesign("panel has no donor units besides the treated unit");
    (void)panel.unit_index(treated_unit);   // throws EmptySelection when absent

    const auto [pre_lo, pre_hi] = effective_pre(panel);
    const auto [post_lo, post_hi] = effective_post(panel);
    if (pre_lo > pre_hi)
        throw DegenerateDesign("pre window [" + std::to_string(pre_lo) + ", " +
                               std::to_string(pre_hi) + "] is empty");
    if (post_lo > post_hi)
        throw DegenerateDesign("post window [" + std::to_string(post_lo) + ", " +
                               std::to_string(post_hi) + "] is empty");
    if (pre_hi >= policy_year)
        throw DataError("pre window reaches " + std::to_string(pre_hi) +
                        ", not strictly before the policy year " +
                        std::to_string(policy_year));
    if (post_lo < policy_year)
        throw DataError("post window starts " + std::to_string(post_lo) +
                        ", before the policy year " + std::to_string(policy_year));
    (void)panel.year_index(pre_lo);
    (void)panel.year_index(pre_hi);
    (void)panel.year_index(post_lo);
    (void)panel.year_index(post_hi);
}

namespace {

// Selected sample years (pre union post), ascending.
std::vector<int> sample_years_of(const RatePanel& panel, const DesignSpec& spec) {
    const auto [pre_lo, pre_hi] = spec.effective_pre(panel);
    const auto [post_lo, post_hi] = spec.effective_post(panel);
    std::vector<int> years;
    for (int y : panel.years)
        if ((y >= pre_lo && y <= pre_hi) || (y >= post_lo && y <= post_hi))
            years.push_back(y);
    return years;
}

struct Sample {
    std::vector<int> years;            // selected, ascending
    Eigen::MatrixXd values;            // units x selected years
    Eigen::MatrixXd treatment;         // indicator, same shape
    Eigen::Index treated = 0;          // treated row
};

Sample make_sample(const RatePanel& panel, const DesignSpec& spec) {
    spec.validate(panel);
    Sample s;
    s.years = sample_years_of(panel, spec);
    const auto [post_lo, post_hi] = spec.effective_post(panel);
    const auto nu = static_cast<Eigen::Index>(panel.units.size());
    const auto ny = static_cast<Eigen::Index>(s.years.size());
    s.values.resize(nu, ny);
    s.treatment = Eigen::MatrixXd::Zero(nu, ny);
    s.treated = panel.unit_index(spec.treated_unit);
    for (Eigen::Index t = 0; t < ny; ++t) {
        const int year = s.years[static_cast<std::size_t>(t)];
        s.values.col(t) = panel.values.col(panel.year_index(year));
        if (year >= post_lo && year <= post_hi) s.treatment(s.treated, t) = 1.0;
    }
    if (s.treatment.row(s.treated).sum() == 0.0)
        throw DegenerateDesign("treated unit has no post-window observations");
    if (s.treatment.row(s.treated).sum() == static_cast<double>(ny))
        throw DegenerateDesign("treated unit has no pre-window observations");
    return s;
}

Eigen::MatrixXd double_demean(const Eigen::MatrixXd& m) {
    const Eigen::VectorXd row_means = m.rowwise().mean();
    const Eigen::RowVectorXd col_means = m.colwise().mean();
    const double grand = m.mean();
    Eigen::MatrixXd out = m;
    out.colwise() -= row_means;
    out.rowwise() -= col_means;
    out.array() += grand;
    return out;
}

} // namespace

// ---- two-way fixed effects ------------------------------------------------

TwfeDidFit fit_twfe_did(const RatePanel& panel, const DesignSpec& spec,
                        CovarianceKind se_kind) {
    Sample s = make_sample(panel, spec);
    const auto nu = static_cast<Eigen::Index>(panel.units.size());
    const auto ny = static_cast<Eigen::Index>(s.years.size());
    const Eigen::Index n = nu * ny;
    const Eigen::Index k = nu + (ny - 1) + 1;

    Eigen::MatrixXd X = Eigen::MatrixXd::Zero(n, k);
    Eigen::VectorXd y(n);
    std::vector<int> cluster_ids(static_cast<std::size_t>(n));
    std::vector<std::string> names;
    names.reserve(static_cast<std::size_t>(k));
    for (const auto& u : panel.units) names.push_back("unit:" + u);
    for (Eigen::Index t = 1; t < ny; ++t)
        names.push_back("year:" + std::to_string(s.years[static_cast<std::size_t>(t)]));
    names.push_back("treated_post");

    Eigen::Index row = 0;
    for (Eigen::Index i = 0; i < nu; ++i)
        for (Eigen::Index t = 0; t < ny; ++t, ++row) {
            X(row, i) = 1.0;
            if (t > 0) X(row, nu + t - 1) = 1.0;
            X(row, k - 1) = s.treatment(i, t);
            y(row) = s.values(i, t);
            cluster_ids[static_cast<std::size_t>(row)] = static_cast<int>(i);
        }

    OlsFit fit = ols(X, y, names);

    TwfeDidFit out;
    out.delta = fit.coefficients(k - 1);
    out.se_kind = se_kind;
    out.standard_error = fit.standard_error(k - 1, se_kind, cluster_ids);
    out.p_value = normal_p_value(out.delta, out.standard_error);
    for (Eigen::Index i = 0; i < nu; ++i)
        out.unit_effects[panel.units[static_cast<std::size_t>(i)]] = fit.coefficients(i);
    out.year_effects[s.years.front()] = 0.0;
    for (Eigen::Index t = 1; t < ny; ++t)
        out.year_effects[s.years[static_cast<std::size_t>(t)]] = fit.coefficients(nu + t - 1);
    out.sample_years = s.years;
    out.residuals.resize(nu, ny);
    row = 0;
    for (Eigen::Index i = 0; i < nu; ++i)
        for (Eigen::Index t = 0; t < ny; ++t, ++row) out.residuals(i, t) = fit.residuals(row);
    out.sigma2 = fit.sigma2();
    out.n = n;
    out.k = k;
    return out;
}

double twfe_delta_within(const RatePanel& panel, const DesignSpec& spec) {
    Sample s = make_sample(panel, spec);
    const Eigen::MatrixXd d_tilde = double_demean(s.treatment);
    const double sdd = d_tilde.cwiseProduct(d_tilde).sum();
    if (sdd <= 0.0) throw DegenerateDesign("treatment indicator has no variation");
    return d_tilde.cwiseProduct(s.values).sum() / sdd;
}

double did_of_means(const RatePanel& panel, const DesignSpec& spec) {
    Sample s = make_sample(panel, spec);
    const auto [pre_lo, pre_hi] = spec.effective_pre(panel);
    const auto ny = static_cast<Eigen::Index>(s.years.size());

    auto window_mean = [&](Eigen::Index unit, bool pre) {
        double sum = 0.0;
        int count = 0;
        for (Eigen::Index t = 0; t < ny; ++t) {
            const int year = s.years[static_cast<std::size_t>(t)];
            const bool in_pre = year >= pre_lo && year <= pre_hi;
            if (in_pre == pre) {
                sum += s.values(unit, t);
                ++count;
            }
        }
        return sum / count;
    };

    const double treated_change =
        window_mean(s.treated, false) - window_mean(s.treated, true);
    double donor_change = 0.0;
    int donors = 0;
    for (Eigen::Index i = 0; i < s.values.rows(); ++i) {
        if (i == s.treated) continue;
        donor_change += window_mean(i, false) - window_mean(i, true);
        ++donors;
    }
    donor_change /= donors;
    return treated_change - donor_change;
}

TwfeDidFit fit_twfe_did(const PanelDataset& data, const DesignSpec& spec,
                        CovarianceKind se_kind) {
    return fit_twfe_did(RatePanel::from_panel(data, spec.group), spec, se_kind);
}

double did_of_means(const PanelDataset& data, const DesignSpec& spec) {
    return did_of_means(RatePanel::from_panel(data, spec.group), spec);
}

// ---- event study ----------------------------------------------------------

EventStudySeries event_study(const RatePanel& panel, const DesignSpec& spec,
                             EventPivot pivot, CovarianceKind se_kind) {
    spec.validate(panel);
    if (std::find(panel.years.begin(), panel.years.end(), spec.base_year) ==
        panel.years.end())
        throw MissingBaseYear(spec.base_year);

    const Eigen::Index treated = panel.unit_index(spec.treated_unit);
    const Eigen::Index base = panel.year_index(spec.base_year);
    const auto nu = static_cast<Eigen::Index>(panel.units.size());
    const auto ny = static_cast<Eigen::Index>(panel.years.size());
    const double donors = static_cast<double>(nu - 1);

    // Residuals for the variance come from the constant-effect fit over the
    // full span; each point is then a linear functional of the cell rates.
    DesignSpec full = spec;
    full.pre_window.reset();
    full.post_window.reset();
    const TwfeDidFit fe = fit_twfe_did(panel, full, se_kind);

    // Per-year treated-vs-donor-mean gaps.
    Eigen::VectorXd gap(ny);
    for (Eigen::Index t = 0; t < ny; ++t) {
        double donor_mean = 0.0;
        for (Eigen::Index i = 0; i < nu; ++i)
            if (i != treated) donor_mean += panel.values(i, t);
        donor_mean /= donors;
        gap(t) = panel.values(treated, t) - donor_mean;
    }

    const auto [pre_lo, pre_hi] = spec.effective_pre(panel);
    std::vector<Eigen::Index> pre_idx;
    for (Eigen::Index t = 0; t < ny; ++t) {
        const int year = panel.years[static_cast<std::size_t>(t)];
        if (year >= pre_lo && year <= pre_hi) pre_idx.push_back(t);
    }

    EventStudySeries series;
    series.base_year = spec.base_year;
    series.pivot = pivot;
    series.se_kind = se_kind;
    series.warning =
        "interval bands use donor-pool residual variation around a single "
        "treated unit; read them as indicative placebo bands";

    const double n_over = static_cast<double>(fe.n) /
                          static_cast<double>(fe.n - fe.k);
    const double g = static_cast<double>(nu);
    const double cr1 = g / (g - 1.0) * static_cast<double>(fe.n - 1) /
                       static_cast<double>(fe.n - fe.k);

    for (Eigen::Index t = 0; t < ny; ++t) {
        // Weight of each cell (unit, year) in this point's estimate.
        Eigen::MatrixXd w = Eigen::MatrixXd::Zero(nu, ny);
        if (pivot == EventPivot::base_year) {
            if (t != base) {
                w(treated, t) += 1.0;
                w(treated, base) -= 1.0;
                for (Eigen::Index i = 0; i < nu; ++i) {
                    if (i == treated) continue;
                    w(i, t) -= 1.0 / donors;
                    w(i, base) += 1.0 / donors;
                }
            }
        } else {
            const double p = static_cast<double>(pre_idx.size());
            w(treated, t) += 1.0;
            for (Eigen::Index i = 0; i < nu; ++i)
                if (i != treated) w(i, t) -= 1.0 / donors;
            for (Eigen::Index s : pre_idx) {
                w(treated, s) -= 1.0 / p;
                for (Eigen::Index i = 0; i < nu; ++i)
                    if (i != treated) w(i, s) += 1.0 / (donors * p);
            }
        }

        EventStudyPoint point;
        point.year = panel.years[static_cast<std::size_t>(t)];
        point.estimate = w.cwiseProduct(panel.values).sum();
        if (pivot == EventPivot::base_year && t == base) point.estimate = 0.0;

        double variance = 0.0;
        switch (se_kind) {
            case CovarianceKind::iid:
                variance = fe.sigma2 * w.cwiseProduct(w).sum();
                break;
            case CovarianceKind::hc_robust:
                variance = n_over *
                           w.cwiseProduct(w).cwiseProduct(fe.residuals.cwiseProduct(
                                                              fe.residuals))
                               .sum();
                break;
            case CovarianceKind::cluster_by_unit: {
                for (Eigen::Index i = 0; i < nu; ++i) {
                    const double s = w.row(i).cwiseProduct(fe.residuals.row(i)).sum();
                    variance += s * s;
                }
                variance *= cr1;
                break;
            }
        }
        point.standard_error = std::sqrt(std::max(variance, 0.0));
        point.lower = point.estimate - kNormal975 * point.standard_error;
        point.upper = point.estimate + kNormal975 * point.standard_error;
        series.points.push_back(point);
    }
    return series;
}

// ---- adjustments ----------------------------------------------------------

namespace {

struct LineFit {
    double intercept = 0.0;   // at x = 0
    double slope = 0.0;
};

// Closed-form simple regression; exact on exactly-linear inputs.
LineFit fit_line(const std::vector<double>& x, const std::vector<double>& y,
                 const std::string& regressor_name) {
    const double n = static_cast<double>(x.size());
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= n;
    my /= n;
    double sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
    }
    // Scale-aware degeneracy test: rounding noise in a constant series leaves
    // sxx at ~eps^2 relative scale, far below any genuine variation.
    if (sxx <= 1e-20 * n * (1.0 + mx * mx)) throw RankDeficient({regressor_name});
    LineFit f;
    f.slope = sxy / sxx;
    f.intercept = my - f.slope * mx;
    return f;
}

} // namespace

DetrendResult detrend_pre(const RatePanel& panel, const DesignSpec& spec) {
    spec.validate(panel);
    const auto [pre_lo, pre_hi] = spec.effective_pre(panel);

    DetrendResult out;
    out.adjusted = panel;
    out.warning =
        "per-unit trends are estimated from few pre-policy points and then "
        "treated as known; downstream intervals omit that first-stage noise "
        "and so understate uncertainty";

    const auto nu = static_cast<Eigen::Index>(panel.units.size());
    const auto ny = static_cast<Eigen::Index>(panel.years.size());
    for (Eigen::Index i = 0; i < nu; ++i) {
        std::vector<double> x, y;
        for (Eigen::Index t = 0; t < ny; ++t) {
            const int year = panel.years[static_cast<std::size_t>(t)];
            if (year >= pre_lo && year <= pre_hi) {
                x.push_back(static_cast<double>(year - spec.policy_year));
                y.push_back(panel.values(i, t));
            }
        }
        const auto& unit = panel.units[static_cast<std::size_t>(i)];
        if (x.size() < 3) throw InsufficientPrePeriod(unit, x.size(), 3);
        const LineFit f = fit_line(x, y, "year_offset");
        out.unit_trends[unit] = UnitTrend{f.intercept, f.slope};
        for (Eigen::Index t = 0; t < ny; ++t) {
            const int year = panel.years[static_cast<std::size_t>(t)];
            out.adjusted.values(i, t) -=
                f.intercept + f.slope * static_cast<double>(year - spec.policy_year);
        }
    }
    return out;
}

StudentAdjustResult student_adjust(const RatePanel& panel, const DesignSpec& spec,
                                   bool per_unit) {
    spec.validate(panel);
    const auto [pre_lo, pre_hi] = spec.effective_pre(panel);
    const auto nu = static_cast<Eigen::Index>(panel.units.size());
    const auto ny = static_cast<Eigen::Index>(panel.years.size());

    for (Eigen::Index i = 0; i < nu; ++i)
        for (Eigen::Index t = 0; t < ny; ++t)
            if (!(panel.student_fte(i, t) > 0.0))
                throw NonpositiveStudentFTE(panel.units[static_cast<std::size_t>(i)],
                                            panel.years[static_cast<std::size_t>(t)]);

    const Eigen::MatrixXd log_s = panel.student_fte.array().log().matrix();

    StudentAdjustResult out;
    out.adjusted = panel;
    out.per_unit = per_unit;
    out.warning =
        "the student-load slope is estimated from pre-policy data and then "
        "treated as known; downstream intervals omit that first-stage noise";

    auto pre_cells_of = [&](Eigen::Index unit, std::vector<double>& x,
                            std::vector<double>& y) {
        for (Eigen::Index t = 0; t < ny; ++t) {
            const int year = panel.years[static_cast<std::size_t>(t)];
            if (year >= pre_lo && year <= pre_hi) {
                x.push_back(log_s(unit, t));
                y.push_back(panel.values(unit, t));
            }
        }
    };

    if (per_unit) {
        for (Eigen::Index i = 0; i < nu; ++i) {
            std::vector<double> x, y;
            pre_cells_of(i, x, y);
            const auto& unit = panel.units[static_cast<std::size_t>(i)];
            if (x.size() < 3) throw InsufficientPrePeriod(unit, x.size(), 3);
            const double slope = fit_line(x, y, "log_student_fte").slope;
            out.unit_slopes[unit] = slope;
            for (Eigen::Index t = 0; t < ny; ++t)
                out.adjusted.values(i, t) -= slope * log_s(i, t);
        }
    } else {
        std::vector<double> x, y;
        for (Eigen::Index i = 0; i < nu; ++i) pre_cells_of(i, x, y);
        out.pooled_slope = fit_line(x, y, "log_student_fte").slope;
        out.adjusted.values -= out.pooled_slope * log_s;
    }
    return out;
}

std::vector<double> implied_hire_growth(const std::vector<double>& student_series) {
    if (student_series.size() < 2)
        throw UsageError("implied hiring growth needs at least 2 student observations");
    for (std::size_t i = 0; i < student_series.size(); ++i)
        if (!(student_series[i] > 0.0))
            throw NonpositiveStudentFTE("series position " + std::to_string(i) + " = " +
                                        std::to_string(student_series[i]));
    std::vector<double> growth;
    growth.reserve(student_series.size() - 1);
    for (std::size_t i = 1; i < student_series.size(); ++i)
        growth.push_back(std::log(student_series[i]) - std::log(student_series[i - 1]));
    return growth;
}

// ---- wild cluster bootstrap -----------------------------------------------

BootstrapResult wild_cluster_bootstrap(const RatePanel& panel, const DesignSpec& spec,
                                       int replications, std::uint64_t seed,
                                       BootstrapClustering clustering) {
    if (replications < 99)
        throw UsageError("bootstrap needs at least 99 replications, got " +
                         std::to_string(replications));
    Sample s = make_sample(panel, spec);
    const auto nu = s.values.rows();
    const auto ny = s.values.cols();

    const Eigen::MatrixXd d_tilde = double_demean(s.treatment);
    const double sdd = d_tilde.cwiseProduct(d_tilde).sum();
    if (sdd <= 0.0) throw DegenerateDesign("treatment indicator has no variation");
    const double observed = d_tilde.cwiseProduct(s.values).sum() / sdd;

    // Null-imposed fit: two-way means reproduce the no-treatment least
    // squares surface exactly on a balanced panel.
    const Eigen::VectorXd row_means = s.values.rowwise().mean();
    const Eigen::RowVectorXd col_means = s.values.colwise().mean();
    const double grand = s.values.mean();
    Eigen::MatrixXd fitted(nu, ny);
    for (Eigen::Index i = 0; i < nu; ++i)
        for (Eigen::Index t = 0; t < ny; ++t)
            fitted(i, t) = row_means(i) + col_means(t) - grand;
    const Eigen::MatrixXd restricted_residuals = s.values - fitted;

    // The fitted surface's own projection onto the treatment direction
    // (exactly zero in algebra; kept so each replicate is a true re-estimate).
    const double base_term = d_tilde.cwiseProduct(fitted).sum();
    // Per-cluster score: replicate delta = (base + sum_g sign_g * score_g)/sdd.
    Eigen::VectorXd score(nu);
    for (Eigen::Index i = 0; i < nu; ++i)
        score(i) = d_tilde.row(i).cwiseProduct(restricted_residuals.row(i)).sum();

    BootstrapResult out;
    out.observed_delta = observed;
    out.replications = replications;
    out.seed = seed;
    out.clustering = clustering;
    out.replicate_deltas.reserve(static_cast<std::size_t>(replications));

    const double threshold = std::abs(observed);
    int at_least = 0;
    for (int b = 0; b < replications; ++b) {
        SplitMix64 rng = substream(seed, static_cast<std::uint64_t>(b) + 1);
        double accum = base_term;
        if (clustering == BootstrapClustering::by_unit) {
            for (Eigen::Index i = 0; i < nu; ++i) accum += rng.next_sign() * score(i);
        } else {
            for (Eigen::Index i = 0; i < nu; ++i)
                for (Eigen::Index t = 0; t < ny; ++t)
                    accum += rng.next_sign() * d_tilde(i, t) * restricted_residuals(i, t);
        }
        const double replicate = accum / sdd;
        out.replicate_deltas.push_back(replicate);
        if (std::abs(replicate) >= threshold) ++at_least;
    }
    out.p_value = (1.0 + at_least) / (replications + 1.0);
    return out;
}

// ---- synthetic control ----------------------------------------------------

Eigen::VectorXd project_to_simplex(const Eigen::VectorXd& v) {
    const Eigen::Index n = v.size();
    std::vector<double> u(v.data(), v.data() + n);
    std::sort(u.begin(), u.end(), std::greater<double>());
    double css = 0.0, tau = 0.0;
    for (Eigen::Index j = 0; j < n; ++j) {
        css += u[static_cast<std::size_t>(j)];
        const double candidate = (css - 1.0) / static_cast<double>(j + 1);
        if (u[static_cast<std::size_t>(j)] - candidate > 0.0) tau = candidate;
    }
    Eigen::VectorXd w(n);
    for (Eigen::Index i = 0; i < n; ++i) w(i) = std::max(v(i) - tau, 0.0);
    return w;
}

SyntheticControlResult synthetic_control(const RatePanel& panel, const DesignSpec& spec) {
    spec.validate(panel);
    const Eigen::Index treated = panel.unit_index(spec.treated_unit);
    const auto nu = static_cast<Eigen::Index>(panel.units.size());
    const auto ny = static_cast<Eigen::Index>(panel.years.size());
    if (nu < 2) throw NoDonors(spec.treated_unit);

    const auto [pre_lo, pre_hi] = spec.effective_pre(panel);
    std::vector<Eigen::Index> pre_idx;
    for (Eigen::Index t = 0; t < ny; ++t) {
        const int year = panel.years[static_cast<std::size_t>(t)];
        if (year >= pre_lo && year <= pre_hi) pre_idx.push_back(t);
    }
    if (pre_idx.empty()) throw DataError("synthetic control pre window is empty");

    SyntheticControlResult out;
    for (Eigen::Index i = 0; i < nu; ++i)
        if (i != treated) out.donors.push_back(panel.units[static_cast<std::size_t>(i)]);
    const auto nd = static_cast<Eigen::Index>(out.donors.size());
    const auto np = static_cast<Eigen::Index>(pre_idx.size());

    Eigen::MatrixXd A(np, nd);   // pre-window donor paths
    Eigen::VectorXd b(np);       // treated pre-window path
    for (Eigen::Index r = 0; r < np; ++r) {
        const Eigen::Index t = pre_idx[static_cast<std::size_t>(r)];
        b(r) = panel.values(treated, t);
        Eigen::Index c = 0;
        for (Eigen::Index i = 0; i < nu; ++i) {
            if (i == treated) continue;
            A(r, c++) = panel.values(i, t);
        }
    }

    const Eigen::MatrixXd q = A.transpose() * A;
    const Eigen::VectorXd atb = A.transpose() * b;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(q);
    const double curvature = 2.0 * eig.eigenvalues().maxCoeff();

    Eigen::VectorXd w = Eigen::VectorXd::Constant(nd, 1.0 / static_cast<double>(nd));
    constexpr double kTol = 1e-8;
    constexpr int kMaxIter = 100000;
    out.converged = false;
    if (curvature <= 0.0) {
        out.converged = true;   // constant objective: any simplex point is optimal
    } else {
        // Accelerated projected gradient (momentum with function-value
        // restart).  Near-collinear donors make the Gram matrix badly
        // conditioned; plain projected steps crawl along the flat valley,
        // while the accelerated iteration still reaches the pinned
        // tolerance well inside the iteration cap.
        const double eta = 1.0 / curvature;
        auto objective = [&](const Eigen::VectorXd& v) {
            return v.dot(q * v) - 2.0 * atb.dot(v);
        };
        Eigen::VectorXd carry = w;          // extrapolation point
        double momentum = 1.0;
        double previous_value = objective(w);
        for (int it = 0; it < kMaxIter; ++it) {
            const Eigen::VectorXd grad = 2.0 * (q * carry - atb);
            const Eigen::VectorXd next = project_to_simplex(carry - eta * grad);
            // Stationarity is measured at the unaccelerated point so the
            // stopping rule matches the plain projected-gradient map.
            const Eigen::VectorXd plain =
                project_to_simplex(w - eta * 2.0 * (q * w - atb));
            const double pg_norm = (w - plain).norm() / eta;
            const double next_momentum =
                0.5 * (1.0 + std::sqrt(1.0 + 4.0 * momentum * momentum));
            const double value = objective(next);
            if (value > previous_value) {
                // Momentum overshot: restart the acceleration at the last
                // accepted iterate.
                carry = w;
                momentum = 1.0;
            } else {
                carry = next + ((momentum - 1.0) / next_momentum) * (next - w);
                momentum = next_momentum;
                w = next;
                previous_value = value;
            }
            out.iterations = it + 1;
            if (pg_norm <= kTol) {
                out.converged = true;
                break;
            }
        }

        // Polish on the identified face: the gradient iteration settles the
        // active set long before the weights themselves stop drifting along
        // flat valleys, so finish with the exact equality-constrained
        // minimizer over the currently-positive donors.  Dropping any
        // coordinate the exact solve turns negative and re-solving keeps the
        // candidate feasible; it is accepted only if it does not increase the
        // objective.
        std::vector<Eigen::Index> face;
        for (Eigen::Index i = 0; i < nd; ++i)
            if (w(i) > 1e-10) face.push_back(i);
        auto objective_at = [&](const Eigen::VectorXd& v) {
            return v.dot(q * v) - 2.0 * atb.dot(v);
        };
        while (face.size() > 1) {
            const auto m = static_cast<Eigen::Index>(face.size());
            Eigen::MatrixXd kkt = Eigen::MatrixXd::Zero(m + 1, m + 1);
            Eigen::VectorXd rhs(m + 1);
            for (Eigen::Index r = 0; r < m; ++r) {
                for (Eigen::Index c = 0; c < m; ++c)
                    kkt(r, c) = 2.0 * q(face[static_cast<std::size_t>(r)],
                                        face[static_cast<std::size_t>(c)]);
                kkt(r, m) = 1.0;
                kkt(m, r) = 1.0;
                rhs(r) = 2.0 * atb(face[static_cast<std::size_t>(r)]);
            }
            rhs(m) = 1.0;
            const Eigen::VectorXd sol = kkt.fullPivLu().solve(rhs);
            if (!sol.allFinite()) break;
            Eigen::Index worst = -1;
            for (Eigen::Index r = 0; r < m; ++r)
                if (sol(r) < -1e-12 && (worst < 0 || sol(r) < sol(worst))) worst = r;
            if (worst >= 0) {
                face.erase(face.begin() + worst);
                continue;
            }
            Eigen::VectorXd candidate = Eigen::VectorXd::Zero(nd);
            for (Eigen::Index r = 0; r < m; ++r)
                candidate(face[static_cast<std::size_t>(r)]) = std::max(sol(r), 0.0);
            candidate = project_to_simplex(candidate);
            if (objective_at(candidate) <= objective_at(w) + 1e-18) w = candidate;
            break;
        }
    }
    out.weights = w;
    out.pre_fit_rmse = std::sqrt((b - A * w).squaredNorm() / static_cast<double>(np));
    out.years = panel.years;
    for (Eigen::Index t = 0; t < ny; ++t) {
        double synthetic = 0.0;
        Eigen::Index c = 0;
        for (Eigen::Index i = 0; i < nu; ++i) {
            if (i == treated) continue;
            synthetic += w(c++) * panel.values(i, t);
        }
        out.gap_series.push_back(panel.values(treated, t) - synthetic);
    }
    return out;
}

} // namespace wft
