#include "wft/did.hpp"
#include "wft/errors.hpp"
#include "wft/fixtures.hpp"
#include "wft/rng.hpp"

#include <doctest.h>

#include <cmath>

using namespace wft;

namespace {

RatePanel grid_panel(int units, int first_year, int years) {
    RatePanel p;
    for (int u = 0; u < units; ++u)
        p.units.push_back(u == 0 ? "T" : "D" + std::to_string(u));
    for (int t = 0; t < years; ++t) p.years.push_back(first_year + t);
    p.values = Eigen::MatrixXd::Zero(units, years);
    p.student_fte = Eigen::MatrixXd::Zero(units, years);
    return p;
}

DesignSpec design(int policy_year = 2012) {
    DesignSpec s;
    s.treated_unit = "T";
    s.policy_year = policy_year;
    s.base_year = policy_year;
    return s;
}

// Unit level + year shift + cluster-correlated noise + treated-post effect.
RatePanel random_panel(SplitMix64& rng, double delta) {
    RatePanel p = grid_panel(23, 2007, 15);
    for (Eigen::Index u = 0; u < 23; ++u) {
        const double level = 0.03 + 0.04 * rng.next_double();
        const double wobble = 0.004 * (rng.next_double() - 0.5);
        for (Eigen::Index t = 0; t < 15; ++t) {
            const double year_shift = 0.002 * std::sin(0.9 * static_cast<double>(t));
            const double noise = 0.003 * (rng.next_double() - 0.5);
            double v = level + year_shift + wobble * static_cast<double>(t) + noise;
            if (u == 0 && p.years[static_cast<std::size_t>(t)] >= 2012) v += delta;
            p.values(u, t) = v;
        }
    }
    return p;
}

} // namespace

TEST_CASE("two-way fixed effects equals the difference of window means") {
    SplitMix64 rng(21);
    for (int rep = 0; rep < 60; ++rep) {
        const double delta = 0.03 * (rng.next_double() - 0.5);
        const RatePanel p = random_panel(rng, delta);
        const DesignSpec s = design();
        const TwfeDidFit fit = fit_twfe_did(p, s);
        CHECK(std::abs(fit.delta - did_of_means(p, s)) < 1e-8);
        CHECK(std::abs(fit.delta - twfe_delta_within(p, s)) < 1e-8);
    }
}

TEST_CASE("noiseless fixture recovers the injected effect to float precision") {
    const RatePanel p = RatePanel::from_panel(make_noiseless_panel(),
                                              StaffGroup::established_academic);
    DesignSpec s = design(kFixturePolicyYear);
    s.treated_unit = kFixtureTreatedUnit;
    const TwfeDidFit fit = fit_twfe_did(p, s, CovarianceKind::iid);
    CHECK(std::abs(fit.delta - kInjectedEffect) < 1e-10);
    CHECK(std::abs(did_of_means(p, s) - kInjectedEffect) < 1e-10);
    CHECK(fit.standard_error < 1e-12);   // additive panel: residuals vanish
    CHECK(fit.sigma2 < 1e-24);
}

TEST_CASE("purely additive panels are fit exactly, effects recovered up to level") {
    RatePanel p = grid_panel(6, 2000, 8);
    const double unit_level[] = {0.02, 0.03, 0.05, 0.04, 0.06, 0.035};
    const double year_shift[] = {0.0, 0.001, -0.002, 0.003, 0.0005, -0.001, 0.002, 0.0};
    const double delta = 0.0123;
    for (Eigen::Index u = 0; u < 6; ++u)
        for (Eigen::Index t = 0; t < 8; ++t) {
            p.values(u, t) = unit_level[u] + year_shift[t];
            if (u == 0 && p.years[static_cast<std::size_t>(t)] >= 2004)
                p.values(u, t) += delta;
        }
    const TwfeDidFit fit = fit_twfe_did(p, design(2004));
    CHECK(std::abs(fit.delta - delta) < 1e-12);
    CHECK(fit.residuals.cwiseAbs().maxCoeff() < 1e-12);
    // Year effects are normalized to the first sample year.
    for (std::size_t t = 1; t < 8; ++t) {
        const double want = year_shift[t] - year_shift[0];
        CHECK(fit.year_effects.at(p.years[t]) == doctest::Approx(want).epsilon(1e-10));
    }
}

TEST_CASE("event study pivots at the base year and recovers per-year effects") {
    const RatePanel p = RatePanel::from_panel(make_noiseless_panel(),
                                              StaffGroup::established_academic);
    DesignSpec s = design(kFixturePolicyYear);
    s.treated_unit = kFixtureTreatedUnit;
    s.base_year = 2011;   // last pre year
    const EventStudySeries es = event_study(p, s);
    REQUIRE(es.points.size() == p.years.size());
    CHECK_FALSE(es.warning.empty());
    for (const auto& pt : es.points) {
        if (pt.year == 2011) {
            CHECK(pt.estimate == 0.0);   // pivot, exactly
            CHECK(pt.standard_error == 0.0);
        } else if (pt.year < kFixturePolicyYear) {
            CHECK(std::abs(pt.estimate) < 1e-12);
        } else {
            CHECK(pt.estimate == doctest::Approx(kInjectedEffect).epsilon(1e-12));
        }
        CHECK(pt.lower <= pt.estimate);
        CHECK(pt.upper >= pt.estimate);
        CHECK(pt.upper - pt.estimate == doctest::Approx(kNormal975 * pt.standard_error));
    }
}

TEST_CASE("constant treated-donor gap yields the all-zero series") {
    RatePanel p = grid_panel(5, 2006, 10);
    SplitMix64 rng(22);
    for (Eigen::Index t = 0; t < 10; ++t) {
        const double base = 0.04 + 0.01 * rng.next_double();
        for (Eigen::Index u = 1; u < 5; ++u) p.values(u, t) = base;
        p.values(0, t) = base + 0.004;   // same gap every year
    }
    for (const auto& pt : event_study(p, design(2010)).points)
        CHECK(std::abs(pt.estimate) < 1e-14);
}

TEST_CASE("pre-mean pivot subtracts the average pre-window gap") {
    RatePanel p = grid_panel(3, 2008, 6);
    // Donor pair stays at zero; treated gap by year: 1,2,3 pre, 7,7,7 post.
    const double gaps[] = {0.01, 0.02, 0.03, 0.07, 0.07, 0.07};
    for (Eigen::Index t = 0; t < 6; ++t) p.values(0, t) = gaps[t];
    const EventStudySeries es =
        event_study(p, design(2011), EventPivot::pre_period_mean);
    const double pre_mean = (0.01 + 0.02 + 0.03) / 3.0;
    for (std::size_t t = 0; t < 6; ++t)
        CHECK(es.points[t].estimate == doctest::Approx(gaps[t] - pre_mean).epsilon(1e-12));
}

TEST_CASE("event study requires the pivot year") {
    SplitMix64 rng(23);
    const RatePanel p = random_panel(rng, 0.0);
    DesignSpec s = design();
    s.base_year = 1999;
    CHECK_THROWS_AS(event_study(p, s), MissingBaseYear);
}

TEST_CASE("detrending zeroes exactly linear pre-periods") {
    RatePanel p = grid_panel(4, 2005, 12);
    const double slopes[] = {0.003, -0.001, 0.002, 0.0};
    const double levels[] = {0.05, 0.04, 0.06, 0.045};
    const int policy = 2011;
    for (Eigen::Index u = 0; u < 4; ++u)
        for (Eigen::Index t = 0; t < 12; ++t) {
            const int year = p.years[static_cast<std::size_t>(t)];
            p.values(u, t) = levels[u] + slopes[u] * (year - policy);
        }
    p.values(0, 8) += 0.02;   // a post-period deviation to survive the adjustment

    const DetrendResult d = detrend_pre(p, design(policy));
    CHECK_FALSE(d.variance_propagated);
    CHECK_FALSE(d.warning.empty());
    for (Eigen::Index u = 0; u < 4; ++u) {
        const auto& trend = d.unit_trends.at(p.units[static_cast<std::size_t>(u)]);
        CHECK(trend.slope == doctest::Approx(slopes[u]).epsilon(1e-10));
        CHECK(trend.intercept == doctest::Approx(levels[u]).epsilon(1e-10));
        for (Eigen::Index t = 0; t < 12; ++t) {
            const int year = p.years[static_cast<std::size_t>(t)];
            if (year < policy) CHECK(std::abs(d.adjusted.values(u, t)) < 1e-12);
        }
    }
    CHECK(d.adjusted.values(0, 8) == doctest::Approx(0.02).epsilon(1e-10));
}

TEST_CASE("common year shifts never move the estimate; unit trends do until detrended") {
    SplitMix64 rng(24);
    const RatePanel p = random_panel(rng, 0.011);
    const DesignSpec s = design();
    const double base_delta = fit_twfe_did(p, s).delta;

    RatePanel shifted = p;
    for (Eigen::Index t = 0; t < shifted.values.cols(); ++t)
        shifted.values.col(t).array() += 0.005 * static_cast<double>(t);
    CHECK(std::abs(fit_twfe_did(shifted, s).delta - base_delta) < 1e-8);

    // A treated-unit-only trend biases the raw estimate; detrending both
    // panels brings them back together.
    RatePanel tilted = p;
    for (Eigen::Index t = 0; t < tilted.values.cols(); ++t)
        tilted.values(0, t) += 0.002 * static_cast<double>(t);
    CHECK(std::abs(fit_twfe_did(tilted, s).delta - base_delta) > 1e-4);
    const double detrended_base = fit_twfe_did(detrend_pre(p, s).adjusted, s).delta;
    const double detrended_tilted = fit_twfe_did(detrend_pre(tilted, s).adjusted, s).delta;
    CHECK(std::abs(detrended_tilted - detrended_base) < 1e-8);
}

TEST_CASE("detrending needs at least three pre-period years") {
    RatePanel p = grid_panel(3, 2010, 6);
    try {
        detrend_pre(p, design(2012));   // pre window is 2010-2011: two years
        FAIL("expected InsufficientPrePeriod");
    } catch (const InsufficientPrePeriod& e) {
        CHECK(std::string(e.what()).find("3") != std::string::npos);
    }
}

TEST_CASE("student adjustment recovers a planted load gradient") {
    RatePanel p = grid_panel(6, 2006, 10);
    const double beta = 0.004, delta = 0.009;
    SplitMix64 rng(25);
    for (Eigen::Index u = 0; u < 6; ++u) {
        const double s0 = 12000.0 + 3000.0 * rng.next_double();
        const double g = 0.01 + 0.02 * rng.next_double();
        for (Eigen::Index t = 0; t < 10; ++t) {
            const double fte = s0 * std::pow(1.0 + g, static_cast<double>(t));
            p.student_fte(u, t) = fte;
            p.values(u, t) = 0.02 + beta * std::log(fte);
            if (u == 0 && p.years[static_cast<std::size_t>(t)] >= 2012)
                p.values(u, t) += delta;
        }
    }
    const DesignSpec s = design();

    SUBCASE("pooled slope") {
        const StudentAdjustResult r = student_adjust(p, s);
        CHECK_FALSE(r.per_unit);
        CHECK(r.pooled_slope == doctest::Approx(beta).epsilon(1e-8));
        CHECK(std::abs(fit_twfe_did(r.adjusted, s).delta - delta) < 1e-8);
        for (Eigen::Index u = 0; u < 6; ++u)
            for (Eigen::Index t = 0; t < 3; ++t) {
                const double want = p.values(u, t) - r.pooled_slope *
                                                        std::log(p.student_fte(u, t));
                CHECK(r.adjusted.values(u, t) == doctest::Approx(want).epsilon(1e-12));
            }
    }
    SUBCASE("per-unit slopes") {
        const StudentAdjustResult r = student_adjust(p, s, true);
        CHECK(r.per_unit);
        REQUIRE(r.unit_slopes.size() == 6);
        for (const auto& [unit, slope] : r.unit_slopes)
            CHECK(slope == doctest::Approx(beta).epsilon(1e-8));
        CHECK(std::abs(fit_twfe_did(r.adjusted, s).delta - delta) < 1e-8);
    }
}

TEST_CASE("student adjustment guards its inputs") {
    RatePanel p = grid_panel(3, 2008, 6);
    p.student_fte.setConstant(5000.0);
    SUBCASE("nonpositive load names the offending cell") {
        p.student_fte(1, 2) = 0.0;
        try {
            student_adjust(p, design(2011));
            FAIL("expected NonpositiveStudentFTE");
        } catch (const NonpositiveStudentFTE& e) {
            const std::string msg = e.what();
            CHECK(msg.find("D1") != std::string::npos);
            CHECK(msg.find("2010") != std::string::npos);
        }
    }
    SUBCASE("constant load cannot identify a slope") {
        CHECK_THROWS_AS(student_adjust(p, design(2011)), RankDeficient);
    }
}

TEST_CASE("implied hiring growth is the log-difference of the load series") {
    const double g = 0.017;
    std::vector<double> series{20000.0};
    for (int t = 0; t < 8; ++t) series.push_back(series.back() * (1.0 + g));
    const std::vector<double> growth = implied_hire_growth(series);
    REQUIRE(growth.size() == series.size() - 1);
    for (double v : growth) CHECK(std::abs(v - std::log1p(g)) < 1e-12);
    CHECK_THROWS_AS(implied_hire_growth({100.0, 0.0, 50.0}), NonpositiveStudentFTE);
    std::vector<double> varied{1000.0, 1100.0, 990.0};
    const auto vg = implied_hire_growth(varied);
    CHECK(vg[0] == doctest::Approx(std::log(1.1)).epsilon(1e-12));
    CHECK(vg[1] == doctest::Approx(std::log(990.0 / 1100.0)).epsilon(1e-12));
}

TEST_CASE("design validation rejects broken specifications") {
    SplitMix64 rng(26);
    const RatePanel p = random_panel(rng, 0.0);
    SUBCASE("unknown treated unit") {
        DesignSpec s = design();
        s.treated_unit = "NOPE";
        CHECK_THROWS_AS(fit_twfe_did(p, s), EmptySelection);
    }
    SUBCASE("no donors") {
        RatePanel solo = grid_panel(1, 2007, 15);
        CHECK_THROWS_AS(fit_twfe_did(solo, design()), DegenerateDesign);
    }
    SUBCASE("policy at the first year leaves no pre window") {
        CHECK_THROWS_AS(fit_twfe_did(p, design(2007)), DegenerateDesign);
    }
    SUBCASE("policy beyond the last year leaves no post window") {
        CHECK_THROWS_AS(fit_twfe_did(p, design(2030)), DegenerateDesign);
    }
    SUBCASE("pre window must end before the policy year") {
        DesignSpec s = design();
        s.pre_window = {{2008, 2012}};
        CHECK_THROWS_AS(fit_twfe_did(p, s), DataError);
    }
    SUBCASE("windows must lie inside the panel") {
        DesignSpec s = design();
        s.post_window = {{2012, 2030}};
        CHECK_THROWS_AS(fit_twfe_did(p, s), DataError);
    }
}

TEST_CASE("explicit windows restrict the estimation sample") {
    RatePanel p = grid_panel(3, 2006, 10);
    SplitMix64 rng(27);
    for (Eigen::Index u = 0; u < 3; ++u)
        for (Eigen::Index t = 0; t < 10; ++t)
            p.values(u, t) = 0.05 + 0.01 * rng.next_double();
    DesignSpec s = design(2011);
    s.pre_window = {{2008, 2010}};
    s.post_window = {{2011, 2013}};
    const TwfeDidFit fit = fit_twfe_did(p, s);
    CHECK(fit.sample_years == std::vector<int>{2008, 2009, 2010, 2011, 2012, 2013});
    // Hand-computed difference of means over exactly those windows.
    auto mean_over = [&](Eigen::Index u, int from, int to) {
        double sum = 0.0;
        int count = 0;
        for (int y = from; y <= to; ++y, ++count)
            sum += p.values(u, p.year_index(y));
        return sum / count;
    };
    const double treated = mean_over(0, 2011, 2013) - mean_over(0, 2008, 2010);
    double donors = 0.0;
    for (Eigen::Index u = 1; u < 3; ++u)
        donors += (mean_over(u, 2011, 2013) - mean_over(u, 2008, 2010)) / 2.0;
    CHECK(fit.delta == doctest::Approx(treated - donors).epsilon(1e-10));
}

TEST_CASE("rate panel extraction selects the requested group") {
    std::vector<StaffGroup> groups{StaffGroup::established_academic,
                                   StaffGroup::established_research};
    PanelDataset d;
    d.institutions = {"A", "B"};
    d.years = {AcademicYear{2010}, AcademicYear{2011}};
    d.groups = groups;
    for (const auto& inst : d.institutions)
        for (const auto& year : d.years)
            for (auto g : groups) {
                PanelObservation o;
                o.institution = inst;
                o.year = year;
                o.group = g;
                o.headcount = 100;
                o.new_appointments = g == StaffGroup::established_academic ? 5 : 2;
                d.observations.push_back(o);
            }
    const RatePanel eac = RatePanel::from_panel(d, StaffGroup::established_academic);
    const RatePanel ear = RatePanel::from_panel(d, StaffGroup::established_research);
    CHECK(eac.values(0, 0) == doctest::Approx(0.05));
    CHECK(ear.values(0, 0) == doctest::Approx(0.02));
    CHECK_THROWS_AS(eac.unit_index("Z"), EmptySelection);
    CHECK_THROWS_AS(eac.year_index(1999), EmptySelection);
}
