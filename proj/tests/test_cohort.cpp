#include "wft/cohort.hpp"
#include "wft/errors.hpp"
#include "wft/fixtures.hpp"

#include <doctest.h>

#include <cmath>
#include <sstream>

using namespace wft;

TEST_CASE("mandate scenario sits at its closed-form fixed point") {
    const PolicyScenario s = make_mandate_scenario();
    CHECK(s.exit_event_age() == 67);
    CHECK(s.expected_residence_years() == doctest::Approx(27.0).epsilon(1e-14));
    CHECK(recommended_window(s) == 27);

    const SimulationTrace trace = run(s, 60);
    // Uniform start over [40,66] is already the fixed point: every year one
    // 10-strong cohort retires and is refilled.
    for (const auto& y : trace.years) {
        CHECK(y.headcount == doctest::Approx(270.0).epsilon(1e-14));
        CHECK(y.hires == doctest::Approx(10.0).epsilon(1e-12));
        CHECK(y.hire_rate == doctest::Approx(1.0 / 27.0).epsilon(1e-12));
    }
    const auto steady = summarize_steady_state(trace, 27);
    CHECK(steady.vacancy_rate == doctest::Approx(1.0 / 27.0).epsilon(1e-12));
    CHECK(steady.littles_residual < 1e-9);
    CHECK(littles_law_check(trace, 30, 59) < 1e-9);
}

TEST_CASE("abolition scenario reaches one-in-thirty turnover") {
    const PolicyScenario s = make_abolished_scenario();
    CHECK(!s.mandatory_age.has_value());
    CHECK(s.exit_event_age() == 70);   // absorbing voluntary hazard bounds the axis
    CHECK(s.expected_residence_years() == doctest::Approx(30.0).epsilon(1e-14));

    const SimulationTrace trace = run(s, 60);
    for (int start = 0; start + 30 <= 60; ++start) {
        double hires = 0.0, heads = 0.0;
        for (int t = start; t < start + 30; ++t) {
            hires += trace.years[static_cast<std::size_t>(t)].hires;
            heads += trace.years[static_cast<std::size_t>(t)].headcount;
        }
        CHECK((hires / 30.0) / (heads / 30.0) == doctest::Approx(1.0 / 30.0).epsilon(1e-9));
    }
    const auto steady = summarize_steady_state(trace, 30);
    CHECK(steady.vacancy_rate == doctest::Approx(1.0 / 30.0).epsilon(1e-9));
    CHECK(steady.littles_residual < 1e-9);
}

TEST_CASE("raising the mandate pauses mandatory exits for exactly two years") {
    const PolicyScenario base = make_mandate_scenario();
    const PolicyScenario raised = make_raised_mandate_scenario();
    const SimulationTrace trace = run(raised, 29, initialize_uniform(base));
    // Oldest standing cohort is 66; it reaches the new age 69 only in year 3.
    int zero_years = 0;
    for (const auto& y : trace.years) {
        if (y.mandatory_exits == 0.0) {
            ++zero_years;
            CHECK(y.year_index <= 2);
        }
    }
    CHECK(zero_years == 2);
    CHECK(trace.years[0].mandatory_exits == 0.0);
    CHECK(trace.years[1].mandatory_exits == 0.0);
    CHECK(trace.years[2].mandatory_exits > 0.0);
    // The long-run rate settles at one in twenty-nine.
    const SimulationTrace long_run = run(raised, 120, initialize_uniform(base));
    const auto steady = summarize_steady_state(long_run, 29);
    CHECK(steady.vacancy_rate == doctest::Approx(1.0 / 29.0).epsilon(1e-9));
}

TEST_CASE("the two-year pause echoes when the missing cohorts recirculate") {
    // Years with zero mandatory exits recur one residence time later: the
    // cohorts never hired during the pause are absent from the exit schedule.
    const SimulationTrace trace =
        run(make_raised_mandate_scenario(), 62, initialize_uniform(make_mandate_scenario()));
    std::vector<int> zero_years;
    for (const auto& y : trace.years)
        if (y.mandatory_exits == 0.0) zero_years.push_back(y.year_index);
    CHECK(zero_years == std::vector<int>{1, 2, 30, 31, 59, 60});
}

TEST_CASE("headcount tracks the establishment under growth") {
    PolicyScenario s = make_mandate_scenario();
    s.post_growth_rate = 0.02;
    const SimulationTrace trace = run(s, 40);
    for (const auto& y : trace.years) {
        const double want = 270.0 * std::pow(1.02, y.year_index);
        CHECK(y.headcount == doctest::Approx(want).epsilon(1e-12));
    }
}

TEST_CASE("hazard survival arithmetic matches a hand-computed residence time") {
    PolicyScenario s;
    s.total_posts = 100;
    s.entry_age_distribution = {{50, 1.0}};
    s.mandatory_age = 53;
    s.voluntary_hazard = {{51, 0.5}};
    s.validate();
    CHECK(s.survival_at(51) == doctest::Approx(0.5));
    CHECK(s.survival_at(52) == doctest::Approx(1.0));
    CHECK(s.survival_at(53) == 0.0);
    // W = 1 + P(survive to end of year 2) + P(... year 3) = 1 + 0.5 + 0.5.
    CHECK(s.expected_residence_years() == doctest::Approx(2.0).epsilon(1e-14));

    // Non-absorbing hazards converge geometrically rather than settling on
    // an exact cycle, so give the transient time to decay below 1e-9.
    const SimulationTrace trace = run(s, 120);
    const auto steady = summarize_steady_state(trace, recommended_window(s));
    CHECK(steady.vacancy_rate == doctest::Approx(0.5).epsilon(1e-9));
    CHECK(steady.littles_residual < 1e-9);
}

TEST_CASE("attrition applies to the post-voluntary remainder") {
    PolicyScenario s;
    s.total_posts = 1000;
    s.entry_age_distribution = {{40, 1.0}};
    s.mandatory_age = 43;
    s.voluntary_hazard = {{41, 0.2}};
    s.attrition_hazard = {{41, 0.5}};
    s.validate();
    // Survival through age 41: (1 - 0.2) * (1 - 0.5) = 0.4.
    CHECK(s.survival_at(41) == doctest::Approx(0.4).epsilon(1e-14));
    CHECK(s.expected_residence_years() == doctest::Approx(1.0 + 0.4 + 0.4).epsilon(1e-12));

    // One cohort of 100 at age 40: voluntary takes 20, attrition half of the
    // remaining 80.
    CohortState one;
    one.min_age = 40;
    one.headcount_by_age = {100.0};
    auto [next, rec] = step(one, s);
    CHECK(rec.voluntary_exits == doctest::Approx(20.0));
    CHECK(rec.attrition_exits == doctest::Approx(40.0));
    CHECK(next.at_age(41) == doctest::Approx(40.0));
}

TEST_CASE("ageing past the cap counts as a voluntary exit") {
    PolicyScenario s;
    s.total_posts = 30;
    s.entry_age_distribution = {{40, 1.0}};
    s.age_cap = 42;   // last age a post may be held
    s.validate();
    CHECK(s.exit_event_age() == 43);
    const SimulationTrace trace = run(s, 10);
    for (const auto& y : trace.years) {
        CHECK(y.mandatory_exits == 0.0);
        CHECK(y.voluntary_exits == doctest::Approx(10.0));
        CHECK(y.headcount == doctest::Approx(30.0));
    }
}

TEST_CASE("entrants face no exit hazard in their entry year") {
    PolicyScenario s;
    s.total_posts = 100;
    s.entry_age_distribution = {{60, 1.0}};
    s.mandatory_age = 62;
    s.voluntary_hazard = {{60, 1.0}, {61, 0.0}};
    s.validate();
    // The absorbing age-60 hazard would empty every cohort at entry age if it
    // applied on arrival; instead entrants survive their first year and exit
    // only on later steps, so the establishment stays filled.
    const SimulationTrace trace = run(s, 8);
    for (const auto& y : trace.years) CHECK(y.headcount == doctest::Approx(100.0));
}

TEST_CASE("scenario validation rejects malformed inputs") {
    PolicyScenario s = make_mandate_scenario();
    SUBCASE("nonpositive posts") {
        s.total_posts = 0;
        CHECK_THROWS_AS(s.validate(), DataError);
    }
    SUBCASE("negative growth") {
        s.post_growth_rate = -0.01;
        CHECK_THROWS_AS(s.validate(), DataError);
    }
    SUBCASE("entry shares must sum to one") {
        s.entry_age_distribution = {{40, 0.6}, {45, 0.5}};
        CHECK_THROWS_AS(s.validate(), DataError);
    }
    SUBCASE("hazards live in the unit interval") {
        s.voluntary_hazard = {{50, 1.2}};
        CHECK_THROWS_AS(s.validate(), DataError);
    }
    SUBCASE("entry at or beyond the exit age") {
        s.entry_age_distribution = {{67, 1.0}};
        CHECK_THROWS_AS(s.validate(), DataError);
    }
    SUBCASE("unbounded age axis") {
        PolicyScenario open;
        open.total_posts = 10;
        open.entry_age_distribution = {{40, 1.0}};
        open.voluntary_hazard = {{50, 0.9}};   // never absorbing
        CHECK_THROWS_AS(open.validate(), UnboundedAges);
    }
    SUBCASE("absorbing hazard below the top entry age does not bound the axis") {
        PolicyScenario open;
        open.total_posts = 10;
        open.entry_age_distribution = {{40, 0.5}, {45, 0.5}};
        open.voluntary_hazard = {{42, 1.0}};   // age-45 entrants pass over it
        CHECK_THROWS_AS(open.validate(), UnboundedAges);
    }
}

TEST_CASE("run and summary argument guards") {
    const PolicyScenario s = make_mandate_scenario();
    CHECK_THROWS_AS(run(s, 0), UsageError);
    const SimulationTrace trace = run(s, 10);
    CHECK_THROWS_AS(summarize_steady_state(trace, 11), EmptyWindow);
    CHECK_THROWS_AS(summarize_steady_state(trace, 0), EmptyWindow);
    CHECK_THROWS_AS(littles_law_check(trace, 5, 4), EmptyWindow);
    CHECK_THROWS_AS(littles_law_check(trace, 0, 10), EmptyWindow);
}

TEST_CASE("scenario files round-trip") {
    PolicyScenario s;
    s.total_posts = 500;
    s.post_growth_rate = 0.015;
    s.mandatory_age = 66;
    s.entry_age_distribution = {{35, 0.25}, {42, 0.75}};
    s.voluntary_hazard = {{50, 0.02}, {60, 0.05}};
    s.attrition_hazard = {{45, 0.01}};
    s.validate();
    std::ostringstream out;
    write_scenario(out, s);
    std::istringstream in(out.str());
    const PolicyScenario back = parse_scenario(in);
    CHECK(back.total_posts == s.total_posts);
    CHECK(back.post_growth_rate == doctest::Approx(s.post_growth_rate));
    CHECK(back.mandatory_age == s.mandatory_age);
    CHECK(back.entry_age_distribution == s.entry_age_distribution);
    CHECK(back.voluntary_hazard == s.voluntary_hazard);
    CHECK(back.attrition_hazard == s.attrition_hazard);
}

TEST_CASE("scenario parser rejects unknown keys with the line number") {
    std::istringstream in("posts = 10\nentry_ages = 40:1\nmandatry_age = 67\n");
    try {
        parse_scenario(in);
        FAIL("expected DataError");
    } catch (const DataError& e) {
        const std::string msg = e.what();
        CHECK(msg.find("mandatry_age") != std::string::npos);
        CHECK(msg.find("line 3") != std::string::npos);
    }
}

TEST_CASE("policy comparison from a common standing workforce") {
    const ScenarioComparison cmp =
        compare_scenarios(make_mandate_scenario(), make_abolished_scenario(), 60);
    REQUIRE(cmp.baseline_hires.size() == 60);
    // Abolition halts hiring for three years (the retained cohorts), then the
    // old exit schedule resumes; the shortfall echoes thirty years later.
    CHECK(cmp.hire_difference[0] == doctest::Approx(10.0));
    CHECK(cmp.hire_difference[1] == doctest::Approx(10.0));
    CHECK(cmp.hire_difference[2] == doctest::Approx(10.0));
    CHECK(cmp.hire_difference[3] == doctest::Approx(0.0));
    REQUIRE(cmp.decade_mean_difference.size() == 6);
    CHECK(cmp.decade_mean_difference[0] == doctest::Approx(3.0).epsilon(1e-12));
    CHECK(cmp.decade_mean_difference[1] == doctest::Approx(0.0));
    CHECK(cmp.decade_mean_difference[3] == doctest::Approx(3.0).epsilon(1e-12));
    // Long-run cost of abolition: one hire per year (270/27 - 270/30).
    CHECK(cmp.steady_state_difference == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(cmp.baseline_steady.vacancy_rate == doctest::Approx(1.0 / 27.0).epsilon(1e-12));
    CHECK(cmp.alternative_steady.vacancy_rate == doctest::Approx(1.0 / 30.0).epsilon(1e-9));
}

TEST_CASE("comparison guards") {
    PolicyScenario other = make_abolished_scenario();
    other.total_posts = 300;
    CHECK_THROWS_AS(compare_scenarios(make_mandate_scenario(), other, 60),
                    IncompatibleScenarios);
    CHECK_THROWS_AS(compare_scenarios(make_mandate_scenario(), make_abolished_scenario(), 10),
                    EmptyWindow);
}
