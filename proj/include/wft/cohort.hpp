#pragma once

// Discrete-time deterministic (fluid) cohort simulator for a fixed
// establishment of posts.  Each simulated year applies, in this pinned order:
//
//   1. ageing        — every cohort moves up one year of age;
//   2. mandatory     — cohorts at or beyond the mandatory age leave;
//   3. voluntary     — per-age voluntary exit hazard, applied at the new age;
//   4. attrition     — per-age attrition hazard, applied to the remainder;
//   5. refill        — every vacated post is refilled the same year across the
//                      entry-age distribution, plus net growth additions, so
//                      the establishment tracks posts * (1+g)^t.
//
// Entrants hired in step 5 face no exit until the following year.  Cohorts
// ageing past the age cap leave in step 3 and are counted as voluntary exits.
// Headcounts are real-valued: a hazard removes the corresponding fraction of
// the cohort rather than sampled individuals, so runs are exactly
// reproducible and steady states are exact.

#include "wft/errors.hpp"

#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace wft {

struct PolicyScenario {
    long long total_posts = 0;                    // positive establishment size
    double post_growth_rate = 0.0;                // annual relative growth, >= 0
    std::optional<int> mandatory_age;             // exit on reaching this age
    std::optional<int> age_cap;                   // last age a post may be held
    std::map<int, double> entry_age_distribution; // age -> share of hires, sums to 1
    std::map<int, double> voluntary_hazard;       // age -> annual exit probability
    std::map<int, double> attrition_hazard;       // age -> annual exit probability

    /// Throws DataError/UnboundedAges when the scenario is not simulable:
    /// nonpositive posts, negative growth, hazards outside [0,1], entry shares
    /// not summing to 1 (1e-9), or an unbounded age axis (no mandatory age, no
    /// cap, and no age at which a hazard reaches probability one).
    void validate() const;

    int min_entry_age() const;
    double mean_entry_age() const;

    /// First age no cohort may occupy at year end: min over the mandatory age,
    /// the first absorbing-hazard age, and age_cap + 1.  Throws UnboundedAges.
    int exit_event_age() const;

    /// Probability a member who has just turned `age` survives that year's
    /// exit steps (0 at or beyond mandatory/absorbing/cap bounds).
    double survival_at(int age) const;

    /// Expected completed residence time of one hire drawn from the entry
    /// distribution: W = sum over entry ages a of share(a) * E[years in post].
    /// Computed from the survival profile, independently of any simulation.
    double expected_residence_years() const;
};

/// Scenario files are line-oriented "key = value" text; age-indexed maps use
/// comma-separated "age:value" pairs.  Unknown keys are rejected.
PolicyScenario parse_scenario(std::istream& in);
void write_scenario(std::ostream& out, const PolicyScenario& scenario);

// ---- state and trace ------------------------------------------------------

struct CohortState {
    int min_age = 0;
    std::vector<double> headcount_by_age;   // index i holds age min_age + i
    int year_index = 0;

    double total() const;
    double at_age(int age) const;
};

struct YearRecord {
    int year_index = 0;            // year this step produced (state.year_index after)
    double mandatory_exits = 0.0;
    double voluntary_exits = 0.0;  // includes age-cap exits
    double attrition_exits = 0.0;
    double hires = 0.0;            // refills + growth additions
    double headcount = 0.0;        // establishment after refill (Little's L)
    double hire_rate = 0.0;        // hires / headcount (the vacancy-creation rate)
    double expected_residence = 0.0; // scenario W, constant along a run

    double total_exits() const { return mandatory_exits + voluntary_exits + attrition_exits; }
};

struct SimulationTrace {
    std::vector<YearRecord> years;
};

/// Establishment spread uniformly over the occupiable ages
/// [round(mean entry age), exit_event_age - 1], year_index 0.
CohortState initialize_uniform(const PolicyScenario& scenario);

/// One simulated year in the pinned step order.  The state may contain ages
/// outside the scenario's own axis (as when comparing policies from a common
/// starting workforce); such cohorts exit per the scenario's rules.
std::pair<CohortState, YearRecord> step(const CohortState& state,
                                        const PolicyScenario& scenario);

/// Run `years` >= 1 steps from `initial`.
SimulationTrace run(const PolicyScenario& scenario, int years, const CohortState& initial);

/// Convenience: run from initialize_uniform(scenario).
SimulationTrace run(const PolicyScenario& scenario, int years);

// ---- steady state and conservation ----------------------------------------

/// Deterministic dynamics can settle into an exact cycle rather than a fixed
/// point (a cohort wall bouncing between refill years), so "steady state"
/// quantities are trailing time averages over a window at least as long as
/// the maximum residence span, which averages any such cycle exactly.
struct SteadyStateSummary {
    double vacancy_rate = 0.0;       // mean hires / mean headcount over the window
    double mean_headcount = 0.0;
    double mean_hires = 0.0;
    double expected_residence = 0.0;
    double littles_residual = 0.0;   // |L - lambda * W| / L on window means
    int window_years = 0;
};

/// Summarize the trailing `window_years` of a trace (must fit in the trace).
SteadyStateSummary summarize_steady_state(const SimulationTrace& trace, int window_years);

/// Conservation check over trace years [from, to] (inclusive, 0-based):
/// relative residual of mean headcount vs mean hires * expected residence.
/// Throws EmptyWindow when the range is empty or out of bounds.
double littles_law_check(const SimulationTrace& trace, int from_year, int to_year);

/// Smallest trailing window that averages a residence cycle exactly.
int recommended_window(const PolicyScenario& scenario);

// ---- policy comparison ----------------------------------------------------

/// Year-by-year and steady-state differences between a baseline scenario and
/// an alternative, both run from the baseline's uniform starting workforce so
/// the alternative's transient (e.g. the retention overhang after abolishing
/// a mandate) is visible.  Requires identical posts, growth, and entry
/// distribution (IncompatibleScenarios otherwise).
struct ScenarioComparison {
    std::vector<double> baseline_hires;
    std::vector<double> alternative_hires;
    std::vector<double> hire_difference;           // baseline - alternative
    std::vector<double> decade_mean_difference;    // years 1-10, 11-20, ...
    double steady_state_difference = 0.0;          // trailing-window mean difference
    SteadyStateSummary baseline_steady;
    SteadyStateSummary alternative_steady;
};

ScenarioComparison compare_scenarios(const PolicyScenario& baseline,
                                     const PolicyScenario& alternative, int years);

} // namespace wft
