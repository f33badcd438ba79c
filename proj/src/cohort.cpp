#include "wft/cohort.hpp"
#include "wft/csv.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <limits>
#include <ostream>

namespace wft {

namespace {

constexpr int kNoBound = std::numeric_limits<int>::max();

double map_at(const std::map<int, double>& m, int age) {
    auto it = m.find(age);
    return it == m.end() ? 0.0 : it->second;
}

void check_hazard(const std::map<int, double>& hazard, const char* name) {
    for (const auto& [age, p] : hazard) {
        if (age < 0 || age > 200)
            throw DataError(std::string(name) + " age " + std::to_string(age) +
                            " outside [0, 200]");
        if (p < 0.0 || p > 1.0)
            throw DataError(std::string(name) + " at age " + std::to_string(age) +
                            " outside [0,1]: " + format_double(p));
    }
}

} // namespace

void PolicyScenario::validate() const {
    if (total_posts <= 0)
        throw DataError("total_posts must be positive, got " + std::to_string(total_posts));
    if (post_growth_rate < 0.0)
        throw DataError("post_growth_rate must be nonnegative, got " +
                        format_double(post_growth_rate));
    if (entry_age_distribution.empty())
        throw DataError("entry_age_distribution is empty");
    double share_sum = 0.0;
    for (const auto& [age, share] : entry_age_distribution) {
        if (age < 0 || age > 200)
            throw DataError("entry age " + std::to_string(age) + " outside [0, 200]");
        if (share <= 0.0)
            throw DataError("entry share at age " + std::to_string(age) +
                            " must be positive, got " + format_double(share));
        share_sum += share;
    }
    if (std::abs(share_sum - 1.0) > 1e-9)
        throw DataError("entry shares sum to " + format_double(share_sum) + ", expected 1");
    check_hazard(voluntary_hazard, "voluntary_hazard");
    check_hazard(attrition_hazard, "attrition_hazard");
    const int bound = exit_event_age();   // throws UnboundedAges when absent
    for (const auto& [age, share] : entry_age_distribution)
        if (age >= bound)
            throw DataError("entry age " + std::to_string(age) +
                            " cannot hold a post (exit event at age " +
                            std::to_string(bound) + ")");
}

int PolicyScenario::min_entry_age() const {
    return entry_age_distribution.begin()->first;
}

double PolicyScenario::mean_entry_age() const {
    double m = 0.0;
    for (const auto& [age, share] : entry_age_distribution) m += age * share;
    return m;
}

int PolicyScenario::exit_event_age() const {
    int bound = kNoBound;
    if (mandatory_age) bound = std::min(bound, *mandatory_age);
    if (age_cap) bound = std::min(bound, *age_cap + 1);
    // An absorbing hazard bounds the axis only above every entry age: entrants
    // are exempt in their entry year, so they pass over hazards at entry ages.
    const int max_entry = entry_age_distribution.empty()
                              ? 0
                              : entry_age_distribution.rbegin()->first;
    for (const auto* hazard : {&voluntary_hazard, &attrition_hazard})
        for (const auto& [age, p] : *hazard)
            if (p >= 1.0 && age > max_entry) bound = std::min(bound, age);
    if (bound == kNoBound)
        throw UnboundedAges(
            "no mandatory age, no age cap, and no absorbing hazard above the entry ages");
    return bound;
}

double PolicyScenario::survival_at(int age) const {
    if (mandatory_age && age >= *mandatory_age) return 0.0;
    if (age_cap && age > *age_cap) return 0.0;
    const double v = map_at(voluntary_hazard, age);
    const double a = map_at(attrition_hazard, age);
    return (1.0 - v) * (1.0 - a);
}

double PolicyScenario::expected_residence_years() const {
    // W(a) counts year-ends in post: the entry year plus each later year
    // survived, hazards being evaluated at the age then held.
    double w = 0.0;
    for (const auto& [entry_age, share] : entry_age_distribution) {
        double alive = 1.0;
        double years = 1.0;   // present at the end of the entry year
        for (int age = entry_age + 1; alive > 0.0; ++age) {
            alive *= survival_at(age);
            years += alive;
            if (age > 400) throw UnboundedAges("survival profile failed to terminate");
        }
        w += share * years;
    }
    return w;
}

// ---- state ----------------------------------------------------------------

double CohortState::total() const {
    double t = 0.0;
    for (double m : headcount_by_age) t += m;
    return t;
}

double CohortState::at_age(int age) const {
    const int i = age - min_age;
    if (i < 0 || i >= static_cast<int>(headcount_by_age.size())) return 0.0;
    return headcount_by_age[static_cast<std::size_t>(i)];
}

CohortState initialize_uniform(const PolicyScenario& scenario) {
    scenario.validate();
    const int lo = static_cast<int>(std::llround(scenario.mean_entry_age()));
    const int hi = scenario.exit_event_age() - 1;
    if (lo > hi)
        throw DataError("uniform start impossible: mean entry age " + std::to_string(lo) +
                        " beyond last occupiable age " + std::to_string(hi));
    CohortState s;
    s.min_age = lo;
    const int n = hi - lo + 1;
    s.headcount_by_age.assign(static_cast<std::size_t>(n),
                              static_cast<double>(scenario.total_posts) / n);
    s.year_index = 0;
    return s;
}

std::pair<CohortState, YearRecord> step(const CohortState& state,
                                        const PolicyScenario& scenario) {
    scenario.validate();
    const int t = state.year_index;
    const double target_next =
        static_cast<double>(scenario.total_posts) *
        std::pow(1.0 + scenario.post_growth_rate, static_cast<double>(t + 1));

    YearRecord rec;
    rec.year_index = t + 1;

    std::map<int, double> next;   // survivors by age, then refilled entrants

    for (std::size_t i = 0; i < state.headcount_by_age.size(); ++i) {
        double mass = state.headcount_by_age[i];
        if (mass <= 0.0) continue;
        const int age = state.min_age + static_cast<int>(i) + 1;   // after ageing
        if (scenario.mandatory_age && age >= *scenario.mandatory_age) {
            rec.mandatory_exits += mass;
            continue;
        }
        if (scenario.age_cap && age > *scenario.age_cap) {
            rec.voluntary_exits += mass;   // ageing past the cap counts as voluntary
            continue;
        }
        const double vol = map_at(scenario.voluntary_hazard, age);
        const double voluntary = mass * vol;
        mass -= voluntary;
        const double attrition = mass * map_at(scenario.attrition_hazard, age);
        mass -= attrition;
        rec.voluntary_exits += voluntary;
        rec.attrition_exits += attrition;
        if (mass > 0.0) next[age] += mass;
    }

    double survivors = 0.0;
    for (const auto& [age, mass] : next) survivors += mass;

    rec.hires = target_next - survivors;
    if (rec.hires < -1e-9 * target_next)
        throw NumericalError("establishment target " + format_double(target_next) +
                             " below survivor mass " + format_double(survivors));
    if (rec.hires < 0.0) rec.hires = 0.0;

    for (const auto& [age, share] : scenario.entry_age_distribution)
        next[age] += rec.hires * share;

    CohortState out;
    out.year_index = t + 1;
    if (next.empty()) {
        out.min_age = scenario.min_entry_age();
        out.headcount_by_age = {};
    } else {
        out.min_age = next.begin()->first;
        const int top = next.rbegin()->first;
        out.headcount_by_age.assign(static_cast<std::size_t>(top - out.min_age + 1), 0.0);
        for (const auto& [age, mass] : next)
            out.headcount_by_age[static_cast<std::size_t>(age - out.min_age)] = mass;
    }

    rec.headcount = out.total();
    rec.hire_rate = rec.headcount > 0.0 ? rec.hires / rec.headcount : 0.0;
    rec.expected_residence = scenario.expected_residence_years();
    return {std::move(out), rec};
}

SimulationTrace run(const PolicyScenario& scenario, int years, const CohortState& initial) {
    if (years < 1) throw UsageError("simulation length must be at least 1 year, got " +
                                    std::to_string(years));
    scenario.validate();
    SimulationTrace trace;
    trace.years.reserve(static_cast<std::size_t>(years));
    CohortState state = initial;
    const double w = scenario.expected_residence_years();
    for (int y = 0; y < years; ++y) {
        auto [next, rec] = step(state, scenario);
        rec.expected_residence = w;
        trace.years.push_back(rec);
        state = std::move(next);
    }
    return trace;
}

SimulationTrace run(const PolicyScenario& scenario, int years) {
    return run(scenario, years, initialize_uniform(scenario));
}

// ---- steady state ---------------------------------------------------------

SteadyStateSummary summarize_steady_state(const SimulationTrace& trace, int window_years) {
    const int n = static_cast<int>(trace.years.size());
    if (window_years < 1 || window_years > n)
        throw EmptyWindow("window of " + std::to_string(window_years) +
                          " years does not fit a trace of " + std::to_string(n));
    SteadyStateSummary s;
    s.window_years = window_years;
    for (int i = n - window_years; i < n; ++i) {
        s.mean_headcount += trace.years[static_cast<std::size_t>(i)].headcount;
        s.mean_hires += trace.years[static_cast<std::size_t>(i)].hires;
    }
    s.mean_headcount /= window_years;
    s.mean_hires /= window_years;
    s.expected_residence = trace.years.back().expected_residence;
    s.vacancy_rate = s.mean_headcount > 0.0 ? s.mean_hires / s.mean_headcount : 0.0;
    s.littles_residual = littles_law_check(trace, n - window_years, n - 1);
    return s;
}

double littles_law_check(const SimulationTrace& trace, int from_year, int to_year) {
    const int n = static_cast<int>(trace.years.size());
    if (from_year < 0 || to_year >= n || from_year > to_year)
        throw EmptyWindow("[" + std::to_string(from_year) + ", " + std::to_string(to_year) +
                          "] out of range for a trace of " + std::to_string(n));
    double mean_l = 0.0, mean_lambda = 0.0, mean_w = 0.0;
    const int count = to_year - from_year + 1;
    for (int i = from_year; i <= to_year; ++i) {
        const auto& rec = trace.years[static_cast<std::size_t>(i)];
        mean_l += rec.headcount;
        mean_lambda += rec.hires;
        mean_w += rec.expected_residence;
    }
    mean_l /= count;
    mean_lambda /= count;
    mean_w /= count;
    if (mean_l <= 0.0) throw EmptyWindow("window has zero mean headcount");
    return std::abs(mean_l - mean_lambda * mean_w) / mean_l;
}

int recommended_window(const PolicyScenario& scenario) {
    return scenario.exit_event_age() - scenario.min_entry_age();
}

ScenarioComparison compare_scenarios(const PolicyScenario& baseline,
                                     const PolicyScenario& alternative, int years) {
    baseline.validate();
    alternative.validate();
    if (baseline.total_posts != alternative.total_posts)
        throw IncompatibleScenarios("total_posts differ: " +
                                    std::to_string(baseline.total_posts) + " vs " +
                                    std::to_string(alternative.total_posts));
    if (baseline.post_growth_rate != alternative.post_growth_rate)
        throw IncompatibleScenarios("post_growth_rate differs");
    if (baseline.entry_age_distribution != alternative.entry_age_distribution)
        throw IncompatibleScenarios("entry age distributions differ");

    const int window = std::max(recommended_window(baseline), recommended_window(alternative));
    if (years < window)
        throw EmptyWindow("comparison needs at least " + std::to_string(window) +
                          " years to average a residence cycle, got " + std::to_string(years));

    // Both policies start from the baseline's standing workforce, so the
    // alternative's series shows the transition, not its own steady state.
    const CohortState start = initialize_uniform(baseline);
    SimulationTrace base_trace = run(baseline, years, start);
    SimulationTrace alt_trace = run(alternative, years, start);

    ScenarioComparison cmp;
    cmp.baseline_hires.reserve(static_cast<std::size_t>(years));
    cmp.alternative_hires.reserve(static_cast<std::size_t>(years));
    for (int i = 0; i < years; ++i) {
        const double b = base_trace.years[static_cast<std::size_t>(i)].hires;
        const double a = alt_trace.years[static_cast<std::size_t>(i)].hires;
        cmp.baseline_hires.push_back(b);
        cmp.alternative_hires.push_back(a);
        cmp.hire_difference.push_back(b - a);
    }
    for (int d = 0; d * 10 < years; ++d) {
        const int lo = d * 10;
        const int hi = std::min(years, lo + 10);
        double m = 0.0;
        for (int i = lo; i < hi; ++i) m += cmp.hire_difference[static_cast<std::size_t>(i)];
        cmp.decade_mean_difference.push_back(m / (hi - lo));
    }
    cmp.baseline_steady = summarize_steady_state(base_trace, window);
    cmp.alternative_steady = summarize_steady_state(alt_trace, window);
    cmp.steady_state_difference =
        cmp.baseline_steady.mean_hires - cmp.alternative_steady.mean_hires;
    return cmp;
}

// ---- scenario files -------------------------------------------------------

namespace {

std::map<int, double> parse_age_map(const std::string& text, std::size_t line,
                                    const char* key) {
    std::map<int, double> out;
    const std::string t = trim(text);
    if (t.empty()) return out;
    for (const auto& piece : split(t, ',')) {
        auto parts = split(piece, ':');
        long long age;
        double value;
        if (parts.size() != 2 || !parse_long(trim(parts[0]), age) ||
            !parse_double(trim(parts[1]), value))
            throw DataError("scenario line " + std::to_string(line) + ": bad " + key +
                            " entry '" + trim(piece) + "' (want age:value)");
        if (!out.emplace(static_cast<int>(age), value).second)
            throw DataError("scenario line " + std::to_string(line) + ": duplicate age " +
                            std::to_string(age) + " in " + key);
    }
    return out;
}

std::string render_age_map(const std::map<int, double>& m) {
    std::string s;
    for (const auto& [age, value] : m) {
        if (!s.empty()) s += ",";
        s += std::to_string(age) + ":" + format_double(value);
    }
    return s;
}

} // namespace

PolicyScenario parse_scenario(std::istream& in) {
    PolicyScenario sc;
    bool have_posts = false, have_entry = false;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        const std::string t = trim(line);
        if (t.empty() || t[0] == '#') continue;
        const auto eq = t.find('=');
        if (eq == std::string::npos)
            throw DataError("scenario line " + std::to_string(line_no) +
                            ": expected 'key = value', got '" + t + "'");
        const std::string key = trim(t.substr(0, eq));
        const std::string value = trim(t.substr(eq + 1));
        long long ll;
        double d;
        if (key == "posts") {
            if (!parse_long(value, ll))
                throw DataError("scenario line " + std::to_string(line_no) +
                                ": unparseable posts '" + value + "'");
            sc.total_posts = ll;
            have_posts = true;
        } else if (key == "growth") {
            if (!parse_double(value, d))
                throw DataError("scenario line " + std::to_string(line_no) +
                                ": unparseable growth '" + value + "'");
            sc.post_growth_rate = d;
        } else if (key == "mandatory_age") {
            if (!parse_long(value, ll))
                throw DataError("scenario line " + std::to_string(line_no) +
                                ": unparseable mandatory_age '" + value + "'");
            sc.mandatory_age = static_cast<int>(ll);
        } else if (key == "age_cap") {
            if (!parse_long(value, ll))
                throw DataError("scenario line " + std::to_string(line_no) +
                                ": unparseable age_cap '" + value + "'");
            sc.age_cap = static_cast<int>(ll);
        } else if (key == "entry_ages") {
            sc.entry_age_distribution = parse_age_map(value, line_no, "entry_ages");
            have_entry = true;
        } else if (key == "voluntary_hazard") {
            sc.voluntary_hazard = parse_age_map(value, line_no, "voluntary_hazard");
        } else if (key == "attrition_hazard") {
            sc.attrition_hazard = parse_age_map(value, line_no, "attrition_hazard");
        } else {
            throw DataError("scenario line " + std::to_string(line_no) + ": unknown key '" +
                            key + "'");
        }
    }
    if (!have_posts) throw DataError("scenario missing required key 'posts'");
    if (!have_entry) throw DataError("scenario missing required key 'entry_ages'");
    sc.validate();
    return sc;
}

void write_scenario(std::ostream& out, const PolicyScenario& sc) {
    out << "posts = " << sc.total_posts << "\n";
    out << "growth = " << format_double(sc.post_growth_rate) << "\n";
    if (sc.mandatory_age) out << "mandatory_age = " << *sc.mandatory_age << "\n";
    if (sc.age_cap) out << "age_cap = " << *sc.age_cap << "\n";
    out << "entry_ages = " << render_age_map(sc.entry_age_distribution) << "\n";
    if (!sc.voluntary_hazard.empty())
        out << "voluntary_hazard = " << render_age_map(sc.voluntary_hazard) << "\n";
    if (!sc.attrition_hazard.empty())
        out << "attrition_hazard = " << render_age_map(sc.attrition_hazard) << "\n";
}

} // namespace wft
