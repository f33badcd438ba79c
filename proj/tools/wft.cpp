// wft: workforce-dynamics and policy-evaluation toolkit, command-line front end.
//
// Every subcommand writes its outputs into a bundle directory (--out, or the
// WFT_OUT environment variable) and closes it with manifest.json: version,
// seed, effective configuration echo, and a content digest per file.
//
// Exit status: 0 success; 2 usage error; 3 data contract violation;
// 4 numerical failure.  Errors are single-line "error: ..." on stderr.

#include "wft/cohort.hpp"
#include "wft/csv.hpp"
#include "wft/did.hpp"
#include "wft/fixtures.hpp"
#include "wft/panel.hpp"
#include "wft/proportionality.hpp"
#include "wft/report.hpp"
#include "wft/svg.hpp"

#include <CLI11.hpp>

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

namespace {

using namespace wft;

std::string default_out_dir() {
    const char* env = std::getenv("WFT_OUT");
    return env && *env ? env : "wft_out";
}

PanelDataset load_panel(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open panel file " + path);
    return ingest_panel(in);
}

PolicyScenario load_scenario(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open scenario file " + path);
    return parse_scenario(in);
}

StaffGroup parse_group_flag(const std::string& token) {
    auto g = parse_staff_group(token);
    if (!g) throw UsageError("unknown staff group '" + token + "' (want EAC or EAR)");
    return *g;
}

CovarianceKind parse_se_flag(const std::string& token) {
    if (token == "cluster") return CovarianceKind::cluster_by_unit;
    if (token == "hc") return CovarianceKind::hc_robust;
    if (token == "iid") return CovarianceKind::iid;
    throw UsageError("unknown se kind '" + token + "' (want cluster, hc, or iid)");
}

std::string render(const Table& t) {
    std::ostringstream os;
    write_table(os, t);
    return os.str();
}

std::string chart_string(const ChartSpec& spec) {
    std::ostringstream os;
    write_line_chart(os, spec);
    return os.str();
}

// Shared flags for the estimator subcommands.
struct DidArgs {
    std::string panel_path;
    std::string treated;
    int policy_year = 2012;
    int base_year = 2012;
    std::string group = "EAC";

    DesignSpec spec() const {
        DesignSpec s;
        s.treated_unit = treated;
        s.policy_year = policy_year;
        s.base_year = base_year;
        s.group = parse_group_flag(group);
        return s;
    }

    void add_to(CLI::App* cmd) {
        cmd->add_option("--panel", panel_path, "panel CSV file")->required();
        cmd->add_option("--treated", treated, "treated unit name")->required();
        cmd->add_option("--policy-year", policy_year, "first treated year");
        cmd->add_option("--base-year", base_year, "event-study pivot year");
        cmd->add_option("--group", group, "staff group (EAC or EAR)");
    }
};

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"workforce-dynamics and policy-evaluation toolkit"};
    app.require_subcommand(1);
    app.set_config("--config", "", "read options from an INI file (flags override)");

    std::string out_dir = default_out_dir();
    app.add_option("--out", out_dir, "bundle output directory (or WFT_OUT)")
        ->capture_default_str();
    std::uint64_t seed = 42;
    app.add_option("--seed", seed, "seed recorded in the bundle and used by "
                                   "seeded commands")
        ->capture_default_str();

    // Echo of the options that actually took effect, written to every bundle.
    auto finish = [&](BundleWriter& bundle,
                      std::map<std::string, std::string> echo) {
        echo.emplace("out_dir", out_dir);
        echo.emplace("seed", std::to_string(seed));
        bundle.write_text("run_config.ini", app.config_to_str(true, false));
        bundle.finish(echo, seed);
    };

    // ---- ingest ------------------------------------------------------------
    auto* c_ingest = app.add_subcommand(
        "ingest", "validate a staff file and write the canonical panel");
    std::string ingest_input, ingest_delim = "auto";
    IngestSchema schema;
    std::string default_group = "EAC";
    c_ingest->add_option("--input", ingest_input, "delimited staff file")->required();
    c_ingest->add_option("--delimiter", ingest_delim, "auto, comma, or tab");
    c_ingest->add_option("--institution-col", schema.institution, "column name");
    c_ingest->add_option("--year-col", schema.year, "column name");
    c_ingest->add_option("--group-col", schema.group, "column name");
    c_ingest->add_option("--headcount-col", schema.headcount, "column name");
    c_ingest->add_option("--new-col", schema.new_appointments, "column name");
    c_ingest->add_option("--student-col", schema.student_fte, "column name");
    c_ingest->add_option("--person-col", schema.person_id, "column name");
    c_ingest->add_option("--default-group", default_group,
                         "group recorded when no group column exists");
    c_ingest->callback([&] {
        schema.default_group = parse_group_flag(default_group);
        char delim = '\0';
        if (ingest_delim == "comma") delim = ',';
        else if (ingest_delim == "tab") delim = '\t';
        else if (ingest_delim != "auto")
            throw UsageError("unknown delimiter '" + ingest_delim + "'");
        std::ifstream in(ingest_input, std::ios::binary);
        if (!in) throw DataError("cannot open input file " + ingest_input);
        const PanelDataset data = ingest_panel(in, schema, delim);
        std::ostringstream os;
        serialize_panel(os, data);
        BundleWriter bundle(out_dir);
        bundle.write_text("panel.csv", os.str());
        finish(bundle, {{"command", "ingest"}, {"input", ingest_input}});
        std::cout << "panel: " << data.institutions.size() << " institutions x "
                  << data.years.size() << " years, groups " << data.groups.size()
                  << "\n";
    });

    // ---- classify ----------------------------------------------------------
    auto* c_classify = app.add_subcommand(
        "classify", "append the staff-group verdict to a records file");
    std::string classify_input;
    c_classify->add_option("--input", classify_input, "records CSV")->required();
    c_classify->callback([&] {
        std::ifstream in(classify_input, std::ios::binary);
        if (!in) throw DataError("cannot open input file " + classify_input);
        Table t = read_table(in);
        const int cf = t.column_index("function_code");
        const int cs = t.column_index("salary_point");
        const int cm = t.column_index("employment_mode");
        const int ct = t.column_index("terms");
        const int cfin = t.column_index("financing");
        if (cf < 0 || cs < 0 || cm < 0 || ct < 0 || cfin < 0)
            throw MalformedRow(1, "classify needs columns function_code, salary_point, "
                                  "employment_mode, terms, financing");
        t.columns.push_back("group");
        for (std::size_t r = 0; r < t.rows.size(); ++r) {
            auto& row = t.rows[r];
            const std::size_t line = t.source_lines[r];
            StaffRecord rec;
            auto fc = parse_function_code(row[static_cast<std::size_t>(cf)]);
            if (!fc) throw MalformedRow(line, "unknown function_code '" +
                                                  row[static_cast<std::size_t>(cf)] + "'");
            rec.function_code = *fc;
            long long sp;
            if (!parse_long(row[static_cast<std::size_t>(cs)], sp) || sp < 0)
                throw MalformedRow(line, "bad salary_point '" +
                                             row[static_cast<std::size_t>(cs)] + "'");
            rec.salary_point = static_cast<int>(sp);
            auto em = parse_employment_mode(row[static_cast<std::size_t>(cm)]);
            if (!em) throw MalformedRow(line, "unknown employment_mode '" +
                                                  row[static_cast<std::size_t>(cm)] + "'");
            rec.employment_mode = *em;
            auto tm = parse_contract_terms(row[static_cast<std::size_t>(ct)]);
            if (!tm) throw MalformedRow(line, "unknown terms '" +
                                                  row[static_cast<std::size_t>(ct)] + "'");
            rec.terms = *tm;
            auto fin = parse_financing(row[static_cast<std::size_t>(cfin)]);
            if (!fin) throw MalformedRow(line, "unknown financing '" +
                                                   row[static_cast<std::size_t>(cfin)] + "'");
            rec.financing = *fin;
            row.push_back(to_string(classify_staff_record(rec)));
        }
        BundleWriter bundle(out_dir);
        bundle.write_text("classified.csv", render(t));
        finish(bundle, {{"command", "classify"}, {"input", classify_input}});
        std::cout << "classified " << t.rows.size() << " records\n";
    });

    // ---- vcr ---------------------------------------------------------------
    auto* c_vcr = app.add_subcommand(
        "vcr", "per-cell appointment rates and group means");
    std::string vcr_panel, vcr_group = "EAC", vcr_insts, vcr_years;
    c_vcr->add_option("--panel", vcr_panel, "panel CSV file")->required();
    c_vcr->add_option("--group", vcr_group, "staff group (EAC or EAR)");
    c_vcr->add_option("--institutions", vcr_insts,
                      "comma list (default: all institutions)");
    c_vcr->add_option("--years", vcr_years, "inclusive range first-last (default: all)");
    c_vcr->callback([&] {
        const PanelDataset data = load_panel(vcr_panel);
        const StaffGroup group = parse_group_flag(vcr_group);
        std::vector<std::string> institutions;
        if (vcr_insts.empty()) institutions = data.institutions;
        else for (auto& s : split(vcr_insts, ',')) institutions.push_back(trim(s));
        std::vector<AcademicYear> years;
        if (vcr_years.empty()) {
            years = data.years;
        } else {
            const auto parts = split(vcr_years, '-');
            long long lo, hi;
            if (parts.size() != 2 || !parse_long(parts[0], lo) || !parse_long(parts[1], hi))
                throw UsageError("--years wants first-last, got '" + vcr_years + "'");
            for (long long y = lo; y <= hi; ++y)
                years.push_back(AcademicYear{static_cast<int>(y)});
        }
        Table rates;
        rates.columns = {"institution", "year", "rate"};
        for (const auto& inst : institutions)
            for (const auto& year : years)
                rates.rows.push_back(
                    {inst, std::to_string(year.start_year),
                     format_double(job_creation_rate(data.at(inst, year, group)))});
        const double mean = group_mean_rate(data, group, institutions, years);
        Table means;
        means.columns = {"group", "institutions", "years", "mean_rate"};
        means.rows.push_back({to_string(group), std::to_string(institutions.size()),
                              std::to_string(years.size()), format_double(mean)});
        BundleWriter bundle(out_dir);
        bundle.write_text("rates.csv", render(rates));
        bundle.write_text("means.csv", render(means));
        finish(bundle, {{"command", "vcr"}, {"panel", vcr_panel}});
        std::cout << "mean " << to_string(group) << " rate: " << format_double(mean)
                  << "\n";
    });

    // ---- proportionality ---------------------------------------------------
    auto* c_prop = app.add_subcommand(
        "proportionality", "closed-form vacancy-rate uplift ladder");
    QueueParameters qp;
    double band_low = 0.02, band_high = 0.04;
    std::string convention = "career";
    c_prop->add_option("--appointment-age", qp.appointment_age, "mean appointment age")
        ->capture_default_str();
    c_prop->add_option("--retirement-age", qp.retirement_age, "mandatory age")
        ->capture_default_str();
    c_prop->add_option("--extension", qp.mean_extension, "mean extra years absent "
                                                         "the mandate")
        ->capture_default_str();
    c_prop->add_option("--other-share", qp.other_cause_share,
                       "share of vacancies the mandate cannot affect")
        ->capture_default_str();
    c_prop->add_option("--voluntary-share", qp.voluntary_share,
                       "share of retained staff leaving anyway")
        ->capture_default_str();
    c_prop->add_option("--band-low", band_low, "proportionality band floor")
        ->capture_default_str();
    c_prop->add_option("--band-high", band_high, "proportionality band ceiling")
        ->capture_default_str();
    c_prop->add_option("--convention", convention,
                       "uplift denominator: career or extended");
    c_prop->callback([&] {
        UpliftConvention conv;
        if (convention == "career") conv = UpliftConvention::extension_over_career;
        else if (convention == "extended")
            conv = UpliftConvention::extension_over_extended_career;
        else throw UsageError("unknown convention '" + convention + "'");
        const ProportionalityResult r = vcr_uplift(qp, conv);
        const BandVerdict verdict = proportionality_verdict(r.net_uplift, band_low, band_high);
        const char* verdict_name = verdict == BandVerdict::below   ? "below"
                                   : verdict == BandVerdict::within ? "within"
                                                                    : "above";
        Table t;
        t.columns = {"career_years", "gross", "after_other", "net", "band_low",
                     "band_high", "verdict"};
        t.rows.push_back({format_double(r.career_length), format_double(r.gross_uplift),
                          format_double(r.after_other_causes), format_double(r.net_uplift),
                          format_double(band_low), format_double(band_high), verdict_name});
        BundleWriter bundle(out_dir);
        bundle.write_text("proportionality.csv", render(t));
        finish(bundle, {{"command", "proportionality"}});
        std::cout << "gross " << format_double(r.gross_uplift) << ", net "
                  << format_double(r.net_uplift) << " (" << verdict_name << " band)\n";
    });

    // ---- simulate ----------------------------------------------------------
    auto* c_sim = app.add_subcommand(
        "simulate", "run the cohort model and write the yearly trace");
    std::string sim_scenario, sim_start;
    int sim_years = 60;
    bool sim_svg = false;
    c_sim->add_option("--scenario", sim_scenario, "scenario file")->required();
    c_sim->add_option("--start-scenario", sim_start,
                      "initialize from this scenario's standing workforce");
    c_sim->add_option("--years", sim_years, "years to simulate")->capture_default_str();
    c_sim->add_flag("--svg", sim_svg, "also write trace chart");
    c_sim->callback([&] {
        const PolicyScenario scenario = load_scenario(sim_scenario);
        const CohortState start = sim_start.empty()
                                      ? initialize_uniform(scenario)
                                      : initialize_uniform(load_scenario(sim_start));
        const SimulationTrace trace = run(scenario, sim_years, start);
        Table t;
        t.columns = {"year", "headcount", "hires", "hire_rate", "mandatory_exits",
                     "voluntary_exits", "attrition_exits", "expected_residence"};
        for (const auto& y : trace.years)
            t.rows.push_back({std::to_string(y.year_index), format_double(y.headcount),
                              format_double(y.hires), format_double(y.hire_rate),
                              format_double(y.mandatory_exits),
                              format_double(y.voluntary_exits),
                              format_double(y.attrition_exits),
                              format_double(y.expected_residence)});
        const int window = std::min(recommended_window(scenario), sim_years);
        const SteadyStateSummary steady = summarize_steady_state(trace, window);
        Table s;
        s.columns = {"window_years", "vacancy_rate", "mean_headcount", "mean_hires",
                     "expected_residence", "littles_residual"};
        s.rows.push_back({std::to_string(steady.window_years),
                          format_double(steady.vacancy_rate),
                          format_double(steady.mean_headcount),
                          format_double(steady.mean_hires),
                          format_double(steady.expected_residence),
                          format_double(steady.littles_residual)});
        BundleWriter bundle(out_dir);
        bundle.write_text("trace.csv", render(t));
        bundle.write_text("steady_state.csv", render(s));
        if (sim_svg) {
            ChartSpec chart;
            chart.title = "Cohort simulation";
            chart.x_label = "year";
            chart.y_label = "per year";
            ChartSeries hires{"hires", {}, {}, "#1f6f8b"};
            ChartSeries exits{"total exits", {}, {}, "#c05d3b"};
            for (const auto& y : trace.years) {
                hires.x.push_back(y.year_index);
                hires.y.push_back(y.hires);
                exits.x.push_back(y.year_index);
                exits.y.push_back(y.total_exits());
            }
            chart.series = {hires, exits};
            bundle.write_text("trace.svg", chart_string(chart));
        }
        finish(bundle, {{"command", "simulate"}, {"scenario", sim_scenario}});
        std::cout << "steady vacancy rate " << format_double(steady.vacancy_rate)
                  << " over trailing " << steady.window_years << " years\n";
    });

    // ---- compare -----------------------------------------------------------
    auto* c_cmp = app.add_subcommand(
        "compare", "baseline-vs-alternative policy comparison from a common start");
    std::string cmp_a, cmp_b;
    int cmp_years = 60;
    c_cmp->add_option("--baseline", cmp_a, "baseline scenario file")->required();
    c_cmp->add_option("--alternative", cmp_b, "alternative scenario file")->required();
    c_cmp->add_option("--years", cmp_years, "years to simulate")->capture_default_str();
    c_cmp->callback([&] {
        const ScenarioComparison cmp =
            compare_scenarios(load_scenario(cmp_a), load_scenario(cmp_b), cmp_years);
        Table t;
        t.columns = {"year", "baseline_hires", "alternative_hires", "difference"};
        for (std::size_t i = 0; i < cmp.baseline_hires.size(); ++i)
            t.rows.push_back({std::to_string(i + 1), format_double(cmp.baseline_hires[i]),
                              format_double(cmp.alternative_hires[i]),
                              format_double(cmp.hire_difference[i])});
        Table s;
        s.columns = {"decade", "mean_difference"};
        for (std::size_t d = 0; d < cmp.decade_mean_difference.size(); ++d)
            s.rows.push_back({std::to_string(d + 1),
                              format_double(cmp.decade_mean_difference[d])});
        s.rows.push_back({"steady_state", format_double(cmp.steady_state_difference)});
        BundleWriter bundle(out_dir);
        bundle.write_text("comparison.csv", render(t));
        bundle.write_text("comparison_summary.csv", render(s));
        finish(bundle, {{"command", "compare"}, {"baseline", cmp_a},
                        {"alternative", cmp_b}});
        std::cout << "steady-state hire difference "
                  << format_double(cmp.steady_state_difference) << " per year\n";
    });

    // ---- did ---------------------------------------------------------------
    auto* c_did = app.add_subcommand(
        "did", "two-way fixed-effects policy-effect estimate");
    DidArgs did_args;
    std::string did_adjust = "none", did_se = "cluster";
    c_did->add_option("--adjust", did_adjust, "none, detrend, or student");
    c_did->add_option("--se", did_se, "cluster, hc, or iid");
    did_args.add_to(c_did);
    c_did->callback([&] {
        const PanelDataset data = load_panel(did_args.panel_path);
        const DesignSpec spec = did_args.spec();
        RatePanel panel = RatePanel::from_panel(data, spec.group);
        std::string note;
        if (did_adjust == "detrend") {
            DetrendResult d = detrend_pre(panel, spec);
            panel = d.adjusted;
            note = d.warning;
        } else if (did_adjust == "student") {
            StudentAdjustResult s = student_adjust(panel, spec, false);
            panel = s.adjusted;
            note = s.warning;
        } else if (did_adjust != "none") {
            throw UsageError("unknown adjustment '" + did_adjust + "'");
        }
        const CovarianceKind se_kind = parse_se_flag(did_se);
        const TwfeDidFit fit = fit_twfe_did(panel, spec, se_kind);
        const double means = did_of_means(panel, spec);
        Table t;
        t.columns = {"series", "delta", "standard_error", "p_normal", "did_of_means"};
        t.rows.push_back({did_adjust, format_double(fit.delta),
                          format_double(fit.standard_error), format_double(fit.p_value),
                          format_double(means)});
        if (!note.empty()) t.comments.push_back(note);
        BundleWriter bundle(out_dir);
        bundle.write_text("did.csv", render(t));
        finish(bundle, {{"command", "did"}, {"panel", did_args.panel_path},
                        {"adjust", did_adjust}, {"se", did_se}});
        std::cout << "delta " << format_double(fit.delta) << " (se "
                  << format_double(fit.standard_error) << ", p "
                  << format_double(fit.p_value) << ")\n";
    });

    // ---- event-study -------------------------------------------------------
    auto* c_event = app.add_subcommand(
        "event-study", "per-year treated-vs-donors gaps with bands");
    DidArgs event_args;
    std::string event_pivot = "base";
    std::string event_se = "cluster";
    bool event_svg = false;
    c_event->add_option("--pivot", event_pivot, "base or pre-mean");
    c_event->add_option("--se", event_se, "cluster, hc, or iid");
    c_event->add_flag("--svg", event_svg, "also write the chart");
    event_args.add_to(c_event);
    c_event->callback([&] {
        const PanelDataset data = load_panel(event_args.panel_path);
        const DesignSpec spec = event_args.spec();
        EventPivot pivot;
        if (event_pivot == "base") pivot = EventPivot::base_year;
        else if (event_pivot == "pre-mean") pivot = EventPivot::pre_period_mean;
        else throw UsageError("unknown pivot '" + event_pivot + "'");
        const EventStudySeries series = event_study(
            RatePanel::from_panel(data, spec.group), spec, pivot, parse_se_flag(event_se));
        Table t;
        t.columns = {"year", "estimate", "standard_error", "lower95", "upper95"};
        for (const auto& p : series.points)
            t.rows.push_back({std::to_string(p.year), format_double(p.estimate),
                              format_double(p.standard_error), format_double(p.lower),
                              format_double(p.upper)});
        t.comments.push_back(series.warning);
        BundleWriter bundle(out_dir);
        bundle.write_text("event_study.csv", render(t));
        if (event_svg) {
            ChartSpec chart;
            chart.title = "Treated-vs-donors gap by year";
            chart.x_label = "year";
            chart.y_label = "gap";
            ChartSeries est{"estimate", {}, {}, "#1f6f8b"};
            ChartBand band;
            for (const auto& p : series.points) {
                est.x.push_back(p.year);
                est.y.push_back(p.estimate);
                band.x.push_back(p.year);
                band.lower.push_back(p.lower);
                band.upper.push_back(p.upper);
            }
            chart.series = {est};
            chart.band = band;
            chart.horizontal_rule = 0.0;
            chart.vertical_rule = static_cast<double>(spec.policy_year);
            bundle.write_text("event_study.svg", chart_string(chart));
        }
        finish(bundle, {{"command", "event-study"}, {"panel", event_args.panel_path},
                        {"pivot", event_pivot}});
        std::cout << "event study: " << series.points.size() << " points, pivot "
                  << series.base_year << "\n";
    });

    // ---- bootstrap ---------------------------------------------------------
    auto* c_boot = app.add_subcommand(
        "bootstrap", "wild cluster bootstrap p-value for the policy effect");
    DidArgs boot_args;
    int boot_reps = 999;
    std::string boot_cluster = "unit";
    c_boot->add_option("--replications", boot_reps, "bootstrap replications (>= 99)")
        ->capture_default_str();
    c_boot->add_option("--cluster", boot_cluster, "unit or observation");
    boot_args.add_to(c_boot);
    c_boot->callback([&] {
        const PanelDataset data = load_panel(boot_args.panel_path);
        const DesignSpec spec = boot_args.spec();
        BootstrapClustering clustering;
        if (boot_cluster == "unit") clustering = BootstrapClustering::by_unit;
        else if (boot_cluster == "observation")
            clustering = BootstrapClustering::by_observation;
        else throw UsageError("unknown clustering '" + boot_cluster + "'");
        const BootstrapResult r = wild_cluster_bootstrap(
            RatePanel::from_panel(data, spec.group), spec, boot_reps, seed, clustering);
        Table t;
        t.columns = {"replicate", "delta"};
        for (std::size_t i = 0; i < r.replicate_deltas.size(); ++i)
            t.rows.push_back({std::to_string(i + 1), format_double(r.replicate_deltas[i])});
        t.comments.push_back("observed delta " + format_double(r.observed_delta) +
                             "; p " + format_double(r.p_value) + "; seed " +
                             std::to_string(r.seed));
        BundleWriter bundle(out_dir);
        bundle.write_text("bootstrap.csv", render(t));
        finish(bundle, {{"command", "bootstrap"}, {"panel", boot_args.panel_path},
                        {"replications", std::to_string(boot_reps)},
                        {"cluster", boot_cluster}});
        std::cout << "observed delta " << format_double(r.observed_delta) << ", p "
                  << format_double(r.p_value) << " (" << boot_reps << " replications)\n";
    });

    // ---- synth -------------------------------------------------------------
    auto* c_synth = app.add_subcommand(
        "synth", "synthetic-control donor weights and gap series");
    DidArgs synth_args;
    synth_args.add_to(c_synth);
    c_synth->callback([&] {
        const PanelDataset data = load_panel(synth_args.panel_path);
        const DesignSpec spec = synth_args.spec();
        const SyntheticControlResult r =
            synthetic_control(RatePanel::from_panel(data, spec.group), spec);
        Table w;
        w.columns = {"donor", "weight"};
        for (std::size_t i = 0; i < r.donors.size(); ++i)
            w.rows.push_back({r.donors[i],
                              format_double(r.weights(static_cast<Eigen::Index>(i)))});
        w.comments.push_back("pre-window rmse " + format_double(r.pre_fit_rmse) +
                             "; iterations " + std::to_string(r.iterations));
        Table g;
        g.columns = {"year", "gap"};
        for (std::size_t i = 0; i < r.gap_series.size(); ++i)
            g.rows.push_back({std::to_string(r.years[i]), format_double(r.gap_series[i])});
        BundleWriter bundle(out_dir);
        bundle.write_text("synth_weights.csv", render(w));
        bundle.write_text("synth_gaps.csv", render(g));
        finish(bundle, {{"command", "synth"}, {"panel", synth_args.panel_path}});
        std::cout << "pre-window rmse " << format_double(r.pre_fit_rmse) << "\n";
    });

    // ---- report ------------------------------------------------------------
    auto* c_report = app.add_subcommand(
        "report", "full reproduction pipeline into one bundle");
    std::string report_panel, report_treated;
    int report_policy = 2012, report_reps = 999;
    c_report->add_option("--panel", report_panel,
                         "panel CSV (default: built-in calibrated fixture)");
    c_report->add_option("--treated", report_treated, "treated unit name");
    c_report->add_option("--policy-year", report_policy, "first treated year")
        ->capture_default_str();
    c_report->add_option("--replications", report_reps, "bootstrap replications")
        ->capture_default_str();
    c_report->callback([&] {
        ReportOptions opt;
        opt.out_dir = out_dir;
        opt.seed = seed;
        opt.bootstrap_replications = report_reps;
        if (!report_panel.empty()) opt.panel_path = report_panel;
        opt.treated_unit = report_treated;
        opt.policy_year = report_policy;
        const ReportResult r = emit_reproduction_report(opt);
        std::cout << "report: " << r.files.size() << " files in " << r.out_dir
                  << "; treated mean " << format_double(r.numbers.treated_mean)
                  << ", donor mean " << format_double(r.numbers.donor_mean) << "\n";
    });

    // Let the shared --out/--seed/--config flags be written after the
    // subcommand name, where they read naturally.
    for (CLI::App* sub : app.get_subcommands([](const CLI::App*) { return true; }))
        sub->fallthrough();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    } catch (const UsageError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const DataError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    } catch (const NumericalError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 4;
    } catch (const std::exception& e) {
        std::cerr << "error: internal: " << e.what() << "\n";
        return 4;
    }
    return 0;
}
