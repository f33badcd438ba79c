#include "wft/report.hpp"

#include "wft/cohort.hpp"
#include "wft/csv.hpp"
#include "wft/did.hpp"
#include "wft/fixtures.hpp"
#include "wft/proportionality.hpp"
#include "wft/rng.hpp"
#include "wft/svg.hpp"

#include <json.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace wft {

namespace fs = std::filesystem;

std::string digest_hex(const std::string& content) {
    const std::uint64_t h = fnv1a64(content.data(), content.size());
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

BundleWriter::BundleWriter(std::string out_dir) : out_dir_(std::move(out_dir)) {
    fs::create_directories(out_dir_);
}

void BundleWriter::write_text(const std::string& name, const std::string& content) {
    const fs::path path = fs::path(out_dir_) / name;
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError("cannot write " + path.string());
    out << content;
    if (!out) throw DataError("failed writing " + path.string());
    entries_.push_back(ManifestEntry{name, digest_hex(content),
                                     static_cast<std::uint64_t>(content.size())});
}

std::vector<ManifestEntry> BundleWriter::finish(
    const std::map<std::string, std::string>& config_echo, std::uint64_t seed) {
    nlohmann::json manifest;
    manifest["version"] = kToolkitVersion;
    manifest["seed"] = seed;
    nlohmann::json config = nlohmann::json::object();
    for (const auto& [key, value] : config_echo) config[key] = value;
    manifest["config"] = config;
    nlohmann::json files = nlohmann::json::array();
    for (const auto& e : entries_) {
        files.push_back({{"name", e.name}, {"digest", e.digest}, {"bytes", e.bytes}});
    }
    manifest["files"] = files;

    const fs::path path = fs::path(out_dir_) / "manifest.json";
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError("cannot write " + path.string());
    out << manifest.dump(2) << "\n";
    return entries_;
}

// ---- reproduction report --------------------------------------------------

namespace {

std::string render_table(const Table& t) {
    std::ostringstream os;
    write_table(os, t);
    return os.str();
}

const char* verdict_name(BandVerdict v) {
    switch (v) {
        case BandVerdict::below: return "below";
        case BandVerdict::within: return "within";
        case BandVerdict::above: return "above";
    }
    return "?";
}

Table ladder_table() {
    Table t;
    t.columns = {"label",        "appointment_age", "retirement_age", "extension",
                 "other_share",  "voluntary_share", "career_years",   "gross",
                 "after_other",  "net",             "band_verdict"};
    struct Row {
        const char* label;
        QueueParameters q;
    };
    const Row rows[] = {
        {"mandate67_gross_only", {40, 67, 3, 0.0, 0.0}},
        {"mandate67_after_other", {40, 67, 3, 0.5, 0.0}},
        {"mandate67_net", {40, 67, 3, 0.5, 0.5}},
        {"mandate69_net", {40, 69, 3, 0.5, 0.5}},
        {"mandate69_short_extension", {40, 69, 1, 0.5, 0.5}},
    };
    for (const auto& row : rows) {
        const ProportionalityResult r = vcr_uplift(row.q);
        t.rows.push_back({row.label, format_double(row.q.appointment_age),
                          format_double(row.q.retirement_age),
                          format_double(row.q.mean_extension),
                          format_double(row.q.other_cause_share),
                          format_double(row.q.voluntary_share),
                          format_double(r.career_length), format_double(r.gross_uplift),
                          format_double(r.after_other_causes), format_double(r.net_uplift),
                          verdict_name(proportionality_verdict(r.net_uplift))});
    }
    return t;
}

std::string ladder_summary() {
    std::ostringstream os;
    const auto r67 = vcr_uplift(QueueParameters{40, 67, 3, 0.5, 0.5});
    const auto r69 = vcr_uplift(QueueParameters{40, 69, 3, 0.5, 0.5});
    const auto r69s = vcr_uplift(QueueParameters{40, 69, 1, 0.5, 0.5});
    const auto ladder69s = sequential_percent_ladder(QueueParameters{40, 69, 1, 0.5, 0.5});
    os << "Vacancy-creation uplift from mandatory retirement\n";
    os << "=================================================\n\n";
    os << "Appointment at 40, retirement mandated at 67, mean extension 3 years:\n";
    os << "  career 27y; gross " << format_fixed(100 * r67.gross_uplift, 2)
       << "%; after other-cause discount " << format_fixed(100 * r67.after_other_causes, 2)
       << "%; net " << format_fixed(100 * r67.net_uplift, 2) << "% ("
       << verdict_name(proportionality_verdict(r67.net_uplift))
       << " the 2-4% proportionality band).\n\n";
    os << "Mandate raised to 69 (career 29y, extension 3y):\n";
    os << "  gross " << format_fixed(100 * r69.gross_uplift, 2) << "% (exact 3/29; "
       << "rounds to 10% at whole-percent display precision, a 0.34pp rounding gap); net "
       << format_fixed(100 * r69.net_uplift, 2) << "%.\n\n";
    os << "Mandate 69 with a 1-year effective extension:\n";
    os << "  exact net " << format_fixed(100 * r69s.net_uplift, 2)
       << "%; whole-percent ladder convention (round the gross rung first, then halve "
          "twice) gives "
       << format_fixed(ladder69s.net_pct, 2) << "%.\n";
    return os.str();
}

struct CohortFigures {
    SteadyStateSummary mandate;
    SteadyStateSummary abolished;
    ScenarioComparison transition;
    std::vector<double> raised_mandatory_exits;
    SimulationTrace mandate_trace;
    SimulationTrace abolished_trace;
};

CohortFigures cohort_figures() {
    CohortFigures f;
    const PolicyScenario mandate = make_mandate_scenario();
    const PolicyScenario abolished = make_abolished_scenario();
    const PolicyScenario raised = make_raised_mandate_scenario();

    const CohortState start = initialize_uniform(mandate);
    f.mandate_trace = run(mandate, 60, start);
    f.abolished_trace = run(abolished, 60, start);
    f.mandate = summarize_steady_state(f.mandate_trace, recommended_window(mandate));
    f.abolished = summarize_steady_state(f.abolished_trace, recommended_window(abolished));
    f.transition = compare_scenarios(mandate, abolished, 60);
    const SimulationTrace raised_trace = run(raised, 29, start);
    for (const auto& year : raised_trace.years)
        f.raised_mandatory_exits.push_back(year.mandatory_exits);
    return f;
}

} // namespace

ReportResult emit_reproduction_report(const ReportOptions& options) {
    BundleWriter bundle(options.out_dir);
    ReportNumbers num;

    // ---- panel ------------------------------------------------------------
    PanelDataset data;
    if (options.panel_path) {
        std::ifstream in(*options.panel_path, std::ios::binary);
        if (!in) throw DataError("cannot open panel " + *options.panel_path);
        data = ingest_panel(in);
    } else {
        data = make_calibrated_panel();
    }
    const std::string treated =
        options.treated_unit.empty() ? std::string(kFixtureTreatedUnit)
                                     : options.treated_unit;
    DesignSpec spec;
    spec.treated_unit = treated;
    spec.policy_year = options.policy_year;
    spec.base_year = options.policy_year;
    spec.group = data.groups.front();

    const RatePanel panel = RatePanel::from_panel(data, spec.group);

    // ---- group means -------------------------------------------------------
    std::vector<std::string> donors;
    for (const auto& unit : panel.units)
        if (unit != treated) donors.push_back(unit);
    std::vector<AcademicYear> all_years;
    for (int y : panel.years) all_years.push_back(AcademicYear{y});
    num.treated_mean = group_mean_rate(data, spec.group, {treated}, all_years);
    num.donor_mean = group_mean_rate(data, spec.group, donors, all_years);
    {
        Table t;
        t.columns = {"selection", "mean_rate", "units", "years"};
        t.rows.push_back({"treated", format_double(num.treated_mean), "1",
                          std::to_string(all_years.size())});
        t.rows.push_back({"donors", format_double(num.donor_mean),
                          std::to_string(donors.size()), std::to_string(all_years.size())});
        bundle.write_text("group_means.csv", render_table(t));
    }

    // ---- closed-form ladder ------------------------------------------------
    bundle.write_text("ladder.csv", render_table(ladder_table()));
    bundle.write_text("ladder_summary.txt", ladder_summary());

    // ---- simulator vs closed form -----------------------------------------
    const CohortFigures cohort = cohort_figures();
    num.steady_vcr_mandate = cohort.mandate.vacancy_rate;
    num.steady_vcr_abolished = cohort.abolished.vacancy_rate;
    num.analytic_gross_uplift = vcr_uplift(QueueParameters{40, 67, 3, 0.0, 0.0}).gross_uplift;
    num.littles_residual_mandate = cohort.mandate.littles_residual;
    num.littles_residual_abolished = cohort.abolished.littles_residual;
    {
        Table t;
        t.columns = {"scenario", "steady_vacancy_rate", "closed_form_rate", "abs_gap",
                     "littles_residual", "window_years"};
        const double closed_m = 1.0 / 27.0;
        const double closed_a = 1.0 / 30.0;
        t.rows.push_back({"mandate67", format_double(num.steady_vcr_mandate),
                          format_double(closed_m),
                          format_double(std::abs(num.steady_vcr_mandate - closed_m)),
                          format_double(num.littles_residual_mandate),
                          std::to_string(cohort.mandate.window_years)});
        t.rows.push_back({"abolished_stay3", format_double(num.steady_vcr_abolished),
                          format_double(closed_a),
                          format_double(std::abs(num.steady_vcr_abolished - closed_a)),
                          format_double(num.littles_residual_abolished),
                          std::to_string(cohort.abolished.window_years)});
        const double sim_uplift =
            num.steady_vcr_mandate / num.steady_vcr_abolished - 1.0;
        t.rows.push_back({"relative_uplift", format_double(sim_uplift),
                          format_double(num.analytic_gross_uplift),
                          format_double(std::abs(sim_uplift - num.analytic_gross_uplift)),
                          "", ""});
        bundle.write_text("steady_state.csv", render_table(t));
    }
    {
        Table t;
        t.columns = {"year", "baseline_hires", "alternative_hires", "difference"};
        for (std::size_t i = 0; i < cohort.transition.baseline_hires.size(); ++i)
            t.rows.push_back({std::to_string(i + 1),
                              format_double(cohort.transition.baseline_hires[i]),
                              format_double(cohort.transition.alternative_hires[i]),
                              format_double(cohort.transition.hire_difference[i])});
        bundle.write_text("transition_abolition.csv", render_table(t));
    }
    {
        Table t;
        t.columns = {"year", "mandatory_exits"};
        for (std::size_t i = 0; i < cohort.raised_mandatory_exits.size(); ++i)
            t.rows.push_back({std::to_string(i + 1),
                              format_double(cohort.raised_mandatory_exits[i])});
        bundle.write_text("transition_raised_mandate.csv", render_table(t));
    }
    {
        ChartSpec chart;
        chart.title = "Hires per year: mandate kept vs abolished (+3y residence)";
        chart.x_label = "year after policy decision";
        chart.y_label = "hires";
        ChartSeries base{"mandate kept", {}, {}, "#1f6f8b"};
        ChartSeries alt{"mandate abolished", {}, {}, "#c05d3b"};
        for (std::size_t i = 0; i < cohort.transition.baseline_hires.size(); ++i) {
            base.x.push_back(static_cast<double>(i + 1));
            base.y.push_back(cohort.transition.baseline_hires[i]);
            alt.x.push_back(static_cast<double>(i + 1));
            alt.y.push_back(cohort.transition.alternative_hires[i]);
        }
        chart.series = {base, alt};
        std::ostringstream os;
        write_line_chart(os, chart);
        bundle.write_text("workforce_chart.svg", os.str());
    }

    // ---- difference-in-differences table ----------------------------------
    const DetrendResult detrended = detrend_pre(panel, spec);
    const StudentAdjustResult student = student_adjust(panel, spec, false);
    {
        Table t;
        t.columns = {"series",   "delta",     "se_iid",   "se_hc",
                     "se_cluster", "p_normal_cluster", "p_bootstrap"};
        struct Row {
            const char* label;
            const RatePanel* p;
        };
        const Row rows[] = {{"raw", &panel},
                            {"detrended", &detrended.adjusted},
                            {"student_adjusted", &student.adjusted}};
        for (const auto& row : rows) {
            const TwfeDidFit iid = fit_twfe_did(*row.p, spec, CovarianceKind::iid);
            const TwfeDidFit hc = fit_twfe_did(*row.p, spec, CovarianceKind::hc_robust);
            const TwfeDidFit cl =
                fit_twfe_did(*row.p, spec, CovarianceKind::cluster_by_unit);
            const BootstrapResult boot = wild_cluster_bootstrap(
                *row.p, spec, options.bootstrap_replications, options.seed);
            t.rows.push_back({row.label, format_double(cl.delta),
                              format_double(iid.standard_error),
                              format_double(hc.standard_error),
                              format_double(cl.standard_error),
                              format_double(cl.p_value), format_double(boot.p_value)});
            if (std::string(row.label) == "raw") {
                num.delta_raw = cl.delta;
                num.se_cluster_raw = cl.standard_error;
                num.p_normal_cluster_raw = cl.p_value;
                num.p_normal_iid_raw = iid.p_value;
                num.p_bootstrap_raw = boot.p_value;
            } else if (std::string(row.label) == "detrended") {
                num.delta_detrended = cl.delta;
            } else {
                num.delta_student_adjusted = cl.delta;
            }
        }
        t.comments.push_back(
            "adjusted rows reuse first-stage fits as if exact; their intervals "
            "understate uncertainty");
        bundle.write_text("did_table.csv", render_table(t));
    }

    // ---- event study -------------------------------------------------------
    const EventStudySeries events =
        event_study(panel, spec, EventPivot::base_year, CovarianceKind::cluster_by_unit);
    {
        Table t;
        t.columns = {"year", "estimate", "standard_error", "lower95", "upper95"};
        for (const auto& p : events.points)
            t.rows.push_back({std::to_string(p.year), format_double(p.estimate),
                              format_double(p.standard_error), format_double(p.lower),
                              format_double(p.upper)});
        t.comments.push_back(events.warning);
        bundle.write_text("event_study.csv", render_table(t));

        ChartSpec chart;
        chart.title = "Treated-vs-donors gap by year (pivot " +
                      std::to_string(events.base_year) + ")";
        chart.x_label = "academic year";
        chart.y_label = "gap in appointment rate";
        ChartSeries est{"estimate", {}, {}, "#1f6f8b"};
        ChartBand band;
        for (const auto& p : events.points) {
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
        std::ostringstream os;
        write_line_chart(os, chart);
        bundle.write_text("event_study.svg", os.str());
    }

    // ---- bootstrap replicates ---------------------------------------------
    const BootstrapResult boot = wild_cluster_bootstrap(
        panel, spec, options.bootstrap_replications, options.seed);
    {
        Table t;
        t.columns = {"replicate", "delta"};
        for (std::size_t i = 0; i < boot.replicate_deltas.size(); ++i)
            t.rows.push_back({std::to_string(i + 1),
                              format_double(boot.replicate_deltas[i])});
        t.comments.push_back("observed delta " + format_double(boot.observed_delta) +
                             "; p " + format_double(boot.p_value) + "; seed " +
                             std::to_string(boot.seed));
        bundle.write_text("bootstrap_replicates.csv", render_table(t));
    }

    // ---- synthetic control -------------------------------------------------
    const SyntheticControlResult synth = synthetic_control(panel, spec);
    num.synth_pre_rmse = synth.pre_fit_rmse;
    {
        Table t;
        t.columns = {"donor", "weight"};
        for (std::size_t i = 0; i < synth.donors.size(); ++i)
            t.rows.push_back({synth.donors[i],
                              format_double(synth.weights(static_cast<Eigen::Index>(i)))});
        t.comments.push_back("pre-window rmse " + format_double(synth.pre_fit_rmse) +
                             "; iterations " + std::to_string(synth.iterations));
        bundle.write_text("synth_weights.csv", render_table(t));
    }
    {
        Table t;
        t.columns = {"year", "gap"};
        for (std::size_t i = 0; i < synth.gap_series.size(); ++i)
            t.rows.push_back({std::to_string(synth.years[i]),
                              format_double(synth.gap_series[i])});
        bundle.write_text("synth_gaps.csv", render_table(t));
    }

    // ---- summary -----------------------------------------------------------
    {
        std::ostringstream os;
        os << "Workforce toolkit reproduction report\n";
        os << "=====================================\n\n";
        os << "Panel: " << (options.panel_path ? *options.panel_path : "built-in calibrated fixture")
           << " (" << panel.units.size() << " units, " << panel.years.size()
           << " years, treated " << treated << ", policy year " << spec.policy_year
           << ")\n\n";
        os << "Group mean appointment rates: treated " << format_double(num.treated_mean)
           << ", donors " << format_double(num.donor_mean) << "\n\n";
        os << "Steady-state vacancy rates: mandate " << format_double(num.steady_vcr_mandate)
           << " (closed form 1/27), abolished " << format_double(num.steady_vcr_abolished)
           << " (closed form 1/30); relative uplift "
           << format_double(num.steady_vcr_mandate / num.steady_vcr_abolished - 1.0)
           << " vs closed-form gross " << format_double(num.analytic_gross_uplift) << "\n";
        os << "Conservation residuals: mandate "
           << format_double(num.littles_residual_mandate) << ", abolished "
           << format_double(num.littles_residual_abolished) << "\n\n";
        os << "Policy-effect estimates (treated-post coefficient):\n";
        os << "  raw " << format_double(num.delta_raw) << " (cluster se "
           << format_double(num.se_cluster_raw) << ", normal-cluster p "
           << format_double(num.p_normal_cluster_raw) << ", per-observation p "
           << format_double(num.p_normal_iid_raw) << ", wild-cluster bootstrap p "
           << format_double(num.p_bootstrap_raw) << ")\n";
        os << "  detrended " << format_double(num.delta_detrended)
           << "  student-adjusted " << format_double(num.delta_student_adjusted) << "\n";
        os << "  (adjusted rows treat first-stage fits as known; intervals understate "
              "uncertainty)\n\n";
        os << "Synthetic control pre-window rmse: " << format_double(num.synth_pre_rmse)
           << "\n";
        bundle.write_text("summary.txt", os.str());
    }

    std::map<std::string, std::string> echo = {
        {"out_dir", options.out_dir},
        {"seed", std::to_string(options.seed)},
        {"bootstrap_replications", std::to_string(options.bootstrap_replications)},
        {"panel", options.panel_path ? *options.panel_path : "builtin:calibrated"},
        {"treated_unit", treated},
        {"policy_year", std::to_string(options.policy_year)},
    };

    ReportResult result;
    result.numbers = num;
    result.files = bundle.finish(echo, options.seed);
    result.out_dir = options.out_dir;
    return result;
}

} // namespace wft
