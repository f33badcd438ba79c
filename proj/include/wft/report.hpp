#pragma once

// Report bundles: every pipeline run writes its outputs into a directory and
// closes with manifest.json recording the toolkit version, the seed, an echo
// of the effective configuration, and a content digest per file — no
// timestamps, so a rerun with the same inputs produces identical bytes.

#include "wft/panel.hpp"

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace wft {

inline constexpr const char* kToolkitVersion = "0.1.0";

struct ManifestEntry {
    std::string name;
    std::string digest;      // fnv1a-64, 16 hex digits
    std::uint64_t bytes = 0;
};

/// Collects files for one output directory, then writes manifest.json.
class BundleWriter {
public:
    explicit BundleWriter(std::string out_dir);

    /// Write a file into the bundle and record its digest.
    void write_text(const std::string& name, const std::string& content);

    /// Write manifest.json (which lists every file written so far, itself
    /// excluded) and return the entries.
    std::vector<ManifestEntry> finish(const std::map<std::string, std::string>& config_echo,
                                      std::uint64_t seed);

    const std::string& directory() const { return out_dir_; }

private:
    std::string out_dir_;
    std::vector<ManifestEntry> entries_;
};

std::string digest_hex(const std::string& content);

// ---- reproduction report --------------------------------------------------

struct ReportOptions {
    std::string out_dir = "wft_report";
    std::uint64_t seed = 42;
    int bootstrap_replications = 999;
    /// Panel to analyze; the built-in calibrated panel when unset.
    std::optional<std::string> panel_path;
    std::string treated_unit;   // default: the built-in panel's treated unit
    int policy_year = 2012;
};

/// Key figures computed while assembling the report, returned for assertion.
struct ReportNumbers {
    double treated_mean = 0.0;        // treated unit's time-mean rate
    double donor_mean = 0.0;          // donors' double mean rate
    double delta_raw = 0.0;
    double delta_detrended = 0.0;
    double delta_student_adjusted = 0.0;
    double se_cluster_raw = 0.0;
    double p_normal_cluster_raw = 0.0;
    double p_normal_iid_raw = 0.0;
    double p_bootstrap_raw = 0.0;
    double steady_vcr_mandate = 0.0;
    double steady_vcr_abolished = 0.0;
    double analytic_gross_uplift = 0.0;   // closed-form counterpart
    double littles_residual_mandate = 0.0;
    double littles_residual_abolished = 0.0;
    double synth_pre_rmse = 0.0;
};

struct ReportResult {
    ReportNumbers numbers;
    std::vector<ManifestEntry> files;
    std::string out_dir;
};

/// Run the full pipeline — closed-form ladder, simulator-vs-analytic
/// comparison, policy transition, difference-in-differences table with both
/// adjustments, event study (table + chart), bootstrap inference, synthetic
/// control — and write every artifact plus manifest.json into out_dir.
ReportResult emit_reproduction_report(const ReportOptions& options);

} // namespace wft
