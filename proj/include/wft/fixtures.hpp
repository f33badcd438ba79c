#pragma once

// Deterministic built-in datasets: a noiseless panel with a known injected
// policy effect, a calibrated panel with strong unit-level trend correlation
// (exact group means by construction), and the paired retirement-policy
// scenarios.  The same builders back the checked-in fixture files, the unit
// tests, and the reproduction report, so every consumer sees identical bytes.

#include "wft/cohort.hpp"
#include "wft/panel.hpp"

#include <cstdint>
#include <string>

namespace wft {

inline constexpr const char* kFixtureTreatedUnit = "T00";
inline constexpr int kFixturePolicyYear = 2012;
inline constexpr int kFixtureFirstYear = 2007;
inline constexpr int kFixtureLastYear = 2021;
inline constexpr double kInjectedEffect = 0.016;
inline constexpr std::uint64_t kCalibratedSeed = 0x9a1f0c3d5e7b2468ULL;

/// 23 units x 15 years, headcount 1000, counts built from integer unit
/// levels, integer year shifts, and a 16-count treated-post bump, so the
/// rate panel is exactly additive with a 0.016 treatment effect.
PanelDataset make_noiseless_panel();

/// 23 units x 15 years, headcount 1,000,000.  The treated unit averages
/// exactly 0.03 and the donor pool exactly 0.05 (double mean).  Every unit
/// carries its own linear appointment trend plus antisymmetric year noise
/// (zero-sum per unit), giving strongly cluster-correlated residuals: naive
/// per-observation inference overstates precision by far more than the
/// cluster-aware schemes.  Student loads grow at unit-specific rates.
PanelDataset make_calibrated_panel();

/// 270 posts, everyone appointed at 40, retirement mandated at 67.
PolicyScenario make_mandate_scenario();

/// Mandate raised to 69, other things equal.
PolicyScenario make_raised_mandate_scenario();

/// No mandate; staff stay three extra years and leave on reaching 70.
PolicyScenario make_abolished_scenario();

/// Write all fixture files (canonical serializations of the above) into a
/// directory: noiseless_panel.csv, calibrated_panel.csv, mandate67.scenario,
/// raised69.scenario, abolished.scenario.
std::vector<std::string> write_fixture_files(const std::string& directory);

} // namespace wft
