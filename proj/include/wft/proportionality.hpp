#pragma once

// Closed-form steady-state queue arithmetic: how much a mandatory retirement
// age raises the vacancy-creation rate relative to later/no retirement, and
// whether that uplift lands inside a policy-relevant band.

#include "wft/errors.hpp"

namespace wft {

struct QueueParameters {
    double appointment_age = 40.0;    // mean age at appointment to an established post
    double retirement_age = 67.0;     // mandatory retirement age
    double mean_extension = 3.0;      // extra years worked absent the mandate
    double other_cause_share = 0.0;   // share of vacancies from exits the mandate can't affect
    double voluntary_share = 0.0;     // share of would-be-retained staff leaving anyway
};

/// Denominator convention for the uplift ratio.
enum class UpliftConvention {
    /// extension / (retirement_age - appointment_age): uplift relative to the
    /// mandated career length (the convention used throughout reporting).
    extension_over_career,
    /// extension / (career + extension): uplift as a share of the extended
    /// career, i.e. relative to the no-mandate steady state.
    extension_over_extended_career,
};

struct ProportionalityResult {
    double career_length = 0.0;       // retirement_age - appointment_age
    double gross_uplift = 0.0;        // before discounts
    double after_other_causes = 0.0;  // gross * (1 - other_cause_share)
    double net_uplift = 0.0;          // after * (1 - voluntary_share)
};

/// Compute the uplift ladder.  Throws InvalidAges when retirement_age <=
/// appointment_age; DataError when shares fall outside [0,1] or the
/// extension is negative.
ProportionalityResult vcr_uplift(const QueueParameters& params,
                                 UpliftConvention convention =
                                     UpliftConvention::extension_over_career);

/// The same ladder with each rung rounded to the nearest whole percent
/// before the next discount is applied — the arithmetic used when the ladder
/// is quoted in round figures ("3%, half, half -> 0.75%").  Values are in
/// percent, not fractions.
struct RoundedPercentLadder {
    double gross_pct = 0.0;
    double after_other_pct = 0.0;
    double net_pct = 0.0;
};
RoundedPercentLadder sequential_percent_ladder(const QueueParameters& params);

enum class BandVerdict { below, within, above };

/// Where the net uplift falls relative to an inclusive band (default 2%-4%).
BandVerdict proportionality_verdict(double net_uplift, double band_low = 0.02,
                                    double band_high = 0.04);

} // namespace wft
