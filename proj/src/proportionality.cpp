#include "wft/proportionality.hpp"

#include <cmath>
#include <string>

namespace wft {

namespace {

void validate(const QueueParameters& p) {
    if (!(p.retirement_age > p.appointment_age))
        throw InvalidAges(p.appointment_age, p.retirement_age);
    if (p.mean_extension < 0)
        throw DataError("mean_extension must be nonnegative, got " +
                        std::to_string(p.mean_extension));
    if (p.other_cause_share < 0 || p.other_cause_share > 1)
        throw DataError("other_cause_share outside [0,1]: " +
                        std::to_string(p.other_cause_share));
    if (p.voluntary_share < 0 || p.voluntary_share > 1)
        throw DataError("voluntary_share outside [0,1]: " +
                        std::to_string(p.voluntary_share));
}

} // namespace

ProportionalityResult vcr_uplift(const QueueParameters& p, UpliftConvention convention) {
    validate(p);
    ProportionalityResult out;
    out.career_length = p.retirement_age - p.appointment_age;
    const double denom = convention == UpliftConvention::extension_over_career
                             ? out.career_length
                             : out.career_length + p.mean_extension;
    out.gross_uplift = p.mean_extension / denom;
    out.after_other_causes = out.gross_uplift * (1.0 - p.other_cause_share);
    out.net_uplift = out.after_other_causes * (1.0 - p.voluntary_share);
    return out;
}

RoundedPercentLadder sequential_percent_ladder(const QueueParameters& p) {
    validate(p);
    RoundedPercentLadder out;
    const double career = p.retirement_age - p.appointment_age;
    out.gross_pct = std::round(100.0 * p.mean_extension / career);
    out.after_other_pct = out.gross_pct * (1.0 - p.other_cause_share);
    out.net_pct = out.after_other_pct * (1.0 - p.voluntary_share);
    return out;
}

BandVerdict proportionality_verdict(double net_uplift, double band_low, double band_high) {
    if (band_low > band_high)
        throw DataError("band bounds inverted: [" + std::to_string(band_low) + ", " +
                        std::to_string(band_high) + "]");
    if (net_uplift < band_low) return BandVerdict::below;
    if (net_uplift > band_high) return BandVerdict::above;
    return BandVerdict::within;
}

} // namespace wft
