#include "wft/proportionality.hpp"
#include "wft/errors.hpp"

#include <doctest.h>

using namespace wft;

namespace {

QueueParameters params(double appoint, double retire, double ext, double other,
                       double voluntary) {
    QueueParameters p;
    p.appointment_age = appoint;
    p.retirement_age = retire;
    p.mean_extension = ext;
    p.other_cause_share = other;
    p.voluntary_share = voluntary;
    return p;
}

} // namespace

TEST_CASE("uplift ladder reproduces the exact fractions for a 27-year career") {
    const auto r = vcr_uplift(params(40, 67, 3, 0.5, 0.5));
    CHECK(r.career_length == 27.0);
    CHECK(r.gross_uplift == doctest::Approx(3.0 / 27.0).epsilon(1e-12));
    CHECK(r.after_other_causes == doctest::Approx(1.5 / 27.0).epsilon(1e-12));
    CHECK(r.net_uplift == doctest::Approx(0.75 / 27.0).epsilon(1e-12));
    // In percent: 11.11 -> 5.56 -> 2.78.
    CHECK(100 * r.gross_uplift == doctest::Approx(11.1111111111).epsilon(1e-9));
    CHECK(100 * r.after_other_causes == doctest::Approx(5.5555555556).epsilon(1e-9));
    CHECK(100 * r.net_uplift == doctest::Approx(2.7777777778).epsilon(1e-9));
}

TEST_CASE("raising the mandatory age lengthens the career and shrinks the uplift") {
    const auto r = vcr_uplift(params(40, 69, 3, 0.5, 0.5));
    CHECK(r.career_length == 29.0);
    CHECK(r.gross_uplift == doctest::Approx(3.0 / 29.0).epsilon(1e-12));
    CHECK(100 * r.gross_uplift == doctest::Approx(10.3448275862).epsilon(1e-9));
    CHECK(100 * r.net_uplift == doctest::Approx(2.5862068966).epsilon(1e-9));
}

TEST_CASE("extended-career convention divides by career plus extension") {
    const auto r = vcr_uplift(params(40, 67, 3, 0, 0),
                              UpliftConvention::extension_over_extended_career);
    CHECK(r.gross_uplift == doctest::Approx(3.0 / 30.0).epsilon(1e-12));
    CHECK(r.net_uplift == r.gross_uplift);
}

TEST_CASE("whole-percent ladder rounds the first rung before discounting") {
    // 1/29 = 3.45% rounds to 3%, then halves to 1.5% and 0.75%.
    const auto l = sequential_percent_ladder(params(40, 69, 1, 0.5, 0.5));
    CHECK(l.gross_pct == 3.0);
    CHECK(l.after_other_pct == 1.5);
    CHECK(l.net_pct == 0.75);
}

TEST_CASE("degenerate ages and out-of-range shares are rejected") {
    CHECK_THROWS_AS(vcr_uplift(params(67, 67, 3, 0, 0)), InvalidAges);
    CHECK_THROWS_AS(vcr_uplift(params(70, 67, 3, 0, 0)), InvalidAges);
    CHECK_THROWS_AS(vcr_uplift(params(40, 67, -1, 0, 0)), DataError);
    CHECK_THROWS_AS(vcr_uplift(params(40, 67, 3, 1.5, 0)), DataError);
    CHECK_THROWS_AS(vcr_uplift(params(40, 67, 3, 0, -0.1)), DataError);
}

TEST_CASE("band verdict brackets are inclusive") {
    CHECK(proportionality_verdict(0.019) == BandVerdict::below);
    CHECK(proportionality_verdict(0.02) == BandVerdict::within);
    CHECK(proportionality_verdict(0.03) == BandVerdict::within);
    CHECK(proportionality_verdict(0.04) == BandVerdict::within);
    CHECK(proportionality_verdict(0.041) == BandVerdict::above);
    CHECK(proportionality_verdict(0.05, 0.05, 0.06) == BandVerdict::within);
}
