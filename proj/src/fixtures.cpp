#include "wft/fixtures.hpp"
#include "wft/rng.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <vector>

namespace wft {

namespace {

constexpr int kUnits = 23;          // treated + 22 donors
constexpr int kYears = kFixtureLastYear - kFixtureFirstYear + 1;   // 15
constexpr int kCenterYear = 2014;   // midpoint of 2007..2021

std::string unit_name(int u) {
    // u == 0 is treated; donors are C01..C22 (sorted before T00).
    if (u == 0) return kFixtureTreatedUnit;
    char buf[8];
    std::snprintf(buf, sizeof buf, "C%02d", u);
    return buf;
}

PanelDataset assemble_panel(const std::vector<std::vector<long long>>& new_counts,
                            long long headcount,
                            const std::vector<std::vector<double>>& student) {
    PanelDataset data;
    data.groups = {StaffGroup::established_academic};
    for (int y = 0; y < kYears; ++y)
        data.years.push_back(AcademicYear{kFixtureFirstYear + y});
    for (int u = 0; u < kUnits; ++u) data.institutions.push_back(unit_name(u));
    std::sort(data.institutions.begin(), data.institutions.end());

    for (const auto& inst : data.institutions) {
        // Recover the builder index from the name.
        const int u = inst == kFixtureTreatedUnit ? 0 : std::stoi(inst.substr(1));
        for (int y = 0; y < kYears; ++y) {
            PanelObservation obs;
            obs.institution = inst;
            obs.year = AcademicYear{kFixtureFirstYear + y};
            obs.group = StaffGroup::established_academic;
            obs.headcount = headcount;
            obs.new_appointments = new_counts[static_cast<std::size_t>(u)]
                                             [static_cast<std::size_t>(y)];
            obs.student_fte = student[static_cast<std::size_t>(u)]
                                     [static_cast<std::size_t>(y)];
            data.observations.push_back(obs);
        }
    }
    return data;
}

std::vector<std::vector<double>> student_grid() {
    std::vector<std::vector<double>> s(kUnits, std::vector<double>(kYears));
    for (int u = 0; u < kUnits; ++u) {
        // Unit-specific growth between 1.5% and 2.5% per year.
        const double growth = 0.015 + 0.0005 * ((u * 7) % 21);
        const double base = 18000.0 + 400.0 * u;
        for (int y = 0; y < kYears; ++y)
            s[static_cast<std::size_t>(u)][static_cast<std::size_t>(y)] =
                std::round(base * std::pow(1.0 + growth, y) * 10.0) / 10.0;
    }
    return s;
}

} // namespace

PanelDataset make_noiseless_panel() {
    std::vector<std::vector<long long>> counts(kUnits, std::vector<long long>(kYears));
    for (int u = 0; u < kUnits; ++u) {
        const long long level = u == 0 ? 30 : 50 + (u % 7) - 3;   // per-unit base
        for (int y = 0; y < kYears; ++y) {
            const int year = kFixtureFirstYear + y;
            const long long season = 2 * (y % 5);                 // shared year shift
            long long c = level + season;
            if (u == 0 && year >= kFixturePolicyYear) c += 16;    // 16/1000 = 0.016
            counts[static_cast<std::size_t>(u)][static_cast<std::size_t>(y)] = c;
        }
    }
    return assemble_panel(counts, 1000, student_grid());
}

PanelDataset make_calibrated_panel() {
    // Zero-sum donor level offsets (counts): a scrambled +/- pairing.
    static constexpr int kOffsetSteps[22] = {-11, 7,  -3, 9,  -7, 1,  11, -5, 3,  -9, 5,
                                            -1,  10, -8, 2,  -10, 8, -2, 6,  -4, 4,  -6};
    // Per-unit appointment trends (counts per year); treated trends upward.
    static constexpr int kSlopeSteps[23] = {5, -6, -5, -4, -3, -2, -1, 1, 2, 3, 4, 5,
                                            6, -4, 3,  -2, 5,  -6, 1,  4, -3, 2, -5};

    std::vector<std::vector<long long>> counts(kUnits, std::vector<long long>(kYears));
    for (int u = 0; u < kUnits; ++u) {
        const long long level = u == 0 ? 30000 : 50000 + 250LL * kOffsetSteps[u - 1];
        const long long slope = 50LL * kSlopeSteps[u];

        // Antisymmetric noise around the centre year: exact zero sum per unit.
        SplitMix64 rng = substream(kCalibratedSeed, static_cast<std::uint64_t>(u));
        long long wiggle[kYears] = {};
        for (int j = 1; j <= 7; ++j) {
            const long long v = static_cast<long long>(rng.next_below(801)) - 400;
            wiggle[(kCenterYear - kFixtureFirstYear) + j] = v;
            wiggle[(kCenterYear - kFixtureFirstYear) - j] = -v;
        }

        for (int y = 0; y < kYears; ++y) {
            const long long t = kFixtureFirstYear + y - kCenterYear;
            counts[static_cast<std::size_t>(u)][static_cast<std::size_t>(y)] =
                level + slope * t + wiggle[y];
        }
    }
    return assemble_panel(counts, 1000000, student_grid());
}

PolicyScenario make_mandate_scenario() {
    PolicyScenario sc;
    sc.total_posts = 270;
    sc.post_growth_rate = 0.0;
    sc.mandatory_age = 67;
    sc.entry_age_distribution = {{40, 1.0}};
    return sc;
}

PolicyScenario make_raised_mandate_scenario() {
    PolicyScenario sc = make_mandate_scenario();
    sc.mandatory_age = 69;
    return sc;
}

PolicyScenario make_abolished_scenario() {
    PolicyScenario sc = make_mandate_scenario();
    sc.mandatory_age.reset();
    sc.voluntary_hazard = {{70, 1.0}};   // stay 3 extra years, leave at 70
    return sc;
}

std::vector<std::string> write_fixture_files(const std::string& directory) {
    namespace fs = std::filesystem;
    fs::create_directories(directory);
    std::vector<std::string> written;
    auto write = [&](const std::string& name, auto&& emit) {
        std::ofstream out(fs::path(directory) / name, std::ios::binary);
        if (!out) throw DataError("cannot write fixture file " + name);
        emit(out);
        written.push_back((fs::path(directory) / name).string());
    };
    write("noiseless_panel.csv",
          [](std::ostream& o) { serialize_panel(o, make_noiseless_panel()); });
    write("calibrated_panel.csv",
          [](std::ostream& o) { serialize_panel(o, make_calibrated_panel()); });
    write("mandate67.scenario",
          [](std::ostream& o) { write_scenario(o, make_mandate_scenario()); });
    write("raised69.scenario",
          [](std::ostream& o) { write_scenario(o, make_raised_mandate_scenario()); });
    write("abolished.scenario",
          [](std::ostream& o) { write_scenario(o, make_abolished_scenario()); });
    return written;
}

} // namespace wft
