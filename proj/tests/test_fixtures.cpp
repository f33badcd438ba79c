#include "wft/fixtures.hpp"
#include "wft/did.hpp"
#include "wft/panel.hpp"

#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>
#include <unistd.h>

using namespace wft;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    REQUIRE(in.good());
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

} // namespace

TEST_CASE("checked-in fixture files match their builders byte for byte") {
    // ctest runs this suite from the repository root.
    REQUIRE(fs::exists("fixtures/calibrated_panel.csv"));
    const fs::path regen = fs::temp_directory_path() /
                           ("wft_fixture_regen_" + std::to_string(::getpid()));
    fs::remove_all(regen);
    const auto written = write_fixture_files(regen.string());
    CHECK(written.size() == 5);
    for (const char* name : {"noiseless_panel.csv", "calibrated_panel.csv",
                             "mandate67.scenario", "raised69.scenario",
                             "abolished.scenario"}) {
        CAPTURE(name);
        CHECK(slurp(regen / name) == slurp(fs::path("fixtures") / name));
    }
    fs::remove_all(regen);
}

TEST_CASE("calibrated panel hits its constructed group means exactly") {
    const PanelDataset d = make_calibrated_panel();
    std::vector<std::string> donors;
    for (const auto& inst : d.institutions)
        if (inst != kFixtureTreatedUnit) donors.push_back(inst);
    REQUIRE(donors.size() == 22);
    const double treated = group_mean_rate(d, StaffGroup::established_academic,
                                           {kFixtureTreatedUnit}, d.years);
    const double donor = group_mean_rate(d, StaffGroup::established_academic,
                                         donors, d.years);
    CHECK(std::abs(treated - 0.03) < 1e-9);
    CHECK(std::abs(donor - 0.05) < 1e-9);
}

TEST_CASE("calibrated panel carries strong unit-level trends") {
    // The construction plants per-unit appointment slopes; verify the treated
    // unit's pre-period is steeply trended so detrending has work to do.
    const RatePanel p = RatePanel::from_panel(make_calibrated_panel(),
                                              StaffGroup::established_academic);
    const Eigen::Index u = p.unit_index(kFixtureTreatedUnit);
    const double first = p.values(u, p.year_index(kFixtureFirstYear));
    const double last_pre = p.values(u, p.year_index(kFixturePolicyYear - 1));
    CHECK(std::abs(last_pre - first) > 1e-4);
}

TEST_CASE("noiseless panel is additive with the stated injected effect") {
    const RatePanel p = RatePanel::from_panel(make_noiseless_panel(),
                                              StaffGroup::established_academic);
    DesignSpec s;
    s.treated_unit = kFixtureTreatedUnit;
    s.policy_year = kFixturePolicyYear;
    s.base_year = kFixturePolicyYear;
    CHECK(std::abs(did_of_means(p, s) - kInjectedEffect) < 1e-10);
}

TEST_CASE("fixture scenarios parse back and validate") {
    for (const char* name : {"mandate67.scenario", "raised69.scenario",
                             "abolished.scenario"}) {
        CAPTURE(name);
        std::ifstream in(fs::path("fixtures") / name, std::ios::binary);
        REQUIRE(in.good());
        const PolicyScenario s = parse_scenario(in);
        CHECK(s.total_posts == 270);
        CHECK_NOTHROW(s.validate());
    }
    CHECK(make_mandate_scenario().exit_event_age() == 67);
    CHECK(make_raised_mandate_scenario().exit_event_age() == 69);
    CHECK(make_abolished_scenario().exit_event_age() == 70);
}
