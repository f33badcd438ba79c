#include "wft/report.hpp"
#include "wft/csv.hpp"
#include "wft/errors.hpp"
#include "wft/rng.hpp"

#include <doctest.h>
#include <json.hpp>

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

struct TempDir {
    fs::path path;
    explicit TempDir(const std::string& tag) {
        path = fs::temp_directory_path() / ("wft_test_" + tag + "_" +
                                            std::to_string(::getpid()));
        fs::remove_all(path);
    }
    ~TempDir() { fs::remove_all(path); }
};

} // namespace

TEST_CASE("content digest has pinned reference values") {
    // FNV-1a 64-bit offset basis for empty input; a classic known vector.
    CHECK(digest_hex("") == "cbf29ce484222325");
    CHECK(digest_hex("a") == "af63dc4c8601ec8c");
    const std::string again = digest_hex("workforce");
    CHECK(again == digest_hex("workforce"));
    CHECK(again != digest_hex("workforcf"));
    CHECK(again.size() == 16);
}

TEST_CASE("bundle writer records files and closes with a manifest") {
    TempDir tmp("bundle");
    BundleWriter bundle(tmp.path.string());
    bundle.write_text("one.csv", "a,b\n1,2\n");
    bundle.write_text("two.txt", "hello\n");
    const auto entries = bundle.finish({{"command", "unit-test"}}, 99);
    REQUIRE(entries.size() == 2);
    CHECK(entries[0].name == "one.csv");
    CHECK(entries[0].bytes == 8);
    CHECK(entries[0].digest == digest_hex("a,b\n1,2\n"));

    const auto manifest = nlohmann::json::parse(slurp(tmp.path / "manifest.json"));
    CHECK(manifest["version"] == kToolkitVersion);
    CHECK(manifest["seed"] == 99);
    CHECK(manifest["config"]["command"] == "unit-test");
    REQUIRE(manifest["files"].size() == 2);
    CHECK(manifest["files"][0]["name"] == "one.csv");
    CHECK(manifest["files"][0]["digest"] == digest_hex("a,b\n1,2\n"));
    // The manifest lists files it does not contain itself.
    for (const auto& f : manifest["files"]) CHECK(f["name"] != "manifest.json");
}

TEST_CASE("reproduction report emits every artifact with matching digests") {
    TempDir tmp("report");
    ReportOptions opt;
    opt.out_dir = tmp.path.string();
    opt.seed = 42;
    opt.bootstrap_replications = 99;
    const ReportResult r = emit_reproduction_report(opt);

    const char* expected[] = {
        "group_means.csv",     "ladder.csv",
        "ladder_summary.txt",  "steady_state.csv",
        "transition_abolition.csv", "transition_raised_mandate.csv",
        "workforce_chart.svg", "did_table.csv",
        "event_study.csv",     "event_study.svg",
        "bootstrap_replicates.csv", "synth_weights.csv",
        "synth_gaps.csv",      "summary.txt",
    };
    for (const char* name : expected) {
        CAPTURE(name);
        CHECK(fs::exists(tmp.path / name));
    }
    CHECK(fs::exists(tmp.path / "manifest.json"));

    // Digests in the returned entries match the bytes on disk.
    for (const auto& entry : r.files) {
        CAPTURE(entry.name);
        const std::string content = slurp(tmp.path / entry.name);
        CHECK(entry.digest == digest_hex(content));
        CHECK(entry.bytes == content.size());
    }
}

TEST_CASE("report numbers hit the fixture and closed-form targets") {
    TempDir tmp("numbers");
    ReportOptions opt;
    opt.out_dir = tmp.path.string();
    opt.bootstrap_replications = 99;
    const ReportResult r = emit_reproduction_report(opt);
    CHECK(std::abs(r.numbers.treated_mean - 0.03) < 1e-9);
    CHECK(std::abs(r.numbers.donor_mean - 0.05) < 1e-9);
    CHECK(std::abs(r.numbers.steady_vcr_mandate - 1.0 / 27.0) < 1e-9);
    CHECK(std::abs(r.numbers.steady_vcr_abolished - 1.0 / 30.0) < 1e-6);
    CHECK(std::abs(r.numbers.analytic_gross_uplift - 3.0 / 27.0) < 1e-12);
    CHECK(r.numbers.littles_residual_mandate < 1e-6);
    CHECK(r.numbers.littles_residual_abolished < 1e-6);
    CHECK(r.numbers.p_bootstrap_raw >= 1.0 / 100.0);
    CHECK(r.numbers.se_cluster_raw > 0.0);
    CHECK(r.numbers.synth_pre_rmse >= 0.0);
    // Cluster-correlated noise: per-observation inference is overconfident.
    CHECK(r.numbers.p_bootstrap_raw > 2.0 * r.numbers.p_normal_iid_raw);
}

TEST_CASE("identical options reproduce identical bytes; the seed reaches the bootstrap") {
    TempDir a("rep_a"), b("rep_b"), c("rep_c");
    ReportOptions opt;
    opt.bootstrap_replications = 99;
    opt.out_dir = a.path.string();
    const ReportResult ra = emit_reproduction_report(opt);
    opt.out_dir = b.path.string();
    const ReportResult rb = emit_reproduction_report(opt);
    REQUIRE(ra.files.size() == rb.files.size());
    for (std::size_t i = 0; i < ra.files.size(); ++i) {
        CAPTURE(ra.files[i].name);
        CHECK(ra.files[i].digest == rb.files[i].digest);
    }

    opt.out_dir = c.path.string();
    opt.seed = 4242;
    const ReportResult rc = emit_reproduction_report(opt);
    bool bootstrap_changed = false;
    for (std::size_t i = 0; i < rc.files.size(); ++i)
        if (rc.files[i].name == "bootstrap_replicates.csv")
            bootstrap_changed = rc.files[i].digest != ra.files[i].digest;
    CHECK(bootstrap_changed);
}

TEST_CASE("report accepts an external panel file") {
    TempDir tmp("external");
    const fs::path panel_path = tmp.path / "panel.csv";
    fs::create_directories(tmp.path);
    {
        std::ofstream out(panel_path, std::ios::binary);
        out << "institution,year,group,headcount,new_appointments,student_fte\n";
        for (int u = 0; u < 4; ++u)
            for (int y = 2008; y <= 2015; ++y) {
                const std::string inst = u == 0 ? "TT" : "U" + std::to_string(u);
                const int heads = 1000;
                const int hires = 40 + u + (y % 3) + (u == 0 && y >= 2012 ? 12 : 0);
                out << inst << ',' << y << ",EAC," << heads << ',' << hires << ','
                    << 9000 + 10 * y << "\n";
            }
    }
    ReportOptions opt;
    opt.out_dir = (tmp.path / "out").string();
    opt.bootstrap_replications = 99;
    opt.panel_path = panel_path.string();
    opt.treated_unit = "TT";
    const ReportResult r = emit_reproduction_report(opt);
    CHECK(r.numbers.delta_raw == doctest::Approx(0.012).epsilon(1e-6));
}
