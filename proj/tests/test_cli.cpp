#include <catch2/catch_amalgamated.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

// End-to-end runs of the built binary against the shipped fixtures.

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct CliResult {
    int exit_code = -1;
    std::string out, err;
    json report;  // parsed from stdout or the --out file when possible
};

fs::path fixture(const std::string& name) { return fs::path(DMET_FIXTURES_DIR) / name; }

fs::path work_dir() {
    static fs::path dir = [] {
        auto d = fs::temp_directory_path() / "dmet_cli_tests";
        fs::remove_all(d);
        fs::create_directories(d);
        return d;
    }();
    return dir;
}

CliResult run_cli(const std::string& args, const fs::path& report_path = {}) {
    CliResult r;
    auto out_file = work_dir() / "stdout.txt";
    auto err_file = work_dir() / "stderr.txt";
    std::string cmd = std::string(DMET_CLI_PATH) + " " + args + " > " + out_file.string() +
                      " 2> " + err_file.string();
    int status = std::system(cmd.c_str());
    r.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    auto slurp = [](const fs::path& p) {
        std::ifstream in(p);
        std::stringstream ss;
        ss << in.rdbuf();
        return ss.str();
    };
    r.out = slurp(out_file);
    r.err = slurp(err_file);
    try {
        if (!report_path.empty() && fs::exists(report_path))
            r.report = json::parse(slurp(report_path));
        else
            r.report = json::parse(r.out);
    } catch (...) {
    }
    return r;
}

}  // namespace

TEST_CASE("validate accepts the path fixture and rejects the broken one") {
    auto ok = run_cli("validate --input " + fixture("p3_space.json").string());
    CHECK(ok.exit_code == 0);
    CHECK(ok.report["payload"]["results"]["accepted"] == true);

    auto bad = run_cli("validate --input " + fixture("bad_triangle_space.json").string());
    CHECK(bad.exit_code == 1);
    CHECK(bad.report["payload"]["results"]["accepted"] == false);
    CHECK_FALSE(bad.report["payload"]["results"]["violations"].empty());
}

TEST_CASE("validate accepts the shipped cross fixture") {
    auto r = run_cli("validate --input " + fixture("line6_cross_a0.json").string());
    CHECK(r.exit_code == 0);
    CHECK(r.report["payload"]["results"]["kind"] == "cross");
}

TEST_CASE("validate checks family coherence") {
    auto r = run_cli("validate --input " + fixture("family_line_a.json").string());
    CHECK(r.exit_code == 0);
    CHECK(r.report["payload"]["results"]["kind"] == "family");
}

TEST_CASE("exit codes follow the contract") {
    SECTION("unknown subcommand is 2") {
        CHECK(run_cli("frobnicate --input x.json").exit_code == 2);
    }
    SECTION("missing input file is 3") {
        CHECK(run_cli("validate --input /nonexistent/nope.json").exit_code == 3);
    }
    SECTION("unparseable JSON is 3 with a location") {
        auto broken = work_dir() / "broken.json";
        std::ofstream(broken) << "{\"points\": [";
        auto r = run_cli("validate --input " + broken.string());
        CHECK(r.exit_code == 3);
        CHECK(r.err.find("malformed input") != std::string::npos);
    }
}

TEST_CASE("subset-metric reproduces the shipped gluing file") {
    auto out = work_dir() / "a0.json";
    auto r = run_cli("subset-metric --input " + fixture("line6_space.json").string() +
                     " --subset 0 --out " + out.string());
    REQUIRE(r.exit_code == 0);
    auto produced = json::parse(std::ifstream(out));
    auto shipped = json::parse(std::ifstream(fixture("line6_cross_a0.json")));
    CHECK(produced["cross"] == shipped["cross"]);
    CHECK(fs::exists(work_dir() / "a0.json.space.json"));
}

TEST_CASE("compose adds two to the idempotent gluing") {
    auto out = work_dir() / "squared.json";
    auto a0 = fixture("line6_cross_a0.json").string();
    auto r = run_cli("compose --input " + a0 + " --input2 " + a0 + " --out " + out.string());
    REQUIRE(r.exit_code == 0);
    auto produced = json::parse(std::ifstream(out));
    CHECK(produced["cross"][2][3] == "8");  // 6 + 2
}

TEST_CASE("compose over mismatched spaces fails the precondition and writes nothing") {
    auto p3_cross = work_dir() / "p3_cross.json";
    REQUIRE(run_cli("subset-metric --input " + fixture("p3_space.json").string() +
                    " --subset a --out " + p3_cross.string())
                .exit_code == 0);
    auto out = work_dir() / "mismatch.json";
    auto r = run_cli("compose --input " + fixture("line6_cross_a0.json").string() +
                     " --input2 " + p3_cross.string() + " --out " + out.string());
    CHECK(r.exit_code == 1);
    CHECK_FALSE(fs::exists(out));
    bool flagged = false;
    for (const auto& inv : r.report["payload"]["invariants"])
        if (inv["name"] == "preconditions" && inv["pass"] == false) flagged = true;
    CHECK(flagged);
}

TEST_CASE("idempotent reports defect zero for the gluing fixture") {
    auto r = run_cli("idempotent --input " + fixture("line6_cross_a0.json").string());
    REQUIRE(r.exit_code == 0);
    CHECK(r.report["payload"]["results"]["defect"] == "0");
    CHECK(r.report["payload"]["results"]["is_idempotent"] == true);
}

TEST_CASE("equivalence verdict on the shipped line families") {
    auto report_path = work_dir() / "verdict.json";
    std::string cmd = "equivalence --input " + fixture("family_line_a.json").string() +
                      " --input2 " + fixture("family_line_b.json").string() +
                      " --thresholds 1,3,5 --out " + report_path.string();
    auto r = run_cli(cmd, report_path);
    REQUIRE(r.exit_code == 0);
    CHECK(r.report["payload"]["results"]["status"] == "EQUIVALENT_AT_SCALE");

    SECTION("the profile CSV artifact exists with the documented header") {
        std::ifstream csv(work_dir() / "verdict.csv");
        std::string header;
        std::getline(csv, header);
        CHECK(header == "scale,threshold,phi_forward,phi_backward");
    }
    SECTION("byte-identical payloads across reruns") {
        auto r2 = run_cli(cmd, report_path);
        REQUIRE(r2.exit_code == 0);
        CHECK(r.report["payload"].dump() == r2.report["payload"].dump());
    }
}

TEST_CASE("profile emits the CSV table") {
    auto report_path = work_dir() / "profile.json";
    auto r = run_cli("profile --input " + fixture("family_line_a.json").string() +
                         " --input2 " + fixture("family_line_b.json").string() +
                         " --thresholds 1,3 --out " + report_path.string(),
                     report_path);
    REQUIRE(r.exit_code == 0);
    CHECK(fs::exists(work_dir() / "profile.csv"));
}

TEST_CASE("sphi-enumerate reproduces the two-block example") {
    auto r = run_cli("sphi-enumerate --input " + fixture("sphi_example1.json").string());
    REQUIRE(r.exit_code == 0);
    const auto& results = r.report["payload"]["results"];
    CHECK(results["semigroup_size"] == 209);
    CHECK(results["element_count"] == 17);
    CHECK(results["class_count"] == 7);
}

TEST_CASE("tree round trip on the shipped swap fixture") {
    auto r = run_cli("tree-roundtrip --input " + fixture("tree_binary_d6.json").string() +
                     " --input2 " + fixture("prefix_swap.json").string());
    REQUIRE(r.exit_code == 0);
    CHECK(r.report["payload"]["results"]["recovered_equals_input"] == true);
}

TEST_CASE("tree-chi then tree-psi recovers the swap action") {
    auto cross_path = work_dir() / "swap_cross.json";
    REQUIRE(run_cli("tree-chi --input " + fixture("tree_binary_d6.json").string() +
                    " --input2 " + fixture("prefix_swap.json").string() + " --out " +
                    cross_path.string())
                .exit_code == 0);
    auto report_path = work_dir() / "recovered.json";
    auto r = run_cli("tree-psi --input " + fixture("tree_binary_d6.json").string() +
                         " --input2 " + cross_path.string() + " --out " + report_path.string(),
                     report_path);
    REQUIRE(r.exit_code == 0);
    const auto& results = r.report["payload"]["results"];
    CHECK(results["pairs"].size() == 64);  // every depth-6 word is matched
    CHECK(results["injective"] == true);
    CHECK(fs::exists(work_dir() / "recovered.csv"));
}

TEST_CASE("euclid round trip on the shipped rotation fixture") {
    auto r = run_cli("euclid-roundtrip --input " + fixture("grid8.json").string() +
                     " --input2 " + fixture("isometry_rot90.json").string());
    REQUIRE(r.exit_code == 0);
    CHECK(r.report["payload"]["results"]["conforming"] == true);
    CHECK(r.report["payload"]["results"]["pairs"].size() == 8);
}

TEST_CASE("corollary-check counts the boundary maps of the two-ray tree") {
    auto r = run_cli("corollary-check --input " + fixture("tree_2ray_d8.json").string());
    REQUIRE(r.exit_code == 0);
    const auto& results = r.report["payload"]["results"];
    CHECK(results["boundary_rays"] == 2);
    CHECK(results["attempted"] == 7);
    CHECK(results["recovered_exactly"] == 7);
}

TEST_CASE("flags override the config file") {
    auto cfg = work_dir() / "cfg.json";
    std::ofstream(cfg) << "{\"divergence_bound\": \"50\"}";
    auto r = run_cli("equivalence --config " + cfg.string() + " --divergence-bound 123 --input " +
                     fixture("family_line_a.json").string() + " --input2 " +
                     fixture("family_line_b.json").string() + " --thresholds 1,3");
    REQUIRE(r.exit_code == 0);
    CHECK(r.report["payload"]["config"]["divergence_bound"] == 123.0);
}

TEST_CASE("reports carry input digests and configuration") {
    auto r = run_cli("validate --seed 7 --input " + fixture("p3_space.json").string());
    REQUIRE(r.exit_code == 0);
    const auto& payload = r.report["payload"];
    REQUIRE(payload["inputs"].size() == 1);
    CHECK(payload["inputs"][0]["fnv64"].get<std::string>().size() > 0);
    CHECK(payload["config"]["seed"] == 7);
    CHECK(r.report.contains("duration_ms"));
}
