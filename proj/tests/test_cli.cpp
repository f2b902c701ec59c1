#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <array>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

namespace {

namespace fs = std::filesystem;

struct RunResult {
    int exit_code = -1;
    std::string output;
};

RunResult run_cli(const std::string& args) {
    const std::string cmd = std::string(ROTORLAB_CLI_PATH) + " " + args + " 2>&1";
    std::array<char, 4096> buf{};
    RunResult r;
    FILE* pipe = popen(cmd.c_str(), "r");
    REQUIRE(pipe != nullptr);
    while (std::fgets(buf.data(), static_cast<int>(buf.size()), pipe))
        r.output += buf.data();
    const int status = pclose(pipe);
    r.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    return r;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::vector<std::string> lines_of(const std::string& text) {
    std::vector<std::string> lines;
    std::stringstream ss(text);
    std::string line;
    while (std::getline(ss, line))
        lines.push_back(line);
    return lines;
}

struct TempDir {
    fs::path path;
    TempDir() {
        path = fs::temp_directory_path() / ("rotorlab_cli_test_" + std::to_string(::getpid()));
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
};

} // namespace

TEST_CASE("usage errors exit with code 1") {
    CHECK(run_cli("").exit_code == 1);
    CHECK(run_cli("curve").exit_code == 1);
    CHECK(run_cli("curve nosuch --out /tmp/x.csv").exit_code == 1);
    CHECK(run_cli("curve mathieu").exit_code == 1); // missing --out
    CHECK(run_cli("curve mathieu --q 1:2:1 --out /tmp/x.csv").exit_code == 1); // count < 2
    CHECK(run_cli("curve mathieu --q 5:1:10 --out /tmp/x.csv").exit_code == 1); // unordered
    CHECK(run_cli("state what:1").exit_code == 1);
    CHECK(run_cli("state mix:0.5,momentum:0").exit_code == 1); // missing second component
}

TEST_CASE("numeric failures exit with code 2") {
    // kappa far beyond what the window cap can represent
    CHECK(run_cli("state vonmises:0,0,3000").exit_code == 2);
}

TEST_CASE("curve command") {
    TempDir tmp;
    const fs::path out = tmp.path / "vm.csv";

    SUBCASE("von Mises curve file") {
        const RunResult r = run_cli("curve vonmises --kappa 1e-2:10:20 --out " + out.string());
        CHECK(r.exit_code == 0);
        const auto lines = lines_of(slurp(out));
        REQUIRE(lines.size() == 22); // comment + header + 20 rows
        CHECK(lines[0] == "# kind=vonmises matching=equal-dispersion");
        CHECK(lines[1] == "param,dispersion_sq,product");
        // dispersion decreases down the file
        double prev = 2.0;
        for (std::size_t i = 2; i < lines.size(); ++i) {
            double param = 0.0, d2 = 0.0, prod = 0.0;
            REQUIRE(std::sscanf(lines[i].c_str(), "%lf,%lf,%lf", &param, &d2, &prod) == 3);
            CHECK(d2 < prev);
            CHECK(prod >= 0.25 * (1.0 - d2) - 1e-12);
            prev = d2;
        }
    }

    SUBCASE("deterministic output") {
        const fs::path a = tmp.path / "a.csv";
        const fs::path b = tmp.path / "b.csv";
        CHECK(run_cli("curve mathieu --q 0.1:20:8 --out " + a.string()).exit_code == 0);
        CHECK(run_cli("curve mathieu --q 0.1:20:8 --out " + b.string()).exit_code == 0);
        CHECK(slurp(a) == slurp(b));
        CHECK(!slurp(a).empty());
    }

    SUBCASE("json format") {
        const fs::path j = tmp.path / "vm.json";
        CHECK(run_cli("curve vonmises --kappa 0.1:5:5 --format json --out " + j.string())
                  .exit_code == 0);
        const std::string text = slurp(j);
        CHECK(text.find("\"kind\": \"vonmises\"") != std::string::npos);
        CHECK(text.find("\"points\"") != std::string::npos);
    }

    SUBCASE("no partial file on failure") {
        const fs::path bad = tmp.path / "bad.csv";
        const RunResult r = run_cli("curve mathieu --q 0:bogus --out " + bad.string());
        CHECK(r.exit_code == 1);
        CHECK(!fs::exists(bad));
    }
}

TEST_CASE("joint command emits curve and critical files") {
    TempDir tmp;
    const fs::path out = tmp.path / "joint.csv";
    const RunResult r =
        run_cli("joint sine --grid 0.5:8:7 --out " + out.string());
    CHECK(r.exit_code == 0);
    REQUIRE(fs::exists(out));
    const fs::path crit = tmp.path / "joint.critical.csv";
    REQUIRE(fs::exists(crit));

    const auto curve_lines = lines_of(slurp(out));
    REQUIRE(curve_lines.size() == 9);
    CHECK(curve_lines[0] == "# mode=sine family=vonmises");
    CHECK(curve_lines[1] ==
          "ancilla_param,ancilla_D2,branch1,branch2,bound,matched_signal_param,min_product,gap");

    const auto crit_lines = lines_of(slurp(crit));
    REQUIRE(crit_lines.size() == 3);
    CHECK(crit_lines[0] == "mode,kind,ancilla_param,ancilla_D2,product");
    CHECK(crit_lines[1].find("sine,intersection,3.01") != std::string::npos);
    CHECK(crit_lines[2].find("sine,sharp,2.89") != std::string::npos);

    // identical invocation reproduces both files byte for byte
    const fs::path out2 = tmp.path / "joint2.csv";
    CHECK(run_cli("joint sine --grid 0.5:8:7 --out " + out2.string()).exit_code == 0);
    CHECK(slurp(out2) == slurp(out));
    CHECK(slurp(tmp.path / "joint2.critical.csv") == slurp(crit));
}

TEST_CASE("verify command") {
    CHECK(run_cli("verify povm").exit_code == 0);
    const RunResult r = run_cli("verify hierarchy --n 200 --seed 7");
    CHECK(r.exit_code == 0);
    CHECK(r.output.find("[PASS] hierarchy ordering") != std::string::npos);
    const RunResult s = run_cli("verify saturation");
    CHECK(s.exit_code == 0);
    CHECK(s.output.find("robertson saturation defect") != std::string::npos);
}

TEST_CASE("state command") {
    SUBCASE("von Mises report: the non-dispersion measures coincide") {
        const RunResult r = run_cli("state vonmises:0,0,5");
        CHECK(r.exit_code == 0);
        double gp = 0.0, mean_axis = 0.0, optimal = 0.0;
        for (const std::string& line : lines_of(r.output)) {
            std::sscanf(line.c_str(), "gamma_plus    = %lf", &gp);
            std::sscanf(line.c_str(), "mean_axis     = %lf", &mean_axis);
            std::sscanf(line.c_str(), "optimal_axis  = %lf", &optimal);
        }
        CHECK(gp > 0.0);
        CHECK(std::abs(gp - mean_axis) < 1e-9);
        CHECK(std::abs(gp - optimal) < 1e-9);
        CHECK(r.output.find("ordered       = yes") != std::string::npos);
    }
    SUBCASE("momentum eigenstate report") {
        const RunResult r = run_cli("state momentum:0");
        CHECK(r.exit_code == 0);
        CHECK(r.output.find("dispersion    = 1") != std::string::npos);
        CHECK(r.output.find("gamma_plus    = 0.5") != std::string::npos);
        CHECK(r.output.find("gamma_minus   = 0.5") != std::string::npos);
    }
    SUBCASE("two-component mixture report includes concavity numbers") {
        const RunResult r = run_cli("state mix:0.4,vonmises:0,0,5,vonmises:0,1.2566,5");
        CHECK(r.exit_code == 0);
        CHECK(r.output.find("mixture tensor residual") != std::string::npos);
        CHECK(r.output.find("mixture concavity slack") != std::string::npos);
        // concavity slack stays nonnegative for the two-component mixture
        double slack = -1.0;
        for (const std::string& line : lines_of(r.output))
            std::sscanf(line.c_str(), "mixture concavity slack = %lf", &slack);
        CHECK(slack >= -1e-12);
    }
    SUBCASE("json round trip through a state file") {
        TempDir tmp;
        const fs::path j = tmp.path / "state.json";
        CHECK(run_cli("state vonmises:0,0.3,2 --format json --out " + j.string()).exit_code == 0);
        const RunResult back = run_cli("state file:" + j.string());
        CHECK(back.exit_code == 0);
        const RunResult direct = run_cli("state vonmises:0,0.3,2");
        // the moment block must agree between the round trip and the original
        auto moments_block = [](const std::string& text) {
            std::string out;
            for (const std::string& line : lines_of(text))
                if (line.find("mean_") == 0 || line.find("dispersion") == 0)
                    out += line + "\n";
            return out;
        };
        CHECK(moments_block(back.output) == moments_block(direct.output));
    }
}
