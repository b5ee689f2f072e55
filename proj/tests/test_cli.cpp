#include <doctest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

namespace fs = std::filesystem;

namespace {

const fs::path kWork{CIOT_TEST_WORKDIR};

std::string quote(const std::string& s) { return "'" + s + "'"; }

/// Runs the CLI with stdout to `stdout_file` (relative to the work dir) and
/// returns its exit status.
int run(const std::string& args, const std::string& stdout_file = "stdout.txt", const std::string& env = "")
{
    fs::create_directories(kWork);
    const std::string cmd = "cd " + quote(kWork.string()) + " && " + env + " " + quote(CIOT_CLI_PATH) + " " + args +
                            " > " + quote(stdout_file) + " 2> stderr.txt";
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string read(const std::string& name)
{
    std::ifstream in(kWork / name, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

std::vector<std::map<std::string, std::string>> read_csv(const std::string& name)
{
    std::istringstream in(read(name));
    std::string line;
    std::getline(in, line);
    std::vector<std::string> header;
    {
        std::istringstream h(line);
        for (std::string f; std::getline(h, f, ',');) header.push_back(f);
    }
    std::vector<std::map<std::string, std::string>> rows;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::map<std::string, std::string> row;
        std::istringstream l(line);
        std::size_t i = 0;
        std::string f;
        while (std::getline(l, f, ',')) row[header.at(i++)] = f;
        if (i < header.size()) row[header[i]] = "";
        rows.push_back(std::move(row));
    }
    return rows;
}

double trace_energy_uj(const std::string& name)
{
    double e = 0.0;
    for (const auto& r : read_csv(name)) e += std::stod(r.at("power_mw")) * std::stod(r.at("duration_ms"));
    return e;
}

}  // namespace

TEST_CASE("estimate and trace agree on the cycle energy")
{
    const std::string spec = "--device n211 --scenario good --payload 100 --cycle-hours 1";
    REQUIRE(run("estimate " + spec + " --format json", "estimate.json") == 0);
    const auto doc = nlohmann::json::parse(read("estimate.json"));
    const double total_uj = doc["breakdown"]["total_mj"].get<double>() * 1e3;
    REQUIRE(run("trace " + spec + " --out trace.csv") == 0);
    const double traced = trace_energy_uj("trace.csv");
    CHECK(std::abs(traced - total_uj) / traced <= 0.01);
}

TEST_CASE("ten-year estimate")
{
    REQUIRE(run("estimate --device n211 --scenario good --payload 100 --cycle-hours 24 --t3412-hours 4 --format json",
                "ten.json") == 0);
    const auto doc = nlohmann::json::parse(read("ten.json"));
    CHECK(doc["lifetime_years"].get<double>() >= 10.0);
    CHECK(doc["breakdown"]["tau_count"].get<int>() == 5);
}

TEST_CASE("unreachable scenario cites the coupling loss")
{
    CHECK(run("estimate --device r410m-ltem --scenario extreme --payload 100") == 3);
    CHECK(read("stderr.txt").find("160 dB") != std::string::npos);
}

TEST_CASE("config errors name the offending field")
{
    CHECK(run("estimate --config " + quote(std::string(CIOT_TEST_FIXTURES) + "/bad_config.json")) == 2);
    CHECK(read("stderr.txt").find("payload_bytes") != std::string::npos);
    CHECK(run("estimate --device no-such-modem") == 2);
    CHECK(run("estimate --scenario awful") == 2);
}

TEST_CASE("flags override the configuration file")
{
    const fs::path cfg = kWork / "override.json";
    fs::create_directories(kWork);
    std::ofstream(cfg) << R"({"device": "n211", "payload_bytes": 1000, "cycle_hours": 6})";
    REQUIRE(run("estimate --config " + quote(cfg.string()) + " --payload 10 --format json", "override_out.json") == 0);
    const auto doc = nlohmann::json::parse(read("override_out.json"));
    CHECK(doc["payload_bytes"].get<int>() == 10);
    CHECK(doc["cycle_hours"].get<double>() == 6.0);
}

TEST_CASE("data directory comes from the environment")
{
    CHECK(run("estimate", "stdout.txt", "CIOT_DATA_DIR=/nonexistent/ciot") == 2);
    CHECK(run("estimate", "stdout.txt", "CIOT_DATA_DIR=" + quote(CIOT_TEST_DATA_DIR)) == 0);
}

TEST_CASE("sweep output does not depend on the thread count")
{
    const std::string grid = "--devices n211,r410m-ltem --scenarios good,bad,extreme --payloads 10,100,1000 "
                             "--cycles 0.5,2,24";
    REQUIRE(run("sweep " + grid + " --threads 1 --out sweep1.csv") == 0);
    REQUIRE(run("sweep " + grid + " --threads 4 --out sweep4.csv") == 0);
    CHECK(read("sweep1.csv") == read("sweep4.csv"));
    CHECK(read("sweep1.csv").find('#') == std::string::npos);
    CHECK(read("sweep1.csv.meta").rfind("# ", 0) == 0);

    const auto rows = read_csv("sweep1.csv");
    CHECK(rows.size() == 2 * 3 * 3 * 3);
    int unreachable = 0;
    for (const auto& r : rows) unreachable += r.at("error") == "Unreachable";
    CHECK(unreachable == 9);
}

TEST_CASE("payload sweep is monotone")
{
    REQUIRE(run("sweep --devices n211 --scenarios good --payloads 10,50,100,200,500,1000 --cycles 12 --out pay.csv") ==
            0);
    const auto rows = read_csv("pay.csv");
    REQUIRE(rows.size() == 6);
    for (std::size_t i = 1; i < rows.size(); ++i) {
        CHECK(std::stod(rows[i].at("lifetime_hours")) <= std::stod(rows[i - 1].at("lifetime_hours")));
    }
}

TEST_CASE("cycle sweep turns at T3412")
{
    REQUIRE(run("sweep --devices n211 --scenarios good --payloads 100 --cycles 1.5,2,2.5 --t3412 2 --out cyc.csv") == 0);
    const auto rows = read_csv("cyc.csv");
    REQUIRE(rows.size() == 3);
    const double a = std::stod(rows[0].at("lifetime_hours"));
    const double b = std::stod(rows[1].at("lifetime_hours"));
    const double c = std::stod(rows[2].at("lifetime_hours"));
    CHECK(b - a > 0.0);
    CHECK(c - b < 0.0);
    CHECK(rows[1].at("tau_count") == "0");
    CHECK(rows[2].at("tau_count") == "1");
}

TEST_CASE("n211 outlives r410m in a two-device sweep")
{
    REQUIRE(run("sweep --devices n211,r410m-nbiot --scenarios good,bad,extreme --out dev.csv") == 0);
    const auto rows = read_csv("dev.csv");
    const std::size_t half = rows.size() / 2;
    REQUIRE(half > 0);
    for (std::size_t i = 0; i < half; ++i) {
        CHECK(rows[i].at("device") == "n211");
        CHECK(rows[i + half].at("device") == "r410m-nbiot");
        CHECK(std::stod(rows[i].at("lifetime_hours")) >= std::stod(rows[i + half].at("lifetime_hours")));
    }
}

TEST_CASE("plots are drawn from the sweep csv")
{
    fs::remove_all(kWork / "plots");
    REQUIRE(run("sweep --devices n211,r410m-nbiot --scenarios good --out plot.csv --plot plots") == 0);
    for (const char* f : {"lifetime_vs_payload.svg", "lifetime_vs_cycle.svg", "energy_breakdown.svg",
                          "device_comparison.svg"}) {
        CAPTURE(f);
        CHECK(fs::file_size(kWork / "plots" / f) > 0);
        CHECK(read(std::string("plots/") + f).find("<svg") != std::string::npos);
    }
}

TEST_CASE("psm-only trace is one row")
{
    REQUIRE(run("trace --psm-only --out psm.csv") == 0);
    const auto rows = read_csv("psm.csv");
    REQUIRE(rows.size() == 1);
    CHECK(rows[0].at("label") == "PSM_SLEEP");
}

TEST_CASE("a 512 ms transmission shows two gaps")
{
    REQUIRE(run("trace --uplink-only --scenario good --payload 10 --t-ru-ms 16 --n-ru 4 --reps-ul 8 --out ul.csv") ==
            0);
    int gaps = 0;
    long tx_ms = 0;
    for (const auto& r : read_csv("ul.csv")) {
        if (r.at("label") == "TX_GAP") ++gaps;
        if (r.at("label") == "TX") tx_ms += std::stol(r.at("duration_ms"));
    }
    CHECK(gaps == 2);
    CHECK(tx_ms == 512);
}

TEST_CASE("identical inputs give identical outputs")
{
    REQUIRE(run("trace --device r410m-nbiot --scenario bad --out a.csv") == 0);
    REQUIRE(run("trace --device r410m-nbiot --scenario bad --out b.csv") == 0);
    CHECK(read("a.csv") == read("b.csv"));
    REQUIRE(run("estimate --format csv", "e1.csv") == 0);
    REQUIRE(run("estimate --format csv", "e2.csv") == 0);
    CHECK(read("e1.csv") == read("e2.csv"));
}

TEST_CASE("validate reports every spec")
{
    REQUIRE(run("validate", "validate.txt") == 0);
    const std::string out = read("validate.txt");
    CHECK(out.find("n211/good/100B/24h") != std::string::npos);
    CHECK(out.find("r410m-nbiot/extreme/100B/1h") != std::string::npos);
    CHECK(run("validate --matrix " + quote(std::string(CIOT_TEST_FIXTURES) + "/corrupted_gap_matrix.json")) == 1);
}
