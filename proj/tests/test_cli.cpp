#include "certkit/config.hpp"
#include "certkit/report.hpp"

#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <sys/wait.h>

namespace {

namespace fs = std::filesystem;
using nlohmann::ordered_json;

int run_cli(const std::string& args) {
    const std::string cmd = std::string(CERTKIT_CLI_PATH) + " " + args + " >/dev/null 2>&1";
    const int rc = std::system(cmd.c_str());
    return WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

struct TempDir {
    fs::path path;
    explicit TempDir(const std::string& name) : path(fs::temp_directory_path() / name) {
        fs::remove_all(path);
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
};

fs::path write_config(const TempDir& dir, const std::string& name,
                      const ordered_json& j) {
    const fs::path p = dir.path / name;
    std::ofstream out(p);
    out << j.dump(2);
    return p;
}

} // namespace

TEST_CASE("cli: reproduce-example exits 0, hits the anchors, and is deterministic") {
    TempDir dir("certkit_cli_repro");
    const std::string out = dir.path.string();
    CHECK(run_cli("reproduce-example --out " + out) == 0);
    const ordered_json report = ordered_json::parse(slurp(dir.path / "example_report.json"));

    auto comparison = [&](const std::string& name) -> ordered_json {
        for (const auto& row : report["paper_comparison"])
            if (row["name"] == name)
                return row;
        FAIL("missing comparison row ", name);
        return {};
    };
    CHECK(std::abs(comparison("kappa")["computed"].get<double>() - 0.021367) < 1e-5);
    CHECK(std::abs(comparison("theta")["computed"].get<double>() - 0.06315) < 1e-4);
    CHECK(comparison("K2")["note"].get<std::string>().find("DISCREPANCY") !=
          std::string::npos);
    CHECK(comparison("beta")["note"].get<std::string>().find("DISCREPANCY") !=
          std::string::npos);

    const std::string first_json = slurp(dir.path / "example_report.json");
    const std::string first_text = slurp(dir.path / "example_report.txt");
    CHECK(run_cli("reproduce-example --out " + out) == 0);
    CHECK(slurp(dir.path / "example_report.json") == first_json); // byte-identical rerun
    CHECK(slurp(dir.path / "example_report.txt") == first_text);
}

TEST_CASE("cli: certify exit codes cover feasible, infeasible and invalid configs") {
    TempDir dir("certkit_cli_certify");
    const std::string out = " --out " + dir.path.string();

    CHECK(run_cli("certify --config " + std::string(CERTKIT_EXAMPLE_CONFIG) + out) == 0);

    ordered_json infeasible = certkit::example_config_json();
    infeasible["nonlinearity"]["sigma"] = 20.0;
    const auto icfg = write_config(dir, "infeasible.json", infeasible);
    CHECK(run_cli("certify --config " + icfg.string() + out) == 2);
    const ordered_json report = ordered_json::parse(slurp(dir.path / "certify_report.json"));
    CHECK(report["verdicts"]["omega_positive"]["pass"] == false);
    CHECK(report["verdicts"]["feasible"] == false);

    ordered_json invalid = certkit::example_config_json();
    invalid["system"].erase("P");
    const auto bad = write_config(dir, "invalid.json", invalid);
    CHECK(run_cli("certify --config " + bad.string() + out) == 1);

    CHECK(run_cli("certify --config /does/not/exist.json" + out) == 1);
}

TEST_CASE("cli: simulate writes the trajectory CSV with the pinned schema") {
    TempDir dir("certkit_cli_sim");
    ordered_json cfg = certkit::example_config_json();
    cfg["numerics"]["T"] = 2.0;
    cfg["numerics"]["record_every"] = 100;
    const auto path = write_config(dir, "short.json", cfg);
    CHECK(run_cli("simulate --config " + path.string() + " --out " + dir.path.string()) == 0);

    const std::string csv = slurp(dir.path / "trajectory.csv");
    CHECK(csv.rfind("t,u_l2,x_norm,V,x_bound,u_bound\n", 0) == 0);
    CHECK(csv.find("\r") == std::string::npos);
    int lines = 0;
    for (char c : csv)
        lines += (c == '\n');
    CHECK(lines == 1 + 21); // header + 2.0/dt/record_every + 1 records

    const ordered_json report = ordered_json::parse(slurp(dir.path / "simulate_report.json"));
    CHECK(report["trajectory_summary"]["bounds_hold"] == true);
    CHECK(report["trajectory_summary"]["diverged"] == false);

    // deterministic rerun produces identical bytes
    const std::string first = csv;
    CHECK(run_cli("simulate --config " + path.string() + " --out " + dir.path.string()) == 0);
    CHECK(slurp(dir.path / "trajectory.csv") == first);
}

TEST_CASE("cli: zero system produces an all-zero trajectory") {
    TempDir dir("certkit_cli_zero");
    ordered_json cfg{
        {"system",
         {{"a", 1.0},
          {"l", 1.0},
          {"C", {{-1.0}}},
          {"P", {{1.0}}},
          {"B", ordered_json::array({{{"kind", "zero"}}})},
          {"D", ordered_json::array({{{"kind", "zero"}}})}}},
        {"nonlinearity", {{"sigma", 0.0}, {"L", 0.0}, {"f", {{"kind", "zero"}}}}},
        {"numerics", {{"T", 1.0}, {"record_every", 200}}},
    };
    const auto path = write_config(dir, "zero.json", cfg);
    CHECK(run_cli("simulate --config " + path.string() + " --out " + dir.path.string()) == 0);
    std::ifstream in(dir.path / "trajectory.csv");
    std::string line;
    std::getline(in, line); // header
    while (std::getline(in, line)) {
        std::stringstream row(line);
        std::string cell;
        std::getline(row, cell, ','); // t varies
        for (int col = 1; col < 6 && std::getline(row, cell, ','); ++col)
            CHECK(std::stod(cell) == 0.0);
    }
}

TEST_CASE("cli: simulate without a feasible certificate reports no bounds") {
    TempDir dir("certkit_cli_nobounds");
    ordered_json cfg = certkit::example_config_json();
    cfg["nonlinearity"]["sigma"] = 20.0; // infeasible certificate, simulation still runs
    cfg["nonlinearity"]["f"]["amplitude"] = 20.0;
    cfg["nonlinearity"]["L"] = 20.0;
    cfg["numerics"]["T"] = 0.5;
    cfg["numerics"]["record_every"] = 100;
    const auto path = write_config(dir, "infeasible.json", cfg);
    CHECK(run_cli("simulate --config " + path.string() + " --out " + dir.path.string()) == 0);
    std::ifstream in(dir.path / "trajectory.csv");
    std::string line;
    std::getline(in, line);
    CHECK(line == "t,u_l2,x_norm,V,x_bound,u_bound");
    std::getline(in, line);
    CHECK(line.find("nan,nan") != std::string::npos);
    const ordered_json report = ordered_json::parse(slurp(dir.path / "simulate_report.json"));
    CHECK(!report["trajectory_summary"].contains("bounds_hold"));
}

TEST_CASE("cli: an oversized step under imex_euler diverges with exit 3") {
    TempDir dir("certkit_cli_div");
    ordered_json cfg = certkit::example_config_json();
    cfg["numerics"]["scheme"] = "imex_euler";
    cfg["numerics"]["dt"] = 4.0;
    cfg["numerics"]["T"] = 2000.0;
    const auto path = write_config(dir, "diverge.json", cfg);
    CHECK(run_cli("simulate --config " + path.string() + " --out " + dir.path.string()) == 3);
    const ordered_json report = ordered_json::parse(slurp(dir.path / "simulate_report.json"));
    CHECK(report["trajectory_summary"]["diverged"] == true);
    CHECK(report["trajectory_summary"]["time"].get<double>() > 0.0);
}

TEST_CASE("cli: sweep over p and over sigma") {
    TempDir dir("certkit_cli_sweep");
    const std::string base = "sweep --config " + std::string(CERTKIT_EXAMPLE_CONFIG) +
                             " --out " + dir.path.string();
    CHECK(run_cli(base + " --param p --grid 0.5,1,2") == 0);
    {
        std::ifstream in(dir.path / "sweep.csv");
        std::string line;
        std::getline(in, line);
        CHECK(line == "param,value,feasible,p12_l2,lambda_min_Pi1,lambda_max_Pi2,omega,"
                      "lambda_min_Omega,lambda_min_Xi,tau1,tau2");
        int rows = 0;
        bool p1_feasible = false;
        while (std::getline(in, line)) {
            ++rows;
            if (line.rfind("p,1,1,", 0) == 0)
                p1_feasible = true;
        }
        CHECK(rows == 3);
        CHECK(p1_feasible);
    }

    // feasibility flips exactly where omega changes sign on this grid
    CHECK(run_cli(base + " --param sigma --grid 5,6,6.5,7,8") == 0);
    {
        std::ifstream in(dir.path / "sweep.csv");
        std::string line;
        std::getline(in, line);
        int prev_feasible = -1, prev_omega_pos = -1;
        while (std::getline(in, line)) {
            std::stringstream row(line);
            std::string cell;
            std::vector<std::string> cells;
            while (std::getline(row, cell, ','))
                cells.push_back(cell);
            const int feasible = std::stoi(cells[2]);
            const int omega_pos = std::stod(cells[6]) > 0.0 ? 1 : 0;
            if (prev_feasible >= 0) {
                const bool feas_flip = feasible != prev_feasible;
                const bool omega_flip = omega_pos != prev_omega_pos;
                CHECK(feas_flip == omega_flip);
            }
            prev_feasible = feasible;
            prev_omega_pos = omega_pos;
        }
    }

    // the remaining parameters certify through the same row machinery
    CHECK(run_cli(base + " --param a --grid 1,1.2") == 0);
    CHECK(run_cli(base + " --param L --grid 0.5,1") == 0);
    CHECK(run_cli(base + " --param d_scale --grid 0.2,1") == 0);
    CHECK(run_cli(base + " --param b_scale --grid 0.5,1") == 0);

    // a thread cap must not change the rows or their order
    CHECK(run_cli(base + " --param p --grid 0.5,1,2") == 0);
    const std::string parallel = slurp(dir.path / "sweep.csv");
    CHECK(std::system(("CERTKIT_THREADS=1 " + std::string(CERTKIT_CLI_PATH) + " " + base +
                       " --param p --grid 0.5,1,2 >/dev/null 2>&1")
                          .c_str()) == 0);
    CHECK(slurp(dir.path / "sweep.csv") == parallel);

    CHECK(run_cli(base + " --param nope --grid 1,2") == 1);
    CHECK(run_cli("sweep --config " + std::string(CERTKIT_EXAMPLE_CONFIG) +
                  " --param p") == 1); // --grid is required
}

TEST_CASE("cli: audit passes the example and flags a broken Lipschitz claim") {
    TempDir dir("certkit_cli_audit");
    CHECK(run_cli("audit --config " + std::string(CERTKIT_EXAMPLE_CONFIG) + " --out " +
                  dir.path.string()) == 0);

    ordered_json cfg = certkit::example_config_json();
    cfg["nonlinearity"]["f"] = {{"kind", "polynomial"}, {"coeffs", {0.0, 0.0, 1.0}}};
    cfg["nonlinearity"]["sigma"] = 1e6;
    const auto path = write_config(dir, "bad.json", cfg);
    CHECK(run_cli("audit --config " + path.string() + " --out " + dir.path.string()) == 2);
    const ordered_json report = ordered_json::parse(slurp(dir.path / "audit_report.json"));
    CHECK(report["audit"]["all_pass"] == false);
    CHECK(report["audit"]["f0_lipschitz_bound"]["pass"] == false);
    CHECK(report["audit"]["f0_lipschitz_bound"].contains("witness"));

    ordered_json nosamples = certkit::example_config_json();
    nosamples["numerics"]["audit_samples"] = 0;
    const auto short_path = write_config(dir, "nosamples.json", nosamples);
    CHECK(run_cli("audit --config " + short_path.string() + " --out " + dir.path.string()) ==
          1);
}

TEST_CASE("cli: config echo in reports reparses to the same configuration") {
    TempDir dir("certkit_cli_echo");
    CHECK(run_cli("certify --config " + std::string(CERTKIT_EXAMPLE_CONFIG) + " --out " +
                  dir.path.string()) == 0);
    const ordered_json report = ordered_json::parse(slurp(dir.path / "certify_report.json"));
    const certkit::RunConfig from_echo = certkit::parse_config_json(report["config"]);
    CHECK(from_echo.echo == report["config"]);
}
