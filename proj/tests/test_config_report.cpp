#include "certkit/certificate.hpp"
#include "certkit/config.hpp"
#include "certkit/errors.hpp"
#include "certkit/report.hpp"

#include <doctest.h>

#include <charconv>
#include <filesystem>
#include <fstream>

using namespace certkit;
using nlohmann::ordered_json;

TEST_CASE("example configuration parses and its echo round-trips") {
    const RunConfig cfg = parse_config_json(example_config_json());
    CHECK(cfg.a == 1.0);
    CHECK(cfg.C(0, 0) == 0.25);
    CHECK(cfg.nonlinearity.sigma == 1.0);
    CHECK(cfg.disturbance.d_inf == 0.1);
    CHECK(cfg.sim.N == 48);

    const RunConfig again = parse_config_json(cfg.echo);
    CHECK(again.echo == cfg.echo); // normalization is idempotent
    CHECK(again.a == cfg.a);
    CHECK(again.sim.dt == cfg.sim.dt);
    CHECK(again.x0 == cfg.x0);
}

TEST_CASE("general-mode configuration builds a certifiable system") {
    ordered_json j{
        {"system",
         {{"a", 1.0},
          {"l", 1.0},
          {"C", {{-1.0}}},
          {"P", {{1.0}}},
          {"B", ordered_json::array({{{"kind", "constant"}, {"value", 0.5}}})},
          {"D", ordered_json::array({{{"kind", "constant"}, {"value", -0.3}}})}}},
        {"nonlinearity",
         {{"mode", "general"},
          {"sigma", 0.5},
          {"L", 0.5},
          {"q", 2.0},
          {"alpha", 0.1},
          {"c0", 0.3},
          {"zeta", 0.1},
          {"delta1", 0.5},
          {"delta2", 0.5},
          {"f0", {{"kind", "sin"}, {"amplitude", 0.5}, {"frequency", 1.0}}},
          {"f1", {{"kind", "cubic_damping"}, {"gain", 0.1}}},
          {"X", {{"kind", "cubic_damping"}, {"gain", 0.5}}}}},
    };
    const RunConfig cfg = parse_config_json(j);
    CHECK(cfg.nonlinearity.general());
    CHECK(cfg.nonlinearity.q == 2.0);
    // f = f0 + f1 with analytic derivatives
    CHECK(cfg.nonlinearity.f.value(0.7) ==
          doctest::Approx(0.5 * std::sin(0.7) - 0.1 * 0.7 * 0.7 * 0.7));
    CHECK(cfg.nonlinearity.f1.value(2.0) == doctest::Approx(-0.8));
    const Eigen::VectorXd Xv = cfg.nonlinearity.X(Eigen::VectorXd::Constant(1, 2.0));
    CHECK(Xv(0) == doctest::Approx(-0.5 * 8.0));

    const certkit::Certificate cert =
        certkit::certify(cfg.build_problem(), cfg.nonlinearity);
    CHECK(cert.feasible);
    CHECK(cert.tau2 < cert.tau1);

    // q < 3/2 is rejected in general mode
    ordered_json bad = j;
    bad["nonlinearity"]["q"] = 1.2;
    const RunConfig badcfg = parse_config_json(bad);
    CHECK_THROWS_AS(certkit::certify(badcfg.build_problem(), badcfg.nonlinearity),
                    certkit::config_error);
}

TEST_CASE("rho evaluator combines the initial state norms") {
    const certkit::Grid grid = certkit::Grid::uniform(1.0, 101);
    const certkit::SampledFn phi = certkit::SampledFn::from_scalar(
        grid, [](double z) { return std::sqrt(2.0) * std::sin(M_PI * z); }); // norm 1
    Eigen::VectorXd x0(2);
    x0 << 3.0, 4.0; // norm 5
    CHECK(certkit::IssConstants::rho(x0, phi) ==
          doctest::Approx(std::sqrt(26.0)).epsilon(1e-9));
}

TEST_CASE("schema violations are reported field by field") {
    ordered_json j = example_config_json();
    j["system"].erase("P");
    try {
        parse_config_json(j);
        FAIL("expected a configuration error");
    } catch (const config_error& e) {
        CHECK(std::string(e.what()).find("system.P") != std::string::npos);
    }

    ordered_json bad = example_config_json();
    bad["numerics"]["m"] = 400;
    bad["numerics"]["dt"] = -1.0;
    try {
        parse_config_json(bad);
        FAIL("expected a configuration error");
    } catch (const config_error& e) {
        const std::string msg = e.what();
        CHECK(msg.find("numerics.m") != std::string::npos);
        CHECK(msg.find("numerics.dt") != std::string::npos);
    }

    ordered_json badkind = example_config_json();
    badkind["nonlinearity"]["f"] = {{"kind", "mystery"}};
    CHECK_THROWS_AS(parse_config_json(badkind), config_error);
}

TEST_CASE("sample files feed B and D components") {
    const auto dir = std::filesystem::temp_directory_path() / "certkit_cfg_test";
    std::filesystem::create_directories(dir);
    const auto sample_path = (dir / "bvals.txt").string();
    {
        std::ofstream out(sample_path);
        for (int i = 0; i < 401; ++i)
            out << 1.0 << "\n";
    }
    ordered_json j = example_config_json();
    j["system"]["B"] = ordered_json::array({{{"kind", "samples"}, {"path", sample_path}}});
    const RunConfig cfg = parse_config_json(j);
    const CouplingProblem prob = cfg.build_problem();
    CHECK(prob.B.values().col(0).maxCoeff() == 1.0);
    CHECK(prob.B.values().col(0).minCoeff() == 1.0);

    // wrong sample count: named error at build time
    {
        std::ofstream out(sample_path);
        for (int i = 0; i < 100; ++i)
            out << 1.0 << "\n";
    }
    const RunConfig short_cfg = parse_config_json(j);
    CHECK_THROWS_AS(short_cfg.build_problem(), config_error);
    std::filesystem::remove_all(dir);
}

TEST_CASE("report formatting: nine significant digits and round-trip decimals") {
    CHECK(fmt9(13.992949517330956) == "13.9929495");
    CHECK(fmt9(0.0213676848) == "0.0213676848");
    for (double v : {0.1, 13.992949517330956, 1e-12, -0.374626, 0.0}) {
        const std::string s = shortest(v);
        double back = 0.0;
        const auto res = std::from_chars(s.data(), s.data() + s.size(), back);
        REQUIRE(res.ec == std::errc());
        CHECK(back == v);
    }
}

TEST_CASE("report: sections, tagged scalars, deterministic text") {
    Report report;
    report.add_scalar("certificate", "omega", 13.992949517,
                      "2 (pi^2 a^2 / l^2 - ||D||_L2 ||P12||_L2 - sigma)");
    report.add_comparison("omega", 13.992949517, 13.992949);
    const std::string text = report.to_text();
    CHECK(text.find("omega = 13.9929495") != std::string::npos);
    CHECK(text.find("paper_comparison") != std::string::npos);
    CHECK(report.to_text() == text); // rendering is pure

    const auto dir = std::filesystem::temp_directory_path() / "certkit_report_test";
    std::filesystem::create_directories(dir);
    atomic_write(dir / "r.txt", text);
    std::ifstream in(dir / "r.txt");
    std::string content((std::istreambuf_iterator<char>(in)),
                        std::istreambuf_iterator<char>());
    CHECK(content == text);
    std::filesystem::remove_all(dir);
}
