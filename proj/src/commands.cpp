#include "certkit/commands.hpp"

#include "certkit/certificate.hpp"
#include "certkit/config.hpp"
#include "certkit/errors.hpp"
#include "certkit/galerkin_sim.hpp"
#include "certkit/report.hpp"

#include <atomic>
#include <cstdlib>
#include <iostream>
#include <mutex>
#include <optional>
#include <thread>

namespace certkit::cli {

using nlohmann::ordered_json;

namespace {

std::filesystem::path output_dir(const RunConfig& cfg, const Options& options) {
    return options.out_dir.empty() ? cfg.out_dir : options.out_dir;
}

void fill_certificate_sections(Report& report, const Certificate& cert) {
    report.add_scalar("certificate", "p12_l1", cert.p12.norm_l1,
                      "int ||P12(z)|| dz over [0,l]");
    report.add_scalar("certificate", "p12_l2", cert.p12.norm_l2,
                      "(int ||P12(z)||^2 dz)^(1/2)");
    report.add_scalar("certificate", "p12_linf", cert.p12.norm_linf, "max_z ||P12(z)||");
    report.add_scalar("certificate", "p12_residual", cert.p12.residual_norm,
                      "max over interior nodes of ||a^2 D2 P12 + C'P12 + B + P D||");
    report.add_scalar("certificate", "lambda_min_Pi1", cert.lambda_min_Pi1,
                      "lambda_min [[1, -||P12||_L2], [-||P12||_L2, lambda_min(P)]]");
    report.add_scalar("certificate", "lambda_max_Pi2", cert.lambda_max_Pi2,
                      "lambda_max [[1, ||P12||_L2], [||P12||_L2, lambda_max(P)]]");
    report.add_scalar("certificate", "omega", cert.omega,
                      "2 (pi^2 a^2 / l^2 - ||D||_L2 ||P12||_L2 - sigma)");
    report.add_scalar("certificate", "lambda_min_Omega", cert.lambda_min_Omega,
                      "lambda_min of -(C'P + PC + int(P12 B' + B P12') dz)");
    report.add_scalar("certificate", "lambda_min_Xi", cert.lambda_min_Xi,
                      "lambda_min [[omega, -L||P12||_L2], [-L||P12||_L2, lambda_min(Omega)]]");
    if (std::isfinite(cert.tau1) || std::isfinite(cert.tau2)) {
        report.add_scalar("certificate", "tau1", cert.tau1,
                          "root of (zeta||P12||_L1/q) t^2q + (delta2||P12||_L2(2q-1)/q) "
                          "t^(2q/(2q-1)) = 2 delta1");
        report.add_scalar("certificate", "tau2", cert.tau2,
                          "root of (delta2||P12||_L2 l^(q-1)/q) t^-2q + "
                          "(zeta(2q-1)||P12||_Linf/q) t^(-2q/(2q-1)) = 2 alpha");
    }
    ordered_json verdicts;
    for (const auto& v : cert.verdicts)
        verdicts[v.name] = ordered_json{
            {"applicable", v.applicable}, {"pass", v.pass}, {"margin", v.margin}};
    verdicts["feasible"] = cert.feasible;
    report.set_section("verdicts", verdicts);
}

void fill_constants_section(Report& report, const IssConstants& c) {
    if (c.mode == IssConstants::Mode::Corollary) {
        report.add_scalar("iss_constants", "K1", c.K1, "L + ||D||_L2 ||P12||_L2");
        report.add_scalar("iss_constants", "K2", c.K2, "L ||P12||_L2 + ||D||_L2 ||P||");
        report.add_scalar("iss_constants", "theta", c.theta,
                          "lambda_min(Xi) / (2 lambda_max(Pi2))");
        report.add_scalar("iss_constants", "beta", c.beta,
                          "2 l (K1^2 + K2^2) / lambda_min(Xi)");
        report.add_scalar(
            "iss_constants", "x_bound_coefficient",
            std::sqrt(c.lambda_max_Pi2 / c.lambda_min_Pi1),
            "sqrt(lambda_max(Pi2) / lambda_min(Pi1)), decay term coefficient at rho = 1");
        report.add_scalar("iss_constants", "d_inf_gain",
                          std::sqrt(c.beta / (c.theta * c.lambda_min_Pi1)),
                          "sqrt(beta / (theta lambda_min(Pi1))), gain multiplying d_inf");
    } else {
        report.add_scalar("iss_constants", "theta0", c.theta0,
                          "lambda_min(Xi) / (2 lambda_max(Pi2))");
        report.add_scalar("iss_constants", "epsilon", c.epsilon,
                          "halved from 1 until H3 < 0 and H4 < 0");
        report.add_scalar("iss_constants", "tau", c.tau, "(tau1 + tau2) / 2");
        report.add_scalar("iss_constants", "H1", c.H1,
                          "2 sqrt(l) (psi0 + d_inf ||D||_L2 ||P12||_L2)");
        report.add_scalar("iss_constants", "H2", c.H2,
                          "2 sqrt(l) (||P12||_L2 psi0 + ||P|| ||D||_L2 d_inf)");
        report.add_scalar("iss_constants", "vartheta", c.vartheta,
                          "(H1^2 + H2^2) / (2 lambda_min(Xi))");
        report.add_scalar("iss_constants", "d_inf", c.d_inf,
                          "disturbance level the constants were evaluated at");
    }
}

void fill_numerics_section(Report& report, const RunConfig& cfg, std::uint64_t seed) {
    report.set_section(
        "numerics",
        ordered_json{{"m", cfg.sim.m},
                     {"N", cfg.sim.N},
                     {"dt", cfg.sim.dt},
                     {"T", cfg.sim.T},
                     {"scheme", cfg.sim.scheme == Scheme::Etdrk2 ? "etdrk2" : "imex_euler"},
                     {"audit_samples", cfg.audit_samples},
                     {"seed", seed},
                     {"pd_margin", 1e-10},
                     {"tau_residual_tol", 1e-10}});
}

void write_report(const Report& report, const RunConfig& cfg, const Options& options,
                  const std::string& stem, bool echo_stdout = true) {
    const auto dir = output_dir(cfg, options);
    if (cfg.write_json)
        atomic_write(dir / (stem + ".json"), report.to_json_text());
    if (cfg.write_text)
        atomic_write(dir / (stem + ".txt"), report.to_text());
    if (echo_stdout)
        std::cout << report.to_text();
}

int thread_budget() {
    unsigned n = std::thread::hardware_concurrency();
    if (n == 0)
        n = 1;
    if (const char* env = std::getenv("CERTKIT_THREADS")) {
        const long cap = std::strtol(env, nullptr, 10);
        if (cap >= 1 && cap < static_cast<long>(n))
            n = static_cast<unsigned>(cap);
    }
    return static_cast<int>(n);
}

IssConstants make_constants(const Certificate& cert, const CouplingProblem& problem,
                            const RunConfig& cfg) {
    if (cfg.nonlinearity.general())
        return general_bound_constants(cert, problem, cfg.nonlinearity,
                                       cfg.disturbance.d_inf);
    return corollary_constants(cert, problem, cfg.nonlinearity);
}

} // namespace

int cmd_certify(const Options& options) {
    const RunConfig cfg = parse_config_file(options.config_path);
    const CouplingProblem problem = cfg.build_problem();
    const Certificate cert = certify(problem, cfg.nonlinearity);

    Report report;
    report.set_config_echo(cfg.echo);
    fill_certificate_sections(report, cert);
    fill_numerics_section(report, cfg, options.seed);
    if (cert.feasible)
        fill_constants_section(report, make_constants(cert, problem, cfg));
    write_report(report, cfg, options, "certify_report");
    return cert.feasible ? exit_success : exit_infeasible;
}

int cmd_simulate(const Options& options) {
    const RunConfig cfg = parse_config_file(options.config_path);
    const CouplingProblem problem = cfg.build_problem();
    const Certificate cert = certify(problem, cfg.nonlinearity);
    IssConstants constants;
    const bool have_bounds = cert.feasible;
    if (have_bounds)
        constants = make_constants(cert, problem, cfg);

    const SampledFn phi = cfg.build_u0(problem.grid());
    const double rho = IssConstants::rho(cfg.x0, phi);
    const double d_inf = cfg.disturbance.d_inf;

    Report report;
    report.set_config_echo(cfg.echo);
    fill_certificate_sections(report, cert);
    fill_numerics_section(report, cfg, options.seed);
    if (have_bounds)
        fill_constants_section(report, constants);

    Trajectory traj;
    try {
        traj = simulate(problem, cfg.nonlinearity, cfg.disturbance, phi, cfg.x0, cfg.sim,
                        &cert.p12);
    } catch (const divergence_error& e) {
        report.set_section("trajectory_summary", ordered_json{{"diverged", true},
                                                              {"time", e.time},
                                                              {"message", e.what()}});
        write_report(report, cfg, options, "simulate_report");
        std::cerr << e.what() << "\n";
        return exit_divergence;
    }

    const double nan = std::numeric_limits<double>::quiet_NaN();
    std::string csv = "t,u_l2,x_norm,V,x_bound,u_bound\n";
    double max_x_margin = -std::numeric_limits<double>::infinity();
    double max_u_margin = -std::numeric_limits<double>::infinity();
    for (size_t i = 0; i < traj.times.size(); ++i) {
        BoundPair b{nan, nan};
        if (have_bounds)
            b = cfg.nonlinearity.general()
                    ? general_iss_bound(constants, cert, traj.times[i], rho)
                    : iss_bound(constants, cert, traj.times[i], d_inf, rho);
        if (have_bounds) {
            max_x_margin = std::max(max_x_margin, traj.x_norm[i] - b.x_bound);
            max_u_margin = std::max(max_u_margin, traj.u_l2[i] - b.u_bound);
        }
        csv += shortest(traj.times[i]) + "," + shortest(traj.u_l2[i]) + "," +
               shortest(traj.x_norm[i]) + "," +
               shortest(traj.V.empty() ? nan : traj.V[i]) + "," + shortest(b.x_bound) + "," +
               shortest(b.u_bound) + "\n";
    }
    atomic_write(output_dir(cfg, options) / "trajectory.csv", csv);

    ordered_json summary{{"records", traj.times.size()},
                         {"t_final", traj.times.empty() ? 0.0 : traj.times.back()},
                         {"u_l2_final", traj.u_l2.empty() ? 0.0 : traj.u_l2.back()},
                         {"x_norm_final", traj.x_norm.empty() ? 0.0 : traj.x_norm.back()},
                         {"rho", rho},
                         {"diverged", false}};
    if (have_bounds) {
        summary["max_x_bound_margin"] = max_x_margin; // negative means bounds hold
        summary["max_u_bound_margin"] = max_u_margin;
        summary["bounds_hold"] = max_x_margin <= 0.0 && max_u_margin <= 0.0;
    }
    report.set_section("trajectory_summary", summary);
    write_report(report, cfg, options, "simulate_report");
    return exit_success;
}

int cmd_sweep(const Options& options) {
    const RunConfig cfg = parse_config_file(options.config_path);
    if (options.param.empty())
        throw config_error("sweep: --param is required");
    if (options.grid.empty())
        throw config_error("sweep: --grid is required and must be non-empty");
    const std::string& param = options.param;
    const bool known = param == "p" || param == "sigma" || param == "L" || param == "a" ||
                       param == "b_scale" || param == "d_scale";
    if (!known)
        throw config_error("sweep: unknown parameter '" + param +
                           "' (known: p, sigma, L, a, b_scale, d_scale)");

    const CouplingProblem base = cfg.build_problem();
    std::vector<std::optional<Certificate>> rows(options.grid.size());

    auto row_for = [&](double value) {
        if (param == "a")
            return certify(CouplingProblem(value, base.C, base.P, base.B, base.D),
                           cfg.nonlinearity);
        if (param == "b_scale" || param == "d_scale") {
            SampledFn B = base.B, D = base.D;
            (param == "b_scale" ? B : D).values() *= value;
            return certify(CouplingProblem(base.a, base.C, base.P, B, D), cfg.nonlinearity);
        }
        NonlinearitySpec spec = cfg.nonlinearity;
        (param == "sigma" ? spec.sigma : spec.L) = value;
        return certify(base, spec);
    };

    if (param == "p") {
        const ScanResult scan = scan_scalar_P(base, cfg.nonlinearity, options.grid);
        for (size_t i = 0; i < scan.entries.size(); ++i)
            rows[i] = scan.entries[i].cert;
    } else {
        std::atomic<size_t> next{0};
        std::exception_ptr first_error;
        std::mutex error_mutex;
        auto worker = [&]() {
            for (;;) {
                const size_t i = next.fetch_add(1);
                if (i >= options.grid.size())
                    return;
                try {
                    rows[i] = row_for(options.grid[i]);
                } catch (...) {
                    std::lock_guard<std::mutex> lock(error_mutex);
                    if (!first_error)
                        first_error = std::current_exception();
                    return;
                }
            }
        };
        const int nthreads =
            std::min<int>(thread_budget(), static_cast<int>(options.grid.size()));
        std::vector<std::thread> pool;
        for (int i = 0; i < nthreads; ++i)
            pool.emplace_back(worker);
        for (auto& t : pool)
            t.join();
        if (first_error)
            std::rethrow_exception(first_error);
    }

    std::string csv = "param,value,feasible,p12_l2,lambda_min_Pi1,lambda_max_Pi2,omega,"
                      "lambda_min_Omega,lambda_min_Xi,tau1,tau2\n";
    bool any_feasible = false;
    int best = -1;
    for (size_t i = 0; i < rows.size(); ++i) {
        const Certificate& c = *rows[i];
        any_feasible = any_feasible || c.feasible;
        if (c.feasible && (best < 0 || c.lambda_min_Xi > rows[best]->lambda_min_Xi))
            best = static_cast<int>(i);
        csv += param + "," + shortest(options.grid[i]) + "," + (c.feasible ? "1" : "0") +
               "," + shortest(c.p12.norm_l2) + "," + shortest(c.lambda_min_Pi1) + "," +
               shortest(c.lambda_max_Pi2) + "," + shortest(c.omega) + "," +
               shortest(c.lambda_min_Omega) + "," + shortest(c.lambda_min_Xi) + "," +
               shortest(c.tau1) + "," + shortest(c.tau2) + "\n";
    }
    atomic_write(output_dir(cfg, options) / "sweep.csv", csv);

    Report report;
    report.set_config_echo(cfg.echo);
    fill_numerics_section(report, cfg, options.seed);
    ordered_json summary{{"param", param},
                         {"points", options.grid.size()},
                         {"any_feasible", any_feasible}};
    if (best >= 0) {
        summary["best_value"] = options.grid[best];
        summary["best_lambda_min_Xi"] = rows[best]->lambda_min_Xi;
    }
    report.set_section("sweep_summary", summary);
    write_report(report, cfg, options, "sweep_report");
    return any_feasible ? exit_success : exit_infeasible;
}

int cmd_audit(const Options& options) {
    const RunConfig cfg = parse_config_file(options.config_path);
    const AuditReport audit =
        audit_hypotheses(cfg.nonlinearity, cfg.P, cfg.audit_samples, options.seed);

    Report report;
    report.set_config_echo(cfg.echo);
    fill_numerics_section(report, cfg, options.seed);
    ordered_json checks = ordered_json::object();
    for (const auto& c : audit.checks) {
        ordered_json row{{"applicable", c.applicable}, {"pass", c.pass}};
        if (!c.witness.empty())
            row["witness"] = c.witness;
        checks[c.assumption] = row;
    }
    checks["all_pass"] = audit.all_pass;
    checks["note"] = audit.note;
    report.set_section("audit", checks);
    write_report(report, cfg, options, "audit_report");
    return audit.all_pass ? exit_success : exit_infeasible;
}

int cmd_reproduce_example(const Options& options) {
    RunConfig cfg = parse_config_json(example_config_json());
    const CouplingProblem problem = cfg.build_problem();
    const Certificate cert = certify(problem, cfg.nonlinearity);
    const IssConstants constants = corollary_constants(cert, problem, cfg.nonlinearity);
    const KappaChi kc = kappa_chi(std::sqrt(problem.C(0, 0)) / problem.a, problem.l(),
                                  cfg.sim.m);

    Report report;
    report.set_config_echo(cfg.echo);
    fill_certificate_sections(report, cert);
    fill_constants_section(report, constants);
    fill_numerics_section(report, cfg, options.seed);
    report.add_scalar("certificate", "kappa", kc.kappa, "(2/lambda) tan(lambda l / 2) - l");
    report.add_scalar("certificate", "chi", kc.chi,
                      "(int (sin(lambda l) + sin(lambda(z-l)) - sin(lambda z))^2 "
                      "dz)^(1/2) / |sin(lambda l)|");

    report.add_comparison("kappa", kc.kappa, 0.021367);
    report.add_comparison("chi", kc.chi, 0.023414);
    report.add_comparison("p12_l2", cert.p12.norm_l2, 0.374626);
    report.add_comparison("omega", cert.omega, 13.992949);
    report.add_comparison("Omega", cert.lambda_min_Omega, 0.183766);
    report.add_comparison("lambda_min_Pi1", cert.lambda_min_Pi1, 0.625374);
    report.add_comparison("lambda_max_Pi2", cert.lambda_max_Pi2, 1.374626);
    report.add_comparison("lambda_min_Xi", cert.lambda_min_Xi, 0.1736102);
    report.add_comparison("K1", constants.K1, 2.873130);
    report.add_comparison("theta", constants.theta, 0.06315);
    report.add_comparison("x_bound_coefficient",
                          std::sqrt(cert.lambda_max_Pi2 / cert.lambda_min_Pi1), 1.482594);
    report.add_comparison(
        "K2", constants.K2, 8.7462728,
        "DISCREPANCY: the published value does not follow from the stated formula "
        "K2 = L ||P12||_L2 + ||D||_L2 ||P||; the formula-derived value is authoritative "
        "and is used in all downstream bounds");
    report.add_comparison(
        "beta", constants.beta, 785.0749,
        "DISCREPANCY: the published value does not follow from the stated formula "
        "beta = 2 l (K1^2 + K2^2) / lambda_min(Xi) with the formula-derived K2; the "
        "formula-derived value is authoritative and is used in all downstream bounds");

    write_report(report, cfg, options, "example_report");
    return exit_success;
}

} // namespace certkit::cli
