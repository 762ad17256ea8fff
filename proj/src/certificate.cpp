#include "certkit/certificate.hpp"

#include "certkit/errors.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <sstream>

namespace certkit {

namespace {

constexpr double kPdMargin = 1e-10; // strict-positivity margin for verdicts

// residual accepted by compute_Omega before a solution counts as stale; the
// grid term tracks the O(h^2) truncation of the second-difference residual
double stale_residual_tol(const Grid& grid, double f_inf) {
    const double h = grid.h();
    return std::max(1e-4, 20.0 * h * h) * (1.0 + f_inf);
}

struct Eigen2x2 {
    double min, max;
};

Eigen2x2 sym2x2_eigenvalues(double p, double r, double s) {
    const double mean = 0.5 * (p + s);
    const double disc = std::hypot(0.5 * (p - s), r);
    return {mean - disc, mean + disc};
}

Eigen::VectorXd simpson_weights(const Grid& grid) {
    Eigen::VectorXd w = Eigen::VectorXd::Zero(grid.m);
    const double h = grid.h();
    w(0) = w(grid.m - 1) = h / 3.0;
    for (int i = 1; i < grid.m - 1; ++i)
        w(i) = (i % 2 == 1) ? 4.0 * h / 3.0 : 2.0 * h / 3.0;
    return w;
}

double spectral_norm(const Eigen::MatrixXd& P) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(P);
    return es.eigenvalues().cwiseAbs().maxCoeff();
}

std::string fmt(double v) {
    std::ostringstream os;
    os.precision(9);
    os << v;
    return os.str();
}

} // namespace

void NonlinearitySpec::validate() const {
    if (!(std::isfinite(sigma) && std::isfinite(L)) || L < 0.0)
        throw config_error("nonlinearity: sigma must be finite and L >= 0");
    if (mode == NonlinearityMode::General) {
        if (!(q >= 1.5))
            throw config_error("nonlinearity: q must be >= 3/2 in general mode");
        if (alpha < 0.0 || c0 < 0.0 || zeta < 0.0 || delta1 < 0.0 || delta2 < 0.0)
            throw config_error("nonlinearity: alpha, c0, zeta, delta1, delta2 must be >= 0");
    }
}

double IssConstants::rho(const Eigen::VectorXd& x0, const SampledFn& phi) {
    const double un = lp_norm(phi, 2.0);
    return std::sqrt(x0.squaredNorm() + un * un);
}

PiMatrices build_pi_matrices(double p12_l2_norm, const Eigen::MatrixXd& P) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(P);
    const double pmin = es.eigenvalues().minCoeff();
    const double pmax = es.eigenvalues().maxCoeff();
    PiMatrices out;
    out.Pi1 << 1.0, -p12_l2_norm, -p12_l2_norm, pmin;
    out.Pi2 << 1.0, p12_l2_norm, p12_l2_norm, pmax;
    out.lambda_min_Pi1 = sym2x2_eigenvalues(1.0, -p12_l2_norm, pmin).min;
    out.lambda_max_Pi2 = sym2x2_eigenvalues(1.0, p12_l2_norm, pmax).max;
    return out;
}

double compute_omega(double a, double l, double D_l2, double p12_l2, double sigma) {
    if (!(a > 0.0) || !(l > 0.0))
        throw domain_error("omega: a and l must be positive");
    const double pi = M_PI;
    return 2.0 * (pi * pi * a * a / (l * l) - D_l2 * p12_l2 - sigma);
}

OmegaResult compute_Omega(const CouplingProblem& problem, const P12Solution& p12) {
    const double resid = p12_residual(p12, problem);
    const double f_inf = lp_norm(problem.forcing(), inf_norm_order);
    if (resid > stale_residual_tol(problem.grid(), f_inf))
        throw stale_solution_error("Omega: supplied coupling weight does not solve this "
                                   "problem (residual " +
                                   fmt(resid) + ")");
    const int n = problem.dim();
    const Eigen::VectorXd w = simpson_weights(problem.grid());
    Eigen::MatrixXd T = Eigen::MatrixXd::Zero(n, n);
    for (int i = 0; i < problem.grid().m; ++i)
        T += w(i) * (p12.values.at(i) * problem.B.at(i).transpose());
    Eigen::MatrixXd Om =
        -(problem.C.transpose() * problem.P + problem.P * problem.C + T + T.transpose());
    Om = 0.5 * (Om + Om.transpose());
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(Om);
    return {Om, es.eigenvalues().minCoeff()};
}

OmegaResult compute_Omega_double_integral(const CouplingProblem& problem,
                                          const GreenKernel& kernel) {
    const int n = problem.dim();
    Eigen::MatrixXd wv = problem.B.values() + problem.D.values() * problem.P.transpose();
    SampledFn bpd(problem.grid(), std::move(wv));
    const Eigen::MatrixXd rows = integral_against_kernel(kernel, bpd);
    const Eigen::VectorXd w = simpson_weights(problem.grid());
    Eigen::MatrixXd T = Eigen::MatrixXd::Zero(n, n);
    for (int i = 0; i < problem.grid().m; ++i)
        T += w(i) * (rows.row(i).transpose() * problem.B.at(i).transpose());
    T /= problem.a * problem.a;
    Eigen::MatrixXd Om =
        -(problem.C.transpose() * problem.P + problem.P * problem.C - T - T.transpose());
    Om = 0.5 * (Om + Om.transpose());
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(Om);
    return {Om, es.eigenvalues().minCoeff()};
}

XiResult compute_Xi(double omega, double lambda_min_Omega, double L, double p12_l2) {
    XiResult out;
    const double off = -L * p12_l2;
    out.Xi << omega, off, off, lambda_min_Omega;
    out.lambda_min = sym2x2_eigenvalues(omega, off, lambda_min_Omega).min;
    return out;
}

namespace {

// Bisection for a strictly monotone left side against a constant right side.
// Relative residual is driven to rounding; exact hits are returned directly.
double monotone_root(const std::function<double(double)>& lhs, double rhs, bool increasing) {
    auto defect = [&](double t) { return increasing ? lhs(t) - rhs : rhs - lhs(t); };
    double lo = 1.0, hi = 1.0;
    if (defect(1.0) == 0.0)
        return 1.0;
    int guard = 0;
    while (defect(hi) < 0.0) {
        hi *= 2.0;
        if (++guard > 4000)
            throw no_root_error("tau equation: no root within bracket expansion");
    }
    if (defect(hi) == 0.0)
        return hi;
    guard = 0;
    while (defect(lo) > 0.0) {
        lo *= 0.5;
        if (++guard > 4000)
            throw no_root_error("tau equation: no root within bracket shrinking");
    }
    if (defect(lo) == 0.0)
        return lo;
    for (int it = 0; it < 200 && hi - lo > 0.0; ++it) {
        const double mid = 0.5 * (lo + hi);
        const double d = defect(mid);
        if (d == 0.0)
            return mid;
        (d < 0.0 ? lo : hi) = mid;
        if (std::abs(d) <= 1e-14 * (1.0 + std::abs(rhs)) && hi - lo <= 1e-14 * mid)
            break;
    }
    return 0.5 * (lo + hi);
}

} // namespace

TauPair solve_tau(const NonlinearitySpec& spec, double p12_l1, double p12_l2, double p12_linf,
                  double l) {
    if (!spec.general())
        throw config_error("solve_tau: only defined in general mode");
    const double q = spec.q;
    const double A1 = spec.zeta * p12_l1 / q;
    const double B1 = spec.delta2 * p12_l2 * (2.0 * q - 1.0) / q;
    const double A2 = spec.delta2 * p12_l2 * std::pow(l, q - 1.0) / q;
    const double B2 = spec.zeta * (2.0 * q - 1.0) * p12_linf / q;
    const double e1 = 2.0 * q;
    const double e2 = 2.0 * q / (2.0 * q - 1.0);

    TauPair out{};
    if (spec.delta1 == 0.0) {
        out.tau1 = 0.0; // degenerate: the increasing side starts at its target
    } else if (A1 == 0.0 && B1 == 0.0) {
        throw no_root_error("tau1 equation: left side is identically zero with 2 delta1 > 0");
    } else {
        auto lhs1 = [&](double t) { return A1 * std::pow(t, e1) + B1 * std::pow(t, e2); };
        out.tau1 = monotone_root(lhs1, 2.0 * spec.delta1, true);
    }
    if (spec.alpha == 0.0) {
        out.tau2 = std::numeric_limits<double>::infinity();
    } else if (A2 == 0.0 && B2 == 0.0) {
        throw no_root_error("tau2 equation: left side is identically zero with 2 alpha > 0");
    } else {
        auto lhs2 = [&](double t) { return A2 * std::pow(t, -e1) + B2 * std::pow(t, -e2); };
        out.tau2 = monotone_root(lhs2, 2.0 * spec.alpha, false);
    }
    return out;
}

Certificate certify(const CouplingProblem& problem, const NonlinearitySpec& spec) {
    spec.validate();
    Certificate cert{solve_p12_direct(problem)};
    const PiMatrices pi = build_pi_matrices(cert.p12.norm_l2, problem.P);
    cert.Pi1 = pi.Pi1;
    cert.Pi2 = pi.Pi2;
    cert.lambda_min_Pi1 = pi.lambda_min_Pi1;
    cert.lambda_max_Pi2 = pi.lambda_max_Pi2;

    const double D_l2 = lp_norm(problem.D, 2.0);
    cert.omega = compute_omega(problem.a, problem.l(), D_l2, cert.p12.norm_l2, spec.sigma);
    const OmegaResult om = compute_Omega(problem, cert.p12);
    cert.Omega = om.Omega;
    cert.lambda_min_Omega = om.lambda_min;
    const XiResult xi = compute_Xi(cert.omega, cert.lambda_min_Omega, spec.L, cert.p12.norm_l2);
    cert.Xi = xi.Xi;
    cert.lambda_min_Xi = xi.lambda_min;

    if (spec.general()) {
        const TauPair tau =
            solve_tau(spec, cert.p12.norm_l1, cert.p12.norm_l2, cert.p12.norm_linf,
                      problem.l());
        cert.tau1 = tau.tau1;
        cert.tau2 = tau.tau2;
    }

    cert.verdicts = {
        {"Pi1_positive_definite", true, cert.lambda_min_Pi1 > kPdMargin, cert.lambda_min_Pi1},
        {"omega_positive", true, cert.omega > kPdMargin, cert.omega},
        {"Omega_positive_definite", true, cert.lambda_min_Omega > kPdMargin,
         cert.lambda_min_Omega},
        {"Xi_positive_definite", true, cert.lambda_min_Xi > kPdMargin, cert.lambda_min_Xi},
        {"tau2_less_than_tau1", spec.general(),
         spec.general() && std::isfinite(cert.tau2) && cert.tau2 < cert.tau1,
         spec.general() ? cert.tau1 - cert.tau2 : 0.0},
    };
    cert.feasible = true;
    for (const auto& v : cert.verdicts)
        if (v.applicable && !v.pass)
            cert.feasible = false;
    return cert;
}

double psi0(const NonlinearitySpec& spec, double eps, double d_inf) {
    const double q = spec.q;
    const double p2q3 = std::pow(2.0, 2.0 * q - 3.0);
    return p2q3 * spec.c0 * std::pow(eps, 1.0 - 2.0 * q) * std::pow(d_inf, 2.0 * q - 1.0) /
               (2.0 * q - 1.0) +
           (spec.L + spec.c0) * d_inf + p2q3 * spec.c0 * std::pow(d_inf, 2.0 * q - 1.0);
}

double psi1(const NonlinearitySpec& spec, double eps) {
    const double q = spec.q;
    return std::pow(2.0, 2.0 * q - 3.0) * spec.c0 * (2.0 * q - 2.0) / (2.0 * q - 1.0) *
           std::pow(eps, (2.0 * q - 1.0) / (2.0 * q - 2.0));
}

double proof_H1(const NonlinearitySpec& spec, double eps, double d_inf, double D_l2,
                double p12_l2, double l) {
    return 2.0 * std::sqrt(l) * (psi0(spec, eps, d_inf) + d_inf * D_l2 * p12_l2);
}

double proof_H2(const NonlinearitySpec& spec, double eps, double d_inf, double D_l2,
                double p12_l2, double P_norm, double l) {
    return 2.0 * std::sqrt(l) * (p12_l2 * psi0(spec, eps, d_inf) + P_norm * D_l2 * d_inf);
}

double proof_H3(const NonlinearitySpec& spec, double eps, double tau, double p12_l2,
                double p12_linf, double l) {
    const double q = spec.q;
    return 2.0 * psi1(spec, eps) * (1.0 + (2.0 * q - 1.0) / (2.0 * q) * p12_linf) +
           spec.delta2 * p12_l2 * std::pow(l, q - 1.0) / q * std::pow(tau, -2.0 * q) +
           spec.zeta * (2.0 * q - 1.0) * p12_linf / q *
               std::pow(tau, -2.0 * q / (2.0 * q - 1.0)) -
           2.0 * spec.alpha;
}

double proof_H4(const NonlinearitySpec& spec, double eps, double tau, double p12_l1,
                double p12_l2) {
    const double q = spec.q;
    return psi1(spec, eps) * p12_l1 / q + spec.zeta * p12_l1 / q * std::pow(tau, 2.0 * q) +
           spec.delta2 * p12_l2 * (2.0 * q - 1.0) / q *
               std::pow(tau, 2.0 * q / (2.0 * q - 1.0)) -
           2.0 * spec.delta1;
}

IssConstants corollary_constants(const Certificate& cert, const CouplingProblem& problem,
                                 const NonlinearitySpec& spec) {
    if (spec.general())
        throw config_error("corollary constants require globally-Lipschitz mode");
    if (!cert.feasible)
        throw infeasible_error("corollary constants: certificate is infeasible");
    IssConstants out;
    out.mode = IssConstants::Mode::Corollary;
    const double D_l2 = lp_norm(problem.D, 2.0);
    out.K1 = spec.L + D_l2 * cert.p12.norm_l2;
    out.K2 = spec.L * cert.p12.norm_l2 + D_l2 * spectral_norm(problem.P);
    out.theta = cert.lambda_min_Xi / (2.0 * cert.lambda_max_Pi2);
    out.beta = 2.0 * problem.l() * (out.K1 * out.K1 + out.K2 * out.K2) / cert.lambda_min_Xi;
    out.lambda_min_Pi1 = cert.lambda_min_Pi1;
    out.lambda_max_Pi2 = cert.lambda_max_Pi2;
    out.lambda_min_Xi = cert.lambda_min_Xi;
    out.l = problem.l();
    return out;
}

IssConstants general_bound_constants(const Certificate& cert, const CouplingProblem& problem,
                                     const NonlinearitySpec& spec, double d_inf) {
    if (!spec.general())
        throw config_error("general bound constants require general mode");
    if (!cert.feasible)
        throw infeasible_error("general bound constants: certificate is infeasible");
    IssConstants out;
    out.mode = IssConstants::Mode::General;
    out.tau = 0.5 * (cert.tau1 + cert.tau2);
    out.epsilon = 1.0;
    const double l = problem.l();
    bool ok = false;
    for (int i = 0; i <= 60; ++i) {
        if (proof_H3(spec, out.epsilon, out.tau, cert.p12.norm_l2, cert.p12.norm_linf, l) <
                0.0 &&
            proof_H4(spec, out.epsilon, out.tau, cert.p12.norm_l1, cert.p12.norm_l2) < 0.0) {
            ok = true;
            break;
        }
        out.epsilon *= 0.5;
    }
    if (!ok)
        throw numeric_degeneracy_error(
            "general bound constants: no epsilon found within 60 halvings");
    const double D_l2 = lp_norm(problem.D, 2.0);
    out.H1 = proof_H1(spec, out.epsilon, d_inf, D_l2, cert.p12.norm_l2, l);
    out.H2 = proof_H2(spec, out.epsilon, d_inf, D_l2, cert.p12.norm_l2,
                      spectral_norm(problem.P), l);
    out.theta0 = cert.lambda_min_Xi / (2.0 * cert.lambda_max_Pi2);
    out.vartheta = (out.H1 * out.H1 + out.H2 * out.H2) / (2.0 * cert.lambda_min_Xi);
    out.d_inf = d_inf;
    out.lambda_min_Pi1 = cert.lambda_min_Pi1;
    out.lambda_max_Pi2 = cert.lambda_max_Pi2;
    out.lambda_min_Xi = cert.lambda_min_Xi;
    out.l = l;
    return out;
}

BoundPair iss_bound(const IssConstants& constants, const Certificate& cert, double t,
                    double d_inf, double rho) {
    if (constants.mode != IssConstants::Mode::Corollary)
        throw config_error("iss_bound: constants are not in corollary mode");
    const double decay = std::sqrt(cert.lambda_max_Pi2 / cert.lambda_min_Pi1) * rho *
                         std::exp(-constants.theta * t / 2.0);
    const double gain =
        std::sqrt(constants.beta / (constants.theta * cert.lambda_min_Pi1)) * d_inf;
    return {decay + gain, decay + gain + std::sqrt(constants.l) * d_inf};
}

BoundPair general_iss_bound(const IssConstants& constants, const Certificate& cert, double t,
                            double rho) {
    if (constants.mode != IssConstants::Mode::General)
        throw config_error("general_iss_bound: constants are not in general mode");
    const double decay = std::sqrt(cert.lambda_max_Pi2 / cert.lambda_min_Pi1) * rho *
                         std::exp(-constants.theta0 * t / 2.0);
    const double gain =
        std::sqrt(constants.vartheta / (cert.lambda_min_Pi1 * constants.theta0));
    return {decay + gain, decay + gain + std::sqrt(constants.l) * constants.d_inf};
}

KappaChi kappa_chi(double lambda, double l, int quad_nodes) {
    if (!(lambda > 0.0) || !(l > 0.0))
        throw domain_error("kappa_chi: lambda and l must be positive");
    if (std::abs(std::cos(lambda * l / 2.0)) <= 1e-12)
        throw singular_problem_error("kappa_chi: tan(lambda l / 2) pole at lambda l = " +
                                     std::to_string(lambda * l));
    const double sl = std::sin(lambda * l);
    if (std::abs(sl) <= 1e-12)
        throw singular_problem_error("kappa_chi: sin(lambda l) vanishes");
    KappaChi out;
    out.kappa = 2.0 / lambda * std::tan(lambda * l / 2.0) - l;
    const Grid grid = Grid::uniform(l, quad_nodes);
    const SampledFn sq = SampledFn::from_scalar(grid, [&](double z) {
        const double s = sl + std::sin(lambda * (z - l)) - std::sin(lambda * z);
        return s * s;
    });
    out.chi = std::sqrt(integrate(sq)) / std::abs(sl);
    out.kappa_approx = lambda * lambda * l * l * l / 12.0;
    out.chi_approx = lambda * lambda * l * l * std::sqrt(l) / (2.0 * std::sqrt(30.0));
    return out;
}

namespace {

class SampleRng {
  public:
    explicit SampleRng(std::uint64_t seed) : state_(seed ? seed : 0x9e3779b97f4a7c15ull) {}

    double uniform() { // in [0,1)
        return static_cast<double>(next() >> 11) * 0x1.0p-53;
    }
    double normal() {
        const double u1 = std::max(uniform(), 1e-300);
        const double u2 = uniform();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
    }

  private:
    std::uint64_t next() { // splitmix64
        std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ull);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
        return z ^ (z >> 31);
    }
    std::uint64_t state_;
};

double checked_eval(const ScalarFn& fn, double s) {
    const double v = fn.value(s);
    if (!std::isfinite(v))
        throw certkit::domain_error("audit: non-finite handle output at s = " + fmt(s));
    return v;
}

} // namespace

AuditReport audit_hypotheses(const NonlinearitySpec& spec, const Eigen::MatrixXd& P,
                             int samples, std::uint64_t seed) {
    spec.validate();
    if (samples <= 0)
        throw config_error("audit: sample count must be positive");
    if (spec.f.empty())
        throw config_error("audit: nonlinearity handle f is not evaluable");
    const bool general = spec.general();
    SampleRng rng(seed);

    // log-spaced symmetric scalar sample set
    const int K = std::max(32, samples / 4);
    std::vector<double> svals;
    svals.reserve(2 * K);
    for (int i = 0; i < K; ++i) {
        const double mag = std::pow(10.0, -6.0 + 9.0 * i / std::max(1, K - 1));
        svals.push_back(mag);
        svals.push_back(-mag);
    }
    std::sort(svals.begin(), svals.end());

    auto f1_val = [&](double s) { return general ? checked_eval(spec.f1, s) : 0.0; };
    auto f0_val = [&](double s) { return checked_eval(spec.f, s) - f1_val(s); };
    auto f1_slope = [&](double s) {
        if (general && spec.f1.deriv)
            return spec.f1.deriv(s);
        const double h = 1e-6 * std::max(1.0, std::abs(s));
        return (f1_val(s + h) - f1_val(s - h)) / (2.0 * h);
    };

    AuditReport report;
    report.note = "sampling audit: a pass is evidence over the sampled set, not a proof";

    { // Lipschitz bound on f0
        AuditCheck check{"f0_lipschitz_bound", true, true, ""};
        auto try_pair = [&](double s1, double s2) {
            if (!check.pass || s1 == s2)
                return;
            const double lhs = std::abs(f0_val(s2) - f0_val(s1));
            const double rhs = spec.L * std::abs(s2 - s1);
            if (lhs > rhs * (1.0 + 1e-9) + 1e-12) {
                check.pass = false;
                check.witness = "s1=" + fmt(s1) + ", s2=" + fmt(s2) + ": |f0(s2)-f0(s1)|=" +
                                fmt(lhs) + " > L|s2-s1|=" + fmt(rhs);
            }
        };
        for (size_t i = 0; i + 1 < svals.size(); ++i)
            try_pair(svals[i], svals[i + 1]);
        for (int i = 0; i < K; ++i) {
            const double s1 = svals[static_cast<size_t>(rng.uniform() * svals.size())];
            const double s2 = svals[static_cast<size_t>(rng.uniform() * svals.size())];
            try_pair(s1, s2);
            try_pair(s1, s1 + 1e-5 * std::max(1.0, std::abs(s1)));
        }
        report.checks.push_back(check);
    }
    { // sign and growth of s f(s)
        AuditCheck check{"sf_sign_growth_bound", true, true, ""};
        const double alpha = general ? spec.alpha : 0.0;
        for (double s : svals) {
            const double lhs = s * checked_eval(spec.f, s);
            const double rhs =
                spec.sigma * s * s - alpha * std::pow(std::abs(s), 2.0 * spec.q);
            if (lhs > rhs + 1e-9 * (1.0 + std::abs(rhs))) {
                check.pass = false;
                check.witness = "s=" + fmt(s) + ": s f(s)=" + fmt(lhs) +
                                " > sigma s^2 - alpha |s|^2q=" + fmt(rhs);
                break;
            }
        }
        report.checks.push_back(check);
    }
    { // growth of f1 and its derivative
        AuditCheck check{"f1_growth_bounds", general, true, ""};
        if (general) {
            for (double s : svals) {
                const double v = std::abs(f1_val(s));
                const double cap = spec.zeta * std::pow(std::abs(s), 2.0 * spec.q - 1.0);
                if (v > cap * (1.0 + 1e-9) + 1e-12) {
                    check.pass = false;
                    check.witness =
                        "s=" + fmt(s) + ": |f1(s)|=" + fmt(v) + " > zeta|s|^(2q-1)=" + fmt(cap);
                    break;
                }
                const double dv = std::abs(f1_slope(s));
                const double dcap = spec.c0 * (1.0 + std::pow(std::abs(s), 2.0 * spec.q - 2.0));
                if (dv > dcap * (1.0 + 1e-6) + 1e-9) {
                    check.pass = false;
                    check.witness = "s=" + fmt(s) + ": |f1'(s)|=" + fmt(dv) +
                                    " > c0(1+|s|^(2q-2))=" + fmt(dcap);
                    break;
                }
            }
        }
        report.checks.push_back(check);
    }
    { // strict decrease of f1 away from zero (vacuous when f1 is identically zero)
        bool f1_present = false;
        if (general)
            for (double s : svals)
                if (f1_val(s) != 0.0)
                    f1_present = true;
        AuditCheck check{"f1_strictly_decreasing", general && f1_present, true, ""};
        if (general && f1_present) {
            for (double s : svals) {
                if (s != 0.0 && f1_slope(s) >= 0.0) {
                    check.pass = false;
                    check.witness = "s=" + fmt(s) + ": f1'(s)=" + fmt(f1_slope(s)) + " >= 0";
                    break;
                }
            }
        }
        report.checks.push_back(check);
    }
    // vector samples for the X checks
    const int n = static_cast<int>(P.rows());
    const int KX = std::max(32, samples / 4);
    AuditCheck growth{"X_growth_bound", general, true, ""};
    AuditCheck damping{"xPX_damping_bound", general, true, ""};
    if (general) {
        if (spec.X.empty())
            throw config_error("audit: nonlinearity handle X is not evaluable");
        for (int i = 0; i < KX; ++i) {
            Eigen::VectorXd dir(n);
            for (int k = 0; k < n; ++k)
                dir(k) = rng.normal();
            if (dir.norm() == 0.0)
                continue;
            dir.normalize();
            const double mag = std::pow(10.0, -6.0 + 9.0 * rng.uniform());
            const Eigen::VectorXd x = mag * dir;
            const Eigen::VectorXd Xx = spec.X(x);
            if (!Xx.allFinite())
                throw certkit::domain_error("audit: non-finite X output at ||x|| = " + fmt(mag));
            const double cap = spec.delta2 * std::pow(mag, 2.0 * spec.q - 1.0);
            if (growth.pass && Xx.norm() > cap * (1.0 + 1e-9) + 1e-12) {
                growth.pass = false;
                growth.witness = "||x||=" + fmt(mag) + ": ||X(x)||=" + fmt(Xx.norm()) +
                                 " > delta2||x||^(2q-1)=" + fmt(cap);
            }
            const double lhs = x.dot(P * Xx);
            const double rhs = -spec.delta1 * std::pow(mag, 2.0 * spec.q);
            if (damping.pass && lhs > rhs * (1.0 - 1e-9) + 1e-12) {
                damping.pass = false;
                damping.witness = "||x||=" + fmt(mag) + ": x'PX(x)=" + fmt(lhs) +
                                  " > -delta1||x||^2q=" + fmt(rhs);
            }
        }
    }
    report.checks.push_back(growth);
    report.checks.push_back(damping);

    report.all_pass = true;
    for (const auto& c : report.checks)
        if (c.applicable && !c.pass)
            report.all_pass = false;
    return report;
}

ScanResult scan_scalar_P(const CouplingProblem& base, const NonlinearitySpec& spec,
                         std::span<const double> p_grid) {
    if (p_grid.empty())
        throw config_error("scan: empty grid of P multipliers");
    ScanResult result;
    result.best_index = -1;
    const int n = base.dim();
    for (double p : p_grid) {
        if (!(p > 0.0))
            throw config_error("scan: P multipliers must be positive");
        CouplingProblem prob(base.a, base.C, p * Eigen::MatrixXd::Identity(n, n), base.B,
                             base.D);
        result.entries.push_back({p, certify(prob, spec)});
        const Certificate& c = result.entries.back().cert;
        if (c.feasible &&
            (result.best_index < 0 ||
             c.lambda_min_Xi > result.entries[result.best_index].cert.lambda_min_Xi))
            result.best_index = static_cast<int>(result.entries.size()) - 1;
    }
    return result;
}

} // namespace certkit
