#ifndef CERTKIT_CERTIFICATE_HPP
#define CERTKIT_CERTIFICATE_HPP

#include "certkit/functions.hpp"
#include "certkit/green_bvp.hpp"

#include <Eigen/Dense>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace certkit {

enum class NonlinearityMode { GloballyLipschitz, General };

/**
 * Structural description of the nonlinearities f (reaction term) and X (ODE
 * term): growth and sign constants plus evaluable handles for auditing and
 * simulation. In globally-Lipschitz mode only sigma and L are used.
 */
struct NonlinearitySpec {
    NonlinearityMode mode = NonlinearityMode::GloballyLipschitz;
    double sigma = 0.0;
    double alpha = 0.0;
    double q = 1.5;
    double L = 0.0;
    double c0 = 0.0;
    double zeta = 0.0;
    double delta1 = 0.0;
    double delta2 = 0.0;
    ScalarFn f;  // full reaction nonlinearity
    ScalarFn f1; // superlinear part (zero in globally-Lipschitz mode); f0 = f - f1
    VectorField X;

    void validate() const;
    bool general() const { return mode == NonlinearityMode::General; }
};

struct ConditionVerdict {
    std::string name;
    bool applicable;
    bool pass;
    double margin; // distance from the feasibility boundary
};

/** All feasibility quantities with per-condition verdicts. */
struct Certificate {
    explicit Certificate(P12Solution p12_in) : p12(std::move(p12_in)) {
        Pi1.setZero();
        Pi2.setZero();
        Xi.setZero();
    }

    P12Solution p12;
    Eigen::Matrix2d Pi1, Pi2;
    double lambda_min_Pi1 = 0.0, lambda_max_Pi2 = 0.0;
    double omega = 0.0;
    Eigen::MatrixXd Omega;
    double lambda_min_Omega = 0.0;
    Eigen::Matrix2d Xi;
    double lambda_min_Xi = 0.0;
    double tau1 = std::numeric_limits<double>::quiet_NaN();
    double tau2 = std::numeric_limits<double>::quiet_NaN();
    std::vector<ConditionVerdict> verdicts;
    bool feasible = false;
};

/**
 * Explicit stability constants. In corollary mode (globally Lipschitz f) the
 * bound is (sqrt(lmax(Pi2)/lmin(Pi1)) rho e^{-theta t/2} + sqrt(beta/(theta
 * lmin(Pi1))) d_inf); in general mode theta0 and vartheta(d_inf) take the
 * roles of theta and beta d_inf^2 for a stored disturbance level.
 */
struct IssConstants {
    enum class Mode { Corollary, General };
    Mode mode = Mode::Corollary;
    // corollary constants
    double K1 = 0.0, K2 = 0.0, theta = 0.0, beta = 0.0;
    // general-mode constants
    double theta0 = 0.0, epsilon = 0.0, tau = 0.0;
    double H1 = 0.0, H2 = 0.0, vartheta = 0.0;
    double d_inf = 0.0; // disturbance level vartheta was evaluated at
    // cached for bound evaluation
    double lambda_min_Pi1 = 0.0, lambda_max_Pi2 = 0.0, lambda_min_Xi = 0.0, l = 0.0;

    double decay_rate() const { return mode == Mode::Corollary ? theta : theta0; }
    static double rho(const Eigen::VectorXd& x0, const SampledFn& phi);
};

struct BoundPair {
    double x_bound;
    double u_bound;
};

struct PiMatrices {
    Eigen::Matrix2d Pi1, Pi2;
    double lambda_min_Pi1, lambda_max_Pi2;
};

PiMatrices build_pi_matrices(double p12_l2_norm, const Eigen::MatrixXd& P);

double compute_omega(double a, double l, double D_l2, double p12_l2, double sigma);

struct OmegaResult {
    Eigen::MatrixXd Omega;
    double lambda_min;
};

/** Single-integral form via the solved coupling weight. */
OmegaResult compute_Omega(const CouplingProblem& problem, const P12Solution& p12);

/** Independent double-integral form evaluated directly against the Green kernel. */
OmegaResult compute_Omega_double_integral(const CouplingProblem& problem,
                                          const GreenKernel& kernel);

struct XiResult {
    Eigen::Matrix2d Xi;
    double lambda_min;
};

XiResult compute_Xi(double omega, double lambda_min_Omega, double L, double p12_l2);

struct TauPair {
    double tau1;
    double tau2;
};

/** Roots of the two monotone scalar equations of the tau feasibility condition. */
TauPair solve_tau(const NonlinearitySpec& spec, double p12_l1, double p12_l2, double p12_linf,
                  double l);

Certificate certify(const CouplingProblem& problem, const NonlinearitySpec& spec);

IssConstants corollary_constants(const Certificate& cert, const CouplingProblem& problem,
                                 const NonlinearitySpec& spec);

IssConstants general_bound_constants(const Certificate& cert, const CouplingProblem& problem,
                                     const NonlinearitySpec& spec, double d_inf);

/** Explicit trajectory bounds at time t (corollary mode). */
BoundPair iss_bound(const IssConstants& constants, const Certificate& cert, double t,
                    double d_inf, double rho);

/** Explicit trajectory bounds at time t (general mode, stored d_inf). */
BoundPair general_iss_bound(const IssConstants& constants, const Certificate& cert, double t,
                            double rho);

// Proof intermediates, exposed for property checks.
double psi0(const NonlinearitySpec& spec, double eps, double d_inf);
double psi1(const NonlinearitySpec& spec, double eps);
double proof_H1(const NonlinearitySpec& spec, double eps, double d_inf, double D_l2,
                double p12_l2, double l);
double proof_H2(const NonlinearitySpec& spec, double eps, double d_inf, double D_l2,
                double p12_l2, double P_norm, double l);
double proof_H3(const NonlinearitySpec& spec, double eps, double tau, double p12_l2,
                double p12_linf, double l);
double proof_H4(const NonlinearitySpec& spec, double eps, double tau, double p12_l1,
                double p12_l2);

struct KappaChi {
    double kappa;
    double chi;
    double kappa_approx;
    double chi_approx;
};

/** The scalar-example shape constants and their small-angle approximations. */
KappaChi kappa_chi(double lambda, double l, int quad_nodes = 401);

struct AuditCheck {
    std::string assumption;
    bool applicable;
    bool pass;
    std::string witness; // empty when no violation was found
};

struct AuditReport {
    std::vector<AuditCheck> checks;
    bool all_pass;
    std::string note;
};

/** Sampling audit of the structural hypotheses on f, f1 and X. */
AuditReport audit_hypotheses(const NonlinearitySpec& spec, const Eigen::MatrixXd& P,
                             int samples, std::uint64_t seed);

struct ScanEntry {
    double p;
    Certificate cert;
};

struct ScanResult {
    std::vector<ScanEntry> entries;
    int best_index; // -1 when no grid point is feasible
};

/** Certify the family P = p I over a grid of p values; best = max lmin(Xi) among feasible. */
ScanResult scan_scalar_P(const CouplingProblem& base, const NonlinearitySpec& spec,
                         std::span<const double> p_grid);

} // namespace certkit

#endif
