#ifndef CERTKIT_TEST_HELPERS_HPP
#define CERTKIT_TEST_HELPERS_HPP

#include "certkit/certificate.hpp"
#include "certkit/green_bvp.hpp"
#include "certkit/gridfn.hpp"

#include <cmath>
#include <cstdint>

namespace testkit {

/** splitmix64-based generator so test data is identical on every platform. */
class Rng {
  public:
    explicit Rng(std::uint64_t seed) : state_(seed ? seed : 1) {}
    std::uint64_t next() {
        std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ull);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
        return z ^ (z >> 31);
    }
    double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
    double normal() {
        const double u1 = std::max(uniform(), 1e-300);
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * uniform());
    }

  private:
    std::uint64_t state_;
};

/** Smooth random function: low-order trig combination on [0,l]. */
inline certkit::SampledFn random_smooth(certkit::Grid grid, Rng& rng, int components = 1,
                                        double amplitude = 1.0) {
    Eigen::MatrixXd vals = Eigen::MatrixXd::Zero(grid.m, components);
    for (int k = 0; k < components; ++k) {
        const double a0 = amplitude * rng.uniform(-1.0, 1.0);
        const double a1 = amplitude * rng.uniform(-1.0, 1.0);
        const double b1 = amplitude * rng.uniform(-1.0, 1.0);
        for (int i = 0; i < grid.m; ++i) {
            const double z = grid.node(i);
            vals(i, k) = a0 + a1 * std::sin(M_PI * z / grid.l) +
                         b1 * std::cos(M_PI * z / grid.l);
        }
    }
    return certkit::SampledFn(grid, vals);
}

/** The published worked example: scalar cascade, c=0.25, a=l=b=1, d=-5, P=1. */
inline certkit::CouplingProblem example_problem(int m = 401) {
    const certkit::Grid grid = certkit::Grid::uniform(1.0, m);
    Eigen::MatrixXd C(1, 1), P(1, 1);
    C << 0.25;
    P << 1.0;
    return certkit::CouplingProblem(
        1.0, C, P, certkit::SampledFn(grid, Eigen::MatrixXd::Constant(m, 1, 1.0)),
        certkit::SampledFn(grid, Eigen::MatrixXd::Constant(m, 1, -5.0)));
}

inline certkit::NonlinearitySpec example_spec() {
    certkit::NonlinearitySpec spec;
    spec.mode = certkit::NonlinearityMode::GloballyLipschitz;
    spec.sigma = 1.0;
    spec.L = 1.0;
    spec.f = certkit::fn_sin(1.0, 1.0);
    spec.f1 = certkit::fn_zero();
    spec.X = certkit::vf_zero();
    return spec;
}

/** Closed-form coupling weight of the worked example. */
inline double example_p12_closed_form(double z) {
    const double lambda = 0.5, l = 1.0, b = 1.0, d = -5.0, P = 1.0, c = 0.25;
    return (b + d * P) / c *
           (std::cos(lambda * z) - 1.0 + std::tan(lambda * l / 2.0) * std::sin(lambda * z));
}

/** Random scalar or 2x2 symmetric-PD problem away from resonances. */
inline certkit::CouplingProblem random_sym_problem(Rng& rng, int n, int m) {
    for (;;) {
        const double a = rng.uniform(0.85, 1.2);
        const double l = rng.uniform(0.9, 1.1);
        const certkit::Grid grid = certkit::Grid::uniform(l, m);
        Eigen::MatrixXd C, P;
        if (n == 1) {
            C = Eigen::MatrixXd::Constant(1, 1, rng.uniform(0.2, 2.0));
            P = Eigen::MatrixXd::Constant(1, 1, rng.uniform(0.5, 1.5));
        } else {
            const double phi = rng.uniform(0.0, M_PI);
            Eigen::Matrix2d Q;
            Q << std::cos(phi), -std::sin(phi), std::sin(phi), std::cos(phi);
            Eigen::Vector2d lam(rng.uniform(0.2, 2.0), rng.uniform(0.2, 2.0));
            C = Q * lam.asDiagonal() * Q.transpose();
            P = Eigen::MatrixXd::Identity(2, 2) * rng.uniform(0.5, 1.5);
        }
        // stay away from the resonance set
        bool resonant = false;
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(C);
        for (int k = 0; k < n; ++k)
            if (std::abs(std::sin(std::sqrt(es.eigenvalues()(k)) * l / a)) < 0.2)
                resonant = true;
        if (resonant)
            continue;
        certkit::SampledFn B = random_smooth(grid, rng, n);
        certkit::SampledFn D = random_smooth(grid, rng, n);
        return certkit::CouplingProblem(a, C, P, B, D);
    }
}

} // namespace testkit

#endif
