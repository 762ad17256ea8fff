#ifndef CERTKIT_ERRORS_HPP
#define CERTKIT_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace certkit {

/** Base class for all toolkit errors. */
class error : public std::runtime_error {
  public:
    explicit error(const std::string& msg) : std::runtime_error(msg) {}
};

/** Invalid configuration (bad grid size, unsupported norm order, bad schema). */
class config_error : public error {
  public:
    using error::error;
};

/** Invalid data fed to an operation (non-finite samples, grid mismatch). */
class domain_error : public error {
  public:
    using error::error;
};

/** The boundary value problem is at or near a resonance. */
class singular_problem_error : public error {
  public:
    using error::error;
};

/** The requested solver route does not cover this problem class. */
class unsupported_regime_error : public error {
  public:
    using error::error;
};

/** A coupling-weight solution does not solve the problem it is paired with. */
class stale_solution_error : public error {
  public:
    using error::error;
};

/** A scalar root equation has no root (degenerate coefficients). */
class no_root_error : public error {
  public:
    using error::error;
};

/** Parameter selection failed to terminate within its iteration budget. */
class numeric_degeneracy_error : public error {
  public:
    using error::error;
};

/** Constants were requested from an infeasible certificate. */
class infeasible_error : public error {
  public:
    using error::error;
};

/** A simulated trajectory exceeded the blow-up threshold. */
class divergence_error : public error {
  public:
    divergence_error(const std::string& msg, double t) : error(msg), time(t) {}
    double time;
};

} // namespace certkit

#endif
