#ifndef CERTKIT_CONFIG_HPP
#define CERTKIT_CONFIG_HPP

#include "certkit/certificate.hpp"
#include "certkit/galerkin_sim.hpp"
#include "certkit/green_bvp.hpp"

#include <json.hpp>

#include <string>
#include <vector>

namespace certkit {

/** One component of B, D or the initial profile: a named built-in or a sample file. */
struct ZFunction {
    ScalarFn fn;                 // set for built-ins
    std::vector<double> samples; // set for sample files
    bool from_samples = false;

    Eigen::VectorXd sample(const Grid& grid, const std::string& what) const;
};

/** Parsed and validated run configuration (all defaults filled in). */
struct RunConfig {
    double a = 1.0;
    double l = 1.0;
    Eigen::MatrixXd C, P;
    std::vector<ZFunction> B, D;
    ZFunction u0;
    Eigen::VectorXd x0;
    NonlinearitySpec nonlinearity;
    Disturbance disturbance;
    double ramp_time = 1.0;
    SimConfig sim;
    int audit_samples = 100000;
    std::string out_dir = ".";
    bool write_json = true;
    bool write_text = true;

    nlohmann::ordered_json echo; // normalized configuration (reparses to the same RunConfig)

    CouplingProblem build_problem() const;
    SampledFn build_u0(const Grid& grid) const;
};

RunConfig parse_config_json(const nlohmann::ordered_json& j);
RunConfig parse_config_file(const std::string& path);

/** The published worked example: scalar cascade with a sine nonlinearity. */
nlohmann::ordered_json example_config_json();

} // namespace certkit

#endif
