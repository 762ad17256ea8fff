#ifndef CERTKIT_COMMANDS_HPP
#define CERTKIT_COMMANDS_HPP

#include <cstdint>
#include <string>
#include <vector>

namespace certkit::cli {

// Exit-code contract shared by every subcommand.
constexpr int exit_success = 0;    // feasible / command succeeded
constexpr int exit_usage = 1;      // usage or configuration error
constexpr int exit_infeasible = 2; // infeasible certificate / audit violation
constexpr int exit_divergence = 3; // simulation blow-up

struct Options {
    std::string config_path;
    std::string out_dir; // overrides the configuration's output.dir when set
    std::string param;
    std::vector<double> grid;
    std::uint64_t seed = 20240901;
};

int cmd_certify(const Options& options);
int cmd_simulate(const Options& options);
int cmd_sweep(const Options& options);
int cmd_audit(const Options& options);
int cmd_reproduce_example(const Options& options);

} // namespace certkit::cli

#endif
