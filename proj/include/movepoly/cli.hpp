#pragma once

#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

namespace movepoly {

/// Everything a CLI run depends on; embedded in every JSON report.
struct RunConfig {
    std::string command;
    std::optional<std::string> input;     // problem file
    std::optional<std::string> scenario;  // built-in scenario name
    std::optional<std::uint64_t> seed;    // default: file's sampling.seed, else 0
    std::optional<std::size_t> samples;
    std::optional<double> param_radius;
    std::optional<double> point_radius;
    std::optional<double> rank_tol;
    std::optional<double> active_tol;
    std::optional<double> feasibility_tol;
    std::optional<double> kkt_tol;
    std::string format = "text";
    std::optional<std::string> out;

    // Command-specific.
    std::optional<std::string> p;
    std::optional<std::string> w;
    std::string policy = "reduced";
    std::size_t kmax = 20;
};

/// Parses `args` (without the program name), runs the command and returns
/// the process exit code: 0 success, 1 input error, 2 infeasible,
/// 3 solver limit, 4 guard exceeded.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace movepoly
