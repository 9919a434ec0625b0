#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace movepoly {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// Ordered list of 0-based positions (constraint indices or family positions).
using IndexSet = std::vector<std::size_t>;

enum class ErrorKind {
    input,           // malformed file, CLI literal or schema violation
    dimension,       // vector/matrix sizes disagree
    precondition,    // operation called outside its contract
    infeasible,      // C(p) is empty
    solver_limit,    // iteration cap reached
    guard_exceeded,  // enumeration bound exceeded
};

/// Process exit code used by the CLI for each error kind.
int exit_code(ErrorKind kind);

const char* to_string(ErrorKind kind);

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what)
        : std::runtime_error(what), kind_(kind) {}

    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& what) {
    throw Error(kind, what);
}

inline void require_dim(Eigen::Index got, Eigen::Index want, const std::string& what) {
    if (got != want) {
        fail(ErrorKind::dimension, what + ": expected dimension " + std::to_string(want) +
                                       ", got " + std::to_string(got));
    }
}

/// Numerical knobs shared by all modules; defaults are the documented ones.
struct Tolerances {
    double rank = 1e-9;              // relative pivot threshold
    double active = 1e-8;            // |G_i(x,p)| <= active counts as active
    double feasibility = 1e-9;       // constraint violation accepted as feasible
    double kkt = 1e-9;
    double positivity_floor = 1e-12; // multipliers below this are zero
    std::size_t iteration_factor = 100;
    std::size_t enumeration_guard = 20;

    bool operator==(const Tolerances&) const = default;
};

}  // namespace movepoly
