#include "movepoly/types.hpp"

namespace movepoly {

int exit_code(ErrorKind kind) {
    switch (kind) {
        case ErrorKind::infeasible: return 2;
        case ErrorKind::solver_limit: return 3;
        case ErrorKind::guard_exceeded: return 4;
        case ErrorKind::input:
        case ErrorKind::dimension:
        case ErrorKind::precondition: return 1;
    }
    return 1;
}

const char* to_string(ErrorKind kind) {
    switch (kind) {
        case ErrorKind::input: return "input";
        case ErrorKind::dimension: return "dimension";
        case ErrorKind::precondition: return "precondition";
        case ErrorKind::infeasible: return "infeasible";
        case ErrorKind::solver_limit: return "solver_limit";
        case ErrorKind::guard_exceeded: return "guard_exceeded";
    }
    return "unknown";
}

}  // namespace movepoly
