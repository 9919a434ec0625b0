#pragma once

#include <vector>

#include "movepoly/polyhedron.hpp"

namespace movepoly {

struct ProjectionConfig {
    double feasibility = 1e-9;  // scaled by max(1, ||g_i||)
    double kkt = 1e-9;
    double active = 1e-8;
    double rank = 1e-9;
    std::size_t iteration_factor = 100;  // cap = factor * n
    std::size_t enumeration_guard = 20;

    static ProjectionConfig from(const Tolerances& t);
};

enum class ProjectionStatus { converged, infeasible_set, iteration_limit };

const char* to_string(ProjectionStatus status);

struct SolverEvent {
    enum class Action { add, drop };
    Action action = Action::add;
    std::size_t constraint = 0;
    double step = 0.0;
};

struct ProjectionResult {
    Vector point;
    /// Unnormalized: w - point = sum_i multipliers_i g_i(p).
    Vector multipliers;
    IndexSet active;
    double distance = 0.0;
    double kkt_residual = 0.0;
    std::size_t iterations = 0;
    ProjectionStatus status = ProjectionStatus::converged;
    std::vector<SolverEvent> trace;
    /// The active-set method reported infeasibility but enumeration found a
    /// solution; the result is the enumerated one.
    bool brute_force_fallback = false;

    bool converged() const { return status == ProjectionStatus::converged; }
};

/// Euclidean projection of w onto C(p) by a dual active-set least-distance
/// method. Working constraints are added most-violated first (smallest index
/// on ties) and dropped by the multiplier ratio test (smallest index on
/// ties). Infeasibility claims are certified by enumeration when n is within
/// the enumeration guard.
ProjectionResult project(const PolyhedronInstance& inst, const Vector& w,
                         const ProjectionConfig& cfg = {});

/// Exhaustive oracle: every independent working set made of a maximal
/// independent subfamily of the equalities plus any subset of inequalities.
/// Throws guard_exceeded when n exceeds the guard.
ProjectionResult project_bruteforce(const PolyhedronInstance& inst, const Vector& w,
                                    const ProjectionConfig& cfg = {});

/// Max of stationarity norm, feasibility residual, complementarity and sign
/// violation over the inequalities.
double kkt_residual(const PolyhedronInstance& inst, const Vector& w, const Vector& point,
                    const Vector& multipliers);
inline double kkt_residual(const PolyhedronInstance& inst, const Vector& w,
                           const ProjectionResult& result) {
    return kkt_residual(inst, w, result.point, result.multipliers);
}

/// Largest constraint violation, each scaled by 1 / max(1, ||g_i||).
double scaled_violation(const PolyhedronInstance& inst, const Vector& x);

}  // namespace movepoly
