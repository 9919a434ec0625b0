#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "movepoly/polyhedron.hpp"
#include "movepoly/regularity.hpp"

namespace movepoly {

/// Closed-form k-dependent sequence (p_k, w_k), k = 1, 2, ...
struct ScenarioSequence {
    std::string description;
    std::function<SequencePoint(std::size_t k)> at;

    std::vector<SequencePoint> take(std::size_t kmax) const;
};

struct ScenarioExpectations {
    std::optional<RcrcqVerdict> rcrcq;
    std::optional<bool> liminf_consistent;
    /// Constant l1 norm of the reduced normalized multiplier along the sequence.
    std::optional<double> reduced_l1;
    /// Human-readable formulas (e.g. for the fixed-subfamily multipliers).
    std::vector<std::string> notes;
};

struct Scenario {
    std::string name;
    std::string summary;
    MovingPolyhedron problem;
    std::optional<ScenarioSequence> sequence;
    ScenarioExpectations expected;
};

/// C(p) = {x in R^2 : x1 = 0, x2 = 0, <x, p> <= 0} at pbar = xbar = 0 with
/// p_k = (1/k^2, 1/k^2), w_k = (1/k, 2/k).
Scenario paper_example();

/// g1 = (1,0), g2(p) = (1, p1), both inequalities, f = 0, xbar = 0.
Scenario rcrcq_violation();

/// As rcrcq_violation but with g1 an equality; multipliers blow up as p1 -> 0.
Scenario rcrcq_violation_equality();

/// x <= p in R^1 at xbar = pbar = 0.
Scenario moving_halfspace();

struct RandomScenarioOptions {
    std::uint64_t seed = 0;
    Eigen::Index ambient_dim = 2;
    Eigen::Index param_dim = 2;
    std::size_t equalities = 0;
    std::size_t inequalities = 3;
    /// Fraction of inequalities made tight at (pbar, xbar).
    double fraction_tight = 0.5;
    double param_radius = 0.5;
    double point_radius = 0.5;
};

/// Entries uniform in [-1, 1]; rhs offsets chosen so xbar is feasible at
/// pbar (equalities tight, the first round(fraction_tight * n_ineq)
/// inequalities tight, the rest with a drawn slack in [0.1, 1]). Redraws up
/// to 100 times while the base gradient family is borderline.
Scenario random_scenario(const RandomScenarioOptions& opt);

/// Names accepted by find_scenario.
std::vector<std::string> scenario_names();
/// Throws input for unknown names.
Scenario find_scenario(const std::string& name);

}  // namespace movepoly
