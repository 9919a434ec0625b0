#include "movepoly/scenarios.hpp"

#include <cmath>

#include "movepoly/linalg_rank.hpp"
#include "movepoly/sampling.hpp"

namespace movepoly {

namespace {

AffineConstraint constant_constraint(ConstraintKind kind, Vector b, Eigen::Index m) {
    AffineConstraint c;
    c.kind = kind;
    c.A = Matrix::Zero(b.size(), m);
    c.b = std::move(b);
    c.c = Vector::Zero(m);
    return c;
}

Vector vec(std::initializer_list<double> values) {
    Vector v(static_cast<Eigen::Index>(values.size()));
    Eigen::Index i = 0;
    for (double x : values) v(i++) = x;
    return v;
}

}  // namespace

std::vector<SequencePoint> ScenarioSequence::take(std::size_t kmax) const {
    std::vector<SequencePoint> out;
    out.reserve(kmax);
    for (std::size_t k = 1; k <= kmax; ++k) out.push_back(at(k));
    return out;
}

Scenario paper_example() {
    MovingPolyhedronData data;
    data.ambient_dim = 2;
    data.param_dim = 2;
    data.constraints.push_back(constant_constraint(ConstraintKind::equality, vec({1, 0}), 2));
    data.constraints.push_back(constant_constraint(ConstraintKind::equality, vec({0, 1}), 2));
    AffineConstraint moving = constant_constraint(ConstraintKind::inequality, Vector::Zero(2), 2);
    moving.A = Matrix::Identity(2, 2);
    data.constraints.push_back(moving);
    data.base_param = Vector::Zero(2);
    data.base_point = Vector::Zero(2);

    Scenario s{"paper-example",
               "x1 = 0, x2 = 0, <x,p> <= 0 in R^2; C(p) = {0} for every p",
               MovingPolyhedron(std::move(data)),
               ScenarioSequence{"p_k = (1/k^2, 1/k^2), w_k = (1/k, 2/k)",
                                [](std::size_t k) {
                                    const double kk = static_cast<double>(k);
                                    return SequencePoint{k, vec({1.0 / (kk * kk), 1.0 / (kk * kk)}),
                                                         vec({1.0 / kk, 2.0 / kk})};
                                }},
               {}};
    s.expected.rcrcq = RcrcqVerdict::holds;
    s.expected.liminf_consistent = true;
    s.expected.reduced_l1 = 3.0 / std::sqrt(5.0);
    s.expected.notes = {"projection of w_k is (0,0) at distance sqrt(5)/k",
                        "fixed subfamily {2,3}: normalized multiplier (0, 1/sqrt(5), k^2/sqrt(5))",
                        "reduced multiplier: (1/sqrt(5), 2/sqrt(5), 0), l1 = 3/sqrt(5)"};
    return s;
}

namespace {

Scenario violation_family(ConstraintKind first_kind, std::string name, std::string summary) {
    MovingPolyhedronData data;
    data.ambient_dim = 2;
    data.param_dim = 1;
    data.constraints.push_back(constant_constraint(first_kind, vec({1, 0}), 1));
    AffineConstraint second = constant_constraint(ConstraintKind::inequality, vec({1, 0}), 1);
    second.A(1, 0) = 1.0;  // g2(p) = (1, p1)
    data.constraints.push_back(second);
    data.base_param = Vector::Zero(1);
    data.base_point = Vector::Zero(2);
    Scenario s{std::move(name), std::move(summary), MovingPolyhedron(std::move(data)), std::nullopt, {}};
    s.expected.rcrcq = RcrcqVerdict::violated;
    s.expected.liminf_consistent = true;
    return s;
}

}  // namespace

Scenario rcrcq_violation() {
    Scenario s = violation_family(ConstraintKind::inequality, "rcrcq-violation",
                                  "x1 <= 0, x1 + p1 x2 <= 0; rank of {g1,g2} jumps from 1 to 2 off p1 = 0");
    s.expected.notes = {"multipliers stay bounded: the normal cone keeps a strictly interior direction"};
    return s;
}

Scenario rcrcq_violation_equality() {
    Scenario s = violation_family(ConstraintKind::equality, "rcrcq-violation-eq",
                                  "x1 = 0, x1 + p1 x2 <= 0; rank jump plus multipliers of order 1/|p1|");
    s.expected.notes = {"minimal l1 multiplier grows like 2|u2|/|p1|; M_hat doubles per halving of the radii"};
    return s;
}

Scenario moving_halfspace() {
    MovingPolyhedronData data;
    data.ambient_dim = 1;
    data.param_dim = 1;
    AffineConstraint c = constant_constraint(ConstraintKind::inequality, vec({1}), 1);
    c.c = vec({1});  // f(p) = p
    data.constraints.push_back(c);
    data.base_param = Vector::Zero(1);
    data.base_point = Vector::Zero(1);
    Scenario s{"moving-halfspace", "x <= p in R^1", MovingPolyhedron(std::move(data)), std::nullopt, {}};
    s.expected.rcrcq = RcrcqVerdict::holds;
    s.expected.liminf_consistent = true;
    s.expected.notes = {"dist = residual (alpha = 1); Aubin modulus 1"};
    return s;
}

Scenario random_scenario(const RandomScenarioOptions& opt) {
    const auto d = opt.ambient_dim;
    const auto m = opt.param_dim;
    const std::size_t n = opt.equalities + opt.inequalities;
    if (d < 1 || d > 6) fail(ErrorKind::guard_exceeded, "random_scenario: ambient_dim must be in [1, 6]");
    if (m < 1) fail(ErrorKind::input, "random_scenario: param_dim must be >= 1");
    if (n < 1 || n > 10) fail(ErrorKind::guard_exceeded, "random_scenario: constraint count must be in [1, 10]");
    if (!(opt.fraction_tight >= 0.0 && opt.fraction_tight <= 1.0)) {
        fail(ErrorKind::input, "random_scenario: fraction_tight must be in [0, 1]");
    }

    BallSampler rng(mix_seed(opt.seed));
    auto uniform = [&](double lo, double hi) { return lo + (hi - lo) * rng.uniform(); };
    const auto tight = static_cast<std::size_t>(std::lround(opt.fraction_tight * static_cast<double>(opt.inequalities)));

    for (int attempt = 0; attempt < 100; ++attempt) {
        MovingPolyhedronData data;
        data.ambient_dim = d;
        data.param_dim = m;
        data.param_radius = opt.param_radius;
        data.point_radius = opt.point_radius;
        data.base_param = Vector(m);
        data.base_point = Vector(d);
        for (Eigen::Index i = 0; i < m; ++i) data.base_param(i) = uniform(-1, 1);
        for (Eigen::Index i = 0; i < d; ++i) data.base_point(i) = uniform(-1, 1);

        std::vector<Vector> base_grads;
        for (std::size_t i = 0; i < n; ++i) {
            AffineConstraint c;
            c.kind = i < opt.equalities ? ConstraintKind::equality : ConstraintKind::inequality;
            c.A = Matrix(d, m);
            c.b = Vector(d);
            c.c = Vector(m);
            for (Eigen::Index r = 0; r < d; ++r) {
                for (Eigen::Index col = 0; col < m; ++col) c.A(r, col) = uniform(-1, 1);
            }
            for (Eigen::Index r = 0; r < d; ++r) c.b(r) = uniform(-1, 1);
            for (Eigen::Index col = 0; col < m; ++col) c.c(col) = uniform(-1, 1);
            const Vector g = c.gradient(data.base_param);
            double slack = 0.0;
            if (c.kind == ConstraintKind::inequality && (i - opt.equalities) >= tight) slack = uniform(0.1, 1.0);
            // f(pbar) = <xbar, g(pbar)> + slack
            c.d0 = data.base_point.dot(g) + slack - c.c.dot(data.base_param);
            base_grads.push_back(g);
            data.constraints.push_back(std::move(c));
        }
        if (numerical_rank(VectorFamily(base_grads), 1e-9).borderline) continue;

        Scenario s{"random-" + std::to_string(opt.seed), "seeded random affine family",
                   MovingPolyhedron(std::move(data)), std::nullopt, {}};
        return s;
    }
    fail(ErrorKind::guard_exceeded, "random_scenario: 100 redraws were all borderline");
}

std::vector<std::string> scenario_names() {
    return {"paper-example", "rcrcq-violation", "rcrcq-violation-eq", "moving-halfspace"};
}

Scenario find_scenario(const std::string& name) {
    if (name == "paper-example") return paper_example();
    if (name == "rcrcq-violation") return rcrcq_violation();
    if (name == "rcrcq-violation-eq") return rcrcq_violation_equality();
    if (name == "moving-halfspace") return moving_halfspace();
    fail(ErrorKind::input, "unknown scenario '" + name + "'");
}

}  // namespace movepoly
