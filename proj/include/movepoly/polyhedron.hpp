#pragma once

#include <cstdint>
#include <vector>

#include "movepoly/types.hpp"

namespace movepoly {

enum class ConstraintKind { equality, inequality };

/// One constraint <x, g(p)> = f(p) or <x, g(p)> <= f(p) with
/// g(p) = A p + b and f(p) = c.p + d0.
struct AffineConstraint {
    ConstraintKind kind = ConstraintKind::inequality;
    Matrix A;  // d x m
    Vector b;  // d
    Vector c;  // m
    double d0 = 0.0;

    Vector gradient(const Vector& p) const { return A * p + b; }
    double rhs(const Vector& p) const { return c.dot(p) + d0; }

    bool operator==(const AffineConstraint& o) const {
        return kind == o.kind && A == o.A && b == o.b && c == o.c && d0 == o.d0;
    }
};

struct SamplingConfig {
    std::uint64_t seed = 0;
    std::size_t samples = 500;

    bool operator==(const SamplingConfig&) const = default;
};

struct MovingPolyhedronData {
    Eigen::Index ambient_dim = 0;
    Eigen::Index param_dim = 0;
    std::vector<AffineConstraint> constraints;
    Vector base_param;
    Vector base_point;
    double param_radius = 0.5;
    double point_radius = 0.5;
    Tolerances tolerances;
    SamplingConfig sampling;
};

/// The parametric family C(p). Constraints are stored equalities first;
/// source_order()[i] is the position constraint i had in the input.
/// Immutable after construction.
class MovingPolyhedron {
public:
    /// Validates dimensions and that base_point is feasible at base_param.
    /// Constraints of the input are stably reordered equalities-first.
    explicit MovingPolyhedron(MovingPolyhedronData data);

    Eigen::Index ambient_dim() const { return data_.ambient_dim; }
    Eigen::Index param_dim() const { return data_.param_dim; }
    std::size_t size() const { return data_.constraints.size(); }
    std::size_t equality_count() const { return equality_count_; }
    bool is_equality(std::size_t i) const { return i < equality_count_; }

    const std::vector<AffineConstraint>& constraints() const { return data_.constraints; }
    const AffineConstraint& constraint(std::size_t i) const { return data_.constraints.at(i); }
    const Vector& base_param() const { return data_.base_param; }
    const Vector& base_point() const { return data_.base_point; }
    double param_radius() const { return data_.param_radius; }
    double point_radius() const { return data_.point_radius; }
    const Tolerances& tolerances() const { return data_.tolerances; }
    const SamplingConfig& sampling() const { return data_.sampling; }
    const std::vector<std::size_t>& source_order() const { return source_order_; }
    const MovingPolyhedronData& data() const { return data_; }

    /// The construction data with constraints back in input order; feeding it
    /// to the constructor reproduces *this.
    MovingPolyhedronData source_data() const;

    /// Copy with other radii (validated again).
    MovingPolyhedron with_radii(double param_radius, double point_radius) const;

    /// Equality of the mathematical content and configuration.
    bool operator==(const MovingPolyhedron& o) const;

private:
    MovingPolyhedronData data_;
    std::size_t equality_count_ = 0;
    std::vector<std::size_t> source_order_;
};

/// C(p) frozen at one parameter value.
struct PolyhedronInstance {
    Vector param;
    std::vector<Vector> gradients;
    std::vector<double> rhs;
    std::size_t equality_count = 0;

    std::size_t size() const { return gradients.size(); }
    Eigen::Index dim() const { return gradients.empty() ? 0 : gradients.front().size(); }
    bool is_equality(std::size_t i) const { return i < equality_count; }
    /// G_i(x,p) = <x, g_i(p)> - f_i(p).
    double constraint_value(std::size_t i, const Vector& x) const {
        return x.dot(gradients[i]) - rhs[i];
    }
};

PolyhedronInstance instantiate(const MovingPolyhedron& mp, const Vector& p);

/// max{0, |G_i| for equalities, G_i for inequalities}.
double residual(const PolyhedronInstance& inst, const Vector& x);

/// Indices with |G_i(x,p)| <= eps_active. Throws precondition when x is
/// infeasible by more than eps_active.
IndexSet active_set(const PolyhedronInstance& inst, const Vector& x, double eps_active = 1e-8);

bool membership(const PolyhedronInstance& inst, const Vector& x, double tol);

struct LipschitzPair {
    double gradient = 0.0;  // spectral norm of A
    double rhs = 0.0;       // Euclidean norm of c
};

std::vector<LipschitzPair> lipschitz_constants(const MovingPolyhedron& mp);

/// max_i(||x|| l_g_i + l_f_i): Lipschitz constant in p of residual(., x).
double residual_lipschitz_bound(const std::vector<LipschitzPair>& constants, const Vector& x);

}  // namespace movepoly
