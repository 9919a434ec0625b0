#include "movepoly/polyhedron.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include <Eigen/SVD>

namespace movepoly {

namespace {

void validate_constraint(const AffineConstraint& con, Eigen::Index d, Eigen::Index m,
                         std::size_t index) {
    const std::string where = "constraints[" + std::to_string(index) + "]";
    if (con.A.rows() != d || con.A.cols() != m) {
        std::ostringstream msg;
        msg << where << ".A: expected " << d << "x" << m << ", got " << con.A.rows() << "x"
            << con.A.cols();
        fail(ErrorKind::dimension, msg.str());
    }
    require_dim(con.b.size(), d, where + ".b");
    require_dim(con.c.size(), m, where + ".c");
    if (!con.A.allFinite() || !con.b.allFinite() || !con.c.allFinite() || !std::isfinite(con.d0)) {
        fail(ErrorKind::input, where + ": non-finite entry");
    }
}

}  // namespace

MovingPolyhedron::MovingPolyhedron(MovingPolyhedronData data) : data_(std::move(data)) {
    const auto d = data_.ambient_dim;
    const auto m = data_.param_dim;
    if (d < 1) fail(ErrorKind::input, "ambient_dim must be >= 1");
    if (m < 1) fail(ErrorKind::input, "param_dim must be >= 1");
    if (data_.constraints.empty()) fail(ErrorKind::input, "constraints: at least one constraint required");
    for (std::size_t i = 0; i < data_.constraints.size(); ++i) {
        validate_constraint(data_.constraints[i], d, m, i);
    }
    require_dim(data_.base_param.size(), m, "base_point.p");
    require_dim(data_.base_point.size(), d, "base_point.x");
    if (!(data_.param_radius > 0.0)) fail(ErrorKind::input, "radii.param must be positive");
    if (!(data_.point_radius > 0.0)) fail(ErrorKind::input, "radii.point must be positive");
    if (data_.sampling.samples == 0) fail(ErrorKind::input, "sampling.samples must be positive");

    // Stable equalities-first reordering.
    source_order_.resize(data_.constraints.size());
    for (std::size_t i = 0; i < source_order_.size(); ++i) source_order_[i] = i;
    std::stable_partition(source_order_.begin(), source_order_.end(), [&](std::size_t i) {
        return data_.constraints[i].kind == ConstraintKind::equality;
    });
    std::vector<AffineConstraint> ordered;
    ordered.reserve(source_order_.size());
    for (auto i : source_order_) ordered.push_back(data_.constraints[i]);
    data_.constraints = std::move(ordered);
    equality_count_ = static_cast<std::size_t>(
        std::count_if(data_.constraints.begin(), data_.constraints.end(),
                      [](const auto& c) { return c.kind == ConstraintKind::equality; }));

    const PolyhedronInstance base = instantiate(*this, data_.base_param);
    const double r = residual(base, data_.base_point);
    if (!(r <= data_.tolerances.active)) {
        std::ostringstream msg;
        msg << "base_point.x is infeasible at base_point.p (residual " << r << ")";
        fail(ErrorKind::input, msg.str());
    }
}

MovingPolyhedronData MovingPolyhedron::source_data() const {
    MovingPolyhedronData copy = data_;
    for (std::size_t i = 0; i < source_order_.size(); ++i) {
        copy.constraints[source_order_[i]] = data_.constraints[i];
    }
    return copy;
}

MovingPolyhedron MovingPolyhedron::with_radii(double param_radius, double point_radius) const {
    MovingPolyhedronData copy = source_data();
    copy.param_radius = param_radius;
    copy.point_radius = point_radius;
    return MovingPolyhedron(std::move(copy));
}

bool MovingPolyhedron::operator==(const MovingPolyhedron& o) const {
    return data_.ambient_dim == o.data_.ambient_dim && data_.param_dim == o.data_.param_dim &&
           data_.constraints == o.data_.constraints && data_.base_param == o.data_.base_param &&
           data_.base_point == o.data_.base_point && data_.param_radius == o.data_.param_radius &&
           data_.point_radius == o.data_.point_radius && data_.tolerances == o.data_.tolerances &&
           data_.sampling == o.data_.sampling && source_order_ == o.source_order_;
}

PolyhedronInstance instantiate(const MovingPolyhedron& mp, const Vector& p) {
    require_dim(p.size(), mp.param_dim(), "instantiate: parameter");
    PolyhedronInstance inst;
    inst.param = p;
    inst.equality_count = mp.equality_count();
    inst.gradients.reserve(mp.size());
    inst.rhs.reserve(mp.size());
    for (const auto& con : mp.constraints()) {
        inst.gradients.push_back(con.gradient(p));
        inst.rhs.push_back(con.rhs(p));
    }
    return inst;
}

double residual(const PolyhedronInstance& inst, const Vector& x) {
    require_dim(x.size(), inst.dim(), "residual: point");
    double out = 0.0;
    for (std::size_t i = 0; i < inst.size(); ++i) {
        const double g = inst.constraint_value(i, x);
        out = std::max(out, inst.is_equality(i) ? std::abs(g) : g);
    }
    return out;
}

IndexSet active_set(const PolyhedronInstance& inst, const Vector& x, double eps_active) {
    if (residual(inst, x) > eps_active) {
        fail(ErrorKind::precondition, "active_set: point is infeasible beyond the active tolerance");
    }
    IndexSet out;
    for (std::size_t i = 0; i < inst.size(); ++i) {
        if (std::abs(inst.constraint_value(i, x)) <= eps_active) out.push_back(i);
    }
    return out;
}

bool membership(const PolyhedronInstance& inst, const Vector& x, double tol) {
    return residual(inst, x) <= tol;
}

std::vector<LipschitzPair> lipschitz_constants(const MovingPolyhedron& mp) {
    std::vector<LipschitzPair> out;
    out.reserve(mp.size());
    for (const auto& con : mp.constraints()) {
        LipschitzPair pair;
        if (con.A.size() > 0) {
            Eigen::JacobiSVD<Matrix> svd(con.A);
            pair.gradient = svd.singularValues().size() > 0 ? svd.singularValues()(0) : 0.0;
        }
        pair.rhs = con.c.norm();
        out.push_back(pair);
    }
    return out;
}

double residual_lipschitz_bound(const std::vector<LipschitzPair>& constants, const Vector& x) {
    const double norm = x.norm();
    double out = 0.0;
    for (const auto& c : constants) out = std::max(out, norm * c.gradient + c.rhs);
    return out;
}

}  // namespace movepoly
