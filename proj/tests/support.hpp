#pragma once

#include <cmath>
#include <initializer_list>
#include <vector>

#include <Eigen/Dense>

#include "movepoly/polyhedron.hpp"
#include "movepoly/sampling.hpp"

namespace movepoly::test {

inline Vector vec(std::initializer_list<double> values) {
    Vector v(static_cast<Eigen::Index>(values.size()));
    Eigen::Index i = 0;
    for (double x : values) v(i++) = x;
    return v;
}

inline bool close(double a, double b, double rel, double abs = 0.0) {
    return std::abs(a - b) <= std::max(abs, rel * std::max(std::abs(a), std::abs(b)));
}

/// Frozen instance from explicit gradients; equalities must come first.
inline PolyhedronInstance make_instance(std::vector<Vector> gradients, std::vector<double> rhs,
                                        std::size_t equalities = 0) {
    PolyhedronInstance inst;
    inst.param = Vector::Zero(1);
    inst.gradients = std::move(gradients);
    inst.rhs = std::move(rhs);
    inst.equality_count = equalities;
    return inst;
}

/// Random instance with a known interior-ish feasible point: rhs set so that
/// `anchor` satisfies every constraint (equalities tight).
inline PolyhedronInstance random_instance(BallSampler& rng, Eigen::Index d, std::size_t n_eq,
                                          std::size_t n_ineq, Vector* anchor_out = nullptr) {
    const Vector anchor = rng.unit_ball(d);
    std::vector<Vector> g;
    std::vector<double> rhs;
    for (std::size_t i = 0; i < n_eq + n_ineq; ++i) {
        Vector v(d);
        for (Eigen::Index j = 0; j < d; ++j) v(j) = 2.0 * rng.uniform() - 1.0;
        const double slack = i < n_eq ? 0.0 : (rng.uniform() < 0.4 ? 0.0 : rng.uniform());
        rhs.push_back(v.dot(anchor) + slack);
        g.push_back(std::move(v));
    }
    if (anchor_out) *anchor_out = anchor;
    return make_instance(std::move(g), std::move(rhs), n_eq);
}

/// Rank by singular values, relative to the largest column norm.
inline std::size_t svd_rank(const std::vector<Vector>& vs, double tol) {
    if (vs.empty()) return 0;
    Matrix m(vs.front().size(), static_cast<Eigen::Index>(vs.size()));
    double scale = 0.0;
    for (std::size_t i = 0; i < vs.size(); ++i) {
        m.col(static_cast<Eigen::Index>(i)) = vs[i];
        scale = std::max(scale, vs[i].norm());
    }
    if (scale == 0.0) return 0;
    Eigen::JacobiSVD<Matrix> svd(m);
    std::size_t r = 0;
    for (Eigen::Index i = 0; i < svd.singularValues().size(); ++i) {
        if (svd.singularValues()(i) > tol * scale) ++r;
    }
    return r;
}

/// Dykstra's alternating projections onto hyperplanes and halfspaces.
/// Slow but shares no code with the library solvers.
inline Vector dykstra(const PolyhedronInstance& inst, const Vector& w, int sweeps = 20000) {
    const std::size_t n = inst.size();
    Vector x = w;
    std::vector<Vector> corr(n, Vector::Zero(w.size()));
    for (int s = 0; s < sweeps; ++s) {
        const Vector before = x;
        for (std::size_t i = 0; i < n; ++i) {
            const Vector& g = inst.gradients[i];
            const double gg = g.squaredNorm();
            const Vector y = x + corr[i];
            Vector z = y;
            if (gg > 0.0) {
                const double v = y.dot(g) - inst.rhs[i];
                if (inst.is_equality(i) || v > 0.0) z = y - (v / gg) * g;
            }
            corr[i] = y - z;
            x = z;
        }
        if ((x - before).norm() < 1e-15 && s > 10) break;
    }
    return x;
}

/// Dykstra is only trusted once it has actually reached the set.
inline bool residual_ok(const PolyhedronInstance& inst, const Vector& x) {
    return residual(inst, x) <= 1e-9;
}

}  // namespace movepoly::test
