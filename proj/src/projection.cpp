#include "movepoly/projection.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>

#include <Eigen/QR>

#include "movepoly/linalg_rank.hpp"

namespace movepoly {

ProjectionConfig ProjectionConfig::from(const Tolerances& t) {
    ProjectionConfig cfg;
    cfg.feasibility = t.feasibility;
    cfg.kkt = t.kkt;
    cfg.active = t.active;
    cfg.rank = t.rank;
    cfg.iteration_factor = t.iteration_factor;
    cfg.enumeration_guard = t.enumeration_guard;
    return cfg;
}

const char* to_string(ProjectionStatus status) {
    switch (status) {
        case ProjectionStatus::converged: return "converged";
        case ProjectionStatus::infeasible_set: return "infeasible_set";
        case ProjectionStatus::iteration_limit: return "iteration_limit";
    }
    return "unknown";
}

double scaled_violation(const PolyhedronInstance& inst, const Vector& x) {
    double out = 0.0;
    for (std::size_t i = 0; i < inst.size(); ++i) {
        const double g = inst.constraint_value(i, x);
        const double v = inst.is_equality(i) ? std::abs(g) : std::max(0.0, g);
        out = std::max(out, v / std::max(1.0, inst.gradients[i].norm()));
    }
    return out;
}

double kkt_residual(const PolyhedronInstance& inst, const Vector& w, const Vector& point,
                    const Vector& multipliers) {
    require_dim(point.size(), inst.dim(), "kkt_residual: point");
    require_dim(multipliers.size(), static_cast<Eigen::Index>(inst.size()), "kkt_residual: multipliers");
    Vector stationarity = w - point;
    for (std::size_t i = 0; i < inst.size(); ++i) {
        stationarity -= multipliers(static_cast<Eigen::Index>(i)) * inst.gradients[i];
    }
    double out = std::max(stationarity.norm(), residual(inst, point));
    for (std::size_t i = inst.equality_count; i < inst.size(); ++i) {
        const double lam = multipliers(static_cast<Eigen::Index>(i));
        out = std::max(out, std::abs(lam * inst.constraint_value(i, point)));
        out = std::max(out, -lam);
    }
    return out;
}

namespace {

/// Projection of w onto the affine set {x : N^T x = rhs} for a full column
/// rank N, together with the multipliers u of w - x = N u.
struct AffineProjection {
    Vector point;
    Vector multipliers;
};

AffineProjection project_affine(const Matrix& normals, const Vector& rhs, const Vector& w) {
    AffineProjection out;
    const Eigen::Index k = normals.cols();
    if (k == 0) {
        out.point = w;
        out.multipliers = Vector(0);
        return out;
    }
    Eigen::HouseholderQR<Matrix> qr(normals);
    const Matrix q = qr.householderQ() * Matrix::Identity(normals.rows(), k);
    const auto r = qr.matrixQR().topLeftCorner(k, k).template triangularView<Eigen::Upper>();
    const Vector shift = r.transpose().solve(rhs);
    const Vector y = q.transpose() * w - shift;
    out.multipliers = r.solve(y);
    out.point = w - q * y;
    return out;
}

double feasibility_scale(const PolyhedronInstance& inst, std::size_t i, double tol) {
    return tol * std::max(1.0, inst.gradients[i].norm());
}

void finish(const PolyhedronInstance& inst, const Vector& w, const ProjectionConfig& cfg,
            ProjectionResult& res) {
    res.distance = (w - res.point).norm();
    res.kkt_residual = kkt_residual(inst, w, res.point, res.multipliers);
    res.active.clear();
    if (res.converged() && residual(inst, res.point) <= cfg.active) {
        res.active = active_set(inst, res.point, cfg.active);
    }
}

class DualActiveSet {
public:
    DualActiveSet(const PolyhedronInstance& inst, const Vector& w, const ProjectionConfig& cfg)
        : inst_(inst), w_(w), cfg_(cfg), x_(w), u_(Vector::Zero(static_cast<Eigen::Index>(inst.size()))),
          sign_(inst.size(), 1.0), in_working_(inst.size(), false) {}

    ProjectionResult run() {
        ProjectionResult res;
        const std::size_t cap = std::max<std::size_t>(1, cfg_.iteration_factor * inst_.size());
        bool infeasible = false;
        bool limit = false;

        // Equalities enter first, in index order, then the most violated
        // constraint of any kind.
        while (true) {
            std::optional<std::size_t> q = next_equality();
            if (!q) q = most_violated();
            if (!q) break;
            const Outcome outcome = add_constraint(*q, cap);
            if (outcome == Outcome::infeasible) {
                infeasible = true;
                break;
            }
            if (outcome == Outcome::limit) {
                limit = true;
                break;
            }
        }

        res.iterations = iterations_;
        res.trace = std::move(trace_);
        if (infeasible) {
            res.status = ProjectionStatus::infeasible_set;
        } else if (limit) {
            res.status = ProjectionStatus::iteration_limit;
        } else {
            res.status = ProjectionStatus::converged;
            polish();
        }
        res.point = x_;
        res.multipliers = Vector::Zero(u_.size());
        for (auto j : working_) {
            res.multipliers(idx(j)) = sign_[j] * u_(idx(j));
        }
        for (std::size_t i = inst_.equality_count; i < inst_.size(); ++i) {
            // Round-off below the positivity floor is not a sign violation.
            if (res.multipliers(idx(i)) < 0.0 && res.multipliers(idx(i)) > -1e-13) {
                res.multipliers(idx(i)) = 0.0;
            }
        }
        finish(inst_, w_, cfg_, res);
        return res;
    }

private:
    enum class Outcome { added, infeasible, limit };

    static Eigen::Index idx(std::size_t i) { return static_cast<Eigen::Index>(i); }

    double violation(std::size_t i) const {
        const double g = inst_.constraint_value(i, x_);
        return inst_.is_equality(i) ? std::abs(g) : g;
    }

    std::optional<std::size_t> next_equality() const {
        for (std::size_t i = 0; i < inst_.equality_count; ++i) {
            if (!in_working_[i] && violation(i) > feasibility_scale(inst_, i, cfg_.feasibility)) return i;
        }
        return std::nullopt;
    }

    std::optional<std::size_t> most_violated() const {
        std::optional<std::size_t> best;
        double best_v = 0.0;
        for (std::size_t i = 0; i < inst_.size(); ++i) {
            if (in_working_[i]) continue;
            const double v = violation(i);
            if (v > feasibility_scale(inst_, i, cfg_.feasibility) && v > best_v) {
                best = i;
                best_v = v;
            }
        }
        return best;
    }

    Vector normal(std::size_t i) const { return sign_[i] * inst_.gradients[i]; }
    double offset(std::size_t i) const { return sign_[i] * inst_.rhs[i]; }

    Matrix working_normals() const {
        Matrix n(inst_.dim(), static_cast<Eigen::Index>(working_.size()));
        for (std::size_t j = 0; j < working_.size(); ++j) n.col(idx(j)) = normal(working_[j]);
        return n;
    }

    Outcome add_constraint(std::size_t q, std::size_t cap) {
        if (inst_.is_equality(q)) sign_[q] = inst_.constraint_value(q, x_) >= 0.0 ? 1.0 : -1.0;
        const Vector nq = normal(q);
        const double nq_norm = nq.norm();

        while (true) {
            if (iterations_ >= cap) return Outcome::limit;
            const double v = nq.dot(x_) - offset(q);
            if (v <= feasibility_scale(inst_, q, cfg_.feasibility) && u_(idx(q)) == 0.0) {
                // Satisfied after earlier drops; nothing to add.
                return Outcome::added;
            }

            // Split nq into its part in span(working normals), N r, and the
            // orthogonal remainder z (the primal step direction).
            Vector r = Vector::Zero(static_cast<Eigen::Index>(working_.size()));
            Vector z = nq;
            if (!working_.empty()) {
                const Matrix n = working_normals();
                Eigen::HouseholderQR<Matrix> qr(n);
                const Eigen::Index k = n.cols();
                const Matrix qm = qr.householderQ() * Matrix::Identity(n.rows(), k);
                const Vector coeff = qm.transpose() * nq;
                r = qr.matrixQR().topLeftCorner(k, k).template triangularView<Eigen::Upper>().solve(coeff);
                z = nq - qm * coeff;
                z -= qm * (qm.transpose() * z);
            }
            const bool dependent = z.norm() <= cfg_.rank * nq_norm;

            // Dual ratio test over working inequalities.
            double t_dual = std::numeric_limits<double>::infinity();
            std::size_t drop = inst_.size();
            for (std::size_t j = 0; j < working_.size(); ++j) {
                const std::size_t c = working_[j];
                if (inst_.is_equality(c) || !(r(idx(j)) > 0.0)) continue;
                const double ratio = u_(idx(c)) / r(idx(j));
                if (ratio < t_dual || (ratio == t_dual && c < drop)) {
                    t_dual = ratio;
                    drop = c;
                }
            }

            double t_primal = std::numeric_limits<double>::infinity();
            if (!dependent) t_primal = std::max(0.0, v) / z.squaredNorm();

            if (dependent && drop == inst_.size()) return Outcome::infeasible;

            const double t = std::min(t_primal, t_dual);
            if (!dependent) x_ -= t * z;
            for (std::size_t j = 0; j < working_.size(); ++j) u_(idx(working_[j])) -= t * r(idx(j));
            u_(idx(q)) += t;
            ++iterations_;

            if (t_primal <= t_dual) {
                working_.push_back(q);
                in_working_[q] = true;
                trace_.push_back({SolverEvent::Action::add, q, t});
                return Outcome::added;
            }
            u_(idx(drop)) = 0.0;
            in_working_[drop] = false;
            working_.erase(std::find(working_.begin(), working_.end(), drop));
            trace_.push_back({SolverEvent::Action::drop, drop, t});
        }
    }

    // Recompute point and multipliers from the final working set in one
    // orthogonal solve; keeps the accumulated update error out of the KKT
    // residual. Rejected if it disturbs signs or feasibility.
    void polish() {
        if (working_.empty()) return;
        const Matrix n = working_normals();
        Vector rhs(static_cast<Eigen::Index>(working_.size()));
        for (std::size_t j = 0; j < working_.size(); ++j) rhs(idx(j)) = offset(working_[j]);
        const AffineProjection ap = project_affine(n, rhs, w_);
        for (std::size_t j = 0; j < working_.size(); ++j) {
            const std::size_t c = working_[j];
            if (!inst_.is_equality(c) && ap.multipliers(idx(j)) < -cfg_.kkt) return;
        }
        const Vector saved_x = x_;
        x_ = ap.point;
        if (scaled_violation(inst_, x_) > cfg_.feasibility) {
            x_ = saved_x;
            return;
        }
        for (std::size_t j = 0; j < working_.size(); ++j) u_(idx(working_[j])) = ap.multipliers(idx(j));
    }

    const PolyhedronInstance& inst_;
    const Vector& w_;
    const ProjectionConfig& cfg_;
    Vector x_;
    Vector u_;  // oriented multipliers, indexed by constraint
    std::vector<double> sign_;
    std::vector<bool> in_working_;
    std::vector<std::size_t> working_;
    std::vector<SolverEvent> trace_;
    std::size_t iterations_ = 0;
};

}  // namespace

ProjectionResult project(const PolyhedronInstance& inst, const Vector& w, const ProjectionConfig& cfg) {
    require_dim(w.size(), inst.dim(), "project: w");
    ProjectionResult res = DualActiveSet(inst, w, cfg).run();
    if (res.status == ProjectionStatus::infeasible_set && inst.size() <= cfg.enumeration_guard) {
        ProjectionResult oracle = project_bruteforce(inst, w, cfg);
        if (oracle.converged()) {
            oracle.brute_force_fallback = true;
            oracle.trace = std::move(res.trace);
            return oracle;
        }
    }
    return res;
}

ProjectionResult project_bruteforce(const PolyhedronInstance& inst, const Vector& w,
                                    const ProjectionConfig& cfg) {
    require_dim(w.size(), inst.dim(), "project_bruteforce: w");
    if (inst.size() > cfg.enumeration_guard) {
        fail(ErrorKind::guard_exceeded, "project_bruteforce: " + std::to_string(inst.size()) +
                                            " constraints exceed the enumeration guard of " +
                                            std::to_string(cfg.enumeration_guard));
    }
    const std::size_t n = inst.size();
    const std::size_t n_eq = inst.equality_count;
    const std::size_t n_ineq = n - n_eq;

    IndexSet base;
    if (n_eq > 0) {
        std::vector<Vector> eqs(inst.gradients.begin(), inst.gradients.begin() + static_cast<long>(n_eq));
        base = max_independent_subfamily(VectorFamily(eqs), {}, cfg.rank);
        std::sort(base.begin(), base.end());
    }

    ProjectionResult best;
    best.status = ProjectionStatus::infeasible_set;
    best.point = w;
    best.multipliers = Vector::Zero(static_cast<Eigen::Index>(n));
    bool have = false;
    bool best_signs_ok = false;
    std::size_t examined = 0;
    const auto d = static_cast<std::size_t>(inst.dim());

    for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << n_ineq); ++mask) {
        IndexSet set = base;
        for (std::size_t b = 0; b < n_ineq; ++b) {
            if (mask & (std::uint64_t{1} << b)) set.push_back(n_eq + b);
        }
        if (set.size() > d) continue;
        ++examined;

        std::vector<Vector> grads;
        grads.reserve(set.size());
        for (auto i : set) grads.push_back(inst.gradients[i]);
        Matrix normals(inst.dim(), static_cast<Eigen::Index>(set.size()));
        Vector rhs(static_cast<Eigen::Index>(set.size()));
        if (!set.empty()) {
            if (numerical_rank(VectorFamily(grads), cfg.rank).rank != set.size()) continue;
            for (std::size_t j = 0; j < set.size(); ++j) {
                normals.col(static_cast<Eigen::Index>(j)) = grads[j];
                rhs(static_cast<Eigen::Index>(j)) = inst.rhs[set[j]];
            }
        }
        const AffineProjection ap = project_affine(normals, rhs, w);
        if (scaled_violation(inst, ap.point) > cfg.feasibility) continue;

        bool signs_ok = true;
        for (std::size_t j = 0; j < set.size(); ++j) {
            if (set[j] >= n_eq && ap.multipliers(static_cast<Eigen::Index>(j)) < -cfg.kkt) signs_ok = false;
        }
        const double dist = (w - ap.point).norm();
        const double tie = 1e-12 * std::max(1.0, best.distance);
        const bool better = !have || dist < best.distance - tie ||
                            (std::abs(dist - best.distance) <= tie && signs_ok && !best_signs_ok);
        if (!better) continue;

        have = true;
        best_signs_ok = signs_ok;
        best.status = ProjectionStatus::converged;
        best.point = ap.point;
        best.distance = dist;
        best.multipliers.setZero();
        for (std::size_t j = 0; j < set.size(); ++j) {
            const double lam = ap.multipliers(static_cast<Eigen::Index>(j));
            best.multipliers(static_cast<Eigen::Index>(set[j])) =
                (set[j] >= n_eq && lam < 0.0 && lam > -1e-13) ? 0.0 : lam;
        }
    }
    best.iterations = examined;
    finish(inst, w, cfg, best);
    return best;
}

}  // namespace movepoly
