#include "movepoly/multipliers.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace movepoly {

namespace {

Eigen::Index idx(std::size_t i) { return static_cast<Eigen::Index>(i); }

double floor_for(const Vector& lambda, double floor) {
    const double scale = lambda.size() > 0 ? lambda.cwiseAbs().maxCoeff() : 0.0;
    return floor * std::max(1.0, scale);
}

}  // namespace

ReductionConfig ReductionConfig::from(const Tolerances& t) {
    ReductionConfig cfg;
    cfg.rank = t.rank;
    cfg.positivity_floor = t.positivity_floor;
    cfg.active = t.active;
    cfg.kkt = t.kkt;
    cfg.enumeration_guard = t.enumeration_guard;
    return cfg;
}

Vector MultiplierCertificate::as_multipliers(std::size_t n) const {
    Vector out = Vector::Zero(idx(n));
    std::size_t j = 0;
    for (auto i : I1_0) out(idx(i)) = coefficients(idx(j++));
    for (auto i : I2_0) out(idx(i)) = coefficients(idx(j++));
    return out;
}

IndexSet reduce_equalities(const PolyhedronInstance& inst, double rank_tol) {
    if (inst.equality_count == 0) return {};
    std::vector<Vector> eqs(inst.gradients.begin(), inst.gradients.begin() + static_cast<long>(inst.equality_count));
    return max_independent_subfamily(VectorFamily(eqs), {}, rank_tol);
}

IndexSet reduce_equalities(const MovingPolyhedron& mp, const Vector& p) {
    const PolyhedronInstance inst = instantiate(mp, p);
    const ProjectionConfig pcfg = ProjectionConfig::from(mp.tolerances());
    const ProjectionResult feasible = project(inst, mp.base_point(), pcfg);
    if (feasible.status == ProjectionStatus::infeasible_set) {
        fail(ErrorKind::infeasible, "reduce_equalities: C(p) is empty");
    }
    if (!feasible.converged()) fail(ErrorKind::solver_limit, "reduce_equalities: feasibility solve hit its limit");

    IndexSet kept = reduce_equalities(inst, mp.tolerances().rank);
    std::vector<bool> is_kept(inst.equality_count, false);
    for (auto i : kept) is_kept[i] = true;
    for (std::size_t i = 0; i < inst.equality_count; ++i) {
        if (is_kept[i]) continue;
        const double g = std::abs(inst.constraint_value(i, feasible.point));
        if (g > mp.tolerances().active * std::max(1.0, inst.gradients[i].norm())) {
            fail(ErrorKind::precondition, "reduce_equalities: dropped equality " + std::to_string(i) +
                                              " does not vanish on C(p)");
        }
    }
    return kept;
}

PositiveReduction reduce_positive_combination(const Vector& x, const VectorFamily& family,
                                              const IndexSet& J1, const IndexSet& J2,
                                              const Vector& lambda, const ReductionConfig& cfg) {
    const std::size_t k = family.size();
    require_dim(lambda.size(), idx(k), "reduce_positive_combination: lambda");
    if (!family.empty()) require_dim(x.size(), family.dim(), "reduce_positive_combination: x");

    std::vector<int> role(k, 0);  // 1 = J1, 2 = J2
    for (auto i : J1) {
        if (i >= k || role[i] != 0) fail(ErrorKind::precondition, "reduce_positive_combination: bad J1");
        role[i] = 1;
    }
    for (auto i : J2) {
        if (i >= k || role[i] != 0) fail(ErrorKind::precondition, "reduce_positive_combination: bad J2");
        role[i] = 2;
    }

    const double floor = floor_for(lambda, cfg.positivity_floor);
    Vector lam = Vector::Zero(idx(k));
    for (auto i : J1) lam(idx(i)) = lambda(idx(i));
    for (auto i : J2) {
        if (lambda(idx(i)) < -floor) {
            fail(ErrorKind::precondition, "reduce_positive_combination: negative coefficient on J2");
        }
        lam(idx(i)) = lambda(idx(i)) > floor ? lambda(idx(i)) : 0.0;
    }

    if (!J1.empty() && numerical_rank(family.subset(J1), cfg.rank).rank != J1.size()) {
        fail(ErrorKind::precondition, "reduce_positive_combination: J1 vectors are dependent");
    }
    Vector recon = x;
    for (std::size_t i = 0; i < k; ++i) {
        if (role[i] != 0) recon -= lambda(idx(i)) * family[i];
    }
    if (recon.norm() > cfg.reconstruction * std::max(1.0, x.norm())) {
        fail(ErrorKind::precondition, "reduce_positive_combination: coefficients do not reproduce x");
    }

    IndexSet alive;
    for (auto i : J2) {
        if (lam(idx(i)) > 0.0) alive.push_back(i);
    }
    std::sort(alive.begin(), alive.end());

    PositiveReduction out;
    while (true) {
        IndexSet current = J1;
        current.insert(current.end(), alive.begin(), alive.end());
        IndexSet keep(J1.size());
        for (std::size_t j = 0; j < J1.size(); ++j) keep[j] = j;
        const auto witness = dependency_witness(family.subset(current), keep, cfg.rank);
        if (!witness) break;

        Vector beta = witness->coefficients;
        bool has_positive = false;
        for (std::size_t j = J1.size(); j < current.size(); ++j) has_positive |= beta(idx(j)) > 0.0;
        if (!has_positive) beta = -beta;

        std::size_t leave = current.size();
        double ratio = std::numeric_limits<double>::infinity();
        for (std::size_t j = J1.size(); j < current.size(); ++j) {
            if (!(beta(idx(j)) > 0.0)) continue;
            const double r = lam(idx(current[j])) / beta(idx(j));
            if (r < ratio) {  // ascending scan: first hit wins ties
                ratio = r;
                leave = j;
            }
        }
        if (leave == current.size()) {
            fail(ErrorKind::precondition, "reduce_positive_combination: no J2 entry can leave");
        }
        for (std::size_t j = 0; j < current.size(); ++j) lam(idx(current[j])) -= ratio * beta(idx(j));
        lam(idx(current[leave])) = 0.0;
        ++out.iterations;

        IndexSet next;
        for (auto i : alive) {
            if (i == current[leave]) continue;
            if (lam(idx(i)) < -floor) {
                fail(ErrorKind::precondition, "reduce_positive_combination: coefficient turned negative");
            }
            if (lam(idx(i)) > floor) {
                next.push_back(i);
            } else {
                lam(idx(i)) = 0.0;
            }
        }
        alive = std::move(next);
    }
    out.J2 = std::move(alive);
    out.coefficients = std::move(lam);
    return out;
}

MultiplierCertificate reduced_multiplier(const PolyhedronInstance& inst, const Vector& w,
                                         const ProjectionResult& proj, const ReductionConfig& cfg) {
    if (!proj.converged()) fail(ErrorKind::precondition, "reduced_multiplier: projection did not converge");
    require_dim(w.size(), inst.dim(), "reduced_multiplier: w");
    MultiplierCertificate cert;
    const Vector x = w - proj.point;
    if (proj.distance == 0.0 || scaled_violation(inst, w) <= cfg.kkt) {
        cert.trivial = true;
        cert.coefficients = Vector(0);
        cert.reconstruction_error = x.norm();
        return cert;
    }

    const std::size_t n_eq = inst.equality_count;
    IndexSet eq_kept = reduce_equalities(inst, cfg.rank);
    std::sort(eq_kept.begin(), eq_kept.end());

    // Fold the multipliers of dependent equalities into the kept ones.
    Vector lam_hat = proj.multipliers;
    if (eq_kept.size() < n_eq) {
        std::vector<Vector> kept_grads;
        for (auto i : eq_kept) kept_grads.push_back(inst.gradients[i]);
        std::vector<bool> is_kept(n_eq, false);
        for (auto i : eq_kept) is_kept[i] = true;
        for (std::size_t j = 0; j < n_eq; ++j) {
            if (is_kept[j] || lam_hat(idx(j)) == 0.0) continue;
            const SpanSolution sol = solve_in_span(VectorFamily(kept_grads), inst.gradients[j]);
            for (std::size_t l = 0; l < eq_kept.size(); ++l) {
                lam_hat(idx(eq_kept[l])) += lam_hat(idx(j)) * sol.coefficients(idx(l));
            }
            lam_hat(idx(j)) = 0.0;
        }
    }

    std::vector<Vector> grads;
    std::vector<std::size_t> labels;
    Vector coeff(idx(eq_kept.size() + inst.size()));
    IndexSet J1, J2;
    auto push = [&](std::size_t c) {
        coeff(idx(grads.size())) = lam_hat(idx(c));
        grads.push_back(inst.gradients[c]);
        labels.push_back(c);
    };
    for (auto i : eq_kept) {
        J1.push_back(grads.size());
        push(i);
    }
    for (auto i : proj.active) {
        if (i < n_eq) continue;
        J2.push_back(grads.size());
        push(i);
    }
    coeff.conservativeResize(idx(grads.size()));

    const VectorFamily family(grads, labels);
    ReductionConfig rcfg = cfg;
    // The projection's own stationarity error bounds what the input can reproduce.
    rcfg.reconstruction = std::max(cfg.reconstruction, 10.0 * proj.kkt_residual / std::max(1.0, x.norm()));
    const PositiveReduction red = reduce_positive_combination(x, family, J1, J2, coeff, rcfg);
    cert.reduction_iterations = red.iterations;

    IndexSet positions = J1;
    positions.insert(positions.end(), red.J2.begin(), red.J2.end());
    cert.I1_0 = eq_kept;
    for (auto pos : red.J2) cert.I2_0.push_back(labels[pos]);
    cert.coefficients = Vector(idx(positions.size()));
    Vector recon = x;
    for (std::size_t j = 0; j < positions.size(); ++j) {
        cert.coefficients(idx(j)) = red.coefficients(idx(positions[j]));
        recon -= cert.coefficients(idx(j)) * family[positions[j]];
    }
    cert.reconstruction_error = recon.norm();
    cert.independence = positions.empty() ? RankCertificate{} : numerical_rank(family.subset(positions), cfg.rank);
    return cert;
}

Vector normalize_multiplier(const Vector& lambda_hat, double distance) {
    if (!(distance > 0.0)) fail(ErrorKind::precondition, "normalize_multiplier: distance must be positive");
    if (lambda_hat.size() > 0 && lambda_hat.cwiseAbs().maxCoeff() == 0.0) {
        fail(ErrorKind::precondition,
             "normalize_multiplier: zero multiplier with positive distance violates stationarity");
    }
    return lambda_hat / distance;
}

Vector denormalize_multiplier(const Vector& lambda, double distance) {
    if (!(distance > 0.0)) fail(ErrorKind::precondition, "denormalize_multiplier: distance must be positive");
    return lambda * distance;
}

MinL1Multiplier min_l1_multiplier(const PolyhedronInstance& inst, const Vector& w,
                                  const ProjectionResult& proj, const ReductionConfig& cfg) {
    if (!proj.converged()) fail(ErrorKind::precondition, "min_l1_multiplier: projection did not converge");
    if (inst.size() > cfg.enumeration_guard) {
        fail(ErrorKind::guard_exceeded, "min_l1_multiplier: " + std::to_string(inst.size()) +
                                            " constraints exceed the enumeration guard of " +
                                            std::to_string(cfg.enumeration_guard));
    }
    const Vector diff = w - proj.point;
    const double dist = diff.norm();
    if (!(dist > 0.0) || scaled_violation(inst, w) <= cfg.kkt) {
        fail(ErrorKind::precondition, "min_l1_multiplier: w lies in C(p)");
    }
    const Vector unit = diff / dist;
    const IndexSet active = active_set(inst, proj.point, cfg.active);
    const double accept = std::max(1e-8, 10.0 * proj.kkt_residual / dist);
    const auto d = static_cast<std::size_t>(inst.dim());

    MinL1Multiplier best;
    best.l1 = std::numeric_limits<double>::infinity();
    bool have = false;
    for (std::uint64_t mask = 1; mask < (std::uint64_t{1} << active.size()); ++mask) {
        IndexSet set;
        for (std::size_t b = 0; b < active.size(); ++b) {
            if (mask & (std::uint64_t{1} << b)) set.push_back(active[b]);
        }
        if (set.size() > d) continue;
        std::vector<Vector> grads;
        for (auto i : set) grads.push_back(inst.gradients[i]);
        const VectorFamily family(grads);
        if (numerical_rank(family, cfg.rank).rank != set.size()) continue;
        const SpanSolution sol = solve_in_span(family, unit);
        if (sol.residual > accept) continue;
        bool signs_ok = true;
        for (std::size_t j = 0; j < set.size(); ++j) {
            if (set[j] >= inst.equality_count && sol.coefficients(idx(j)) < -1e-9) signs_ok = false;
        }
        if (!signs_ok) continue;
        ++best.candidates;
        const double l1 = sol.coefficients.cwiseAbs().sum();
        const double tie = 1e-12 * std::max(1.0, best.l1 == std::numeric_limits<double>::infinity() ? 1.0 : best.l1);
        const bool better = !have || l1 < best.l1 - tie ||
                            (std::abs(l1 - best.l1) <= tie &&
                             std::lexicographical_compare(set.begin(), set.end(), best.subfamily.begin(),
                                                          best.subfamily.end()));
        if (!better) continue;
        have = true;
        best.l1 = l1;
        best.subfamily = set;
        best.multipliers = Vector::Zero(idx(inst.size()));
        for (std::size_t j = 0; j < set.size(); ++j) {
            const double c = sol.coefficients(idx(j));
            best.multipliers(idx(set[j])) = (set[j] >= inst.equality_count && c < 0.0) ? 0.0 : c;
        }
    }
    if (!have) fail(ErrorKind::precondition, "min_l1_multiplier: no sign-feasible basic multiplier found");
    best.l1 = best.multipliers.cwiseAbs().sum();
    return best;
}

double unit_stationarity_residual(const PolyhedronInstance& inst, const Vector& w, const Vector& point,
                                  const Vector& lambda) {
    const Vector diff = w - point;
    Vector r = diff / diff.norm();
    for (std::size_t i = 0; i < inst.size(); ++i) r -= lambda(idx(i)) * inst.gradients[i];
    return r.norm();
}

double starred_stationarity_residual(const PolyhedronInstance& inst, const Vector& w, const Vector& point,
                                     const Vector& lambda) {
    const Vector diff = w - point;
    Vector r = 2.0 * diff / diff.norm();
    for (std::size_t i = 0; i < inst.size(); ++i) r -= lambda(idx(i)) * inst.gradients[i];
    return r.norm();
}

}  // namespace movepoly
