#include "movepoly/regularity.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "movepoly/sampling.hpp"

namespace movepoly {

namespace {

Eigen::Index idx(std::size_t i) { return static_cast<Eigen::Index>(i); }

ProjectionConfig projection_config(const MovingPolyhedron& mp) {
    return ProjectionConfig::from(mp.tolerances());
}

ReductionConfig reduction_config(const MovingPolyhedron& mp) {
    return ReductionConfig::from(mp.tolerances());
}

std::vector<Vector> gradients_of(const PolyhedronInstance& inst, const IndexSet& J) {
    std::vector<Vector> out;
    out.reserve(J.size());
    for (auto i : J) out.push_back(inst.gradients[i]);
    return out;
}

RankCertificate rank_of(const PolyhedronInstance& inst, const IndexSet& J, double tol) {
    if (J.empty()) return {};
    return numerical_rank(VectorFamily(gradients_of(inst, J)), tol);
}

}  // namespace

const char* to_string(RcrcqVerdict v) {
    switch (v) {
        case RcrcqVerdict::holds: return "holds";
        case RcrcqVerdict::violated: return "violated";
        case RcrcqVerdict::borderline: return "borderline";
    }
    return "unknown";
}

RcrcqReport check_rcrcq(const MovingPolyhedron& mp, double param_radius, const SamplingConfig& sampling) {
    const Tolerances& tol = mp.tolerances();
    const PolyhedronInstance base = instantiate(mp, mp.base_param());

    RcrcqReport report;
    report.base_active = active_set(base, mp.base_point(), tol.active);
    report.samples = sampling.samples;

    IndexSet equalities;
    IndexSet free;
    for (auto i : report.base_active) (base.is_equality(i) ? equalities : free).push_back(i);
    if (free.size() > tol.enumeration_guard) {
        fail(ErrorKind::guard_exceeded, "check_rcrcq: " + std::to_string(free.size()) +
                                            " active inequalities exceed the enumeration guard of " +
                                            std::to_string(tol.enumeration_guard));
    }

    BallSampler sampler = BallSampler::stream(sampling.seed, "rcrcq");
    std::vector<PolyhedronInstance> sampled;
    sampled.reserve(sampling.samples);
    for (std::size_t s = 0; s < sampling.samples; ++s) {
        sampled.push_back(instantiate(mp, sampler.in_ball(mp.base_param(), param_radius)));
    }

    bool any_borderline = false;
    bool any_violated = false;
    for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << free.size()); ++mask) {
        RcrcqRow row;
        row.J = equalities;
        for (std::size_t b = 0; b < free.size(); ++b) {
            if (mask & (std::uint64_t{1} << b)) row.J.push_back(free[b]);
        }
        std::sort(row.J.begin(), row.J.end());

        const RankCertificate at_base = rank_of(base, row.J, tol.rank);
        row.base_rank = row.min_rank = row.max_rank = at_base.rank;
        row.borderline = at_base.borderline;
        bool witnessed = false;
        for (const auto& inst : sampled) {
            const RankCertificate cert = rank_of(inst, row.J, tol.rank);
            row.min_rank = std::min(row.min_rank, cert.rank);
            row.max_rank = std::max(row.max_rank, cert.rank);
            row.borderline = row.borderline || cert.borderline;
            if (cert.rank != row.base_rank && !witnessed) {
                report.witnesses.push_back({row.J, inst.param, cert.rank, row.base_rank});
                witnessed = true;
            }
        }
        row.verdict = (row.min_rank == row.base_rank && row.max_rank == row.base_rank) ? RcrcqVerdict::holds
                                                                                       : RcrcqVerdict::violated;
        any_violated = any_violated || row.verdict == RcrcqVerdict::violated;
        any_borderline = any_borderline || row.borderline;
        report.table.push_back(std::move(row));
    }
    report.overall = any_violated ? RcrcqVerdict::violated
                                  : (any_borderline ? RcrcqVerdict::borderline : RcrcqVerdict::holds);
    return report;
}

LiminfReport check_inner_semicontinuity(const MovingPolyhedron& mp, double param_radius,
                                        double point_radius, const SamplingConfig& sampling) {
    const ProjectionConfig pcfg = projection_config(mp);
    BallSampler sampler = BallSampler::stream(sampling.seed, "liminf");
    LiminfReport report;
    report.samples = sampling.samples;
    for (std::size_t s = 0; s < sampling.samples; ++s) {
        const Vector p = sampler.in_ball(mp.base_param(), param_radius);
        const PolyhedronInstance inst = instantiate(mp, p);
        const ProjectionResult proj = project(inst, mp.base_point(), pcfg);
        if (!proj.converged()) {
            ++report.infeasible_count;
            if (!report.first_infeasible_param) report.first_infeasible_param = p;
            continue;
        }
        if (!report.worst_param || proj.distance > report.max_distance) {
            report.max_distance = proj.distance;
            report.worst_param = p;
        }
    }
    report.consistent = report.infeasible_count == 0 && report.max_distance < point_radius;
    return report;
}

EstimatorOptions default_options(const MovingPolyhedron& mp) {
    EstimatorOptions opt;
    opt.param_radius = mp.param_radius();
    opt.point_radius = mp.point_radius();
    opt.sampling = mp.sampling();
    return opt;
}

namespace {

enum class PairOutcome { used, feasible, failed };

PairOutcome evaluate_pair(const PolyhedronInstance& inst, const Vector& w, const ProjectionResult& proj,
                          const ReductionConfig& rcfg, PairSample& out) {
    if (!proj.converged()) return PairOutcome::failed;
    if (proj.distance == 0.0 || scaled_violation(inst, w) <= rcfg.kkt) return PairOutcome::feasible;
    try {
        out.min_l1 = min_l1_multiplier(inst, w, proj, rcfg).l1;
    } catch (const Error& e) {
        if (e.kind() != ErrorKind::precondition) throw;
        return PairOutcome::failed;
    }
    out.param = inst.param;
    out.point = w;
    out.distance = proj.distance;
    out.residual = residual(inst, w);
    out.ratio = out.distance / out.residual;
    return PairOutcome::used;
}

void tally(PairOutcome outcome, SampleCounts& counts) {
    switch (outcome) {
        case PairOutcome::used: ++counts.used; break;
        case PairOutcome::feasible: ++counts.skipped_feasible; break;
        case PairOutcome::failed: ++counts.solver_failures; break;
    }
}

// Ball pairs at the given radii from fixed unit draws.
std::vector<PairSample> evaluate_ball_pairs(const MovingPolyhedron& mp, const std::vector<Vector>& unit_params,
                                            const std::vector<Vector>& unit_points, double param_radius,
                                            double point_radius, SampleCounts& counts) {
    const ProjectionConfig pcfg = projection_config(mp);
    const ReductionConfig rcfg = reduction_config(mp);
    std::vector<PairSample> out;
    for (std::size_t i = 0; i < unit_params.size(); ++i) {
        const Vector p = mp.base_param() + param_radius * unit_params[i];
        const Vector w = mp.base_point() + point_radius * unit_points[i];
        const PolyhedronInstance inst = instantiate(mp, p);
        const ProjectionResult proj = project(inst, w, pcfg);
        PairSample sample;
        sample.index = i;
        ++counts.drawn;
        const PairOutcome outcome = evaluate_pair(inst, w, proj, rcfg, sample);
        tally(outcome, counts);
        if (outcome == PairOutcome::used) out.push_back(std::move(sample));
    }
    return out;
}

}  // namespace

SamplePlan build_sample_plan(const MovingPolyhedron& mp, const EstimatorOptions& opt) {
    const ProjectionConfig pcfg = projection_config(mp);
    const ReductionConfig rcfg = reduction_config(mp);
    const auto lipschitz = lipschitz_constants(mp);
    const std::size_t n = opt.sampling.samples;

    SamplePlan plan;
    BallSampler params = BallSampler::stream(opt.sampling.seed, "pairs/param");
    BallSampler points = BallSampler::stream(opt.sampling.seed, "pairs/point");
    for (std::size_t i = 0; i < n; ++i) {
        plan.unit_params.push_back(params.unit_ball(mp.param_dim()));
        plan.unit_points.push_back(points.unit_ball(mp.ambient_dim()));
    }
    plan.pairs = evaluate_ball_pairs(mp, plan.unit_params, plan.unit_points, opt.param_radius,
                                     opt.point_radius, plan.pair_counts);

    BallSampler aubin = BallSampler::stream(opt.sampling.seed, "aubin");
    for (std::size_t i = 0; i < n; ++i) {
        const Vector p1 = aubin.in_ball(mp.base_param(), opt.param_radius);
        const Vector p2 = aubin.in_ball(mp.base_param(), opt.param_radius);
        const Vector y = aubin.in_ball(mp.base_point(), opt.point_radius);
        ++plan.aubin_drawn;
        const double gap = (p1 - p2).norm();
        if (gap < 1e-10) {
            ++plan.aubin_equal_params;
            continue;
        }
        const PolyhedronInstance inst1 = instantiate(mp, p1);
        const ProjectionResult proj1 = project(inst1, y, pcfg);
        if (!proj1.converged()) {
            ++plan.aubin_failures;
            continue;
        }
        const Vector& x1 = proj1.point;
        if ((x1 - mp.base_point()).norm() > opt.point_radius) continue;

        const PolyhedronInstance inst2 = instantiate(mp, p2);
        const ProjectionResult proj2 = project(inst2, x1, pcfg);
        if (!proj2.converged()) {
            ++plan.aubin_failures;
            continue;
        }
        AubinSample s;
        s.index = i;
        s.p1 = p1;
        s.p2 = p2;
        s.x1 = x1;
        s.param_gap = gap;
        s.distance = proj2.distance;
        s.residual = residual(inst2, x1);
        s.lipschitz_factor = residual_lipschitz_bound(lipschitz, x1);
        plan.aubin.push_back(s);

        PairSample pair;
        pair.index = i;
        pair.from_aubin = true;
        ++plan.pair_counts.drawn;
        const PairOutcome outcome = evaluate_pair(inst2, x1, proj2, rcfg, pair);
        tally(outcome, plan.pair_counts);
        if (outcome == PairOutcome::used) {
            ++plan.pair_counts.aubin_pairs;
            plan.pairs.push_back(std::move(pair));
        }
    }
    return plan;
}

MultiplierBoundReport estimate_multiplier_bound(const MovingPolyhedron& mp, const SamplePlan& plan,
                                                const EstimatorOptions& opt) {
    MultiplierBoundReport report;
    report.counts = plan.pair_counts;
    for (const auto& s : plan.pairs) {
        if (!report.witness || s.min_l1 > report.M_hat) {
            report.M_hat = s.min_l1;
            report.witness = s;
        }
    }

    for (std::size_t level = 0; level < opt.growth_levels; ++level) {
        const double scale = std::ldexp(1.0, -static_cast<int>(level));
        GrowthLevel g;
        g.level = level;
        g.param_radius = opt.param_radius * scale;
        g.point_radius = opt.point_radius * scale;
        SampleCounts counts;
        const auto pairs = evaluate_ball_pairs(mp, plan.unit_params, plan.unit_points, g.param_radius,
                                               g.point_radius, counts);
        for (const auto& s : pairs) g.M_hat = std::max(g.M_hat, s.min_l1);
        g.used = counts.used;
        report.growth.push_back(g);
    }
    if (report.growth.size() >= 2 && report.growth.front().M_hat > 0.0) {
        report.growth_factor = report.growth.back().M_hat / report.growth.front().M_hat;
    }
    return report;
}

MultiplierBoundReport estimate_multiplier_bound(const MovingPolyhedron& mp, const EstimatorOptions& opt) {
    return estimate_multiplier_bound(mp, build_sample_plan(mp, opt), opt);
}

RRegularityReport estimate_r_regularity(const SamplePlan& plan, double M_hat) {
    RRegularityReport report;
    report.counts = plan.pair_counts;
    for (const auto& s : plan.pairs) {
        if (!report.witness || s.ratio > report.alpha_hat) {
            report.alpha_hat = s.ratio;
            report.witness = s;
        }
        if (s.min_l1 > 0.0) report.max_ratio_over_l1 = std::max(report.max_ratio_over_l1, s.ratio / s.min_l1);
    }
    report.two_M_bound_ok = report.alpha_hat <= 2.0 * M_hat * (1.0 + 1e-6);
    return report;
}

RRegularityReport estimate_r_regularity(const MovingPolyhedron& mp, const EstimatorOptions& opt, double M_hat) {
    return estimate_r_regularity(build_sample_plan(mp, opt), M_hat);
}

AubinReport estimate_aubin_modulus(const MovingPolyhedron& /*mp*/, const SamplePlan& plan, double alpha_hat) {
    AubinReport report;
    report.drawn = plan.aubin_drawn;
    report.retained = plan.aubin.size();
    report.skipped_equal_params = plan.aubin_equal_params;
    report.solver_failures = plan.aubin_failures;
    if (plan.aubin.empty()) {
        fail(ErrorKind::precondition,
             "estimate_aubin_modulus: no projected sample fell inside the point ball; "
             "increase --point-radius or --samples");
    }
    for (const auto& s : plan.aubin) {
        const double modulus = s.distance / s.param_gap;
        if (!report.witness || modulus > report.empirical) {
            report.empirical = modulus;
            report.witness = s;
        }
        report.max_lipschitz_factor = std::max(report.max_lipschitz_factor, s.lipschitz_factor);
        if (s.distance > alpha_hat * s.residual + 1e-7) ++report.consistency_violations;
        if (s.distance > alpha_hat * s.lipschitz_factor * s.param_gap + 1e-7) ++report.bound_violations;
    }
    report.theoretical = alpha_hat * report.max_lipschitz_factor;
    return report;
}

AubinReport estimate_aubin_modulus(const MovingPolyhedron& mp, const EstimatorOptions& opt, double alpha_hat) {
    return estimate_aubin_modulus(mp, build_sample_plan(mp, opt), alpha_hat);
}

RegularityReport analyze_regularity(const MovingPolyhedron& mp, const EstimatorOptions& opt) {
    RegularityReport report;
    report.options = opt;
    report.liminf = check_inner_semicontinuity(mp, opt.param_radius, opt.point_radius, opt.sampling);
    if (!report.liminf.consistent) report.warnings.push_back("liminf sampling is not consistent");

    bool rcrcq_ok = false;
    try {
        report.rcrcq = check_rcrcq(mp, opt.param_radius, opt.sampling);
        rcrcq_ok = report.rcrcq.overall == RcrcqVerdict::holds;
        if (!rcrcq_ok) {
            report.warnings.push_back(std::string("RCRCQ ") + to_string(report.rcrcq.overall));
        }
    } catch (const Error& e) {
        if (e.kind() != ErrorKind::guard_exceeded) throw;
        report.warnings.push_back(e.what());
    }

    const SamplePlan plan = build_sample_plan(mp, opt);
    report.bound = estimate_multiplier_bound(mp, plan, opt);
    report.r_regularity = estimate_r_regularity(plan, report.bound.M_hat);
    if (plan.pair_counts.solver_failures > 0) {
        report.warnings.push_back(std::to_string(plan.pair_counts.solver_failures) +
                                  " sample pairs failed to produce a multiplier");
    }
    if (!report.r_regularity.two_M_bound_ok) report.warnings.push_back("alpha_hat exceeds 2 M_hat");

    try {
        report.aubin = estimate_aubin_modulus(mp, plan, report.r_regularity.alpha_hat);
        report.aubin_within_theory =
            report.aubin->empirical <= report.aubin->theoretical * (1.0 + 1e-6) + 1e-7;
        if (!report.aubin_within_theory) {
            report.warnings.push_back("empirical Aubin modulus exceeds the theoretical bound");
        }
    } catch (const Error& e) {
        if (e.kind() != ErrorKind::precondition) throw;
        report.warnings.push_back(e.what());
    }

    report.consistent_with_lipschitz_like = report.liminf.consistent && rcrcq_ok &&
                                            report.r_regularity.two_M_bound_ok && report.aubin &&
                                            report.aubin_within_theory;
    std::ostringstream verdict;
    if (report.consistent_with_lipschitz_like) {
        verdict << "consistent with Lipschitz-like at (pbar, xbar): liminf holds, RCRCQ holds, "
                   "bounded multipliers, R-regular with alpha <= 2M";
    } else {
        verdict << "Lipschitz-likeness not confirmed";
        if (!report.warnings.empty()) verdict << ": " << report.warnings.front();
    }
    verdict << " (" << kSampledEvidenceCaveat << ")";
    report.verdict = verdict.str();
    return report;
}

std::string to_string(const BlowupPolicy& policy) {
    switch (policy.kind) {
        case BlowupPolicyKind::reduced: return "reduced";
        case BlowupPolicyKind::min_l1: return "min_l1";
        case BlowupPolicyKind::fixed_subfamily: {
            std::string s = "fixed:";
            for (std::size_t i = 0; i < policy.subfamily.size(); ++i) {
                if (i) s += ",";
                s += std::to_string(policy.subfamily[i] + 1);
            }
            return s;
        }
    }
    return "unknown";
}

double fit_growth_exponent(const std::vector<std::pair<double, double>>& k_and_value, double min_k) {
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    std::size_t count = 0;
    for (const auto& [k, v] : k_and_value) {
        if (k < min_k || !(v > 0.0)) continue;
        const double x = std::log(k);
        const double y = std::log(v);
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
        ++count;
    }
    if (count < 2) return std::numeric_limits<double>::quiet_NaN();
    const double c = static_cast<double>(count);
    return (c * sxy - sx * sy) / (c * sxx - sx * sx);
}

BlowupTable detect_multiplier_blowup(const MovingPolyhedron& mp, const std::vector<SequencePoint>& sequence,
                                     const BlowupPolicy& policy) {
    const ProjectionConfig pcfg = projection_config(mp);
    const ReductionConfig rcfg = reduction_config(mp);
    for (auto i : policy.subfamily) {
        if (i >= mp.size()) fail(ErrorKind::input, "blowup: subfamily index " + std::to_string(i + 1) + " out of range");
    }

    BlowupTable table;
    table.policy = policy;
    for (const auto& item : sequence) {
        const PolyhedronInstance inst = instantiate(mp, item.param);
        const ProjectionResult proj = project(inst, item.point, pcfg);
        if (proj.status == ProjectionStatus::infeasible_set) {
            fail(ErrorKind::infeasible, "blowup: C(p) empty at k=" + std::to_string(item.k));
        }
        if (!proj.converged()) fail(ErrorKind::solver_limit, "blowup: projection limit at k=" + std::to_string(item.k));
        if (!(proj.distance > 0.0)) {
            fail(ErrorKind::precondition, "blowup: w lies in C(p) at k=" + std::to_string(item.k));
        }

        BlowupRow row;
        row.k = item.k;
        row.param = item.param;
        row.point = item.point;
        row.distance = proj.distance;
        switch (policy.kind) {
            case BlowupPolicyKind::fixed_subfamily: {
                const VectorFamily family(gradients_of(inst, policy.subfamily));
                if (numerical_rank(family, rcfg.rank).rank != policy.subfamily.size()) {
                    fail(ErrorKind::precondition, "blowup: fixed subfamily is dependent at k=" + std::to_string(item.k));
                }
                const Vector unit = (item.point - proj.point) / proj.distance;
                const SpanSolution sol = solve_in_span(family, unit);
                if (sol.residual > rcfg.reconstruction) {
                    fail(ErrorKind::precondition,
                         "blowup: fixed subfamily does not span w - P at k=" + std::to_string(item.k));
                }
                row.multiplier = Vector::Zero(idx(inst.size()));
                for (std::size_t j = 0; j < policy.subfamily.size(); ++j) {
                    row.multiplier(idx(policy.subfamily[j])) = sol.coefficients(idx(j));
                }
                break;
            }
            case BlowupPolicyKind::reduced: {
                const MultiplierCertificate cert = reduced_multiplier(inst, item.point, proj, rcfg);
                row.multiplier = normalize_multiplier(cert.as_multipliers(inst.size()), proj.distance);
                break;
            }
            case BlowupPolicyKind::min_l1:
                row.multiplier = min_l1_multiplier(inst, item.point, proj, rcfg).multipliers;
                break;
        }
        row.stationarity_residual = unit_stationarity_residual(inst, item.point, proj.point, row.multiplier);
        row.l1 = row.multiplier.cwiseAbs().sum();
        row.l2 = row.multiplier.norm();
        if (!table.rows.empty() && table.rows.back().l1 > 0.0) row.growth_ratio = row.l1 / table.rows.back().l1;
        table.rows.push_back(std::move(row));
    }

    std::vector<std::pair<double, double>> l1, l2;
    for (const auto& r : table.rows) {
        l1.emplace_back(static_cast<double>(r.k), r.l1);
        l2.emplace_back(static_cast<double>(r.k), r.l2);
        if (r.k >= 3) ++table.fit_points;
    }
    table.l1_exponent = fit_growth_exponent(l1);
    table.l2_exponent = fit_growth_exponent(l2);
    return table;
}

}  // namespace movepoly
