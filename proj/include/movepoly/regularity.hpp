#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "movepoly/multipliers.hpp"
#include "movepoly/polyhedron.hpp"

namespace movepoly {

/// Every verdict below is sampled evidence within the given radii, never a proof.
inline constexpr const char* kSampledEvidenceCaveat =
    "sampled evidence within the given radii; a sampled verdict at finite tolerance does not "
    "decide the exact property";

// ---------------------------------------------------------------------------
// Constant-rank check

enum class RcrcqVerdict { holds, violated, borderline };
const char* to_string(RcrcqVerdict v);

struct RcrcqRow {
    IndexSet J;  // constraint indices, ascending
    std::size_t base_rank = 0;
    std::size_t min_rank = 0;
    std::size_t max_rank = 0;
    bool borderline = false;
    RcrcqVerdict verdict = RcrcqVerdict::holds;
};

struct RcrcqWitness {
    IndexSet J;
    Vector param;
    std::size_t rank = 0;
    std::size_t base_rank = 0;
};

struct RcrcqReport {
    IndexSet base_active;
    std::vector<RcrcqRow> table;
    RcrcqVerdict overall = RcrcqVerdict::holds;
    /// First violating parameter per violating J.
    std::vector<RcrcqWitness> witnesses;
    std::size_t samples = 0;
};

/// Ranks of {g_i(p), i in J} for every I1 <= J <= I_pbar(xbar), at pbar and
/// at sampled p in the parameter ball. Throws guard_exceeded when the
/// active inequalities exceed the enumeration guard.
RcrcqReport check_rcrcq(const MovingPolyhedron& mp, double param_radius, const SamplingConfig& sampling);

// ---------------------------------------------------------------------------
// Inner semicontinuity (Kuratowski liminf) check

struct LiminfReport {
    bool consistent = true;
    double max_distance = 0.0;
    std::optional<Vector> worst_param;
    std::size_t infeasible_count = 0;
    std::optional<Vector> first_infeasible_param;
    std::size_t samples = 0;
};

LiminfReport check_inner_semicontinuity(const MovingPolyhedron& mp, double param_radius,
                                        double point_radius, const SamplingConfig& sampling);

// ---------------------------------------------------------------------------
// Estimators

/// One (p, w) evaluation: projection, minimal-l1 multiplier and the
/// distance/residual ratio.
struct PairSample {
    std::size_t index = 0;
    bool from_aubin = false;  // (p2, x1) pair taken from an Aubin triple
    Vector param;
    Vector point;
    double distance = 0.0;
    double residual = 0.0;
    double min_l1 = 0.0;
    double ratio = 0.0;  // distance / residual
};

struct AubinSample {
    std::size_t index = 0;
    Vector p1, p2, x1;
    double param_gap = 0.0;          // ||p1 - p2||
    double distance = 0.0;           // dist(x1, C(p2))
    double residual = 0.0;           // residual(p2, x1)
    double lipschitz_factor = 0.0;   // max_i(||x1|| l_g_i + l_f_i)
};

struct SampleCounts {
    std::size_t drawn = 0;
    std::size_t used = 0;
    std::size_t skipped_feasible = 0;
    std::size_t solver_failures = 0;
    std::size_t aubin_pairs = 0;   // (p2, x1) pairs folded in
};

struct GrowthLevel {
    std::size_t level = 0;
    double param_radius = 0.0;
    double point_radius = 0.0;
    double M_hat = 0.0;
    std::size_t used = 0;
};

struct MultiplierBoundReport {
    double M_hat = 0.0;
    std::optional<PairSample> witness;
    SampleCounts counts;
    /// Ball pairs only, unit draws reused at radii / 2^level.
    std::vector<GrowthLevel> growth;
    /// M_hat(last level) / M_hat(level 0).
    double growth_factor = 0.0;
};

struct RRegularityReport {
    double alpha_hat = 0.0;
    bool two_M_bound_ok = false;
    std::optional<PairSample> witness;
    SampleCounts counts;
    /// max over samples of ratio / min_l1; <= 1 is the per-sample error bound.
    double max_ratio_over_l1 = 0.0;
};

struct AubinReport {
    double empirical = 0.0;
    double theoretical = 0.0;
    std::optional<AubinSample> witness;
    std::size_t drawn = 0;
    std::size_t retained = 0;
    std::size_t skipped_equal_params = 0;
    std::size_t solver_failures = 0;
    /// Samples breaking dist <= alpha_hat * residual(p2, x1) + 1e-7.
    std::size_t consistency_violations = 0;
    /// Samples breaking dist <= alpha_hat * factor * ||p1 - p2|| + 1e-7.
    std::size_t bound_violations = 0;
    double max_lipschitz_factor = 0.0;
};

struct EstimatorOptions {
    double param_radius = 0.5;
    double point_radius = 0.5;
    SamplingConfig sampling;
    std::size_t growth_levels = 5;
};

EstimatorOptions default_options(const MovingPolyhedron& mp);

/// Every draw an estimator consumes, generated once from the seed: ball
/// pairs (p, w) and Aubin triples (p1, p2, x1). The M and alpha estimators
/// run over the ball pairs plus the (p2, x1) pairs of the retained triples.
struct SamplePlan {
    std::vector<Vector> unit_params;  // ball pairs, before scaling
    std::vector<Vector> unit_points;
    std::vector<PairSample> pairs;    // evaluated, w outside C(p)
    std::vector<AubinSample> aubin;   // retained triples
    SampleCounts pair_counts;
    std::size_t aubin_drawn = 0;
    std::size_t aubin_equal_params = 0;
    std::size_t aubin_failures = 0;
};

SamplePlan build_sample_plan(const MovingPolyhedron& mp, const EstimatorOptions& opt);

MultiplierBoundReport estimate_multiplier_bound(const MovingPolyhedron& mp, const EstimatorOptions& opt);
MultiplierBoundReport estimate_multiplier_bound(const MovingPolyhedron& mp, const SamplePlan& plan,
                                                const EstimatorOptions& opt);

RRegularityReport estimate_r_regularity(const MovingPolyhedron& mp, const EstimatorOptions& opt,
                                        double M_hat);
RRegularityReport estimate_r_regularity(const SamplePlan& plan, double M_hat);

/// Throws precondition when no x1 falls inside the point ball.
AubinReport estimate_aubin_modulus(const MovingPolyhedron& mp, const EstimatorOptions& opt, double alpha_hat);
AubinReport estimate_aubin_modulus(const MovingPolyhedron& mp, const SamplePlan& plan, double alpha_hat);

// ---------------------------------------------------------------------------
// Full chain

struct RegularityReport {
    EstimatorOptions options;
    LiminfReport liminf;
    RcrcqReport rcrcq;
    MultiplierBoundReport bound;
    RRegularityReport r_regularity;
    std::optional<AubinReport> aubin;
    bool aubin_within_theory = false;
    bool consistent_with_lipschitz_like = false;
    std::string verdict;
    std::vector<std::string> warnings;
};

/// liminf -> RCRCQ -> M_hat -> alpha_hat (2 M_hat check) -> Aubin modulus.
RegularityReport analyze_regularity(const MovingPolyhedron& mp, const EstimatorOptions& opt);

// ---------------------------------------------------------------------------
// Multiplier blow-up along sequences

enum class BlowupPolicyKind { fixed_subfamily, reduced, min_l1 };

struct BlowupPolicy {
    BlowupPolicyKind kind = BlowupPolicyKind::reduced;
    IndexSet subfamily;  // constraint indices, for fixed_subfamily

    static BlowupPolicy fixed(IndexSet s) { return {BlowupPolicyKind::fixed_subfamily, std::move(s)}; }
    static BlowupPolicy reduced() { return {BlowupPolicyKind::reduced, {}}; }
    static BlowupPolicy min_l1() { return {BlowupPolicyKind::min_l1, {}}; }
};

std::string to_string(const BlowupPolicy& policy);

struct SequencePoint {
    std::size_t k = 0;
    Vector param;
    Vector point;
};

struct BlowupRow {
    std::size_t k = 0;
    Vector param;
    Vector point;
    double distance = 0.0;
    Vector multiplier;  // normalized, length n
    double l1 = 0.0;
    double l2 = 0.0;
    double stationarity_residual = 0.0;
    std::optional<double> growth_ratio;  // l1_k / l1_{previous k}
};

struct BlowupTable {
    BlowupPolicy policy;
    std::vector<BlowupRow> rows;
    /// Least-squares slope of log(norm) against log(k) over k >= 3.
    double l1_exponent = 0.0;
    double l2_exponent = 0.0;
    std::size_t fit_points = 0;
};

BlowupTable detect_multiplier_blowup(const MovingPolyhedron& mp, const std::vector<SequencePoint>& sequence,
                                     const BlowupPolicy& policy);

/// Slope of the least-squares line through (log k, log value), k >= min_k.
/// NaN with fewer than two usable points.
double fit_growth_exponent(const std::vector<std::pair<double, double>>& k_and_value, double min_k = 3.0);

}  // namespace movepoly
