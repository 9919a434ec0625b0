#pragma once

#include "movepoly/linalg_rank.hpp"
#include "movepoly/polyhedron.hpp"
#include "movepoly/projection.hpp"

namespace movepoly {

struct ReductionConfig {
    double rank = 1e-9;
    double positivity_floor = 1e-12;  // relative to max(1, ||lambda||_inf)
    double reconstruction = 1e-8;     // relative to max(1, ||x||)
    double active = 1e-8;
    double kkt = 1e-9;
    std::size_t enumeration_guard = 20;

    static ReductionConfig from(const Tolerances& t);
};

/// Reduced representation w - P = sum over I1_0 and I2_0 of coefficient_i g_i(p)
/// with independent gradients and strictly positive inequality coefficients.
struct MultiplierCertificate {
    /// w was already in C(p); every set is empty.
    bool trivial = false;
    IndexSet I1_0;  // constraint indices, ascending
    IndexSet I2_0;  // constraint indices, ascending
    /// Coefficients over I1_0 followed by I2_0 (unnormalized).
    Vector coefficients;
    RankCertificate independence;
    double reconstruction_error = 0.0;
    std::size_t reduction_iterations = 0;

    /// Full n-vector with zeros outside I1_0 and I2_0.
    Vector as_multipliers(std::size_t n) const;
};

/// Maximal independent subfamily of the equality gradients at one instance
/// (acceptance order, equalities tried in index order).
IndexSet reduce_equalities(const PolyhedronInstance& inst, double rank_tol = 1e-9);

/// As above, after checking C(p) is nonempty. Also checks that the dropped
/// equalities vanish on a feasible point of C(p).
IndexSet reduce_equalities(const MovingPolyhedron& mp, const Vector& p);

struct PositiveReduction {
    IndexSet J2;         // surviving J2 positions, ascending
    Vector coefficients; // one per family position, zero where dropped
    std::size_t iterations = 0;
};

/// Carathéodory-type reduction of x = sum_{J1 u J2} lambda_i a_i to an
/// independent subfamily J1 u J2' with lambda' > 0 on J2'. Each step takes a
/// dependency witness with J1 kept first, picks the smallest ratio
/// lambda_i / beta_i over positive J2 entries (smallest position on ties) and
/// removes it. Positions refer to `family`.
PositiveReduction reduce_positive_combination(const Vector& x, const VectorFamily& family,
                                              const IndexSet& J1, const IndexSet& J2,
                                              const Vector& lambda, const ReductionConfig& cfg = {});

/// Reduced certificate for w - P from a converged projection.
MultiplierCertificate reduced_multiplier(const PolyhedronInstance& inst, const Vector& w,
                                         const ProjectionResult& proj, const ReductionConfig& cfg = {});

/// lambda = lambda_hat / distance.
Vector normalize_multiplier(const Vector& lambda_hat, double distance);
/// lambda_hat = lambda * distance.
Vector denormalize_multiplier(const Vector& lambda, double distance);

struct MinL1Multiplier {
    Vector multipliers;  // normalized, length n
    IndexSet subfamily;  // constraint indices of the support set, ascending
    double l1 = 0.0;
    std::size_t candidates = 0;  // basic solutions that passed the checks
};

/// Minimal l1-norm normalized multiplier, by enumerating every independent
/// subfamily of the active set and keeping sign-feasible solutions.
/// Ties go to the lexicographically smallest subfamily.
MinL1Multiplier min_l1_multiplier(const PolyhedronInstance& inst, const Vector& w,
                                  const ProjectionResult& proj, const ReductionConfig& cfg = {});

/// || (w - P)/||w - P|| - sum lambda_i g_i ||.
double unit_stationarity_residual(const PolyhedronInstance& inst, const Vector& w, const Vector& point,
                                  const Vector& lambda);
/// || 2 (w - P)/||w - P|| - sum lambda_i g_i ||, the starred system.
double starred_stationarity_residual(const PolyhedronInstance& inst, const Vector& w, const Vector& point,
                                     const Vector& lambda);

}  // namespace movepoly
