#pragma once

#include <optional>
#include <span>
#include <vector>

#include "movepoly/types.hpp"

namespace movepoly {

/// An ordered family of vectors of a common dimension, each tagged with the
/// constraint index it came from.
class VectorFamily {
public:
    VectorFamily() = default;
    /// Labels default to 0..k-1.
    explicit VectorFamily(std::vector<Vector> vectors);
    VectorFamily(std::vector<Vector> vectors, std::vector<std::size_t> labels);

    std::size_t size() const { return vectors_.size(); }
    bool empty() const { return vectors_.empty(); }
    /// Ambient dimension; 0 for an empty family.
    Eigen::Index dim() const { return vectors_.empty() ? 0 : vectors_.front().size(); }

    const Vector& operator[](std::size_t i) const { return vectors_[i]; }
    const std::vector<Vector>& vectors() const { return vectors_; }
    const std::vector<std::size_t>& labels() const { return labels_; }

    /// Subfamily at the given positions, labels carried along.
    VectorFamily subset(std::span<const std::size_t> positions) const;
    /// Columns are the family's vectors.
    Matrix as_matrix() const;
    double max_norm() const;

private:
    std::vector<Vector> vectors_;
    std::vector<std::size_t> labels_;
};

struct RankCertificate {
    std::size_t rank = 0;
    /// Family positions of the accepted pivots, in acceptance order.
    IndexSet pivots;
    /// Pivot magnitudes are relative: residual norm / own norm.
    double smallest_accepted = 0.0;
    double largest_rejected = 0.0;
    /// Some pivot decision fell within a factor 10 of the tolerance.
    bool borderline = false;
};

struct DependencyWitness {
    /// One coefficient per family position, normalized to unit max-norm.
    Vector coefficients;
    IndexSet support;
};

/// Determinant of the Gram matrix via symmetric-pivoted LDL^T; 0 once the
/// remaining diagonal is non-positive.
double gram_determinant(const VectorFamily& family);

/// Greedy pivoted Gram-Schmidt on relative residuals. A vector is accepted
/// while its residual exceeds tol times its own norm; ties go to the
/// smallest position.
RankCertificate numerical_rank(const VectorFamily& family, double tol = 1e-9);

/// As numerical_rank, but `must_keep` positions are accepted first in the
/// given order. Throws precondition if one of them is rejected.
RankCertificate numerical_rank(const VectorFamily& family, std::span<const std::size_t> must_keep,
                               double tol);

/// Returns nullopt when the family is independent. Otherwise the witness
/// expresses the first rejected vector through the pivots; that vector's
/// coefficient is positive.
std::optional<DependencyWitness> dependency_witness(const VectorFamily& family, double tol = 1e-9);
std::optional<DependencyWitness> dependency_witness(const VectorFamily& family,
                                                    std::span<const std::size_t> must_keep,
                                                    double tol);

/// Pivot set of numerical_rank with `must_keep` forced first.
IndexSet max_independent_subfamily(const VectorFamily& family,
                                   std::span<const std::size_t> must_keep, double tol = 1e-9);

struct SpanSolution {
    Vector coefficients;
    double residual = 0.0;  // ||target - sum c_i v_i||
};

/// Least-squares coefficients of `target` over the family. The family must
/// have full column rank.
SpanSolution solve_in_span(const VectorFamily& family, const Vector& target);

}  // namespace movepoly
