#include "movepoly/linalg_rank.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <string>

namespace movepoly {

VectorFamily::VectorFamily(std::vector<Vector> vectors) : vectors_(std::move(vectors)) {
    labels_.resize(vectors_.size());
    for (std::size_t i = 0; i < labels_.size(); ++i) labels_[i] = i;
    for (const auto& v : vectors_) {
        if (v.size() < 1) fail(ErrorKind::dimension, "vector family: empty vector");
        require_dim(v.size(), vectors_.front().size(), "vector family");
    }
}

VectorFamily::VectorFamily(std::vector<Vector> vectors, std::vector<std::size_t> labels)
    : VectorFamily(std::move(vectors)) {
    if (labels.size() != vectors_.size()) {
        fail(ErrorKind::dimension, "vector family: label count differs from vector count");
    }
    std::set<std::size_t> seen(labels.begin(), labels.end());
    if (seen.size() != labels.size()) fail(ErrorKind::precondition, "vector family: duplicate labels");
    labels_ = std::move(labels);
}

VectorFamily VectorFamily::subset(std::span<const std::size_t> positions) const {
    std::vector<Vector> vs;
    std::vector<std::size_t> ls;
    vs.reserve(positions.size());
    ls.reserve(positions.size());
    for (auto pos : positions) {
        vs.push_back(vectors_.at(pos));
        ls.push_back(labels_.at(pos));
    }
    return VectorFamily(std::move(vs), std::move(ls));
}

Matrix VectorFamily::as_matrix() const {
    Matrix m(dim(), static_cast<Eigen::Index>(size()));
    for (std::size_t j = 0; j < size(); ++j) m.col(static_cast<Eigen::Index>(j)) = vectors_[j];
    return m;
}

double VectorFamily::max_norm() const {
    double out = 0.0;
    for (const auto& v : vectors_) out = std::max(out, v.norm());
    return out;
}

double gram_determinant(const VectorFamily& family) {
    if (family.empty()) fail(ErrorKind::precondition, "gram_determinant: empty family");
    const Matrix v = family.as_matrix();
    Matrix g = v.transpose() * v;
    const Eigen::Index k = g.rows();

    std::vector<Eigen::Index> perm(static_cast<std::size_t>(k));
    for (Eigen::Index i = 0; i < k; ++i) perm[static_cast<std::size_t>(i)] = i;

    double det = 1.0;
    for (Eigen::Index s = 0; s < k; ++s) {
        Eigen::Index best = s;
        for (Eigen::Index i = s + 1; i < k; ++i) {
            if (g(i, i) > g(best, best)) best = i;
        }
        if (best != s) {
            g.row(s).swap(g.row(best));
            g.col(s).swap(g.col(best));
        }
        const double pivot = g(s, s);
        if (!(pivot > 0.0)) return 0.0;
        det *= pivot;
        for (Eigen::Index i = s + 1; i < k; ++i) {
            const double l = g(i, s) / pivot;
            for (Eigen::Index j = s + 1; j < k; ++j) g(i, j) -= l * g(s, j);
        }
    }
    return det;
}

namespace {

// Residual of v after two rounds of classical Gram-Schmidt against basis.
Vector orthogonal_residual(const Vector& v, const std::vector<Vector>& basis) {
    Vector r = v;
    for (int pass = 0; pass < 2; ++pass) {
        for (const auto& q : basis) r -= q.dot(r) * q;
    }
    return r;
}

double relative_pivot(const Vector& residual, double norm) {
    return norm > 0.0 ? residual.norm() / norm : 0.0;
}

}  // namespace

RankCertificate numerical_rank(const VectorFamily& family, std::span<const std::size_t> must_keep,
                               double tol) {
    if (!(tol > 0.0)) fail(ErrorKind::precondition, "numerical_rank: tol must be positive");
    const std::size_t k = family.size();
    for (auto pos : must_keep) {
        if (pos >= k) fail(ErrorKind::precondition, "numerical_rank: must_keep position out of range");
    }

    RankCertificate cert;
    std::vector<Vector> basis;
    std::vector<bool> taken(k, false);
    std::vector<double> norms(k);
    for (std::size_t i = 0; i < k; ++i) norms[i] = family[i].norm();

    bool any_accepted = false;
    auto accept = [&](std::size_t pos, const Vector& residual, double ratio) {
        basis.push_back(residual.normalized());
        taken[pos] = true;
        cert.pivots.push_back(pos);
        cert.smallest_accepted = any_accepted ? std::min(cert.smallest_accepted, ratio) : ratio;
        any_accepted = true;
        if (ratio < 10.0 * tol) cert.borderline = true;
    };

    for (auto pos : must_keep) {
        if (taken[pos]) fail(ErrorKind::precondition, "numerical_rank: must_keep repeats a position");
        const Vector r = orthogonal_residual(family[pos], basis);
        const double ratio = relative_pivot(r, norms[pos]);
        if (!(ratio > tol)) {
            fail(ErrorKind::precondition,
                 "numerical_rank: must_keep vectors are dependent (position " + std::to_string(pos) + ")");
        }
        accept(pos, r, ratio);
    }

    while (basis.size() < k) {
        std::size_t best = k;
        double best_ratio = -1.0;
        Vector best_residual;
        for (std::size_t i = 0; i < k; ++i) {
            if (taken[i]) continue;
            Vector r = orthogonal_residual(family[i], basis);
            const double ratio = relative_pivot(r, norms[i]);
            if (ratio > best_ratio) {
                best = i;
                best_ratio = ratio;
                best_residual = std::move(r);
            }
        }
        if (best == k || !(best_ratio > tol)) break;
        accept(best, best_residual, best_ratio);
    }

    for (std::size_t i = 0; i < k; ++i) {
        if (taken[i]) continue;
        const double ratio = relative_pivot(orthogonal_residual(family[i], basis), norms[i]);
        cert.largest_rejected = std::max(cert.largest_rejected, ratio);
        if (ratio > 0.1 * tol) cert.borderline = true;
    }
    cert.rank = cert.pivots.size();
    return cert;
}

RankCertificate numerical_rank(const VectorFamily& family, double tol) {
    return numerical_rank(family, std::span<const std::size_t>{}, tol);
}

std::optional<DependencyWitness> dependency_witness(const VectorFamily& family,
                                                    std::span<const std::size_t> must_keep,
                                                    double tol) {
    const RankCertificate cert = numerical_rank(family, must_keep, tol);
    if (cert.rank == family.size()) return std::nullopt;

    std::vector<bool> is_pivot(family.size(), false);
    for (auto pos : cert.pivots) is_pivot[pos] = true;
    std::size_t rejected = 0;
    while (is_pivot[rejected]) ++rejected;

    DependencyWitness witness;
    witness.coefficients = Vector::Zero(static_cast<Eigen::Index>(family.size()));
    witness.coefficients(static_cast<Eigen::Index>(rejected)) = 1.0;
    if (!cert.pivots.empty()) {
        const SpanSolution sol = solve_in_span(family.subset(cert.pivots), family[rejected]);
        for (std::size_t l = 0; l < cert.pivots.size(); ++l) {
            witness.coefficients(static_cast<Eigen::Index>(cert.pivots[l])) =
                -sol.coefficients(static_cast<Eigen::Index>(l));
        }
    }
    witness.coefficients /= witness.coefficients.cwiseAbs().maxCoeff();
    for (std::size_t i = 0; i < family.size(); ++i) {
        if (witness.coefficients(static_cast<Eigen::Index>(i)) != 0.0) witness.support.push_back(i);
    }
    return witness;
}

std::optional<DependencyWitness> dependency_witness(const VectorFamily& family, double tol) {
    return dependency_witness(family, std::span<const std::size_t>{}, tol);
}

IndexSet max_independent_subfamily(const VectorFamily& family,
                                   std::span<const std::size_t> must_keep, double tol) {
    return numerical_rank(family, must_keep, tol).pivots;
}

SpanSolution solve_in_span(const VectorFamily& family, const Vector& target) {
    require_dim(target.size(), family.empty() ? target.size() : family.dim(), "solve_in_span");
    SpanSolution out;
    if (family.empty()) {
        out.coefficients = Vector(0);
        out.residual = target.norm();
        return out;
    }
    const Matrix a = family.as_matrix();
    out.coefficients = a.colPivHouseholderQr().solve(target);
    out.residual = (target - a * out.coefficients).norm();
    return out;
}

}  // namespace movepoly
