#include <algorithm>

#include "doctest.h"
#include "movepoly/multipliers.hpp"
#include "movepoly/scenarios.hpp"
#include "support.hpp"

using namespace movepoly;
using movepoly::test::vec;

namespace {

const double kSqrt5 = std::sqrt(5.0);

void check_certificate(const PolyhedronInstance& inst, const Vector& w, const ProjectionResult& proj,
                       const MultiplierCertificate& cert) {
    if (cert.trivial) return;
    std::vector<Vector> grads;
    for (auto i : cert.I1_0) grads.push_back(inst.gradients[i]);
    for (auto i : cert.I2_0) grads.push_back(inst.gradients[i]);
    CHECK_FALSE(dependency_witness(VectorFamily(grads)));
    Vector recon = Vector::Zero(w.size());
    for (std::size_t j = 0; j < grads.size(); ++j) recon += cert.coefficients(static_cast<Eigen::Index>(j)) * grads[j];
    const Vector x = w - proj.point;
    CHECK((x - recon).norm() <= 1e-8 * std::max(1.0, x.norm()));
    for (std::size_t j = cert.I1_0.size(); j < grads.size(); ++j) {
        CHECK(cert.coefficients(static_cast<Eigen::Index>(j)) > 0.0);
    }
    for (auto i : cert.I1_0) CHECK(inst.is_equality(i));
    for (auto i : cert.I2_0) CHECK_FALSE(inst.is_equality(i));
}

}  // namespace

TEST_SUITE("multipliers") {

TEST_CASE("reduce equalities") {
    auto inst = test::make_instance({vec({1, 0}), vec({2, 0})}, {1, 2}, 2);
    CHECK(reduce_equalities(inst) == IndexSet{0});
    inst = test::make_instance({vec({1, 0}), vec({0, 1})}, {0, 0}, 2);
    CHECK(reduce_equalities(inst) == IndexSet{0, 1});
    const auto mp = paper_example().problem;
    CHECK(reduce_equalities(mp, vec({0.3, -0.2})) == IndexSet{0, 1});
}

TEST_CASE("positive reduction: one ratio step") {
    VectorFamily f({vec({1, 0}), vec({0, 1}), vec({1, 1})});
    const auto r = reduce_positive_combination(vec({1, 2}), f, IndexSet{0, 1}, IndexSet{2}, vec({0, 1, 1}));
    CHECK(r.J2.empty());
    CHECK(r.coefficients(0) == doctest::Approx(1.0));
    CHECK(r.coefficients(1) == doctest::Approx(2.0));
    CHECK(r.iterations == 1);
}

TEST_CASE("positive reduction: parallel pair keeps the first") {
    VectorFamily f({vec({1, 0}), vec({2, 0})});
    const auto r = reduce_positive_combination(vec({3, 0}), f, IndexSet{}, IndexSet{0, 1}, vec({1, 1}));
    CHECK(r.J2 == IndexSet{0});
    CHECK(r.coefficients(0) == doctest::Approx(3.0));
    CHECK(r.coefficients(1) == 0.0);
}

TEST_CASE("positive reduction: independent family unchanged") {
    VectorFamily f({vec({1, 0}), vec({0, 1})});
    const auto r = reduce_positive_combination(vec({2, 3}), f, IndexSet{}, IndexSet{0, 1}, vec({2, 3}));
    CHECK(r.J2 == IndexSet{0, 1});
    CHECK(r.iterations == 0);
    CHECK(r.coefficients == vec({2, 3}));
}

TEST_CASE("certificate on the example from a redundant representation") {
    const auto mp = paper_example().problem;
    const auto inst = instantiate(mp, vec({1, 1}));
    const Vector w = vec({1, 2});
    ProjectionResult proj = project(inst, w);
    proj.multipliers = vec({0, 1, 1});  // also valid: (1,2) = e2 + (1,1)
    const auto cert = reduced_multiplier(inst, w, proj);
    CHECK_FALSE(cert.trivial);
    CHECK(cert.I1_0 == IndexSet{0, 1});
    CHECK(cert.I2_0.empty());
    CHECK(cert.coefficients(0) == doctest::Approx(1.0));
    CHECK(cert.coefficients(1) == doctest::Approx(2.0));
    check_certificate(inst, w, proj, cert);
}

TEST_CASE("trivial certificate for feasible w") {
    const auto mp = paper_example().problem;
    const auto inst = instantiate(mp, vec({1, 1}));
    const auto proj = project(inst, vec({0, 0}));
    const auto cert = reduced_multiplier(inst, vec({0, 0}), proj);
    CHECK(cert.trivial);
    CHECK(cert.I1_0.empty());
    CHECK(cert.I2_0.empty());
}

TEST_CASE("single active inequality") {
    const auto inst = test::make_instance({vec({0, 2})}, {0});
    const Vector w = vec({1, 3});
    const auto proj = project(inst, w);
    const auto cert = reduced_multiplier(inst, w, proj);
    CHECK(cert.I2_0 == IndexSet{0});
    CHECK(cert.coefficients(0) == doctest::Approx(1.5));
    const auto m = min_l1_multiplier(inst, w, proj);
    CHECK(m.multipliers(0) == doctest::Approx(0.5));
}

TEST_CASE("normalization") {
    const double k = 3.0;
    const Vector lam = normalize_multiplier(vec({1 / k, 2 / k, 0}), kSqrt5 / k);
    CHECK(lam(0) == doctest::Approx(1 / kSqrt5));
    CHECK(lam(1) == doctest::Approx(2 / kSqrt5));
    CHECK((denormalize_multiplier(lam, kSqrt5 / k) - vec({1 / k, 2 / k, 0})).norm() < 1e-15);
    CHECK_THROWS_AS(normalize_multiplier(vec({0, 0}), 1.0), Error);
    CHECK_THROWS_AS(normalize_multiplier(vec({1, 0}), 0.0), Error);
}

TEST_CASE("minimal l1 multiplier on the example") {
    const auto mp = paper_example().problem;
    for (int k : {1, 3}) {
        const double kk = k;
        const auto inst = instantiate(mp, vec({1 / (kk * kk), 1 / (kk * kk)}));
        const Vector w = vec({1 / kk, 2 / kk});
        const auto m = min_l1_multiplier(inst, w, project(inst, w));
        if (k == 1) {
            CHECK(m.l1 == doctest::Approx(2 / kSqrt5).epsilon(1e-12));
            CHECK(m.subfamily == IndexSet{1, 2});
        } else {
            CHECK(m.l1 == doctest::Approx(3 / kSqrt5).epsilon(1e-12));
            CHECK(m.subfamily == IndexSet{0, 1});
        }
    }
}

TEST_CASE("property: certificates, min-l1 ordering and the starred scaling") {
    BallSampler rng(77);
    int nontrivial = 0;
    for (int trial = 0; trial < 400; ++trial) {
        const Eigen::Index d = 1 + static_cast<Eigen::Index>(rng.uniform() * 4);
        const std::size_t n_eq = rng.uniform() < 0.3 ? 1 : 0;
        const std::size_t n_ineq = 1 + static_cast<std::size_t>(rng.uniform() * 5);
        const auto inst = test::random_instance(rng, d, n_eq, n_ineq);
        const Vector w = 2.0 * rng.unit_ball(d);
        const auto proj = project(inst, w);
        REQUIRE(proj.converged());
        const auto cert = reduced_multiplier(inst, w, proj);
        check_certificate(inst, w, proj, cert);
        if (cert.trivial) continue;
        ++nontrivial;
        const auto active_ineq = std::count_if(proj.active.begin(), proj.active.end(),
                                               [&](std::size_t i) { return !inst.is_equality(i); });
        CHECK(cert.reduction_iterations <= static_cast<std::size_t>(active_ineq));

        const Vector reduced = normalize_multiplier(cert.as_multipliers(inst.size()), proj.distance);
        const Vector solver = normalize_multiplier(proj.multipliers, proj.distance);
        const auto m = min_l1_multiplier(inst, w, proj);
        CHECK(m.l1 <= reduced.lpNorm<1>() + 1e-9);
        CHECK(m.l1 <= solver.lpNorm<1>() + 1e-9);
        CHECK(unit_stationarity_residual(inst, w, proj.point, m.multipliers) <= 1e-7);

        // Perturb so the residuals are nonzero, then compare the two systems.
        const Vector lam = m.multipliers + 0.01 * rng.unit_ball(static_cast<Eigen::Index>(inst.size()));
        CHECK(unit_stationarity_residual(inst, w, proj.point, lam) ==
              doctest::Approx(0.5 * starred_stationarity_residual(inst, w, proj.point, 2.0 * lam)).epsilon(1e-12));
    }
    CHECK(nontrivial > 100);
}

}
