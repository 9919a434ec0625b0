#include "doctest.h"
#include "movepoly/problem_io.hpp"
#include "movepoly/scenarios.hpp"
#include "support.hpp"

using namespace movepoly;
using movepoly::test::vec;

namespace {

MovingPolyhedron halfspace_x1() {
    MovingPolyhedronData data;
    data.ambient_dim = 2;
    data.param_dim = 1;
    AffineConstraint c;
    c.A = Matrix::Zero(2, 1);
    c.b = vec({1, 0});
    c.c = Vector::Zero(1);
    data.constraints = {c};
    data.base_param = Vector::Zero(1);
    data.base_point = vec({-1, 0});
    return MovingPolyhedron(std::move(data));
}

}  // namespace

TEST_SUITE("polyhedron") {

TEST_CASE("instantiate the example") {
    const auto mp = paper_example().problem;
    const auto base = instantiate(mp, mp.base_param());
    CHECK(base.gradients[0] == vec({1, 0}));
    CHECK(base.gradients[2] == vec({0, 0}));
    const auto k2 = instantiate(mp, vec({0.25, 0.25}));
    CHECK(k2.gradients[2] == vec({0.25, 0.25}));
    // A = 0 constraints do not move.
    CHECK(k2.gradients[0] == base.gradients[0]);
    CHECK(k2.gradients[1] == base.gradients[1]);
}

TEST_CASE("residual") {
    const auto mp = paper_example().problem;
    const auto inst = instantiate(mp, vec({1, 1}));
    CHECK(residual(inst, vec({1, 2})) == 3.0);
    CHECK(residual(inst, vec({0, 0})) == 0.0);
    CHECK(membership(inst, vec({0, 0}), 1e-12));
    CHECK_FALSE(membership(inst, vec({1, 2}), 1e-9));

    const auto h = halfspace_x1();
    CHECK(residual(instantiate(h, Vector::Zero(1)), vec({-1, 5})) == 0.0);
}

TEST_CASE("active set") {
    const auto mp = paper_example().problem;
    CHECK(active_set(instantiate(mp, mp.base_param()), mp.base_point()) == IndexSet{0, 1, 2});

    // Box -1 <= x <= 1 in R^1.
    const auto box = test::make_instance({vec({1}), vec({-1})}, {1, 1});
    CHECK(active_set(box, vec({0})).empty());
    CHECK(active_set(box, vec({1})) == IndexSet{0});

    // One equality plus one tight face.
    const auto inst = test::make_instance({vec({1, 0}), vec({0, 1}), vec({0, -1})}, {0, 1, 3}, 1);
    CHECK(active_set(inst, vec({0, 1})) == IndexSet{0, 1});

    CHECK_THROWS_AS(active_set(inst, vec({0, 2})), Error);
}

TEST_CASE("validation") {
    auto data = paper_example().problem.source_data();
    data.base_point = vec({0.1, 0});
    CHECK_THROWS_AS(MovingPolyhedron{data}, Error);

    data = paper_example().problem.source_data();
    data.constraints[1].b = vec({1, 2, 3});
    try {
        MovingPolyhedron mp(data);
        FAIL("expected dimension error");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::dimension);
        CHECK(std::string(e.what()).find("constraints[1].b") != std::string::npos);
    }
}

TEST_CASE("equalities are moved first and the input order is kept") {
    auto data = paper_example().problem.source_data();
    std::swap(data.constraints[0], data.constraints[2]);  // ineq, eq, eq
    MovingPolyhedron mp(data);
    CHECK(mp.equality_count() == 2);
    CHECK(mp.source_order() == std::vector<std::size_t>{1, 2, 0});
    CHECK(mp.constraint(2).kind == ConstraintKind::inequality);
    CHECK(mp.source_data().constraints == data.constraints);
}

TEST_CASE("lipschitz constants") {
    const auto mp = paper_example().problem;
    const auto l = lipschitz_constants(mp);
    REQUIRE(l.size() == 3);
    CHECK(l[0].gradient == 0.0);
    CHECK(l[2].gradient == doctest::Approx(1.0));
    CHECK(l[2].rhs == 0.0);
}

TEST_CASE("property: residual, active set and instantiate") {
    for (std::uint64_t seed = 0; seed < 60; ++seed) {
        RandomScenarioOptions opt;
        opt.seed = seed;
        opt.ambient_dim = 1 + static_cast<Eigen::Index>(seed % 4);
        opt.param_dim = 1 + static_cast<Eigen::Index>(seed % 3);
        opt.equalities = seed % 2;
        opt.inequalities = 2 + seed % 4;
        const auto mp = random_scenario(opt).problem;
        const auto lip = lipschitz_constants(mp);
        BallSampler rng(seed + 1000);
        for (int i = 0; i < 30; ++i) {
            const Vector p1 = rng.in_ball(mp.base_param(), 1.0);
            const Vector p2 = rng.in_ball(mp.base_param(), 1.0);
            const Vector x = rng.in_ball(mp.base_point(), 2.0);
            const auto i1 = instantiate(mp, p1);
            const auto i2 = instantiate(mp, p2);
            const double r1 = residual(i1, x);
            CHECK(r1 >= 0.0);
            CHECK(std::abs(r1 - residual(i2, x)) <=
                  residual_lipschitz_bound(lip, x) * (p1 - p2).norm() + 1e-12);

            const auto mid = instantiate(mp, 0.5 * (p1 + p2));
            for (std::size_t c = 0; c < mp.size(); ++c) {
                CHECK((mid.gradients[c] - 0.5 * (i1.gradients[c] + i2.gradients[c])).norm() <= 1e-14);
                CHECK(std::abs(mid.rhs[c] - 0.5 * (i1.rhs[c] + i2.rhs[c])) <= 1e-14);
            }
        }
        const auto base = instantiate(mp, mp.base_param());
        IndexSet prev;
        for (double eps : {1e-12, 1e-9, 1e-8, 1e-4, 1e-1}) {
            const auto a = active_set(base, mp.base_point(), eps);
            CHECK(std::includes(a.begin(), a.end(), prev.begin(), prev.end()));
            prev = a;
        }
    }
}

}

TEST_SUITE("problem_io") {

TEST_CASE("shipped file is the example") {
    const auto mp = load_problem_file(MOVEPOLY_DATA_DIR "/paper_example.json");
    CHECK(mp == paper_example().problem);
}

TEST_CASE("round trip is exact") {
    for (std::uint64_t seed = 0; seed < 40; ++seed) {
        RandomScenarioOptions opt;
        opt.seed = seed;
        opt.equalities = seed % 3;
        opt.inequalities = 1 + seed % 4;
        auto data = random_scenario(opt).problem.source_data();
        // Put an inequality ahead of the equalities to exercise the remap.
        if (data.constraints.size() > 1) std::rotate(data.constraints.begin(), data.constraints.end() - 1, data.constraints.end());
        try {
            const MovingPolyhedron mp(data);
            const auto back = parse_problem(serialize_problem(mp));
            CHECK(back == mp);
            CHECK(back.source_order() == mp.source_order());
        } catch (const Error&) {
            // Rotation cannot break feasibility; any throw is a bug.
            FAIL("valid problem rejected");
        }
    }
}

TEST_CASE("equality after inequality is reordered") {
    const char* text = R"({
      "ambient_dim": 1, "param_dim": 1,
      "constraints": [
        {"kind": "ineq", "A": [[0]], "b": [1], "c": [0], "d0": 1},
        {"kind": "eq",   "A": [[1]], "b": [0], "c": [0], "d0": 0}
      ],
      "base_point": {"p": [0], "x": [0]}
    })";
    const auto mp = parse_problem(text);
    CHECK(mp.equality_count() == 1);
    CHECK(mp.source_order() == std::vector<std::size_t>{1, 0});
    CHECK(mp.constraint(0).kind == ConstraintKind::equality);
}

TEST_CASE("schema errors carry the field path") {
    auto message = [](const char* text) {
        try {
            parse_problem(text);
        } catch (const Error& e) {
            return std::string(e.what());
        }
        return std::string("no error");
    };
    CHECK(message(R"({"ambient_dim": 1})").find("param_dim") != std::string::npos);
    const std::string bad_entry = message(R"({
      "ambient_dim": 1, "param_dim": 1,
      "constraints": [{"kind": "ineq", "A": [["x"]], "b": [1], "c": [0], "d0": 1}],
      "base_point": {"p": [0], "x": [0]}})");
    CHECK(bad_entry.find("constraints[0].A[0]") != std::string::npos);
    const std::string unknown = message(R"({
      "ambient_dim": 1, "param_dim": 1, "colour": 3,
      "constraints": [{"kind": "ineq", "A": [[0]], "b": [1], "c": [0], "d0": 1}],
      "base_point": {"p": [0], "x": [0]}})");
    CHECK(unknown.find("colour") != std::string::npos);
    CHECK(message("{").find("no error") == std::string::npos);
}

TEST_CASE("vector literals") {
    CHECK(parse_vector_literal("1,2.5,-3e-2", "w") == vec({1, 2.5, -0.03}));
    CHECK_THROWS_WITH_AS(parse_vector_literal("1,,2", "w"), doctest::Contains("w[1]"), Error);
    CHECK_THROWS_AS(parse_vector_literal("", "p"), Error);
}

}
