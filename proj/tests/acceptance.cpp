// Acceptance criteria 1-9. Prints one PASS/FAIL line per criterion.
// Usage: movepoly_acceptance [criterion...]; exit status is nonzero when a
// selected criterion fails.
#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>

#include "movepoly/multipliers.hpp"
#include "movepoly/regularity.hpp"
#include "movepoly/sampling.hpp"
#include "movepoly/scenarios.hpp"

using namespace movepoly;

namespace {

const double kSqrt5 = std::sqrt(5.0);

struct Outcome {
    bool pass = false;
    std::string detail;
};

double rel_err(double got, double want) {
    return std::abs(got - want) / std::max(std::abs(want), 1e-300);
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

Outcome criterion1() {
    const auto t0 = std::chrono::steady_clock::now();
    const auto s = paper_example();
    double worst_point = 0.0, worst_dist = 0.0;
    bool converged = true;
    for (const auto& item : s.sequence->take(20)) {
        const auto r = project(instantiate(s.problem, item.param), item.point);
        converged = converged && r.converged();
        worst_point = std::max(worst_point, r.point.norm());
        worst_dist = std::max(worst_dist, rel_err(r.distance, kSqrt5 / static_cast<double>(item.k)));
    }
    const double t = seconds_since(t0);
    std::ostringstream os;
    os << "max |point| " << worst_point << ", max rel dist err " << worst_dist << ", " << t << " s";
    return {converged && worst_point <= 1e-9 && worst_dist <= 1e-9 && t < 1.0, os.str()};
}

Outcome criterion2() {
    const auto s = paper_example();
    const auto t = detect_multiplier_blowup(s.problem, s.sequence->take(20), BlowupPolicy::fixed({1, 2}));
    double worst = 0.0;
    for (const auto& row : t.rows) {
        const double k = static_cast<double>(row.k);
        worst = std::max(worst, std::abs(row.multiplier(0)));
        worst = std::max(worst, rel_err(row.multiplier(1), 1 / kSqrt5));
        worst = std::max(worst, rel_err(row.multiplier(2), k * k / kSqrt5));
    }
    std::ostringstream os;
    os.precision(6);
    os << "max rel err " << worst << ", l1 exponent " << t.l1_exponent << " (target 2.00 +- 0.02), l2 exponent "
       << t.l2_exponent << ", " << t.fit_points << " fit points";
    return {worst <= 1e-9 && std::abs(t.l1_exponent - 2.0) <= 0.02, os.str()};
}

Outcome criterion3() {
    const auto s = paper_example();
    const auto t = detect_multiplier_blowup(s.problem, s.sequence->take(20), BlowupPolicy::reduced());
    double worst = 0.0;
    for (const auto& row : t.rows) worst = std::max(worst, std::abs(row.l1 - 3 / kSqrt5));
    std::ostringstream os;
    os << "max |l1 - 3/sqrt5| " << worst;
    return {t.rows.size() == 20 && worst <= 1e-9, os.str()};
}

Outcome criterion4() {
    const auto r = check_rcrcq(paper_example().problem, 0.5, {0, 500});
    bool ranks_ok = r.table.size() == 2;
    for (const auto& row : r.table) {
        ranks_ok = ranks_ok && row.base_rank == 2 && row.min_rank == 2 && row.max_rank == 2;
    }
    std::ostringstream os;
    os << "verdict " << to_string(r.overall) << ", " << r.table.size() << " admissible J, all ranks 2: "
       << (ranks_ok ? "yes" : "no");
    return {r.overall == RcrcqVerdict::holds && ranks_ok, os.str()};
}

// Shared corpus for criteria 5 and 6: 1000 random scenarios, d <= 4, n <= 6,
// three (p, w) draws each.
struct CorpusCase {
    PolyhedronInstance inst;
    Vector w;
};

template <typename F>
std::size_t for_each_corpus_case(F&& f) {
    std::size_t scenarios = 0;
    for (std::uint64_t seed = 0; seed < 1000; ++seed) {
        RandomScenarioOptions opt;
        opt.seed = seed;
        opt.ambient_dim = 1 + static_cast<Eigen::Index>(seed % 4);
        opt.param_dim = 1 + static_cast<Eigen::Index>((seed / 4) % 3);
        opt.equalities = (seed / 12) % 3 == 0 ? 1 : 0;
        opt.inequalities = 1 + (seed / 36) % 5;
        opt.fraction_tight = 0.25 * static_cast<double>(seed % 5);
        const auto mp = random_scenario(opt).problem;
        ++scenarios;
        BallSampler rng = BallSampler::stream(seed, "acceptance/corpus");
        for (int j = 0; j < 3; ++j) {
            const Vector p = rng.in_ball(mp.base_param(), mp.param_radius());
            const Vector w = rng.in_ball(mp.base_point(), 2.0);
            f(CorpusCase{instantiate(mp, p), w});
        }
    }
    return scenarios;
}

Outcome criterion5() {
    const auto t0 = std::chrono::steady_clock::now();
    std::size_t cases = 0, compared = 0, both_infeasible = 0, mismatched_status = 0, kkt_fail = 0;
    double worst_dist = 0.0, worst_point = 0.0, worst_kkt = 0.0;
    const std::size_t scenarios = for_each_corpus_case([&](const CorpusCase& c) {
        ++cases;
        const auto a = project(c.inst, c.w);
        const auto b = project_bruteforce(c.inst, c.w);
        if (a.converged() != b.converged()) {
            ++mismatched_status;
            return;
        }
        if (!a.converged()) {
            ++both_infeasible;
            return;
        }
        ++compared;
        worst_dist = std::max(worst_dist, std::abs(a.distance - b.distance));
        worst_point = std::max(worst_point, (a.point - b.point).norm());
        worst_kkt = std::max(worst_kkt, a.kkt_residual);
        if (a.kkt_residual > 1e-9) ++kkt_fail;
    });
    const double t = seconds_since(t0);
    std::ostringstream os;
    os << scenarios << " scenarios, " << compared << " compared, " << both_infeasible << " infeasible, "
       << mismatched_status << " status mismatches; max dist diff " << worst_dist << ", max point diff "
       << worst_point << ", max kkt " << worst_kkt << ", " << t << " s";
    const bool pass = scenarios >= 1000 && mismatched_status == 0 && worst_dist <= 1e-8 && worst_point <= 1e-7 &&
                      kkt_fail == 0 && t < 60.0;
    return {pass, os.str()};
}

Outcome criterion6() {
    std::size_t certificates = 0, dependent = 0, nonpositive = 0, recon_fail = 0, iter_fail = 0, trivial = 0;
    double worst_recon = 0.0;
    for_each_corpus_case([&](const CorpusCase& c) {
        const auto proj = project(c.inst, c.w);
        if (!proj.converged()) return;
        const auto cert = reduced_multiplier(c.inst, c.w, proj);
        if (cert.trivial) {
            ++trivial;
            return;
        }
        ++certificates;
        std::vector<Vector> grads;
        for (auto i : cert.I1_0) grads.push_back(c.inst.gradients[i]);
        for (auto i : cert.I2_0) grads.push_back(c.inst.gradients[i]);
        if (dependency_witness(VectorFamily(grads))) ++dependent;
        Vector recon = Vector::Zero(c.w.size());
        for (std::size_t j = 0; j < grads.size(); ++j) {
            recon += cert.coefficients(static_cast<Eigen::Index>(j)) * grads[j];
            if (j >= cert.I1_0.size() && !(cert.coefficients(static_cast<Eigen::Index>(j)) > 0.0)) ++nonpositive;
        }
        const Vector x = c.w - proj.point;
        const double err = (x - recon).norm() / std::max(1.0, x.norm());
        worst_recon = std::max(worst_recon, err);
        if (err > 1e-8) ++recon_fail;

        // Direct reduction over the whole active set with the solver's multipliers.
        IndexSet J1, J2;
        std::vector<Vector> family;
        Vector lambda(static_cast<Eigen::Index>(proj.active.size()));
        for (auto i : proj.active) {
            (c.inst.is_equality(i) ? J1 : J2).push_back(family.size());
            lambda(static_cast<Eigen::Index>(family.size())) = proj.multipliers(static_cast<Eigen::Index>(i));
            family.push_back(c.inst.gradients[i]);
        }
        if (J1.empty() || !dependency_witness(VectorFamily([&] {
                std::vector<Vector> eq;
                for (auto j : J1) eq.push_back(family[j]);
                return eq;
            }()))) {
            try {
                const auto red = reduce_positive_combination(x, VectorFamily(family), J1, J2, lambda);
                if (red.iterations > J2.size()) ++iter_fail;
            } catch (const Error&) {
                ++iter_fail;
            }
        }
        if (cert.reduction_iterations > J2.size()) ++iter_fail;
    });
    std::ostringstream os;
    os << certificates << " certificates (" << trivial << " trivial skipped): " << dependent << " dependent, "
       << nonpositive << " nonpositive I2 coefficients, " << recon_fail << " reconstruction failures (max "
       << worst_recon << "), " << iter_fail << " iteration-bound failures";
    return {certificates > 0 && dependent == 0 && nonpositive == 0 && recon_fail == 0 && iter_fail == 0, os.str()};
}

Outcome criterion7() {
    std::size_t qualifying = 0, skipped = 0, alpha_fail = 0, aubin_fail = 0, no_triples = 0, aubin_samples = 0;
    double worst_ratio = 0.0;
    for (std::uint64_t seed = 0; seed < 60; ++seed) {
        RandomScenarioOptions opt;
        opt.seed = 5000 + seed;
        opt.ambient_dim = 1 + static_cast<Eigen::Index>(seed % 3);
        opt.param_dim = 1 + static_cast<Eigen::Index>(seed % 2);
        opt.equalities = seed % 4 == 0 ? 1 : 0;
        opt.inequalities = 1 + seed % 3;
        opt.param_radius = 0.2;
        opt.point_radius = 0.5;
        const auto mp = random_scenario(opt).problem;
        EstimatorOptions est = default_options(mp);
        est.sampling.samples = 200;
        const auto rc = check_rcrcq(mp, est.param_radius, est.sampling);
        const auto li = check_inner_semicontinuity(mp, est.param_radius, est.point_radius, est.sampling);
        if (rc.overall != RcrcqVerdict::holds || !li.consistent) {
            ++skipped;
            continue;
        }
        ++qualifying;
        const auto plan = build_sample_plan(mp, est);
        const double M = estimate_multiplier_bound(mp, plan, est).M_hat;
        const double alpha = estimate_r_regularity(plan, M).alpha_hat;
        if (M > 0.0) worst_ratio = std::max(worst_ratio, alpha / (2 * M));
        if (alpha > 2 * M * (1 + 1e-6)) ++alpha_fail;
        if (plan.aubin.empty()) {
            ++no_triples;
            continue;
        }
        for (const auto& s : plan.aubin) {
            ++aubin_samples;
            if (s.distance > alpha * s.lipschitz_factor * s.param_gap + 1e-7) ++aubin_fail;
        }
    }
    std::ostringstream os;
    os << qualifying << " qualifying scenarios (" << skipped << " skipped), " << aubin_samples
       << " Aubin samples; alpha > 2M: " << alpha_fail << " (max alpha/2M " << worst_ratio << "), Aubin bound breaks: "
       << aubin_fail;
    return {qualifying >= 10 && aubin_samples > 0 && alpha_fail == 0 && aubin_fail == 0, os.str()};
}

Outcome criterion8() {
    const auto both = rcrcq_violation().problem;
    const auto rc = check_rcrcq(both, 0.5, {0, 500});
    const auto bounded = estimate_multiplier_bound(both, default_options(both));
    const auto eq = rcrcq_violation_equality().problem;
    const auto rc_eq = check_rcrcq(eq, 0.5, {0, 500});
    const auto growth = estimate_multiplier_bound(eq, default_options(eq));
    std::ostringstream os;
    os.precision(6);
    os << "inequality pair: " << to_string(rc.overall) << " with " << rc.witnesses.size() << " witness(es), growth x"
       << bounded.growth_factor << "; equality g1: " << to_string(rc_eq.overall) << ", M_hat growth level 0 -> 4 x"
       << growth.growth_factor;
    const bool pass = rc.overall == RcrcqVerdict::violated && !rc.witnesses.empty() &&
                      rc_eq.overall == RcrcqVerdict::violated && growth.growth.size() == 5 &&
                      growth.growth_factor >= 10.0;
    return {pass, os.str()};
}

std::string capture(const std::string& command, int& status) {
    std::string out;
    FILE* pipe = popen(command.c_str(), "r");
    if (!pipe) {
        status = -1;
        return out;
    }
    std::array<char, 4096> buf{};
    std::size_t n = 0;
    while ((n = fread(buf.data(), 1, buf.size(), pipe)) > 0) out.append(buf.data(), n);
    status = pclose(pipe);
    return out;
}

Outcome criterion9() {
    const std::string cmd = std::string("\"") + MOVEPOLY_CLI_PATH +
                            "\" estimate --scenario paper-example --seed 0 --format json";
    int s1 = 0, s2 = 0;
    const std::string a = capture(cmd, s1);
    const std::string b = capture(cmd, s2);
    std::ostringstream os;
    os << a.size() << " bytes, exit " << s1 << "/" << s2 << ", identical: " << (a == b ? "yes" : "no");
    return {s1 == 0 && s2 == 0 && !a.empty() && a == b, os.str()};
}

}  // namespace

int main(int argc, char** argv) {
    const std::array<std::pair<const char*, std::function<Outcome()>>, 9> criteria = {{
        {"example projections", criterion1},
        {"fixed-subfamily blow-up", criterion2},
        {"reduced multiplier bounded", criterion3},
        {"constant rank on the example", criterion4},
        {"projection oracle equivalence", criterion5},
        {"reduction properties", criterion6},
        {"error-bound chain", criterion7},
        {"rank-jump sensitivity", criterion8},
        {"deterministic reports", criterion9},
    }};
    std::vector<int> selected;
    for (int i = 1; i < argc; ++i) selected.push_back(std::stoi(argv[i]));
    if (selected.empty()) {
        for (int i = 1; i <= 9; ++i) selected.push_back(i);
    }
    int failures = 0;
    for (int id : selected) {
        if (id < 1 || id > 9) {
            std::cerr << "no criterion " << id << "\n";
            return 2;
        }
        Outcome o;
        try {
            o = criteria[static_cast<std::size_t>(id - 1)].second();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        std::cout << (o.pass ? "PASS" : "FAIL") << "  criterion " << id << " (" << criteria[static_cast<std::size_t>(id - 1)].first
                  << "): " << o.detail << std::endl;
        if (!o.pass) ++failures;
    }
    return failures == 0 ? 0 : 1;
}
