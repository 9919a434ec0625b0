#include "movepoly/report.hpp"

#include <cmath>
#include <iomanip>
#include <sstream>

namespace movepoly::report {

namespace {

using report::to_json;

std::string fmt(double v) {
    std::ostringstream os;
    os << std::setprecision(6) << v;
    return os.str();
}

std::string fmt(const Vector& v) {
    std::ostringstream os;
    os << "(";
    for (Eigen::Index i = 0; i < v.size(); ++i) os << (i ? ", " : "") << fmt(v(i));
    os << ")";
    return os.str();
}

std::string fmt(const IndexSet& s) {
    std::ostringstream os;
    os << "{";
    for (std::size_t i = 0; i < s.size(); ++i) os << (i ? "," : "") << s[i] + 1;
    os << "}";
    return os.str();
}

json optional_vec(const std::optional<Vector>& v) { return v ? to_json(*v) : json(nullptr); }

json to_json(const PairSample& s) {
    return {{"index", s.index},      {"from_aubin", s.from_aubin}, {"p", to_json(s.param)},
            {"w", to_json(s.point)}, {"distance", s.distance},     {"residual", s.residual},
            {"min_l1", s.min_l1},    {"ratio", s.ratio}};
}

json to_json(const AubinSample& s) {
    return {{"index", s.index},       {"p1", to_json(s.p1)},         {"p2", to_json(s.p2)},
            {"x1", to_json(s.x1)},    {"param_gap", s.param_gap},    {"distance", s.distance},
            {"residual", s.residual}, {"lipschitz_factor", s.lipschitz_factor}};
}

json to_json(const SampleCounts& c) {
    return {{"drawn", c.drawn},
            {"used", c.used},
            {"skipped_feasible", c.skipped_feasible},
            {"solver_failures", c.solver_failures},
            {"aubin_pairs", c.aubin_pairs}};
}

}  // namespace

json to_json(const Vector& v) {
    json out = json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(v(i));
    return out;
}

json to_json_indices(const IndexSet& s) {
    json out = json::array();
    for (auto i : s) out.push_back(i + 1);
    return out;
}

json to_json(const ProjectionResult& r) {
    json trace = json::array();
    for (const auto& e : r.trace) {
        trace.push_back({{"action", e.action == SolverEvent::Action::add ? "add" : "drop"},
                         {"constraint", e.constraint + 1},
                         {"step", e.step}});
    }
    return {{"status", to_string(r.status)},
            {"point", to_json(r.point)},
            {"distance", r.distance},
            {"multipliers", to_json(r.multipliers)},
            {"active", to_json_indices(r.active)},
            {"kkt_residual", r.kkt_residual},
            {"iterations", r.iterations},
            {"brute_force_fallback", r.brute_force_fallback},
            {"trace", std::move(trace)}};
}

json to_json(const MultiplierCertificate& c) {
    return {{"trivial", c.trivial},
            {"I1_0", to_json_indices(c.I1_0)},
            {"I2_0", to_json_indices(c.I2_0)},
            {"coefficients", to_json(c.coefficients)},
            {"rank", c.independence.rank},
            {"smallest_accepted_pivot", c.independence.smallest_accepted},
            {"borderline", c.independence.borderline},
            {"reconstruction_error", c.reconstruction_error},
            {"reduction_iterations", c.reduction_iterations}};
}

json to_json(const MinL1Multiplier& m) {
    return {{"multipliers", to_json(m.multipliers)},
            {"subfamily", to_json_indices(m.subfamily)},
            {"l1", m.l1},
            {"candidates", m.candidates}};
}

json to_json(const RcrcqReport& r) {
    json table = json::array();
    for (const auto& row : r.table) {
        table.push_back({{"J", to_json_indices(row.J)},
                         {"base_rank", row.base_rank},
                         {"min_rank", row.min_rank},
                         {"max_rank", row.max_rank},
                         {"borderline", row.borderline},
                         {"verdict", to_string(row.verdict)}});
    }
    json witnesses = json::array();
    for (const auto& w : r.witnesses) {
        witnesses.push_back({{"J", to_json_indices(w.J)},
                             {"p", to_json(w.param)},
                             {"rank", w.rank},
                             {"base_rank", w.base_rank}});
    }
    return {{"base_active", to_json_indices(r.base_active)},
            {"table", std::move(table)},
            {"overall", to_string(r.overall)},
            {"witnesses", std::move(witnesses)},
            {"samples", r.samples},
            {"caveat", kSampledEvidenceCaveat}};
}

json to_json(const LiminfReport& r) {
    return {{"consistent", r.consistent},
            {"max_distance", r.max_distance},
            {"worst_p", optional_vec(r.worst_param)},
            {"infeasible_count", r.infeasible_count},
            {"first_infeasible_p", optional_vec(r.first_infeasible_param)},
            {"samples", r.samples},
            {"caveat", kSampledEvidenceCaveat}};
}

json to_json(const MultiplierBoundReport& r) {
    json growth = json::array();
    for (const auto& g : r.growth) {
        growth.push_back({{"level", g.level},
                          {"param_radius", g.param_radius},
                          {"point_radius", g.point_radius},
                          {"M_hat", g.M_hat},
                          {"used", g.used}});
    }
    return {{"M_hat", r.M_hat},
            {"witness", r.witness ? to_json(*r.witness) : json(nullptr)},
            {"counts", to_json(r.counts)},
            {"growth", std::move(growth)},
            {"growth_factor", r.growth_factor}};
}

json to_json(const RRegularityReport& r) {
    return {{"alpha_hat", r.alpha_hat},
            {"two_M_bound_ok", r.two_M_bound_ok},
            {"witness", r.witness ? to_json(*r.witness) : json(nullptr)},
            {"max_ratio_over_l1", r.max_ratio_over_l1},
            {"counts", to_json(r.counts)}};
}

json to_json(const AubinReport& r) {
    return {{"empirical", r.empirical},
            {"theoretical", r.theoretical},
            {"witness", r.witness ? to_json(*r.witness) : json(nullptr)},
            {"drawn", r.drawn},
            {"retained", r.retained},
            {"skipped_equal_params", r.skipped_equal_params},
            {"solver_failures", r.solver_failures},
            {"consistency_violations", r.consistency_violations},
            {"bound_violations", r.bound_violations},
            {"max_lipschitz_factor", r.max_lipschitz_factor}};
}

json to_json(const RegularityReport& r) {
    return {{"liminf", to_json(r.liminf)},
            {"rcrcq", to_json(r.rcrcq)},
            {"multiplier_bound", to_json(r.bound)},
            {"r_regularity", to_json(r.r_regularity)},
            {"aubin", r.aubin ? to_json(*r.aubin) : json(nullptr)},
            {"aubin_within_theory", r.aubin_within_theory},
            {"consistent_with_lipschitz_like", r.consistent_with_lipschitz_like},
            {"verdict", r.verdict},
            {"warnings", r.warnings}};
}

json to_json(const BlowupTable& t) {
    json rows = json::array();
    for (const auto& r : t.rows) {
        rows.push_back({{"k", r.k},
                        {"p", to_json(r.param)},
                        {"w", to_json(r.point)},
                        {"distance", r.distance},
                        {"multiplier", to_json(r.multiplier)},
                        {"l1", r.l1},
                        {"l2", r.l2},
                        {"stationarity_residual", r.stationarity_residual},
                        {"growth_ratio", r.growth_ratio ? json(*r.growth_ratio) : json(nullptr)}});
    }
    auto finite_or_null = [](double v) { return std::isfinite(v) ? json(v) : json(nullptr); };
    return {{"policy", to_string(t.policy)},
            {"rows", std::move(rows)},
            {"l1_exponent", finite_or_null(t.l1_exponent)},
            {"l2_exponent", finite_or_null(t.l2_exponent)},
            {"fit_points", t.fit_points}};
}

void write_text(std::ostream& os, const ProjectionResult& r) {
    os << "status:        " << to_string(r.status) << (r.brute_force_fallback ? " (enumeration fallback)" : "")
       << "\n"
       << "point:         " << fmt(r.point) << "\n"
       << "distance:      " << fmt(r.distance) << "\n"
       << "active set:    " << fmt(r.active) << "\n"
       << "multipliers:   " << fmt(r.multipliers) << "  (w - P = sum lambda_i g_i)\n"
       << "kkt residual:  " << fmt(r.kkt_residual) << "\n"
       << "iterations:    " << r.iterations << "\n";
}

void write_text(std::ostream& os, const MultiplierCertificate& c) {
    if (c.trivial) {
        os << "reduced certificate: trivial (w in C(p))\n";
        return;
    }
    os << "reduced certificate: I1_0 = " << fmt(c.I1_0) << ", I2_0 = " << fmt(c.I2_0)
       << ", coefficients = " << fmt(c.coefficients) << "\n"
       << "  rank " << c.independence.rank << (c.independence.borderline ? " (borderline)" : "")
       << ", reconstruction error " << fmt(c.reconstruction_error) << ", " << c.reduction_iterations
       << " reduction steps\n";
}

void write_text(std::ostream& os, const MinL1Multiplier& m) {
    os << "min-l1 multiplier:   " << fmt(m.multipliers) << " on " << fmt(m.subfamily) << ", l1 = " << fmt(m.l1)
       << " (" << m.candidates << " basic candidates)\n";
}

void write_text(std::ostream& os, const RcrcqReport& r) {
    os << "RCRCQ at (pbar, xbar): " << to_string(r.overall) << "  [" << r.samples << " sampled parameters]\n"
       << "  base active set " << fmt(r.base_active) << "\n";
    for (const auto& row : r.table) {
        os << "  J = " << std::left << std::setw(12) << fmt(row.J) << std::right << " base rank " << row.base_rank
           << ", sampled [" << row.min_rank << ", " << row.max_rank << "]  " << to_string(row.verdict)
           << (row.borderline ? " (borderline pivots)" : "") << "\n";
    }
    for (const auto& w : r.witnesses) {
        os << "  witness: J = " << fmt(w.J) << " has rank " << w.rank << " at p = " << fmt(w.param)
           << " (base rank " << w.base_rank << ")\n";
    }
    os << "  note: " << kSampledEvidenceCaveat << "\n";
}

void write_text(std::ostream& os, const LiminfReport& r) {
    os << "liminf (inner semicontinuity): " << (r.consistent ? "consistent" : "violated") << "  [" << r.samples
       << " sampled parameters]\n"
       << "  max dist(xbar, C(p)) = " << fmt(r.max_distance);
    if (r.worst_param) os << " at p = " << fmt(*r.worst_param);
    os << "\n";
    if (r.infeasible_count > 0) {
        os << "  " << r.infeasible_count << " sampled parameters with empty C(p)";
        if (r.first_infeasible_param) os << ", first at p = " << fmt(*r.first_infeasible_param);
        os << "\n";
    }
}

void write_text(std::ostream& os, const RegularityReport& r) {
    write_text(os, r.liminf);
    write_text(os, r.rcrcq);
    const auto& b = r.bound;
    os << "multiplier bound:  M_hat = " << fmt(b.M_hat) << "  [" << b.counts.used << " pairs, "
       << b.counts.skipped_feasible << " feasible skipped, " << b.counts.solver_failures << " failures]\n";
    if (b.witness) os << "  attained at p = " << fmt(b.witness->param) << ", w = " << fmt(b.witness->point) << "\n";
    os << "  shrinking radii:";
    for (const auto& g : b.growth) os << "  L" << g.level << "=" << fmt(g.M_hat);
    os << "  (growth x" << fmt(b.growth_factor) << ")\n";
    const auto& a = r.r_regularity;
    os << "R-regularity:      alpha_hat = " << fmt(a.alpha_hat) << ", 2 M_hat = " << fmt(2 * b.M_hat) << "  "
       << (a.two_M_bound_ok ? "ok" : "VIOLATED") << "\n";
    if (r.aubin) {
        os << "Aubin modulus:     empirical = " << fmt(r.aubin->empirical) << ", theoretical = "
           << fmt(r.aubin->theoretical) << "  " << (r.aubin_within_theory ? "ok" : "exceeded") << "  ["
           << r.aubin->retained << " retained triples]\n";
    }
    for (const auto& w : r.warnings) os << "warning: " << w << "\n";
    os << "verdict: " << r.verdict << "\n";
}

void write_text(std::ostream& os, const BlowupTable& t) {
    os << "policy " << to_string(t.policy) << "\n";
    os << std::setw(4) << "k" << std::setw(14) << "distance" << std::setw(14) << "l1" << std::setw(14) << "l2"
       << std::setw(12) << "ratio" << "  multiplier\n";
    for (const auto& r : t.rows) {
        os << std::setw(4) << r.k << std::setw(14) << fmt(r.distance) << std::setw(14) << fmt(r.l1) << std::setw(14)
           << fmt(r.l2) << std::setw(12) << (r.growth_ratio ? fmt(*r.growth_ratio) : std::string("-")) << "  "
           << fmt(r.multiplier) << "\n";
    }
    os << "fitted exponent (k >= 3, " << t.fit_points << " points): l1 " << fmt(t.l1_exponent) << ", l2 "
       << fmt(t.l2_exponent) << "\n";
}

}  // namespace movepoly::report
