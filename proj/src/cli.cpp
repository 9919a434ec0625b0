#include "movepoly/cli.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <sstream>

#include "CLI11.hpp"
#include "movepoly/problem_io.hpp"
#include "movepoly/report.hpp"
#include "movepoly/scenarios.hpp"

namespace movepoly {

namespace {

using report::json;

struct Loaded {
    MovingPolyhedron problem;
    std::optional<ScenarioSequence> sequence;
};

json config_json(const RunConfig& c) {
    auto opt = [](const auto& v) { return v ? json(*v) : json(nullptr); };
    json j = {{"command", c.command},
              {"input", opt(c.input)},
              {"scenario", opt(c.scenario)},
              {"seed", opt(c.seed)},
              {"samples", opt(c.samples)},
              {"param_radius", opt(c.param_radius)},
              {"point_radius", opt(c.point_radius)},
              {"rank_tol", opt(c.rank_tol)},
              {"active_tol", opt(c.active_tol)},
              {"feasibility_tol", opt(c.feasibility_tol)},
              {"kkt_tol", opt(c.kkt_tol)},
              {"format", c.format},
              {"out", opt(c.out)}};
    if (c.command == "project" || c.command == "multipliers") {
        j["p"] = opt(c.p);
        j["w"] = opt(c.w);
    }
    if (c.command == "blowup") {
        j["policy"] = c.policy;
        j["kmax"] = c.kmax;
    }
    return j;
}

Loaded load(const RunConfig& cfg) {
    if (cfg.input.has_value() == cfg.scenario.has_value()) {
        fail(ErrorKind::input, "exactly one of --input and --scenario is required");
    }
    std::optional<ScenarioSequence> sequence;
    MovingPolyhedronData data = [&] {
        if (cfg.input) return load_problem_file(*cfg.input).source_data();
        Scenario s = find_scenario(*cfg.scenario);
        sequence = s.sequence;
        return s.problem.source_data();
    }();
    if (cfg.seed) data.sampling.seed = *cfg.seed;
    if (cfg.samples) data.sampling.samples = *cfg.samples;
    if (cfg.param_radius) data.param_radius = *cfg.param_radius;
    if (cfg.point_radius) data.point_radius = *cfg.point_radius;
    if (cfg.rank_tol) data.tolerances.rank = *cfg.rank_tol;
    if (cfg.active_tol) data.tolerances.active = *cfg.active_tol;
    if (cfg.feasibility_tol) data.tolerances.feasibility = *cfg.feasibility_tol;
    if (cfg.kkt_tol) data.tolerances.kkt = *cfg.kkt_tol;
    return {MovingPolyhedron(std::move(data)), std::move(sequence)};
}

// "fixed:2,3" (1-based constraint indices), "reduced" or "min_l1".
BlowupPolicy parse_policy(const std::string& text, std::size_t n) {
    if (text == "reduced") return BlowupPolicy::reduced();
    if (text == "min_l1") return BlowupPolicy::min_l1();
    const std::string prefix = "fixed:";
    if (text.rfind(prefix, 0) != 0) {
        fail(ErrorKind::input, "policy: expected fixed:i,j,..., reduced or min_l1, got '" + text + "'");
    }
    IndexSet s;
    std::string_view rest(text);
    rest.remove_prefix(prefix.size());
    std::size_t pos = 0;
    while (true) {
        const auto comma = rest.find(',', pos);
        const auto token = rest.substr(pos, comma == std::string_view::npos ? rest.npos : comma - pos);
        std::size_t value = 0;
        const auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), value);
        if (token.empty() || ec != std::errc() || ptr != token.data() + token.size() || value < 1 || value > n) {
            fail(ErrorKind::input, "policy[" + std::to_string(s.size()) + "]: expected an index in 1.." +
                                       std::to_string(n));
        }
        s.push_back(value - 1);
        if (comma == std::string_view::npos) break;
        pos = comma + 1;
    }
    std::sort(s.begin(), s.end());
    if (std::adjacent_find(s.begin(), s.end()) != s.end()) fail(ErrorKind::input, "policy: repeated index");
    return BlowupPolicy::fixed(std::move(s));
}

struct Outcome {
    json result;
    json resolved;  // effective seed, samples, radii and tolerances
    std::string text;
    int code = 0;
};

int status_code(ProjectionStatus s) {
    switch (s) {
        case ProjectionStatus::converged: return 0;
        case ProjectionStatus::infeasible_set: return exit_code(ErrorKind::infeasible);
        case ProjectionStatus::iteration_limit: return exit_code(ErrorKind::solver_limit);
    }
    return 0;
}

Outcome run_projection(const RunConfig& cfg, const MovingPolyhedron& mp, bool with_min_l1) {
    if (!cfg.w) fail(ErrorKind::input, "--w is required");
    const Vector p = cfg.p ? parse_vector_literal(*cfg.p, "p") : mp.base_param();
    const Vector w = parse_vector_literal(*cfg.w, "w");
    require_dim(p.size(), mp.param_dim(), "p");
    require_dim(w.size(), mp.ambient_dim(), "w");

    const auto inst = instantiate(mp, p);
    const auto proj = project(inst, w, ProjectionConfig::from(mp.tolerances()));
    Outcome o;
    std::ostringstream text;
    o.result["projection"] = report::to_json(proj);
    report::write_text(text, proj);
    o.code = status_code(proj.status);
    if (proj.converged()) {
        const auto rcfg = ReductionConfig::from(mp.tolerances());
        const auto cert = reduced_multiplier(inst, w, proj, rcfg);
        o.result["certificate"] = report::to_json(cert);
        report::write_text(text, cert);
        if (proj.distance > 0.0) {
            const Vector normalized = normalize_multiplier(cert.as_multipliers(inst.size()), proj.distance);
            o.result["normalized_multiplier"] = report::to_json(normalized);
            o.result["normalized_l1"] = normalized.lpNorm<1>();
            text << "normalized multiplier l1: " << normalized.lpNorm<1>() << "\n";
            if (with_min_l1) {
                const auto m = min_l1_multiplier(inst, w, proj, rcfg);
                o.result["min_l1"] = report::to_json(m);
                report::write_text(text, m);
            }
        }
    }
    o.text = text.str();
    return o;
}

Outcome dispatch(const RunConfig& cfg) {
    if (cfg.command == "scenarios") {
        Outcome o;
        std::ostringstream text;
        if (cfg.scenario) {
            // Dump one scenario as a problem file.
            Scenario s = find_scenario(*cfg.scenario);
            o.result = json::parse(serialize_problem(s.problem));
            text << serialize_problem(s.problem) << "\n";
        } else {
            o.result = json::array();
            for (const auto& name : scenario_names()) {
                Scenario s = find_scenario(name);
                o.result.push_back({{"name", s.name},
                                    {"summary", s.summary},
                                    {"sequence", s.sequence ? json(s.sequence->description) : json(nullptr)}});
                text << s.name << "  " << s.summary << "\n";
            }
        }
        o.text = text.str();
        return o;
    }

    Loaded loaded = load(cfg);
    const MovingPolyhedron& mp = loaded.problem;
    const auto opt = default_options(mp);
    const auto& t = mp.tolerances();
    const json resolved = {{"seed", mp.sampling().seed},
                           {"samples", mp.sampling().samples},
                           {"param_radius", mp.param_radius()},
                           {"point_radius", mp.point_radius()},
                           {"rank_tol", t.rank},
                           {"active_tol", t.active},
                           {"feasibility_tol", t.feasibility},
                           {"kkt_tol", t.kkt},
                           {"positivity_floor", t.positivity_floor},
                           {"iteration_factor", t.iteration_factor},
                           {"enumeration_guard", t.enumeration_guard}};

    if (cfg.command == "project" || cfg.command == "multipliers") {
        Outcome o = run_projection(cfg, mp, cfg.command == "multipliers");
        o.resolved = resolved;
        return o;
    }

    Outcome o;
    o.resolved = resolved;
    std::ostringstream text;
    text.precision(6);
    if (cfg.command == "check-rcrcq") {
        const auto r = check_rcrcq(mp, opt.param_radius, opt.sampling);
        o.result = report::to_json(r);
        report::write_text(text, r);
    } else if (cfg.command == "check-liminf") {
        const auto r = check_inner_semicontinuity(mp, opt.param_radius, opt.point_radius, opt.sampling);
        o.result = report::to_json(r);
        report::write_text(text, r);
    } else if (cfg.command == "estimate") {
        const auto r = analyze_regularity(mp, opt);
        o.result = report::to_json(r);
        report::write_text(text, r);
    } else if (cfg.command == "blowup") {
        if (!loaded.sequence) fail(ErrorKind::input, "blowup: the problem has no built-in sequence; use --scenario");
        if (cfg.kmax < 1) fail(ErrorKind::input, "kmax must be >= 1");
        const auto policy = parse_policy(cfg.policy, mp.size());
        const auto table = detect_multiplier_blowup(mp, loaded.sequence->take(cfg.kmax), policy);
        o.result = report::to_json(table);
        o.result["sequence"] = loaded.sequence->description;
        text << "sequence: " << loaded.sequence->description << "\n";
        report::write_text(text, table);
    } else {
        fail(ErrorKind::input, "unknown command '" + cfg.command + "'");
    }
    o.text = text.str();
    return o;
}

void add_common(CLI::App* sub, RunConfig& cfg, bool problem_required) {
    auto* in = sub->add_option("--input", cfg.input, "Problem file (JSON)");
    auto* sc = sub->add_option("--scenario", cfg.scenario, "Built-in scenario name");
    in->excludes(sc);
    sc->excludes(in);
    if (!problem_required) return;
    sub->add_option("--seed", cfg.seed, "Sampling seed (default: problem's, else 0)");
    sub->add_option("--samples", cfg.samples, "Samples per estimator");
    sub->add_option("--param-radius", cfg.param_radius, "Parameter ball radius");
    sub->add_option("--point-radius", cfg.point_radius, "Point ball radius");
    sub->add_option("--rank-tol", cfg.rank_tol, "Numerical rank tolerance");
    sub->add_option("--active-tol", cfg.active_tol, "Active-set tolerance");
    sub->add_option("--feasibility-tol", cfg.feasibility_tol, "Feasibility tolerance");
    sub->add_option("--kkt-tol", cfg.kkt_tol, "KKT tolerance");
}

void emit(const RunConfig& cfg, const Outcome& o, std::ostream& out) {
    std::string body;
    if (cfg.format == "json") {
        json config = config_json(cfg);
        if (!o.resolved.is_null()) config["resolved"] = o.resolved;
        json doc = {{"schema", report::kSchema},
                    {"command", cfg.command},
                    {"config", config},
                    {"result", o.result}};
        body = doc.dump(2) + "\n";
    } else {
        body = o.text;
    }
    if (cfg.out) {
        std::ofstream file(*cfg.out, std::ios::binary);
        if (!file) fail(ErrorKind::input, "out: cannot open '" + *cfg.out + "'");
        file << body;
        if (!file) fail(ErrorKind::input, "out: write failed");
    } else {
        out << body;
    }
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    RunConfig cfg;
    CLI::App app{"Analysis of moving polyhedra"};
    app.name("movepoly");
    app.require_subcommand(1);

    const std::vector<std::pair<std::string, std::string>> commands = {
        {"project", "Project w onto C(p)"},
        {"multipliers", "Projection plus reduced and minimal-l1 multipliers"},
        {"check-rcrcq", "Sampled constant-rank check at the base point"},
        {"check-liminf", "Sampled inner semicontinuity check"},
        {"estimate", "Full estimator chain with verdict"},
        {"blowup", "Multiplier norms along a scenario sequence"},
        {"scenarios", "List built-in scenarios, or dump one with --scenario"},
    };
    for (const auto& [name, help] : commands) {
        auto* sub = app.add_subcommand(name, help);
        const bool is_list = name == "scenarios";
        add_common(sub, cfg, !is_list);
        sub->add_option("--format", cfg.format, "Output format")->check(CLI::IsMember({"text", "json"}));
        sub->add_option("--out", cfg.out, "Write the report to FILE");
        if (name == "project" || name == "multipliers") {
            sub->add_option("--p", cfg.p, "Parameter, comma-separated (default: base parameter)");
            sub->add_option("--w", cfg.w, "Point to project, comma-separated")->required();
        }
        if (name == "blowup") {
            sub->add_option("--policy", cfg.policy, "fixed:i,j,... (1-based), reduced or min_l1");
            sub->add_option("--kmax", cfg.kmax, "Last sequence index");
        }
        sub->callback([&cfg, name = name] { cfg.command = name; });
    }

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return 0;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return 0;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << "\n";
        return exit_code(ErrorKind::input);
    }

    try {
        const Outcome o = dispatch(cfg);
        emit(cfg, o, out);
        return o.code;
    } catch (const Error& e) {
        err << "error (" << to_string(e.kind()) << "): " << e.what() << "\n";
        return exit_code(e.kind());
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return exit_code(ErrorKind::input);
    }
}

}  // namespace movepoly
