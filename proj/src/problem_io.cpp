#include "movepoly/problem_io.hpp"

#include <charconv>
#include <fstream>
#include <initializer_list>
#include <set>
#include <sstream>

#include "json.hpp"

namespace movepoly {

using nlohmann::json;

namespace {

[[noreturn]] void schema_error(const std::string& path, const std::string& what) {
    fail(ErrorKind::input, path + ": " + what);
}

void reject_unknown(const json& obj, const std::string& path,
                    std::initializer_list<const char*> allowed) {
    const std::set<std::string> ok(allowed.begin(), allowed.end());
    for (const auto& [key, _] : obj.items()) {
        if (!ok.contains(key)) schema_error(path.empty() ? key : path + "." + key, "unknown field");
    }
}

const json& field(const json& obj, const std::string& path, const char* name) {
    if (!obj.contains(name)) schema_error(path.empty() ? name : path + "." + name, "missing field");
    return obj.at(name);
}

const json& object_at(const json& obj, const std::string& path) {
    if (!obj.is_object()) schema_error(path, "expected an object");
    return obj;
}

double number_at(const json& v, const std::string& path) {
    if (!v.is_number()) schema_error(path, "expected a number");
    return v.get<double>();
}

std::uint64_t unsigned_at(const json& v, const std::string& path) {
    if (!v.is_number_unsigned() && !(v.is_number_integer() && v.get<std::int64_t>() >= 0)) {
        schema_error(path, "expected a non-negative integer");
    }
    return v.get<std::uint64_t>();
}

Vector vector_at(const json& v, const std::string& path, Eigen::Index expected) {
    if (!v.is_array()) schema_error(path, "expected an array");
    if (static_cast<Eigen::Index>(v.size()) != expected) {
        schema_error(path, "expected " + std::to_string(expected) + " entries, got " +
                               std::to_string(v.size()));
    }
    Vector out(expected);
    for (Eigen::Index i = 0; i < expected; ++i) {
        out(i) = number_at(v[static_cast<std::size_t>(i)], path + "[" + std::to_string(i) + "]");
    }
    return out;
}

Matrix matrix_at(const json& v, const std::string& path, Eigen::Index rows, Eigen::Index cols) {
    if (!v.is_array()) schema_error(path, "expected an array of rows");
    if (static_cast<Eigen::Index>(v.size()) != rows) {
        schema_error(path, "expected " + std::to_string(rows) + " rows, got " + std::to_string(v.size()));
    }
    Matrix out(rows, cols);
    for (Eigen::Index r = 0; r < rows; ++r) {
        out.row(r) = vector_at(v[static_cast<std::size_t>(r)], path + "[" + std::to_string(r) + "]", cols)
                         .transpose();
    }
    return out;
}

json to_json(const Vector& v) {
    json out = json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(v(i));
    return out;
}

json to_json(const Matrix& m) {
    json out = json::array();
    for (Eigen::Index r = 0; r < m.rows(); ++r) out.push_back(to_json(Vector(m.row(r).transpose())));
    return out;
}

Tolerances parse_tolerances(const json& obj) {
    const std::string path = "tolerances";
    object_at(obj, path);
    reject_unknown(obj, path,
                   {"rank", "active", "feasibility", "kkt", "positivity_floor", "iteration_factor",
                    "enumeration_guard"});
    Tolerances t;
    auto positive = [&](const char* name, double& slot) {
        if (!obj.contains(name)) return;
        slot = number_at(obj.at(name), path + "." + name);
        if (!(slot > 0.0)) schema_error(path + "." + name, "must be positive");
    };
    positive("rank", t.rank);
    positive("active", t.active);
    positive("feasibility", t.feasibility);
    positive("kkt", t.kkt);
    positive("positivity_floor", t.positivity_floor);
    if (obj.contains("iteration_factor")) {
        t.iteration_factor = unsigned_at(obj.at("iteration_factor"), path + ".iteration_factor");
    }
    if (obj.contains("enumeration_guard")) {
        t.enumeration_guard = unsigned_at(obj.at("enumeration_guard"), path + ".enumeration_guard");
    }
    return t;
}

SamplingConfig parse_sampling(const json& obj) {
    const std::string path = "sampling";
    object_at(obj, path);
    reject_unknown(obj, path, {"seed", "samples"});
    SamplingConfig s;
    if (obj.contains("seed")) s.seed = unsigned_at(obj.at("seed"), path + ".seed");
    if (obj.contains("samples")) s.samples = unsigned_at(obj.at("samples"), path + ".samples");
    return s;
}

}  // namespace

MovingPolyhedron parse_problem(std::string_view text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        fail(ErrorKind::input, std::string("problem file: ") + e.what());
    }
    object_at(doc, "<root>");
    reject_unknown(doc, "",
                   {"ambient_dim", "param_dim", "constraints", "base_point", "radii", "tolerances",
                    "sampling"});

    MovingPolyhedronData data;
    data.ambient_dim = static_cast<Eigen::Index>(unsigned_at(field(doc, "", "ambient_dim"), "ambient_dim"));
    data.param_dim = static_cast<Eigen::Index>(unsigned_at(field(doc, "", "param_dim"), "param_dim"));
    if (data.ambient_dim < 1) schema_error("ambient_dim", "must be >= 1");
    if (data.param_dim < 1) schema_error("param_dim", "must be >= 1");
    const auto d = data.ambient_dim;
    const auto m = data.param_dim;

    const json& cons = field(doc, "", "constraints");
    if (!cons.is_array()) schema_error("constraints", "expected an array");
    if (cons.empty()) schema_error("constraints", "at least one constraint required");
    for (std::size_t i = 0; i < cons.size(); ++i) {
        const std::string path = "constraints[" + std::to_string(i) + "]";
        const json& c = object_at(cons[i], path);
        reject_unknown(c, path, {"kind", "A", "b", "c", "d0"});
        AffineConstraint con;
        const json& kind = field(c, path, "kind");
        if (kind == "eq") {
            con.kind = ConstraintKind::equality;
        } else if (kind == "ineq") {
            con.kind = ConstraintKind::inequality;
        } else {
            schema_error(path + ".kind", "expected \"eq\" or \"ineq\"");
        }
        con.A = matrix_at(field(c, path, "A"), path + ".A", d, m);
        con.b = vector_at(field(c, path, "b"), path + ".b", d);
        con.c = vector_at(field(c, path, "c"), path + ".c", m);
        con.d0 = number_at(field(c, path, "d0"), path + ".d0");
        data.constraints.push_back(std::move(con));
    }

    const json& base = object_at(field(doc, "", "base_point"), "base_point");
    reject_unknown(base, "base_point", {"p", "x"});
    data.base_param = vector_at(field(base, "base_point", "p"), "base_point.p", m);
    data.base_point = vector_at(field(base, "base_point", "x"), "base_point.x", d);

    // Radii default to 0.5 each; a given block may set either or both.
    if (doc.contains("radii")) {
        const json& radii = object_at(doc.at("radii"), "radii");
        reject_unknown(radii, "radii", {"param", "point"});
        if (radii.contains("param")) data.param_radius = number_at(radii.at("param"), "radii.param");
        if (radii.contains("point")) data.point_radius = number_at(radii.at("point"), "radii.point");
    }

    if (doc.contains("tolerances")) data.tolerances = parse_tolerances(doc.at("tolerances"));
    if (doc.contains("sampling")) data.sampling = parse_sampling(doc.at("sampling"));

    return MovingPolyhedron(std::move(data));
}

std::string serialize_problem(const MovingPolyhedron& mp) {
    std::vector<const AffineConstraint*> original(mp.size());
    for (std::size_t i = 0; i < mp.size(); ++i) original[mp.source_order()[i]] = &mp.constraint(i);

    json cons = json::array();
    for (const auto* con : original) {
        json c;
        c["kind"] = con->kind == ConstraintKind::equality ? "eq" : "ineq";
        c["A"] = to_json(con->A);
        c["b"] = to_json(con->b);
        c["c"] = to_json(con->c);
        c["d0"] = con->d0;
        cons.push_back(std::move(c));
    }
    const Tolerances& t = mp.tolerances();
    json doc;
    doc["ambient_dim"] = mp.ambient_dim();
    doc["param_dim"] = mp.param_dim();
    doc["constraints"] = std::move(cons);
    doc["base_point"] = {{"p", to_json(mp.base_param())}, {"x", to_json(mp.base_point())}};
    doc["radii"] = {{"param", mp.param_radius()}, {"point", mp.point_radius()}};
    doc["tolerances"] = {{"rank", t.rank},
                         {"active", t.active},
                         {"feasibility", t.feasibility},
                         {"kkt", t.kkt},
                         {"positivity_floor", t.positivity_floor},
                         {"iteration_factor", t.iteration_factor},
                         {"enumeration_guard", t.enumeration_guard}};
    doc["sampling"] = {{"seed", mp.sampling().seed}, {"samples", mp.sampling().samples}};
    return doc.dump(2) + "\n";
}

MovingPolyhedron load_problem_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) fail(ErrorKind::input, "cannot open problem file '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_problem(buf.str());
}

Vector parse_vector_literal(std::string_view text, const std::string& field) {
    std::vector<double> values;
    std::size_t start = 0;
    while (true) {
        const std::size_t comma = text.find(',', start);
        std::string token(text.substr(start, comma == std::string_view::npos ? text.npos : comma - start));
        // Trim surrounding whitespace.
        const auto first = token.find_first_not_of(" \t");
        const auto last = token.find_last_not_of(" \t");
        token = first == std::string::npos ? std::string() : token.substr(first, last - first + 1);
        double value = 0.0;
        const char* begin = token.data();
        const char* end = token.data() + token.size();
        if (!token.empty() && *begin == '+') ++begin;
        const auto [ptr, ec] = std::from_chars(begin, end, value);
        if (token.empty() || ec != std::errc() || ptr != end) {
            fail(ErrorKind::input, field + "[" + std::to_string(values.size()) + "]: malformed number '" +
                                       token + "'");
        }
        values.push_back(value);
        if (comma == std::string_view::npos) break;
        start = comma + 1;
    }
    return Eigen::Map<const Vector>(values.data(), static_cast<Eigen::Index>(values.size()));
}

}  // namespace movepoly
