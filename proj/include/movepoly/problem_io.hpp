#pragma once

#include <string>
#include <string_view>

#include "movepoly/polyhedron.hpp"

namespace movepoly {

/// Parses the JSON problem file. Schema violations throw ErrorKind::input
/// with the offending field path, e.g. "constraints[2].A[0]".
MovingPolyhedron parse_problem(std::string_view text);

/// Writes constraints in their original input order, so that
/// parse_problem(serialize_problem(mp)) == mp including source_order().
std::string serialize_problem(const MovingPolyhedron& mp);

MovingPolyhedron load_problem_file(const std::string& path);

/// Comma-separated decimals, e.g. "1,2.5,-3e-2".
Vector parse_vector_literal(std::string_view text, const std::string& field);

}  // namespace movepoly
