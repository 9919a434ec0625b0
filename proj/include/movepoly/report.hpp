#pragma once

#include <ostream>

#include "json.hpp"
#include "movepoly/multipliers.hpp"
#include "movepoly/projection.hpp"
#include "movepoly/regularity.hpp"

// Report rendering. Constraint indices are printed 1-based; JSON numbers
// keep full double precision (shortest round-trip form), text rounds to
// 6 significant digits.
namespace movepoly::report {

inline constexpr const char* kSchema = "movepoly-report/1";

using nlohmann::json;

json to_json(const Vector& v);
json to_json_indices(const IndexSet& s);

json to_json(const ProjectionResult& r);
json to_json(const MultiplierCertificate& c);
json to_json(const MinL1Multiplier& m);
json to_json(const RcrcqReport& r);
json to_json(const LiminfReport& r);
json to_json(const MultiplierBoundReport& r);
json to_json(const RRegularityReport& r);
json to_json(const AubinReport& r);
json to_json(const RegularityReport& r);
json to_json(const BlowupTable& t);

void write_text(std::ostream& os, const ProjectionResult& r);
void write_text(std::ostream& os, const MultiplierCertificate& c);
void write_text(std::ostream& os, const MinL1Multiplier& m);
void write_text(std::ostream& os, const RcrcqReport& r);
void write_text(std::ostream& os, const LiminfReport& r);
void write_text(std::ostream& os, const RegularityReport& r);
void write_text(std::ostream& os, const BlowupTable& t);

}  // namespace movepoly::report
