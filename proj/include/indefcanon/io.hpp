#pragma once

// JSON and CSV forms of matrices, specs, bases, traces, instances and
// stability reports. Parsers throw CanonError{Parse}.

#include <iosfwd>
#include <string>

#include <json.hpp>

#include "indefcanon/harness.hpp"

namespace indefcanon::io {

using json = nlohmann::ordered_json;

/// {"rows", "cols", "data"}; data is row-major [[re, im], ...], or bare reals
/// when the matrix is exactly real and real_form is set.
json matrix_to_json(const CMatrix& m, bool real_form = false);
CMatrix matrix_from_json(const json& j);

json complex_to_json(Complex z);
Complex complex_from_json(const json& j);

json spec_to_json(const JordanSpec& spec);
JordanSpec spec_from_json(const json& j);

json residuals_to_json(const AffiliationResiduals& r);

json basis_to_json(const CanonicalBasis& b, const JordanSpec& spec);
CanonicalBasis basis_from_json(const json& j);

json trace_to_json(const PipelineTrace& t);

json instance_to_json(const Instance& inst);
Instance instance_from_json(const json& j);

/// Shortest decimal that round-trips; "nan", "inf", "-inf" otherwise.
std::string format_double(double x);

/// Header plus one row per trial; weak-mode reports append match columns.
void write_trials_csv(std::ostream& os, const StabilityReport& rep);
json report_to_json(const StabilityReport& rep);

json parse_json(const std::string& text);
std::string read_file(const std::string& path);
/// Writes to path.tmp then renames over path.
void write_file_atomic(const std::string& path, const std::string& contents);

}  // namespace indefcanon::io
