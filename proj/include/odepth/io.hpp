#pragma once

#include <string>
#include <vector>

#include "json.hpp"
#include "odepth/chen.hpp"
#include "odepth/melnikov.hpp"
#include "odepth/orbit_depth.hpp"

/// JSON encodings of instances, inputs and reports. Every document carries a
/// versioned "schema" field; big integers are decimal strings. Malformed
/// input raises SchemaError.
namespace odepth::io {

using json = nlohmann::json;

inline constexpr const char* kInstanceSchema = "odepth.instance/1";
inline constexpr const char* kDepthReportSchema = "odepth.depth-report/1";
inline constexpr const char* kPathsSchema = "odepth.paths/1";
inline constexpr const char* kFormsSchema = "odepth.forms/1";
inline constexpr const char* kChenReportSchema = "odepth.chen-report/1";
inline constexpr const char* kSystemSchema = "odepth.system/1";
inline constexpr const char* kMelnikovReportSchema = "odepth.melnikov-report/1";
inline constexpr const char* kExamplesSchema = "odepth.examples/1";

/// Reads and parses a file; SchemaError if it is missing or not JSON.
json read_file(const std::string& path);
/// Writes j.dump(2) and a newline.
void write_file(const std::string& path, const json& j);
/// SchemaError unless j["schema"] is absent or equals `expected`; a
/// "placeholder" field fails with its message.
void check_schema(const json& j, const char* expected);

json to_json(const Word& w);
Word word_from_json(const json& j, int rank);

json to_json(const ProblemInstance& p);
ProblemInstance instance_from_json(const json& j);

json to_json(const DepthReport& r);
DepthReport report_from_json(const json& j);
std::string depth_table(const DepthReport& r);

json to_json(cplx z);
cplx complex_from_json(const json& j);

json to_json(const Poly2& p);
Poly2 poly_from_json(const json& j);

json to_json(const OneForm& w);
OneForm form_from_json(const json& j);

json to_json(const Segment& s);
Segment segment_from_json(const json& j);
json to_json(const Path& p);
Path path_from_json(const json& j, double join_tol);

json to_json(const TransversalSpec& t);
TransversalSpec transversal_from_json(const json& j);

/// Hamiltonian, forms keyed by order, transversal.
json system_to_json(const PlanarSystem& s, const TransversalSpec& tau);
std::pair<PlanarSystem, TransversalSpec> system_from_json(const json& j);

json to_json(const DisplacementSample& s);
json to_json(const MelnikovFit& f);

}  // namespace odepth::io
