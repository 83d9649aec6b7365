#pragma once

#include <optional>
#include <ostream>
#include <string>

#include <json.hpp>

#include "flagsim/flag.hpp"
#include "flagsim/moser.hpp"
#include "flagsim/orbits.hpp"
#include "flagsim/symplectic.hpp"

namespace flagsim::io {

using nlohmann::json;

// Flags. Serialization round-trips bit-exactly: doubles are emitted with
// shortest round-trip precision and parsed back to the identical value.
json flag_to_json(const WeightedFlag& flag);
WeightedFlag flag_from_json(const json& j);  // raw data; run build_flag afterwards

json test_function_to_json(const TestFunction& f);
TestFunction test_function_from_json(const json& j);

/// Density file: {"n": 256, "values": [...], "marked": [...]}.
struct DensityFile {
    std::vector<double> values;
    std::vector<int> marked;
};
json density_to_json(const DensityFile& d);
DensityFile density_from_json(const json& j);

/// Signature file: {"levels": [[...],...], "rational": bool}; rational
/// signatures hold entries as integers or "p/q" strings.
struct SignatureFile {
    MassSignature levels;
    std::optional<RationalSignature> rational;
};
json signature_to_json(const MassSignature& sig);
SignatureFile signature_from_json(const json& j);

json circle_map_to_json(const CircleMap& map);
CircleMap circle_map_from_json(const json& j);

json diagnostics_to_json(const FlowDiagnostics& d);

/// Trajectory CSV: columns t, level, index, x_1..x_{2n}, density.
void write_trajectory_header(std::ostream& os, int dimension);
void write_trajectory_rows(std::ostream& os, double t, const WeightedFlag& flag);

/// Exact decimal round-trip formatting used by every CSV emitter.
std::string format_double(double v);

/// Canonical serialization (sorted keys, two-space indent, trailing newline);
/// identical inputs produce identical bytes.
std::string dump(const json& j);

json load_json_file(const std::string& path);    // throws ParseError
void write_file(const std::string& path, const std::string& content);

Rational rational_from_json(const json& entry);

}  // namespace flagsim::io
