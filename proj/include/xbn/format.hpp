#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "xbn/error.hpp"
#include "xbn/model.hpp"

namespace xbn {

/// Parses the discrete BIF subset. Non-fatal diagnostics (ignored
/// `property` lines) are appended to `warnings` when given.
BayesianNetwork parse_bif(std::string_view text, std::vector<ParseDiagnostic>* warnings = nullptr);
std::string write_bif(const BayesianNetwork& net);

/// Native JSON document:
///   { "name": str, "variables": [{"name", "states", "alias"?}],
///     "cpts": [{"child", "parents", "rows"}] }
BayesianNetwork parse_network_json(std::string_view text);
std::string write_network_json(const BayesianNetwork& net);

/// Chooses BIF or JSON from the first non-blank character.
BayesianNetwork parse_network(std::string_view text, std::vector<ParseDiagnostic>* warnings = nullptr);

/// Lauritzen & Spiegelhalter chest-clinic network with the textbook CPTs.
BayesianNetwork builtin_asia();

inline constexpr std::string_view kBuiltinAsia = "builtin:asia";

/// Loads "builtin:asia" or a .bif / .json file path.
BayesianNetwork load_network(const std::string& source,
                             std::vector<ParseDiagnostic>* warnings = nullptr);

}  // namespace xbn
