#pragma once

#include <string>
#include <string_view>

#include "json.hpp"

#include "xbn/model.hpp"

namespace xbn::api {

/// Operations accepted in a query request's "operation" member.
inline constexpr std::string_view kOperations[] = {"infer", "classify", "mpe",     "map",    "mre",
                                                   "gbf",   "sdp",      "decide",  "explain", "oracle"};

/// Runs one query request against `net`.
///
/// Request members (all optional unless the operation needs them):
///   operation  one of kOperations
///   evidence   {"Var": "state"} or "Var=state,..."
///   targets    ["Var", ...] or "ALL"          (infer, map, mre, oracle)
///   target     "Var"                          (classify)
///   explanation {"Var": "state"}              (gbf)
///   k, prune_dominated                        (mre)
///   hypothesis {"Var": "state"}, threshold, hidden  (sdp, decide)
///   question   {"kind": ..., slots...}        (explain)
///
/// Returns {"network", "operation", "params", "result"} where params echoes
/// the resolved arguments. Throws xbn::Error subclasses on failure.
nlohmann::json execute(const BayesianNetwork& net, const nlohmann::json& request);

/// Human-readable table for a response produced by execute().
std::string render_table(const nlohmann::json& response);

}  // namespace xbn::api
