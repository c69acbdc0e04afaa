#pragma once

#include <string>

#include "json.hpp"

#include "xbn/explain_decision.hpp"
#include "xbn/explain_evidence.hpp"
#include "xbn/explain_reasoning.hpp"
#include "xbn/inference.hpp"
#include "xbn/model.hpp"

namespace xbn {

using nlohmann::json;

/// Native network document (see format.hpp).
json network_to_json(const BayesianNetwork& net);

/// {"Var": "state", ...}
json assignment_to_json(const BayesianNetwork& net, const Assignment& a);
Assignment assignment_from_json(const BayesianNetwork& net, const json& j);

/// Finite numbers pass through; +inf becomes the string "inf".
json score_to_json(double x);

json to_json(const BayesianNetwork& net, const Posterior& p);
json to_json(const BayesianNetwork& net, const QueryClassification& c);
json to_json(const BayesianNetwork& net, const BeliefChangeReport& r);
json to_json(const ExplainingAwayReport& r);
json to_json(const BayesianNetwork& net, const Explanation& e);
json to_json(const BayesianNetwork& net, const ExplanationRanking& r);
json to_json(const DecisionOutcome& d);
json to_json(const BayesianNetwork& net, const SdpResult& r);

/// Stable text form: sorted keys, floats rounded to 12 significant digits.
std::string canonical_dump(const json& j);

/// Display rounding used in tables and narratives: 4 decimals.
std::string format4(double x);

}  // namespace xbn
