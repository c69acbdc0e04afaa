#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

#include "xbn/explain_reasoning.hpp"
#include "xbn/model.hpp"

namespace xbn {

/// The questions a decision-maker asks, grouped by what is being explained:
/// reasoning (what will happen / what went wrong / mutual causes), evidence
/// (most probable scenario / most relevant explanation) and decisions
/// (ready to decide / what more information).
enum class QuestionKind {
    WhatWillHappen,
    WhatWentWrong,
    MutualCauses,
    MostProbableScenario,
    MostRelevantExplanation,
    ReadyToDecide,
    WhatMoreInfo,
};

std::string_view to_string(QuestionKind k);
QuestionKind question_kind_from_string(std::string_view s);
inline constexpr QuestionKind kAllQuestionKinds[] = {
    QuestionKind::WhatWillHappen,          QuestionKind::WhatWentWrong,
    QuestionKind::MutualCauses,            QuestionKind::MostProbableScenario,
    QuestionKind::MostRelevantExplanation, QuestionKind::ReadyToDecide,
    QuestionKind::WhatMoreInfo,
};

struct QuestionSpec {
    QuestionKind kind = QuestionKind::WhatWillHappen;
    Evidence evidence;
    // WhatWillHappen, WhatWentWrong
    std::optional<VarId> target;
    // MutualCauses
    std::optional<Assignment::Entry> cause;
    std::optional<Assignment::Entry> competitor;
    // MostProbableScenario (MAP when nonempty), MostRelevantExplanation
    // (empty means every unobserved variable)
    std::vector<VarId> target_set;
    std::size_t k = 10;
    // ReadyToDecide, WhatMoreInfo
    std::optional<Assignment::Entry> hypothesis;
    double threshold = 0.5;
    std::vector<VarId> hidden;
};

enum class Category { Reasoning, Evidence, Decision };
enum class Operation { Posterior, ExplainingAway, Mpe, Map, Mre, Sdp, SdpSweep };

std::string_view to_string(Category c);
std::string_view to_string(Operation o);

struct MethodPlan {
    Category category = Category::Reasoning;
    Operation operation = Operation::Posterior;
    /// Reasoning kind the question presumes (posterior plans only).
    std::optional<ReasoningKind> expected_kind;
    /// Arguments bound for execution (target sets expanded).
    QuestionSpec arguments;
};

/// Validates the slots `q.kind` needs and picks the method. Throws
/// UsageError on a slot mismatch.
MethodPlan route(const BayesianNetwork& net, const QuestionSpec& q);

struct ExplanationReport {
    MethodPlan plan;
    nlohmann::json payload;
    std::string narrative;
    std::string network;
    Evidence evidence;
};

/// Routes, runs the owning operation and renders the narrative. Errors from
/// the operation are rethrown with the question kind prefixed.
ExplanationReport explain(const BayesianNetwork& net, const QuestionSpec& q);

nlohmann::json to_json(const BayesianNetwork& net, const MethodPlan& plan);
nlohmann::json to_json(const BayesianNetwork& net, const ExplanationReport& report);

/// Parses the "question" object of a query request.
QuestionSpec question_from_json(const BayesianNetwork& net, const nlohmann::json& j);

/// Plain-text template set, one section per "[name]" header.
class TemplateSet {
public:
    static const TemplateSet& builtin();
    static TemplateSet parse(std::string_view text);

    bool has(std::string_view section) const;
    /// Substitutes {placeholders}; throws std::out_of_range on a missing
    /// section or an unbound placeholder.
    std::string render(std::string_view section,
                       const std::map<std::string, std::string>& values) const;

private:
    std::map<std::string, std::string, std::less<>> sections_;
};

}  // namespace xbn
