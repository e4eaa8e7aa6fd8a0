#pragma once

/**
 * @file json_io.hpp
 * @brief JSON renderings shared by the CLI (`--json`) and the HTTP service.
 *
 * Shapes are described by the schemas under `schema/`.
 */

#include "fmcheck/analysis.hpp"
#include "fmcheck/encoder.hpp"
#include "fmcheck/model.hpp"
#include "fmcheck/propagation.hpp"

#include <json.hpp>

namespace fmcheck::json_io {

using Json = nlohmann::ordered_json;

/// `{"void", "dead", "core", "count"}`; count is null when not computed.
Json to_json(const AnalysisReport& report);

/// `{"conflicting_feature", "forced_value", "cause_chain": [{"feature", "value", "reason"}]}`
Json to_json(const ConflictReport& conflict);

/// `{"feature", "value", "reason", "premises"}`
Json to_json(const Derivation& derivation);

/// `{"id", "groups": [{"kind", "children": [...]}]}` with DSL keywords as kinds.
Json to_json(const Feature& feature);

/// `{"name", "root", "constraints": [{"kind", "source", "target"}]}`
Json tree_json(const FeatureModel& model);

/// One entry per conjunct: `{"label", "kind", "description", "formula"}`.
Json conjuncts_json(const EncodedModel& e, logic::Notation notation);

std::string_view to_string(ConjunctKind kind);

}  // namespace fmcheck::json_io
