#include "fmcheck/json_io.hpp"

namespace fmcheck::json_io {

std::string_view to_string(ConjunctKind kind) {
    switch (kind) {
    case ConjunctKind::Root: return "root";
    case ConjunctKind::Group: return "group";
    case ConjunctKind::Dependency: return "dependency";
    }
    return "unknown";
}

Json to_json(const AnalysisReport& report) {
    Json out;
    out["void"] = report.is_void;
    out["dead"] = report.dead_features;
    out["core"] = report.core_features;
    out["count"] = report.product_count ? Json(*report.product_count) : Json(nullptr);
    return out;
}

Json to_json(const ConflictReport& conflict) {
    Json chain = Json::array();
    for (const ConflictStep& step : conflict.cause_chain) {
        chain.push_back({{"feature", step.feature}, {"value", step.value}, {"reason", step.description}});
    }
    return {{"conflicting_feature", conflict.conflicting_feature},
            {"forced_value", conflict.forced_value},
            {"cause_chain", std::move(chain)}};
}

Json to_json(const Derivation& derivation) {
    return {{"feature", derivation.feature},
            {"value", derivation.value},
            {"reason", derivation.description},
            {"premises", derivation.premises}};
}

Json to_json(const Feature& feature) {
    Json groups = Json::array();
    for (const ChildGroup& g : feature.groups) {
        Json children = Json::array();
        for (const Feature& child : g.children) {
            children.push_back(to_json(child));
        }
        groups.push_back({{"kind", keyword(g.kind)}, {"children", std::move(children)}});
    }
    return {{"id", feature.id}, {"groups", std::move(groups)}};
}

Json tree_json(const FeatureModel& model) {
    Json constraints = Json::array();
    for (const CrossTreeConstraint& c : model.constraints) {
        constraints.push_back({{"kind", keyword(c.kind)}, {"source", c.source}, {"target", c.target}});
    }
    return {{"name", model.name}, {"root", to_json(model.root)}, {"constraints", std::move(constraints)}};
}

Json conjuncts_json(const EncodedModel& e, logic::Notation notation) {
    Json out = Json::array();
    for (ConjunctRef ref : e.conjunct_refs()) {
        out.push_back({{"label", e.label(ref)},
                       {"kind", to_string(ref.kind)},
                       {"description", e.describe(ref)},
                       {"formula", logic::to_string(e.formula_of(ref), notation)}});
    }
    return out;
}

}  // namespace fmcheck::json_io
