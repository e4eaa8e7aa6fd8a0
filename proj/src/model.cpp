#include "fmcheck/model.hpp"

#include <algorithm>
#include <array>
#include <set>

namespace fmcheck {

bool Feature::operator==(const Feature&) const = default;

std::string_view keyword(GroupKind kind) {
    switch (kind) {
    case GroupKind::Mandatory: return "mandatory";
    case GroupKind::Optional: return "optional";
    case GroupKind::Alternative: return "xor";
    case GroupKind::OptionalAlternative: return "xor?";
    case GroupKind::Or: return "or";
    case GroupKind::OptionalOr: return "or?";
    }
    return "?";
}

std::optional<GroupKind> group_kind_from_keyword(std::string_view word) {
    static constexpr std::array kinds{GroupKind::Mandatory,   GroupKind::Optional,
                                      GroupKind::Alternative, GroupKind::OptionalAlternative,
                                      GroupKind::Or,          GroupKind::OptionalOr};
    for (GroupKind kind : kinds) {
        if (keyword(kind) == word) {
            return kind;
        }
    }
    return std::nullopt;
}

bool is_choice_group(GroupKind kind) {
    return kind != GroupKind::Mandatory && kind != GroupKind::Optional;
}

std::size_t min_children(GroupKind kind) { return is_choice_group(kind) ? 2 : 1; }

std::string_view keyword(ConstraintKind kind) {
    return kind == ConstraintKind::Requires ? "requires" : "excludes";
}

Feature make_feature(FeatureId id, std::vector<ChildGroup> groups) {
    Feature f;
    f.display_name = id;
    f.id = std::move(id);
    f.groups = std::move(groups);
    return f;
}

std::string_view to_string(DiagnosticCode code) {
    switch (code) {
    case DiagnosticCode::InvalidIdentifier: return "InvalidIdentifier";
    case DiagnosticCode::ReservedIdentifier: return "ReservedIdentifier";
    case DiagnosticCode::DuplicateFeature: return "DuplicateFeature";
    case DiagnosticCode::GroupTooSmall: return "GroupTooSmall";
    case DiagnosticCode::UnknownFeature: return "UnknownFeature";
    case DiagnosticCode::SelfConstraint: return "SelfConstraint";
    }
    return "?";
}

bool is_identifier(std::string_view text) {
    if (text.empty()) {
        return false;
    }
    auto alpha = [](char c) { return (c >= 'A' && c <= 'Z') || (c >= 'a' && c <= 'z') || c == '_'; };
    auto digit = [](char c) { return c >= '0' && c <= '9'; };
    if (!alpha(text.front())) {
        return false;
    }
    return std::all_of(text.begin() + 1, text.end(),
                       [&](char c) { return alpha(c) || digit(c) || c == '.'; });
}

bool is_reserved_word(std::string_view text) {
    static constexpr std::array<std::string_view, 9> words{
        "model", "feature", "mandatory", "optional", "xor", "or", "constraints", "requires", "excludes"};
    return std::find(words.begin(), words.end(), text) != words.end();
}

namespace {

void collect_preorder(const Feature& feature, std::vector<FeatureId>& out) {
    out.push_back(feature.id);
    for (const ChildGroup& group : feature.groups) {
        for (const Feature& child : group.children) {
            collect_preorder(child, out);
        }
    }
}

const Feature* find_in(const Feature& feature, std::string_view id) {
    if (feature.id == id) {
        return &feature;
    }
    for (const ChildGroup& group : feature.groups) {
        for (const Feature& child : group.children) {
            if (const Feature* hit = find_in(child, id)) {
                return hit;
            }
        }
    }
    return nullptr;
}

class StructureChecker {
public:
    std::vector<StructureDiagnostic> run(const FeatureModel& model) {
        visit(model.root);
        for (const CrossTreeConstraint& c : model.constraints) {
            check_constraint(c);
        }
        return std::move(diagnostics_);
    }

private:
    void visit(const Feature& feature) {
        if (!is_identifier(feature.id)) {
            report(DiagnosticCode::InvalidIdentifier, {feature.id},
                   "'" + feature.id + "' is not a valid feature identifier");
        } else if (is_reserved_word(feature.id)) {
            report(DiagnosticCode::ReservedIdentifier, {feature.id},
                   "'" + feature.id + "' is a reserved word");
        }
        if (!seen_.insert(feature.id).second) {
            report(DiagnosticCode::DuplicateFeature, {feature.id},
                   "feature '" + feature.id + "' is declared more than once");
        }
        for (const ChildGroup& group : feature.groups) {
            if (group.children.size() < min_children(group.kind)) {
                report(DiagnosticCode::GroupTooSmall, {feature.id},
                       std::string(keyword(group.kind)) + " group of '" + feature.id + "' needs at least " +
                           std::to_string(min_children(group.kind)) + " children, has " +
                           std::to_string(group.children.size()));
            }
            for (const Feature& child : group.children) {
                visit(child);
            }
        }
    }

    void check_constraint(const CrossTreeConstraint& c) {
        for (const FeatureId* end : {&c.source, &c.target}) {
            if (!seen_.contains(*end)) {
                report(DiagnosticCode::UnknownFeature, {*end},
                       "constraint refers to undeclared feature '" + *end + "'");
            }
        }
        if (c.source == c.target) {
            report(DiagnosticCode::SelfConstraint, {c.source},
                   "feature '" + c.source + "' " + std::string(keyword(c.kind)) + " itself");
        }
    }

    void report(DiagnosticCode code, std::vector<FeatureId> ids, std::string message) {
        diagnostics_.push_back({code, std::move(ids), std::move(message)});
    }

    std::set<FeatureId> seen_;
    std::vector<StructureDiagnostic> diagnostics_;
};

}  // namespace

std::vector<StructureDiagnostic> validate_structure(const FeatureModel& model) {
    return StructureChecker{}.run(model);
}

std::vector<FeatureId> features_preorder(const FeatureModel& model) {
    std::vector<FeatureId> out;
    collect_preorder(model.root, out);
    return out;
}

std::size_t feature_count(const FeatureModel& model) { return features_preorder(model).size(); }

const Feature* find_feature(const FeatureModel& model, std::string_view id) {
    return find_in(model.root, id);
}

std::string_view to_string(Decision decision) {
    switch (decision) {
    case Decision::Undecided: return "undecided";
    case Decision::Selected: return "selected";
    case Decision::Deselected: return "deselected";
    }
    return "?";
}

Decision Configuration::get(const FeatureId& id) const {
    auto it = decisions_.find(id);
    return it == decisions_.end() ? Decision::Undecided : it->second;
}

void Configuration::set(const FeatureId& id, Decision decision) {
    if (decision == Decision::Undecided) {
        decisions_.erase(id);
    } else {
        decisions_[id] = decision;
    }
}

bool Configuration::is_full(const std::vector<FeatureId>& features) const {
    return std::all_of(features.begin(), features.end(),
                       [&](const FeatureId& id) { return get(id) != Decision::Undecided; });
}

Configuration full_configuration(const std::vector<FeatureId>& features,
                                 const std::vector<FeatureId>& selected) {
    Configuration cfg;
    for (const FeatureId& id : features) {
        cfg.deselect(id);
    }
    for (const FeatureId& id : selected) {
        cfg.select(id);
    }
    return cfg;
}

}  // namespace fmcheck
