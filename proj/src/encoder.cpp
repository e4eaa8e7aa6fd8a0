#include "fmcheck/encoder.hpp"

namespace fmcheck {

using logic::Formula;

namespace {

Formula var_of(const FeatureId& id, const std::unordered_map<FeatureId, std::size_t>& index_of) {
    auto it = index_of.find(id);
    return Formula::var(id, it == index_of.end() ? Formula::kNoIndex : it->second);
}

void walk_groups(const Feature& feature, EncodedModel& out,
                 const std::unordered_map<FeatureId, std::size_t>& index_of) {
    for (const ChildGroup& group : feature.groups) {
        std::vector<FeatureId> children;
        for (const Feature& child : group.children) {
            children.push_back(child.id);
        }
        Formula formula = encode_group(feature.id, group.kind, children, index_of);
        out.group_conjuncts.push_back({feature.id, group.kind, std::move(children), std::move(formula)});
    }
    for (const ChildGroup& group : feature.groups) {
        for (const Feature& child : group.children) {
            walk_groups(child, out, index_of);
        }
    }
}

}  // namespace

Formula encode_group(const FeatureId& parent, GroupKind kind, const std::vector<FeatureId>& children,
                     const std::unordered_map<FeatureId, std::size_t>& index_of) {
    Formula p = var_of(parent, index_of);
    std::vector<Formula> cs;
    for (const FeatureId& id : children) {
        cs.push_back(var_of(id, index_of));
    }

    auto each_implies_parent = [&] {
        std::vector<Formula> parts;
        for (const Formula& c : cs) {
            parts.push_back(Formula::implies(c, p));
        }
        return parts;
    };
    auto pairwise_exclusion = [&](std::vector<Formula>& parts) {
        for (std::size_t i = 0; i < cs.size(); ++i) {
            for (std::size_t j = i + 1; j < cs.size(); ++j) {
                parts.push_back(Formula::negation(Formula::conjunction({cs[i], cs[j]})));
            }
        }
    };

    switch (kind) {
    case GroupKind::Mandatory: {
        std::vector<Formula> parts;
        for (const Formula& c : cs) {
            parts.push_back(Formula::iff(c, p));
        }
        return logic::all_of(std::move(parts));
    }
    case GroupKind::Optional:
    case GroupKind::OptionalOr: return logic::all_of(each_implies_parent());
    case GroupKind::Alternative: {
        std::vector<Formula> parts;
        if (cs.size() == 2) {
            parts.push_back(Formula::iff(Formula::exclusive_or(cs[0], cs[1]), p));
        } else {
            parts.push_back(Formula::iff(logic::any_of(cs), p));
        }
        pairwise_exclusion(parts);
        return logic::all_of(std::move(parts));
    }
    case GroupKind::OptionalAlternative: {
        std::vector<Formula> parts = each_implies_parent();
        pairwise_exclusion(parts);
        return logic::all_of(std::move(parts));
    }
    case GroupKind::Or: return Formula::iff(logic::any_of(cs), p);
    }
    return Formula::constant(true);
}

Formula encode_constraint(const CrossTreeConstraint& c, const std::unordered_map<FeatureId, std::size_t>& index_of) {
    Formula source = var_of(c.source, index_of);
    Formula target = var_of(c.target, index_of);
    if (c.kind == ConstraintKind::Excludes) {
        target = Formula::negation(std::move(target));
    }
    return Formula::implies(std::move(source), std::move(target));
}

EncodedModel encode_model(const FeatureModel& model) {
    EncodedModel out;
    out.name = model.name;
    out.features = features_preorder(model);
    out.build_index();
    std::unordered_map<FeatureId, std::size_t> index_of;
    for (std::size_t i = 0; i < out.features.size(); ++i) {
        index_of.emplace(out.features[i], i);
    }
    out.root_conjunct = Formula::var(model.root.id, 0);
    walk_groups(model.root, out, index_of);
    for (const CrossTreeConstraint& c : model.constraints) {
        out.dependency_conjuncts.push_back({c, encode_constraint(c, index_of)});
    }
    return out;
}

void EncodedModel::build_index() {
    index_.clear();
    for (std::size_t i = 0; i < features.size(); ++i) {
        index_.emplace(features[i], i);
    }
}

std::size_t EncodedModel::index_of(const FeatureId& id) const {
    auto it = index_.find(id);
    if (it == index_.end()) {
        throw UnknownFeatureError(id);
    }
    return it->second;
}

Formula EncodedModel::full_formula() const {
    std::vector<Formula> parts{root_conjunct};
    for (const GroupConjunct& g : group_conjuncts) {
        parts.push_back(g.formula);
    }
    for (const DependencyConjunct& d : dependency_conjuncts) {
        parts.push_back(d.formula);
    }
    return logic::all_of(std::move(parts));
}

std::vector<ConjunctRef> EncodedModel::conjunct_refs() const {
    std::vector<ConjunctRef> refs{{ConjunctKind::Root, 0}};
    for (std::size_t i = 0; i < group_conjuncts.size(); ++i) {
        refs.push_back({ConjunctKind::Group, i});
    }
    for (std::size_t i = 0; i < dependency_conjuncts.size(); ++i) {
        refs.push_back({ConjunctKind::Dependency, i});
    }
    return refs;
}

const Formula& EncodedModel::formula_of(ConjunctRef ref) const {
    switch (ref.kind) {
    case ConjunctKind::Root: return root_conjunct;
    case ConjunctKind::Group: return group_conjuncts.at(ref.index).formula;
    case ConjunctKind::Dependency: return dependency_conjuncts.at(ref.index).formula;
    }
    return root_conjunct;
}

std::string EncodedModel::describe(ConjunctRef ref) const {
    switch (ref.kind) {
    case ConjunctKind::Root: return "root " + (features.empty() ? std::string() : features.front());
    case ConjunctKind::Group: {
        const GroupConjunct& g = group_conjuncts.at(ref.index);
        return std::string(keyword(g.kind)) + " group of " + g.parent;
    }
    case ConjunctKind::Dependency: {
        const CrossTreeConstraint& c = dependency_conjuncts.at(ref.index).constraint;
        return std::string(keyword(c.kind)) + ": " + c.source + " -> " + c.target;
    }
    }
    return {};
}

std::string EncodedModel::label(ConjunctRef ref) const {
    switch (ref.kind) {
    case ConjunctKind::Root: return "root";
    case ConjunctKind::Group: {
        const GroupConjunct& g = group_conjuncts.at(ref.index);
        // A parent with several groups gets them numbered in declaration order.
        std::size_t same_parent = 0;
        std::size_t position = 0;
        for (std::size_t i = 0; i < group_conjuncts.size(); ++i) {
            if (group_conjuncts[i].parent == g.parent) {
                if (i == ref.index) {
                    position = same_parent;
                }
                ++same_parent;
            }
        }
        std::string label = "G(" + g.parent + ")";
        if (same_parent > 1) {
            label += "#" + std::to_string(position + 1);
        }
        return label;
    }
    case ConjunctKind::Dependency: return "D" + std::to_string(ref.index + 1);
    }
    return {};
}

}  // namespace fmcheck
