#pragma once

/**
 * @file encoder.hpp
 * @brief Compiles a feature model into one propositional conjunct per group
 * plus one per cross-tree constraint.
 *
 * Group encodings (p = parent, c_i = children):
 *
 *   | kind                | formula                                            |
 *   |---------------------|----------------------------------------------------|
 *   | mandatory           | ⋀ (c_i ⇔ p)                                        |
 *   | optional            | ⋀ (c_i ⇒ p)                                        |
 *   | xor, 2 children     | ((c_1 ⊕ c_2) ⇔ p) ∧ ¬(c_1 ∧ c_2)                   |
 *   | xor, n > 2 children | ((⋁ c_i) ⇔ p) ∧ ⋀_{i<j} ¬(c_i ∧ c_j)               |
 *   | xor?                | ⋀ (c_i ⇒ p) ∧ ⋀_{i<j} ¬(c_i ∧ c_j)                 |
 *   | or                  | (⋁ c_i) ⇔ p                                        |
 *   | or?                 | ⋀ (c_i ⇒ p)                                        |
 *
 * `xor` is exactly-one-if-parent. In the two-child case the first conjunct
 * is the familiar (c_1 ⊕ c_2) ⇔ p; it admits c_1 = c_2 = T with p = F on its
 * own, so the pairwise exclusion is always emitted alongside it.
 *
 * `or?` carries no lower bound and encodes the same as `optional`; the kind
 * is kept for display.
 *
 * Constraints: `a requires b` is a ⇒ b, `a excludes b` is a ⇒ ¬b.
 */

#include "fmcheck/formula.hpp"
#include "fmcheck/model.hpp"

#include <string>
#include <unordered_map>
#include <vector>

namespace fmcheck {

struct GroupConjunct {
    FeatureId parent;
    GroupKind kind;
    std::vector<FeatureId> children;
    logic::Formula formula;
};

struct DependencyConjunct {
    CrossTreeConstraint constraint;
    logic::Formula formula;
};

class EncodedModel {
public:
    std::string name;
    std::vector<FeatureId> features;  ///< preorder; variable i is features[i]
    logic::Formula root_conjunct = logic::Formula::constant(true);
    std::vector<GroupConjunct> group_conjuncts;
    std::vector<DependencyConjunct> dependency_conjuncts;

    /// root ∧ groups ∧ dependencies
    logic::Formula full_formula() const;

    std::vector<ConjunctRef> conjunct_refs() const;
    const logic::Formula& formula_of(ConjunctRef ref) const;

    /// `root CAD`, `xor group of v1`, `requires: v2.3.1 -> v1.1`
    std::string describe(ConjunctRef ref) const;

    /// `root`, `G(v1)`, `D1`: short labels for reports.
    std::string label(ConjunctRef ref) const;

    std::size_t index_of(const FeatureId& id) const;  ///< throws UnknownFeatureError
    bool contains(const FeatureId& id) const { return index_.contains(id); }

    void build_index();

private:
    std::unordered_map<FeatureId, std::size_t> index_;
};

/// `index_of` maps feature ids to variable indices for the produced Var nodes.
logic::Formula encode_group(const FeatureId& parent, GroupKind kind, const std::vector<FeatureId>& children,
                            const std::unordered_map<FeatureId, std::size_t>& index_of = {});

logic::Formula encode_constraint(const CrossTreeConstraint& c,
                                 const std::unordered_map<FeatureId, std::size_t>& index_of = {});

/// Precondition: validate_structure(model) is empty.
EncodedModel encode_model(const FeatureModel& model);

}  // namespace fmcheck
