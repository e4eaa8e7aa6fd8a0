#pragma once

/**
 * @file propagation.hpp
 * @brief Decision propagation: unit propagation over the clause form,
 * seeded with the user's decisions.
 *
 * `a requires b` with a selected forces b selected; `a excludes b` with a
 * selected forces b deselected; group clauses propagate the same way
 * (a selected child forces its parent, a selected xor child deselects its
 * siblings, ...). The root is always forced selected.
 *
 * Propagation is sound but not complete: a conflict-free result does not
 * promise that a valid product exists. Use sat() for that.
 */

#include "fmcheck/encoder.hpp"
#include "fmcheck/model.hpp"

#include <optional>
#include <string>
#include <vector>

namespace fmcheck {

struct Derivation {
    FeatureId feature;
    bool value = false;
    ConjunctRef reason;
    std::string description;          ///< EncodedModel::describe(reason)
    std::vector<FeatureId> premises;  ///< features whose values made the clause unit

    bool operator==(const Derivation&) const = default;
};

struct PropagationResult {
    Configuration decisions;               ///< user decisions plus forced values
    std::vector<Derivation> derivations;   ///< forced values, in derivation order
    std::optional<ConflictReport> conflict;

    bool has_conflict() const { return conflict.has_value(); }
    const Derivation* derivation_of(const FeatureId& id) const;
};

/// Unknown features in `user` throw UnknownFeatureError.
PropagationResult propagate(const EncodedModel& e, const Configuration& user);

/// Single-line rendering: `v1.1 = T by requires: v2.3.1 -> v1.1`.
std::string format_step(const ConflictStep& step);

}  // namespace fmcheck
