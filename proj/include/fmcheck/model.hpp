#pragma once

/**
 * @file model.hpp
 * @brief In-memory feature models, configurations and analysis results.
 *
 * A FeatureModel is a rooted tree. Every feature owns an ordered list of
 * child groups; a group ties a set of children to their parent with one of
 * six relationship kinds. Cross-tree constraints (requires / excludes)
 * connect features in different subtrees.
 *
 * Models are plain values: nesting guarantees tree shape, so the only
 * structural checks left are identifier lexemes, uniqueness, group arity
 * and constraint resolution (see validate_structure()).
 */

#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace fmcheck {

/// Feature identifiers are case-sensitive and match `[A-Za-z_][A-Za-z0-9_.]*`.
using FeatureId = std::string;

enum class GroupKind {
    Mandatory,
    Optional,
    Alternative,
    OptionalAlternative,
    Or,
    OptionalOr,
};

/// DSL keyword for a group kind (`mandatory`, `optional`, `xor`, `xor?`, `or`, `or?`).
std::string_view keyword(GroupKind kind);
std::optional<GroupKind> group_kind_from_keyword(std::string_view word);

/// True for Alternative, OptionalAlternative, Or and OptionalOr.
bool is_choice_group(GroupKind kind);

/// Smallest legal number of children for a group of this kind.
std::size_t min_children(GroupKind kind);

struct ChildGroup;

struct Feature {
    FeatureId id;
    std::string display_name;
    std::vector<ChildGroup> groups;

    bool operator==(const Feature&) const;
};

struct ChildGroup {
    GroupKind kind = GroupKind::Mandatory;
    std::vector<Feature> children;

    bool operator==(const ChildGroup&) const = default;
};

enum class ConstraintKind { Requires, Excludes };

std::string_view keyword(ConstraintKind kind);

struct CrossTreeConstraint {
    ConstraintKind kind = ConstraintKind::Requires;
    FeatureId source;
    FeatureId target;

    bool operator==(const CrossTreeConstraint&) const = default;
};

struct FeatureModel {
    std::string name;
    Feature root;
    std::vector<CrossTreeConstraint> constraints;

    bool operator==(const FeatureModel&) const = default;
};

/// Builds a feature whose display name equals its id.
Feature make_feature(FeatureId id, std::vector<ChildGroup> groups = {});

// ----------------------------------------------------------------------------
// Structural validation

enum class DiagnosticCode {
    InvalidIdentifier,
    ReservedIdentifier,
    DuplicateFeature,
    GroupTooSmall,
    UnknownFeature,
    SelfConstraint,
};

std::string_view to_string(DiagnosticCode code);

struct StructureDiagnostic {
    DiagnosticCode code;
    std::vector<FeatureId> features;
    std::string message;
};

/// Returns an empty list iff every FeatureModel invariant holds.
std::vector<StructureDiagnostic> validate_structure(const FeatureModel& model);

/// True if `text` matches the identifier lexeme.
bool is_identifier(std::string_view text);

/// True for words the DSL reserves (`model`, `feature`, `xor`, ...).
bool is_reserved_word(std::string_view text);

/// Parent before children; groups and children in declaration order.
std::vector<FeatureId> features_preorder(const FeatureModel& model);

std::size_t feature_count(const FeatureModel& model);

/// Pointer to the feature with this id, or nullptr.
const Feature* find_feature(const FeatureModel& model, std::string_view id);

// ----------------------------------------------------------------------------
// Configurations

enum class Decision : std::uint8_t { Undecided, Selected, Deselected };

std::string_view to_string(Decision decision);

/**
 * Tri-state assignment. Features absent from the map are Undecided;
 * setting a feature to Undecided erases it.
 */
class Configuration {
public:
    Configuration() = default;

    Decision get(const FeatureId& id) const;
    void set(const FeatureId& id, Decision decision);
    void select(const FeatureId& id) { set(id, Decision::Selected); }
    void deselect(const FeatureId& id) { set(id, Decision::Deselected); }

    /// No feature of `features` is Undecided.
    bool is_full(const std::vector<FeatureId>& features) const;

    const std::map<FeatureId, Decision>& decisions() const { return decisions_; }
    bool empty() const { return decisions_.empty(); }

    bool operator==(const Configuration&) const = default;

private:
    std::map<FeatureId, Decision> decisions_;
};

/// Full configuration selecting exactly `selected` among `features`.
Configuration full_configuration(const std::vector<FeatureId>& features,
                                 const std::vector<FeatureId>& selected);

// ----------------------------------------------------------------------------
// Errors shared by the analysis layers

class UndecidedFeature : public std::runtime_error {
public:
    explicit UndecidedFeature(const FeatureId& id)
        : std::runtime_error("feature '" + id + "' is undecided"), feature_(id) {}
    const FeatureId& feature() const { return feature_; }

private:
    FeatureId feature_;
};

class TooLarge : public std::runtime_error {
public:
    TooLarge(std::size_t features, std::size_t cap)
        : std::runtime_error("model has " + std::to_string(features) +
                             " features, above the counting cap of " + std::to_string(cap)),
          features_(features), cap_(cap) {}
    std::size_t features() const { return features_; }
    std::size_t cap() const { return cap_; }

private:
    std::size_t features_;
    std::size_t cap_;
};

class Cancelled : public std::runtime_error {
public:
    Cancelled() : std::runtime_error("operation cancelled") {}
};

class UnknownFeatureError : public std::invalid_argument {
public:
    explicit UnknownFeatureError(const FeatureId& id)
        : std::invalid_argument("unknown feature '" + id + "'"), feature_(id) {}
    const FeatureId& feature() const { return feature_; }

private:
    FeatureId feature_;
};

// ----------------------------------------------------------------------------
// Analysis results

/// Where a conjunct of the model formula comes from.
enum class ConjunctKind { Root, Group, Dependency };

struct ConjunctRef {
    ConjunctKind kind = ConjunctKind::Root;
    std::size_t index = 0;  ///< into group_conjuncts / dependency_conjuncts

    bool operator==(const ConjunctRef&) const = default;
    auto operator<=>(const ConjunctRef&) const = default;
};

struct ConflictStep {
    ConjunctRef reason;
    FeatureId feature;
    bool value = false;
    std::string description;  ///< human-readable form of `reason`

    bool operator==(const ConflictStep&) const = default;
};

struct ConflictReport {
    FeatureId conflicting_feature;
    bool forced_value = false;
    std::vector<ConflictStep> cause_chain;

    bool operator==(const ConflictReport&) const = default;
};

struct AnalysisReport {
    bool is_void = false;
    std::vector<FeatureId> dead_features;  ///< preorder
    std::vector<FeatureId> core_features;  ///< preorder
    std::optional<std::uint64_t> product_count;
};

}  // namespace fmcheck
