#pragma once

/**
 * @file analysis.hpp
 * @brief Analysis operations over an encoded model.
 *
 * Two interchangeable engines decide satisfiability: exhaustive enumeration
 * of the feature variables (BruteForce) and DPLL over the clause form
 * (Dpll). Counting and enumeration always enumerate feature variables
 * directly, so Tseitin auxiliaries never need projecting.
 *
 * Long-running operations take a RunControl: a stop token checked
 * cooperatively (Cancelled is thrown) and an optional progress callback.
 */

#include "fmcheck/encoder.hpp"
#include "fmcheck/model.hpp"

#include <cstdint>
#include <functional>
#include <optional>
#include <stop_token>
#include <string_view>
#include <vector>

namespace fmcheck {

enum class SolverBackend { BruteForce, Dpll, Auto };

/// Auto resolves to BruteForce at or below this many features.
inline constexpr std::size_t kAutoBruteForceLimit = 20;
/// Hard ceiling for any enumeration over feature variables.
inline constexpr std::size_t kEnumerationCeiling = 40;
inline constexpr std::size_t kDefaultCountCap = 24;

SolverBackend resolve_backend(SolverBackend backend, std::size_t feature_count);
std::string_view to_string(SolverBackend backend);
std::optional<SolverBackend> backend_from_string(std::string_view text);

struct RunControl {
    std::stop_token stop;
    /// (units done, units total); units are assignments or per-feature probes.
    std::function<void(std::uint64_t, std::uint64_t)> progress;
};

// ----------------------------------------------------------------------------
// Validity of a full configuration

struct ConjunctEvaluation {
    ConjunctRef ref;
    bool value = false;
};

struct ValidityReport {
    bool valid = false;
    std::vector<ConjunctEvaluation> conjuncts;  ///< every conjunct, in model order
    std::vector<ConjunctRef> failing;
};

/// Throws UndecidedFeature if `cfg` leaves any feature undecided.
ValidityReport check_full_configuration(const EncodedModel& e, const Configuration& cfg);

/// Copy of `cfg` with every undecided feature set to Deselected.
Configuration complete_with_deselection(const EncodedModel& e, const Configuration& cfg);

// ----------------------------------------------------------------------------
// Satisfiability

struct Assumption {
    FeatureId feature;
    bool value = false;
};

struct SatResult {
    bool satisfiable = false;
    std::optional<Configuration> witness;  ///< full configuration when satisfiable
};

/// Decides formula ∧ assumptions. Unknown assumption features throw UnknownFeatureError.
SatResult sat(const EncodedModel& e, const std::vector<Assumption>& assumptions,
              SolverBackend backend = SolverBackend::Auto, const RunControl& control = {});

/// Assumptions for every decided feature of `cfg`.
std::vector<Assumption> assumptions_from(const Configuration& cfg);

bool is_void(const EncodedModel& e, SolverBackend backend = SolverBackend::Auto, const RunControl& control = {});

struct FeatureSetResult {
    bool void_model = false;         ///< set when the model has no products; `features` is then empty
    std::vector<FeatureId> features;  ///< preorder
};

/// f is dead iff formula ∧ f is unsatisfiable.
FeatureSetResult dead_features(const EncodedModel& e, SolverBackend backend = SolverBackend::Auto,
                               const RunControl& control = {});

/// f is core iff formula ∧ ¬f is unsatisfiable.
FeatureSetResult core_features(const EncodedModel& e, SolverBackend backend = SolverBackend::Auto,
                               const RunControl& control = {});

// ----------------------------------------------------------------------------
// Counting and enumeration (feature variables only)

/// Throws TooLarge when the model has more than `cap` features.
std::uint64_t count_products(const EncodedModel& e, std::size_t cap = kDefaultCountCap,
                             const RunControl& control = {});

/// Lexicographic in preorder, Deselected before Selected; at most `limit` results.
std::vector<Configuration> enumerate_products(const EncodedModel& e, std::size_t limit,
                                              std::size_t cap = kDefaultCountCap, const RunControl& control = {});

/// Void flag, dead and core features, and the product count when `with_count`.
AnalysisReport analyze(const EncodedModel& e, SolverBackend backend = SolverBackend::Auto, bool with_count = false,
                       std::size_t cap = kDefaultCountCap, const RunControl& control = {});

}  // namespace fmcheck
