#pragma once

/**
 * @file cnf.hpp
 * @brief Clause form of an encoded model and DIMACS import/export.
 *
 * Feature variables are numbered 1..n in preorder; Tseitin auxiliaries
 * follow from n+1. Shapes the encoder emits (literal biconditionals,
 * implications, `(⋁ c_i) ⇔ p`, `(a ⊕ b) ⇔ p`, negated conjunctions of
 * literals) get direct clauses; anything else is named by an auxiliary.
 */

#include "fmcheck/encoder.hpp"

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace fmcheck {

using Literal = std::int32_t;
using Clause = std::vector<Literal>;

struct CnfClauseSet {
    std::vector<FeatureId> feature_names;  ///< variable v (1-based) is feature_names[v-1]
    std::size_t variable_count = 0;        ///< features plus auxiliaries
    std::vector<Clause> clauses;
    std::vector<ConjunctRef> origins;      ///< conjunct each clause was derived from

    std::size_t feature_count() const { return feature_names.size(); }
};

CnfClauseSet to_cnf(const EncodedModel& e);

/// `c map <v> <id>` lines in preorder, then `p cnf <vars> <clauses>`, then clauses.
std::string to_dimacs(const CnfClauseSet& cnf);

/**
 * Reads DIMACS CNF. `c map` comments restore feature names; other comment
 * lines are ignored. Throws std::runtime_error on malformed input.
 */
CnfClauseSet parse_dimacs(std::string_view text);

}  // namespace fmcheck
