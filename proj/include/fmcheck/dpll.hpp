#pragma once

/**
 * @file dpll.hpp
 * @brief Plain DPLL: watched-literal unit propagation, chronological
 * backtracking, no clause learning.
 *
 * Branching picks the lowest-numbered unassigned variable (preorder for
 * feature variables) and tries false first, so the first model found leans
 * towards small products.
 */

#include "fmcheck/cnf.hpp"

#include <cstdint>
#include <span>
#include <stop_token>
#include <vector>

namespace fmcheck::solver {

class DpllSolver {
public:
    explicit DpllSolver(const CnfClauseSet& cnf);

    /// Decides the clause set under `assumptions`. Throws Cancelled when `stop` fires.
    bool solve(std::span<const Literal> assumptions = {}, std::stop_token stop = {});

    /// Value of variable v (1-based) in the last model found.
    bool value(std::size_t var) const { return model_.at(var - 1); }
    const std::vector<bool>& model() const { return model_; }

    std::uint64_t decisions() const { return decisions_; }

private:
    static std::size_t code(Literal l) { return 2 * static_cast<std::size_t>(l > 0 ? l : -l) + (l < 0 ? 1 : 0); }
    std::int8_t value_of(Literal l) const {
        std::int8_t v = assigns_[static_cast<std::size_t>(l > 0 ? l : -l)];
        return l > 0 ? v : static_cast<std::int8_t>(-v);
    }

    bool enqueue(Literal l);
    bool propagate();
    void cancel_until(std::size_t level);
    void reset();

    std::size_t variable_count_ = 0;
    bool trivially_unsat_ = false;
    std::vector<Clause> clauses_;
    std::vector<Literal> units_;
    std::vector<std::vector<std::size_t>> watches_;  // literal code -> clauses watching it
    std::vector<std::int8_t> assigns_;               // 1-based; 0 unassigned, 1 true, -1 false
    std::vector<Literal> trail_;
    std::vector<std::size_t> trail_lim_;
    std::vector<bool> flipped_;
    std::size_t qhead_ = 0;
    std::vector<bool> model_;
    std::uint64_t decisions_ = 0;
};

}  // namespace fmcheck::solver
