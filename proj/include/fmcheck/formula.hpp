#pragma once

/**
 * @file formula.hpp
 * @brief Propositional formulas over feature variables.
 *
 * Formula is an immutable handle to a shared expression tree. Variables
 * carry the feature id and, when built by the encoder, the feature's
 * preorder position so evaluators can work on bit vectors.
 */

#include "fmcheck/model.hpp"

#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <vector>

namespace fmcheck::logic {

enum class Op : std::uint8_t { Const, Var, Not, And, Or, Xor, Implies, Iff };

class Formula {
public:
    static constexpr std::size_t kNoIndex = static_cast<std::size_t>(-1);

    static Formula constant(bool value);
    static Formula var(FeatureId name, std::size_t index = kNoIndex);
    static Formula negation(Formula operand);
    /// Requires at least two operands.
    static Formula conjunction(std::vector<Formula> operands);
    /// Requires at least two operands.
    static Formula disjunction(std::vector<Formula> operands);
    static Formula exclusive_or(Formula lhs, Formula rhs);
    static Formula implies(Formula lhs, Formula rhs);
    static Formula iff(Formula lhs, Formula rhs);

    Op op() const { return node_->op; }
    bool value() const { return node_->value; }
    const FeatureId& name() const { return node_->name; }
    std::size_t index() const { return node_->index; }
    std::span<const Formula> operands() const { return node_->operands; }

    /// Var, or Not(Var).
    bool is_literal() const;

    bool operator==(const Formula& other) const;

private:
    struct Node {
        Op op = Op::Const;
        bool value = false;
        FeatureId name;
        std::size_t index = kNoIndex;
        std::vector<Formula> operands;
    };

    explicit Formula(std::shared_ptr<const Node> node) : node_(std::move(node)) {}
    static Formula make(Node node);

    std::shared_ptr<const Node> node_;
};

/// Conjunction that tolerates short lists: {} is true, {f} is f.
Formula all_of(std::vector<Formula> operands);
/// Disjunction that tolerates short lists: {} is false, {f} is f.
Formula any_of(std::vector<Formula> operands);

enum class Notation { Unicode, Ascii };

/**
 * Infix rendering. Compound operands of a binary or n-ary connective are
 * parenthesised, so `(v1.1 ⊕ v1.2) ⇔ v1` prints exactly that way.
 * ASCII glyphs: `!`, `&`, `|`, `^`, `->`, `<->`.
 */
std::string to_string(const Formula& f, Notation notation = Notation::Unicode);

/// Truth-functional evaluation. Throws UndecidedFeature for an undecided variable.
bool eval_formula(const Formula& f, const Configuration& assignment);

/// Removes Const nodes, or collapses the whole formula to a single Const.
Formula fold_constants(const Formula& f);

/// Every variable name, in first-occurrence order.
std::vector<FeatureId> variables(const Formula& f);

/**
 * Postfix program over indexed variables for tight enumeration loops.
 * Variable with index i reads bit i of the assignment word, or bit
 * (width - 1 - i) when built with a non-zero `lexicographic_width`; in that
 * mode counting the word upwards visits assignments in lexicographic order
 * of the variable indices with false before true.
 */
class FlatFormula {
public:
    /// Throws std::invalid_argument if a variable has no index or its bit is >= 64.
    explicit FlatFormula(const Formula& f, std::size_t lexicographic_width = 0);

    bool evaluate(std::uint64_t assignment) const;

private:
    struct Instr {
        Op op;
        std::uint32_t arg;  // variable index, constant value, or operand count
    };
    void compile(const Formula& f);

    std::vector<Instr> code_;
    std::size_t width_ = 0;
    std::size_t max_stack_ = 0;
};

}  // namespace fmcheck::logic
