#include "fmcheck/formula.hpp"

#include <algorithm>
#include <array>
#include <stdexcept>
#include <unordered_set>

namespace fmcheck::logic {

Formula Formula::make(Node node) { return Formula(std::make_shared<const Node>(std::move(node))); }

Formula Formula::constant(bool value) {
    Node n;
    n.op = Op::Const;
    n.value = value;
    return make(std::move(n));
}

Formula Formula::var(FeatureId name, std::size_t index) {
    Node n;
    n.op = Op::Var;
    n.name = std::move(name);
    n.index = index;
    return make(std::move(n));
}

Formula Formula::negation(Formula operand) {
    Node n;
    n.op = Op::Not;
    n.operands.push_back(std::move(operand));
    return make(std::move(n));
}

Formula Formula::conjunction(std::vector<Formula> operands) {
    if (operands.size() < 2) {
        throw std::invalid_argument("conjunction needs at least two operands");
    }
    Node n;
    n.op = Op::And;
    n.operands = std::move(operands);
    return make(std::move(n));
}

Formula Formula::disjunction(std::vector<Formula> operands) {
    if (operands.size() < 2) {
        throw std::invalid_argument("disjunction needs at least two operands");
    }
    Node n;
    n.op = Op::Or;
    n.operands = std::move(operands);
    return make(std::move(n));
}

Formula Formula::exclusive_or(Formula lhs, Formula rhs) {
    Node n;
    n.op = Op::Xor;
    n.operands = {std::move(lhs), std::move(rhs)};
    return make(std::move(n));
}

Formula Formula::implies(Formula lhs, Formula rhs) {
    Node n;
    n.op = Op::Implies;
    n.operands = {std::move(lhs), std::move(rhs)};
    return make(std::move(n));
}

Formula Formula::iff(Formula lhs, Formula rhs) {
    Node n;
    n.op = Op::Iff;
    n.operands = {std::move(lhs), std::move(rhs)};
    return make(std::move(n));
}

bool Formula::is_literal() const {
    return op() == Op::Var || (op() == Op::Not && operands()[0].op() == Op::Var);
}

bool Formula::operator==(const Formula& other) const {
    if (node_ == other.node_) {
        return true;
    }
    if (op() != other.op()) {
        return false;
    }
    switch (op()) {
    case Op::Const: return value() == other.value();
    case Op::Var: return name() == other.name();
    default:
        return std::equal(operands().begin(), operands().end(), other.operands().begin(), other.operands().end());
    }
}

namespace {

Formula binary(Op op, Formula lhs, Formula rhs) {
    switch (op) {
    case Op::Xor: return Formula::exclusive_or(std::move(lhs), std::move(rhs));
    case Op::Implies: return Formula::implies(std::move(lhs), std::move(rhs));
    default: return Formula::iff(std::move(lhs), std::move(rhs));
    }
}

}  // namespace

Formula all_of(std::vector<Formula> operands) {
    if (operands.empty()) {
        return Formula::constant(true);
    }
    if (operands.size() == 1) {
        return std::move(operands.front());
    }
    return Formula::conjunction(std::move(operands));
}

Formula any_of(std::vector<Formula> operands) {
    if (operands.empty()) {
        return Formula::constant(false);
    }
    if (operands.size() == 1) {
        return std::move(operands.front());
    }
    return Formula::disjunction(std::move(operands));
}

namespace {

struct Glyphs {
    std::string_view not_, and_, or_, xor_, implies, iff, top, bottom;
};

constexpr Glyphs kUnicode{"¬", " ∧ ", " ∨ ", " ⊕ ", " ⇒ ", " ⇔ ", "⊤", "⊥"};
constexpr Glyphs kAscii{"!", " & ", " | ", " ^ ", " -> ", " <-> ", "true", "false"};

void render(const Formula& f, const Glyphs& g, std::string& out);

void render_operand(const Formula& f, const Glyphs& g, std::string& out) {
    bool atomic = f.op() == Op::Var || f.op() == Op::Const || f.op() == Op::Not;
    if (!atomic) {
        out += '(';
    }
    render(f, g, out);
    if (!atomic) {
        out += ')';
    }
}

void render(const Formula& f, const Glyphs& g, std::string& out) {
    switch (f.op()) {
    case Op::Const: out += f.value() ? g.top : g.bottom; return;
    case Op::Var: out += f.name(); return;
    case Op::Not:
        out += g.not_;
        render_operand(f.operands()[0], g, out);
        return;
    default: break;
    }
    std::string_view sep;
    switch (f.op()) {
    case Op::And: sep = g.and_; break;
    case Op::Or: sep = g.or_; break;
    case Op::Xor: sep = g.xor_; break;
    case Op::Implies: sep = g.implies; break;
    default: sep = g.iff; break;
    }
    bool first = true;
    for (const Formula& operand : f.operands()) {
        if (!first) {
            out += sep;
        }
        first = false;
        render_operand(operand, g, out);
    }
}

}  // namespace

std::string to_string(const Formula& f, Notation notation) {
    std::string out;
    render(f, notation == Notation::Unicode ? kUnicode : kAscii, out);
    return out;
}

bool eval_formula(const Formula& f, const Configuration& assignment) {
    switch (f.op()) {
    case Op::Const: return f.value();
    case Op::Var: {
        Decision d = assignment.get(f.name());
        if (d == Decision::Undecided) {
            throw UndecidedFeature(f.name());
        }
        return d == Decision::Selected;
    }
    case Op::Not: return !eval_formula(f.operands()[0], assignment);
    case Op::And: {
        // Evaluate every operand so an undecided variable is always reported.
        bool result = true;
        for (const Formula& g : f.operands()) {
            result = eval_formula(g, assignment) && result;
        }
        return result;
    }
    case Op::Or: {
        bool result = false;
        for (const Formula& g : f.operands()) {
            result = eval_formula(g, assignment) || result;
        }
        return result;
    }
    case Op::Xor: return eval_formula(f.operands()[0], assignment) != eval_formula(f.operands()[1], assignment);
    case Op::Implies: {
        bool lhs = eval_formula(f.operands()[0], assignment);
        bool rhs = eval_formula(f.operands()[1], assignment);
        return !lhs || rhs;
    }
    case Op::Iff: return eval_formula(f.operands()[0], assignment) == eval_formula(f.operands()[1], assignment);
    }
    return false;
}

Formula fold_constants(const Formula& f) {
    switch (f.op()) {
    case Op::Const:
    case Op::Var: return f;
    case Op::Not: {
        Formula inner = fold_constants(f.operands()[0]);
        if (inner.op() == Op::Const) {
            return Formula::constant(!inner.value());
        }
        return Formula::negation(std::move(inner));
    }
    case Op::And:
    case Op::Or: {
        bool is_and = f.op() == Op::And;
        std::vector<Formula> kept;
        for (const Formula& g : f.operands()) {
            Formula h = fold_constants(g);
            if (h.op() == Op::Const) {
                if (h.value() != is_and) {
                    return Formula::constant(!is_and);  // absorbing element
                }
                continue;  // neutral element
            }
            kept.push_back(std::move(h));
        }
        return is_and ? all_of(std::move(kept)) : any_of(std::move(kept));
    }
    default: break;
    }
    Formula lhs = fold_constants(f.operands()[0]);
    Formula rhs = fold_constants(f.operands()[1]);
    bool lc = lhs.op() == Op::Const;
    bool rc = rhs.op() == Op::Const;
    if (lc && rc) {
        bool a = lhs.value();
        bool b = rhs.value();
        switch (f.op()) {
        case Op::Xor: return Formula::constant(a != b);
        case Op::Implies: return Formula::constant(!a || b);
        default: return Formula::constant(a == b);
        }
    }
    auto maybe_not = [](Formula g, bool negate) { return negate ? Formula::negation(std::move(g)) : g; };
    switch (f.op()) {
    case Op::Xor:
        if (lc) return maybe_not(rhs, lhs.value());
        if (rc) return maybe_not(lhs, rhs.value());
        return binary(Op::Xor, lhs, rhs);
    case Op::Implies:
        if (lc) return lhs.value() ? rhs : Formula::constant(true);
        if (rc) return rhs.value() ? Formula::constant(true) : Formula::negation(lhs);
        return binary(Op::Implies, lhs, rhs);
    default:
        if (lc) return maybe_not(rhs, !lhs.value());
        if (rc) return maybe_not(lhs, !rhs.value());
        return binary(Op::Iff, lhs, rhs);
    }
}

namespace {

void collect_variables(const Formula& f, std::unordered_set<FeatureId>& seen, std::vector<FeatureId>& out) {
    if (f.op() == Op::Var) {
        if (seen.insert(f.name()).second) {
            out.push_back(f.name());
        }
        return;
    }
    for (const Formula& g : f.operands()) {
        collect_variables(g, seen, out);
    }
}

}  // namespace

std::vector<FeatureId> variables(const Formula& f) {
    std::unordered_set<FeatureId> seen;
    std::vector<FeatureId> out;
    collect_variables(f, seen, out);
    return out;
}

FlatFormula::FlatFormula(const Formula& f, std::size_t lexicographic_width) : width_(lexicographic_width) {
    compile(f);
    std::size_t depth = 0;
    for (const Instr& in : code_) {
        if (in.op == Op::Var || in.op == Op::Const) {
            ++depth;
        } else if (in.op == Op::And || in.op == Op::Or) {
            depth -= in.arg - 1;
        } else if (in.op != Op::Not) {
            depth -= 1;
        }
        max_stack_ = std::max(max_stack_, depth);
    }
}

void FlatFormula::compile(const Formula& f) {
    switch (f.op()) {
    case Op::Const: code_.push_back({Op::Const, f.value() ? 1u : 0u}); return;
    case Op::Var: {
        std::size_t bit = f.index();
        if (width_ != 0 && bit < width_) {
            bit = width_ - 1 - bit;
        } else if (width_ != 0) {
            bit = 64;
        }
        if (bit >= 64) {
            throw std::invalid_argument("variable '" + f.name() + "' has no usable index");
        }
        code_.push_back({Op::Var, static_cast<std::uint32_t>(bit)});
        return;
    }
    default: break;
    }
    for (const Formula& g : f.operands()) {
        compile(g);
    }
    code_.push_back({f.op(), static_cast<std::uint32_t>(f.operands().size())});
}

bool FlatFormula::evaluate(std::uint64_t assignment) const {
    constexpr std::size_t kInline = 64;
    std::array<bool, kInline> small{};
    std::unique_ptr<bool[]> large;
    bool* stack = small.data();
    if (max_stack_ > kInline) {
        large = std::make_unique<bool[]>(max_stack_);
        stack = large.get();
    }
    std::size_t top = 0;
    for (const Instr& in : code_) {
        switch (in.op) {
        case Op::Const: stack[top++] = in.arg != 0; break;
        case Op::Var: stack[top++] = ((assignment >> in.arg) & 1u) != 0; break;
        case Op::Not: stack[top - 1] = !stack[top - 1]; break;
        case Op::And:
        case Op::Or: {
            bool is_and = in.op == Op::And;
            bool r = is_and;
            for (std::uint32_t i = 0; i < in.arg; ++i) {
                r = is_and ? (r && stack[top - 1 - i]) : (r || stack[top - 1 - i]);
            }
            top -= in.arg;
            stack[top++] = r;
            break;
        }
        case Op::Xor: --top; stack[top - 1] = stack[top - 1] != stack[top]; break;
        case Op::Implies: --top; stack[top - 1] = !stack[top - 1] || stack[top]; break;
        case Op::Iff: --top; stack[top - 1] = stack[top - 1] == stack[top]; break;
        }
    }
    return stack[0];
}

}  // namespace fmcheck::logic
