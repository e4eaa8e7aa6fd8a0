#include "fmcheck/cnf.hpp"

#include <charconv>
#include <cstdlib>
#include <map>
#include <sstream>
#include <stdexcept>

namespace fmcheck {

using logic::Formula;
using logic::Op;

namespace {

class CnfBuilder {
public:
    explicit CnfBuilder(const EncodedModel& e) : model_(e) {
        out_.feature_names = e.features;
        out_.variable_count = e.features.size();
    }

    void add(const Formula& f, ConjunctRef origin) {
        origin_ = origin;
        Formula folded = logic::fold_constants(f);
        assert_true(folded);
    }

    CnfClauseSet finish() { return std::move(out_); }

private:
    void assert_true(const Formula& f) {
        Literal a = 0;
        Literal b = 0;
        switch (f.op()) {
        case Op::Const:
            if (!f.value()) {
                emit({});
            }
            return;
        case Op::Var: emit({literal(f)}); return;
        case Op::And:
            for (const Formula& g : f.operands()) {
                assert_true(g);
            }
            return;
        case Op::Not: {
            const Formula& inner = f.operands()[0];
            if (inner.op() == Op::Var) {
                emit({-literal(inner)});
            } else if (inner.op() == Op::Not) {
                assert_true(inner.operands()[0]);
            } else if (inner.op() == Op::Or) {
                for (const Formula& g : inner.operands()) {
                    assert_true(Formula::negation(g));
                }
            } else if (std::vector<Literal> ls; inner.op() == Op::And && literals(inner.operands(), ls)) {
                for (Literal& l : ls) {
                    l = -l;
                }
                emit(std::move(ls));
            } else {
                emit({-tseitin(inner)});
            }
            return;
        }
        case Op::Or:
            if (std::vector<Literal> ls; literals(f.operands(), ls)) {
                emit(std::move(ls));
            } else {
                emit({tseitin(f)});
            }
            return;
        case Op::Implies:
            if (as_literal(f.operands()[0], a) && as_literal(f.operands()[1], b)) {
                emit({-a, b});
            } else {
                emit({tseitin(f)});
            }
            return;
        case Op::Iff:
            assert_iff(f);
            return;
        case Op::Xor:
            emit({tseitin(f)});
            return;
        }
    }

    void assert_iff(const Formula& f) {
        const Formula& lhs = f.operands()[0];
        const Formula& rhs = f.operands()[1];
        Literal a = 0;
        Literal b = 0;
        if (as_literal(lhs, a) && as_literal(rhs, b)) {
            emit({-a, b});
            emit({-b, a});
            return;
        }
        // (⋁ c_i) ⇔ p, either orientation
        for (bool flipped : {false, true}) {
            const Formula& side = flipped ? rhs : lhs;
            const Formula& other = flipped ? lhs : rhs;
            Literal p = 0;
            std::vector<Literal> cs;
            if (side.op() == Op::Or && literals(side.operands(), cs) && as_literal(other, p)) {
                for (Literal c : cs) {
                    emit({-c, p});
                }
                cs.insert(cs.begin(), -p);
                emit(std::move(cs));
                return;
            }
            // (a ⊕ b) ⇔ p
            if (side.op() == Op::Xor && as_literal(side.operands()[0], a) && as_literal(side.operands()[1], b) &&
                as_literal(other, p)) {
                emit({-p, a, b});
                emit({-p, -a, -b});
                emit({p, -a, b});
                emit({p, a, -b});
                return;
            }
        }
        emit({tseitin(f)});
    }

    // Literal naming `f`, adding definitional clauses for compound nodes.
    Literal tseitin(const Formula& f) {
        Literal l = 0;
        if (as_literal(f, l)) {
            return l;
        }
        switch (f.op()) {
        case Op::Const: {
            Literal x = fresh();
            emit({f.value() ? x : -x});
            return x;
        }
        case Op::Not: return -tseitin(f.operands()[0]);
        case Op::And:
        case Op::Or: {
            std::vector<Literal> ls;
            for (const Formula& g : f.operands()) {
                ls.push_back(tseitin(g));
            }
            Literal x = fresh();
            int sign = f.op() == Op::And ? 1 : -1;
            // And: x -> l_i, (l_1 & ... & l_k) -> x.  Or is the dual.
            Clause big{sign * x};
            for (Literal li : ls) {
                emit({-sign * x, sign * li});
                big.push_back(-sign * li);
            }
            emit(std::move(big));
            return x;
        }
        case Op::Xor:
        case Op::Iff:
        case Op::Implies: {
            Literal a = tseitin(f.operands()[0]);
            Literal b = tseitin(f.operands()[1]);
            Literal x = fresh();
            if (f.op() == Op::Implies) {
                emit({-x, -a, b});
                emit({x, a});
                emit({x, -b});
            } else {
                if (f.op() == Op::Iff) {
                    b = -b;  // a ⇔ b  ≡  a ⊕ ¬b
                }
                emit({-x, a, b});
                emit({-x, -a, -b});
                emit({x, -a, b});
                emit({x, a, -b});
            }
            return x;
        }
        case Op::Var: break;
        }
        return literal(f);
    }

    bool as_literal(const Formula& f, Literal& out) const {
        if (f.op() == Op::Var) {
            out = literal(f);
            return true;
        }
        if (f.op() == Op::Not && f.operands()[0].op() == Op::Var) {
            out = -literal(f.operands()[0]);
            return true;
        }
        return false;
    }

    bool literals(std::span<const Formula> fs, std::vector<Literal>& out) const {
        out.clear();
        for (const Formula& g : fs) {
            Literal l = 0;
            if (!as_literal(g, l)) {
                return false;
            }
            out.push_back(l);
        }
        return true;
    }

    Literal literal(const Formula& var) const {
        std::size_t index = var.index() != Formula::kNoIndex ? var.index() : model_.index_of(var.name());
        return static_cast<Literal>(index + 1);
    }

    Literal fresh() { return static_cast<Literal>(++out_.variable_count); }

    void emit(Clause clause) {
        out_.clauses.push_back(std::move(clause));
        out_.origins.push_back(origin_);
    }

    const EncodedModel& model_;
    CnfClauseSet out_;
    ConjunctRef origin_;
};

}  // namespace

CnfClauseSet to_cnf(const EncodedModel& e) {
    CnfBuilder builder(e);
    for (ConjunctRef ref : e.conjunct_refs()) {
        builder.add(e.formula_of(ref), ref);
    }
    return builder.finish();
}

std::string to_dimacs(const CnfClauseSet& cnf) {
    std::ostringstream out;
    for (std::size_t i = 0; i < cnf.feature_names.size(); ++i) {
        out << "c map " << (i + 1) << ' ' << cnf.feature_names[i] << '\n';
    }
    out << "p cnf " << cnf.variable_count << ' ' << cnf.clauses.size() << '\n';
    for (const Clause& clause : cnf.clauses) {
        for (Literal l : clause) {
            out << l << ' ';
        }
        out << "0\n";
    }
    return out.str();
}

namespace {

[[noreturn]] void malformed(std::size_t line, const std::string& what) {
    throw std::runtime_error("DIMACS line " + std::to_string(line) + ": " + what);
}

long long parse_int(std::string_view token, std::size_t line) {
    long long value = 0;
    auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), value);
    if (ec != std::errc{} || ptr != token.data() + token.size()) {
        malformed(line, "expected an integer, found '" + std::string(token) + "'");
    }
    return value;
}

}  // namespace

CnfClauseSet parse_dimacs(std::string_view text) {
    CnfClauseSet cnf;
    std::map<long long, FeatureId> names;
    bool have_header = false;
    std::size_t declared_clauses = 0;
    Clause current;
    std::size_t line_no = 0;

    std::size_t pos = 0;
    while (pos <= text.size()) {
        std::size_t eol = text.find('\n', pos);
        if (eol == std::string_view::npos) {
            eol = text.size();
        }
        std::string_view line = text.substr(pos, eol - pos);
        pos = eol + 1;
        ++line_no;
        if (!line.empty() && line.back() == '\r') {
            line.remove_suffix(1);
        }
        std::istringstream words{std::string(line)};
        std::string word;
        if (!(words >> word)) {
            continue;
        }
        if (word == "c") {
            std::string tag;
            std::string index;
            std::string name;
            if (words >> tag >> index >> name && tag == "map") {
                names[parse_int(index, line_no)] = name;
            }
            continue;
        }
        if (word == "%") {
            break;
        }
        if (word == "p") {
            std::string format;
            std::string vars;
            std::string clauses;
            if (have_header || !(words >> format >> vars >> clauses) || format != "cnf") {
                malformed(line_no, "bad problem line");
            }
            long long v = parse_int(vars, line_no);
            long long c = parse_int(clauses, line_no);
            if (v < 0 || c < 0) {
                malformed(line_no, "negative counts in problem line");
            }
            cnf.variable_count = static_cast<std::size_t>(v);
            declared_clauses = static_cast<std::size_t>(c);
            have_header = true;
            continue;
        }
        if (!have_header) {
            malformed(line_no, "clause before problem line");
        }
        do {
            long long l = parse_int(word, line_no);
            if (l == 0) {
                cnf.clauses.push_back(std::move(current));
                current.clear();
            } else {
                if (static_cast<std::size_t>(std::llabs(l)) > cnf.variable_count) {
                    malformed(line_no, "literal " + word + " exceeds variable count");
                }
                current.push_back(static_cast<Literal>(l));
            }
        } while (words >> word);
    }
    if (!have_header) {
        malformed(line_no, "missing problem line");
    }
    if (!current.empty()) {
        malformed(line_no, "unterminated clause");
    }
    if (cnf.clauses.size() != declared_clauses) {
        malformed(line_no, "expected " + std::to_string(declared_clauses) + " clauses, read " +
                               std::to_string(cnf.clauses.size()));
    }
    long long expected = 1;
    for (const auto& [index, name] : names) {
        if (index != expected++ || static_cast<std::size_t>(index) > cnf.variable_count) {
            malformed(line_no, "feature map is not contiguous from 1");
        }
        cnf.feature_names.push_back(name);
    }
    cnf.origins.assign(cnf.clauses.size(), ConjunctRef{});
    return cnf;
}

}  // namespace fmcheck
