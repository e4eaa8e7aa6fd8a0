#include "fmcheck/analysis.hpp"

#include "fmcheck/cnf.hpp"
#include "fmcheck/dpll.hpp"
#include "fmcheck/formula.hpp"

#include <algorithm>
#include <bit>
#include <cstdlib>

namespace fmcheck {

using logic::Formula;

SolverBackend resolve_backend(SolverBackend backend, std::size_t feature_count) {
    if (backend != SolverBackend::Auto) {
        return backend;
    }
    return feature_count <= kAutoBruteForceLimit ? SolverBackend::BruteForce : SolverBackend::Dpll;
}

std::string_view to_string(SolverBackend backend) {
    switch (backend) {
    case SolverBackend::BruteForce: return "brute";
    case SolverBackend::Dpll: return "dpll";
    case SolverBackend::Auto: return "auto";
    }
    return "?";
}

std::optional<SolverBackend> backend_from_string(std::string_view text) {
    if (text == "brute") return SolverBackend::BruteForce;
    if (text == "dpll") return SolverBackend::Dpll;
    if (text == "auto") return SolverBackend::Auto;
    return std::nullopt;
}

namespace {

void check_keys(const EncodedModel& e, const Configuration& cfg) {
    for (const auto& [id, decision] : cfg.decisions()) {
        if (!e.contains(id)) {
            throw UnknownFeatureError(id);
        }
    }
}

// Exhaustive search over feature variables. Variable i lives in bit
// (n - 1 - i), so numeric order is lexicographic preorder order.
class Enumerator {
public:
    explicit Enumerator(const EncodedModel& e) : n_(e.features.size()) {
        if (n_ > kEnumerationCeiling) {
            throw TooLarge(n_, kEnumerationCeiling);
        }
        for (ConjunctRef ref : e.conjunct_refs()) {
            const Formula& f = e.formula_of(ref);
            if (f.op() == logic::Op::And) {
                for (const Formula& part : f.operands()) {
                    programs_.emplace_back(part, n_);
                }
            } else {
                programs_.emplace_back(f, n_);
            }
        }
    }

    std::uint64_t bit(std::size_t var) const { return std::uint64_t{1} << (n_ - 1 - var); }

    bool satisfies(std::uint64_t word) const {
        for (const logic::FlatFormula& p : programs_) {
            if (!p.evaluate(word)) {
                return false;
            }
        }
        return true;
    }

    /// Calls `visit(word)` for each model agreeing with `values` on `mask`, in order; stops when it returns false.
    template <class Visit>
    void for_each_model(std::uint64_t mask, std::uint64_t values, const RunControl& control, Visit visit) const {
        const std::uint64_t all = n_ == 64 ? ~std::uint64_t{0} : (std::uint64_t{1} << n_) - 1;
        const std::uint64_t free = all & ~mask;
        const std::uint64_t total = std::uint64_t{1} << std::popcount(free);
        std::uint64_t word = values & mask;
        for (std::uint64_t done = 0;; ++done) {
            if ((done & 0xffffu) == 0) {
                if (control.stop.stop_requested()) {
                    throw Cancelled();
                }
                if (control.progress && done != 0) {
                    control.progress(done, total);
                }
            }
            if (satisfies(word) && !visit(word)) {
                break;
            }
            if ((word & free) == free) {
                break;
            }
            word = (((word | mask) + 1) & free) | (values & mask);
        }
        if (control.progress) {
            control.progress(total, total);
        }
    }

    Configuration configuration(std::uint64_t word, const std::vector<FeatureId>& features) const {
        Configuration cfg;
        for (std::size_t i = 0; i < n_; ++i) {
            cfg.set(features[i], (word & bit(i)) != 0 ? Decision::Selected : Decision::Deselected);
        }
        return cfg;
    }

    std::size_t size() const { return n_; }

private:
    std::size_t n_;
    std::vector<logic::FlatFormula> programs_;
};

Configuration witness_from(const solver::DpllSolver& solver, const EncodedModel& e) {
    Configuration cfg;
    for (std::size_t i = 0; i < e.features.size(); ++i) {
        cfg.set(e.features[i], solver.value(i + 1) ? Decision::Selected : Decision::Deselected);
    }
    return cfg;
}

std::vector<Literal> literals_for(const EncodedModel& e, const std::vector<Assumption>& assumptions) {
    std::vector<Literal> out;
    for (const Assumption& a : assumptions) {
        auto var = static_cast<Literal>(e.index_of(a.feature) + 1);
        out.push_back(a.value ? var : -var);
    }
    return out;
}

struct Occurrence {
    bool any_model = false;
    std::vector<bool> ever_true;
    std::vector<bool> ever_false;
};

Occurrence occurrence_brute(const EncodedModel& e, const RunControl& control) {
    Enumerator en(e);
    std::uint64_t any = 0;
    std::uint64_t all = ~std::uint64_t{0};
    bool found = false;
    en.for_each_model(0, 0, control, [&](std::uint64_t word) {
        found = true;
        any |= word;
        all &= word;
        return true;
    });
    Occurrence occ;
    occ.any_model = found;
    for (std::size_t i = 0; i < en.size(); ++i) {
        occ.ever_true.push_back(found && (any & en.bit(i)) != 0);
        occ.ever_false.push_back(found && (all & en.bit(i)) == 0);
    }
    return occ;
}

// Probes one polarity per feature, skipping features a previous model already settled.
Occurrence occurrence_dpll(const EncodedModel& e, bool probe_true, const RunControl& control) {
    CnfClauseSet cnf = to_cnf(e);
    solver::DpllSolver solver(cnf);
    Occurrence occ;
    const std::size_t n = e.features.size();
    occ.ever_true.assign(n, false);
    occ.ever_false.assign(n, false);
    auto absorb = [&] {
        for (std::size_t i = 0; i < n; ++i) {
            (solver.value(i + 1) ? occ.ever_true : occ.ever_false)[i] = true;
        }
    };
    occ.any_model = solver.solve({}, control.stop);
    if (!occ.any_model) {
        occ.ever_true.assign(n, false);
        occ.ever_false.assign(n, false);
        return occ;
    }
    absorb();
    for (std::size_t i = 0; i < n; ++i) {
        if (control.stop.stop_requested()) {
            throw Cancelled();
        }
        if (control.progress) {
            control.progress(i, n);
        }
        std::vector<bool>& settled = probe_true ? occ.ever_true : occ.ever_false;
        if (settled[i]) {
            continue;
        }
        auto var = static_cast<Literal>(i + 1);
        Literal probe = probe_true ? var : -var;
        if (solver.solve(std::span<const Literal>(&probe, 1), control.stop)) {
            absorb();
        }
    }
    if (control.progress) {
        control.progress(n, n);
    }
    return occ;
}

FeatureSetResult feature_set(const EncodedModel& e, SolverBackend backend, const RunControl& control, bool dead) {
    backend = resolve_backend(backend, e.features.size());
    Occurrence occ = backend == SolverBackend::BruteForce ? occurrence_brute(e, control)
                                                          : occurrence_dpll(e, dead, control);
    FeatureSetResult result;
    if (!occ.any_model) {
        result.void_model = true;
        return result;
    }
    for (std::size_t i = 0; i < e.features.size(); ++i) {
        bool member = dead ? !occ.ever_true[i] : !occ.ever_false[i];
        if (member) {
            result.features.push_back(e.features[i]);
        }
    }
    return result;
}

void check_cap(const EncodedModel& e, std::size_t cap) {
    std::size_t limit = std::min(cap, kEnumerationCeiling);
    if (e.features.size() > limit) {
        throw TooLarge(e.features.size(), limit);
    }
}

}  // namespace

ValidityReport check_full_configuration(const EncodedModel& e, const Configuration& cfg) {
    check_keys(e, cfg);
    for (const FeatureId& id : e.features) {
        if (cfg.get(id) == Decision::Undecided) {
            throw UndecidedFeature(id);
        }
    }
    ValidityReport report;
    report.valid = true;
    for (ConjunctRef ref : e.conjunct_refs()) {
        bool value = logic::eval_formula(e.formula_of(ref), cfg);
        report.conjuncts.push_back({ref, value});
        if (!value) {
            report.valid = false;
            report.failing.push_back(ref);
        }
    }
    return report;
}

Configuration complete_with_deselection(const EncodedModel& e, const Configuration& cfg) {
    Configuration out = cfg;
    for (const FeatureId& id : e.features) {
        if (out.get(id) == Decision::Undecided) {
            out.deselect(id);
        }
    }
    return out;
}

std::vector<Assumption> assumptions_from(const Configuration& cfg) {
    std::vector<Assumption> out;
    for (const auto& [id, decision] : cfg.decisions()) {
        out.push_back({id, decision == Decision::Selected});
    }
    return out;
}

SatResult sat(const EncodedModel& e, const std::vector<Assumption>& assumptions, SolverBackend backend,
              const RunControl& control) {
    std::vector<Literal> lits = literals_for(e, assumptions);
    SatResult result;
    if (resolve_backend(backend, e.features.size()) == SolverBackend::BruteForce) {
        Enumerator en(e);
        std::uint64_t mask = 0;
        std::uint64_t values = 0;
        for (Literal l : lits) {
            std::uint64_t b = en.bit(static_cast<std::size_t>(std::abs(l)) - 1);
            if ((mask & b) != 0 && ((values & b) != 0) != (l > 0)) {
                return result;  // contradictory assumptions
            }
            mask |= b;
            if (l > 0) {
                values |= b;
            }
        }
        en.for_each_model(mask, values, control, [&](std::uint64_t word) {
            result.satisfiable = true;
            result.witness = en.configuration(word, e.features);
            return false;
        });
        return result;
    }
    CnfClauseSet cnf = to_cnf(e);
    solver::DpllSolver solver(cnf);
    if (solver.solve(lits, control.stop)) {
        result.satisfiable = true;
        result.witness = witness_from(solver, e);
    }
    return result;
}

bool is_void(const EncodedModel& e, SolverBackend backend, const RunControl& control) {
    return !sat(e, {}, backend, control).satisfiable;
}

FeatureSetResult dead_features(const EncodedModel& e, SolverBackend backend, const RunControl& control) {
    return feature_set(e, backend, control, true);
}

FeatureSetResult core_features(const EncodedModel& e, SolverBackend backend, const RunControl& control) {
    return feature_set(e, backend, control, false);
}

std::uint64_t count_products(const EncodedModel& e, std::size_t cap, const RunControl& control) {
    check_cap(e, cap);
    Enumerator en(e);
    std::uint64_t count = 0;
    en.for_each_model(0, 0, control, [&](std::uint64_t) {
        ++count;
        return true;
    });
    return count;
}

std::vector<Configuration> enumerate_products(const EncodedModel& e, std::size_t limit, std::size_t cap,
                                              const RunControl& control) {
    check_cap(e, cap);
    std::vector<Configuration> out;
    if (limit == 0) {
        return out;
    }
    Enumerator en(e);
    en.for_each_model(0, 0, control, [&](std::uint64_t word) {
        out.push_back(en.configuration(word, e.features));
        return out.size() < limit;
    });
    return out;
}

AnalysisReport analyze(const EncodedModel& e, SolverBackend backend, bool with_count, std::size_t cap,
                       const RunControl& control) {
    AnalysisReport report;
    if (with_count) {
        check_cap(e, cap);
    }
    FeatureSetResult dead = dead_features(e, backend, control);
    report.is_void = dead.void_model;
    if (!report.is_void) {
        report.dead_features = std::move(dead.features);
        report.core_features = core_features(e, backend, control).features;
    }
    if (with_count) {
        report.product_count = count_products(e, cap, control);
    }
    return report;
}

}  // namespace fmcheck
