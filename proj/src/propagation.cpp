#include "fmcheck/propagation.hpp"

#include "fmcheck/cnf.hpp"

#include <algorithm>
#include <cstdlib>

namespace fmcheck {

const Derivation* PropagationResult::derivation_of(const FeatureId& id) const {
    for (const Derivation& d : derivations) {
        if (d.feature == id) {
            return &d;
        }
    }
    return nullptr;
}

std::string format_step(const ConflictStep& step) {
    return step.feature + " = " + (step.value ? "T" : "F") + " by " + step.description;
}

namespace {

constexpr std::ptrdiff_t kUser = -1;

class Propagator {
public:
    Propagator(const EncodedModel& e, CnfClauseSet cnf)
        : e_(e),
          cnf_(std::move(cnf)),
          value_(cnf_.variable_count + 1, 0),
          reason_(cnf_.variable_count + 1, kUser),
          position_(cnf_.variable_count + 1, 0) {}

    PropagationResult run(const Configuration& user) {
        for (const auto& [id, decision] : user.decisions()) {
            auto var = static_cast<Literal>(e_.index_of(id) + 1);
            assign(decision == Decision::Selected ? var : -var, kUser);
        }
        bool changed = true;
        while (changed && !result_.conflict) {
            changed = false;
            for (std::size_t ci = 0; ci < cnf_.clauses.size() && !result_.conflict; ++ci) {
                changed = visit_clause(ci) || changed;
            }
        }
        finish();
        return std::move(result_);
    }

private:
    // Returns true when the clause forced a new value.
    bool visit_clause(std::size_t ci) {
        const Clause& clause = cnf_.clauses[ci];
        Literal open = 0;
        std::size_t open_count = 0;
        for (Literal l : clause) {
            int v = value(l);
            if (v > 0) {
                return false;
            }
            if (v == 0) {
                open = l;
                ++open_count;
            }
        }
        if (open_count == 0) {
            report_conflict(ci);
            return false;
        }
        if (open_count == 1) {
            assign(open, static_cast<std::ptrdiff_t>(ci));
            return true;
        }
        return false;
    }

    void report_conflict(std::size_t ci) {
        const Clause& clause = cnf_.clauses[ci];
        const std::size_t n = cnf_.feature_count();
        // The clause fails on its most recently assigned literal; prefer a feature variable.
        Literal culprit = 0;
        for (bool features_only : {true, false}) {
            for (Literal l : clause) {
                std::size_t v = var(l);
                if (features_only && v > n) {
                    continue;
                }
                if (culprit == 0 || position_[v] > position_[var(culprit)]) {
                    culprit = l;
                }
            }
            if (culprit != 0) {
                break;
            }
        }

        ConflictReport report;
        if (culprit == 0) {
            // Only an empty clause can get here.
            report.conflicting_feature = e_.features.front();
            report.forced_value = true;
            report.cause_chain.push_back(
                step(cnf_.origins[ci], report.conflicting_feature, report.forced_value));
            result_.conflict = std::move(report);
            return;
        }
        std::vector<bool> seen(cnf_.variable_count + 1, false);
        std::vector<std::size_t> ancestry;
        for (Literal l : clause) {
            collect(var(l), seen, ancestry);
        }
        std::sort(ancestry.begin(), ancestry.end(),
                  [&](std::size_t a, std::size_t b) { return position_[a] < position_[b]; });
        for (std::size_t v : ancestry) {
            if (v <= n) {
                report.cause_chain.push_back(step(origin(v), e_.features[v - 1], value_[v] > 0));
            }
        }
        std::size_t cv = var(culprit) <= n ? var(culprit) : 1;
        report.conflicting_feature = e_.features[cv - 1];
        report.forced_value = culprit > 0;
        report.cause_chain.push_back(step(cnf_.origins[ci], report.conflicting_feature, report.forced_value));
        result_.conflict = std::move(report);
    }

    // Derived (non-user) assignments the value of `v` depends on, including v itself.
    void collect(std::size_t v, std::vector<bool>& seen, std::vector<std::size_t>& out) const {
        if (seen[v] || reason_[v] == kUser || value_[v] == 0) {
            return;
        }
        seen[v] = true;
        out.push_back(v);
        for (Literal l : cnf_.clauses[static_cast<std::size_t>(reason_[v])]) {
            if (var(l) != v) {
                collect(var(l), seen, out);
            }
        }
    }

    void finish() {
        const std::size_t n = cnf_.feature_count();
        for (Literal l : trail_) {
            std::size_t v = var(l);
            if (v > n) {
                continue;
            }
            const FeatureId& id = e_.features[v - 1];
            result_.decisions.set(id, l > 0 ? Decision::Selected : Decision::Deselected);
            if (reason_[v] == kUser) {
                continue;
            }
            Derivation d;
            d.feature = id;
            d.value = l > 0;
            d.reason = origin(v);
            d.description = e_.describe(d.reason);
            for (Literal other : cnf_.clauses[static_cast<std::size_t>(reason_[v])]) {
                if (var(other) != v && var(other) <= n) {
                    d.premises.push_back(e_.features[var(other) - 1]);
                }
            }
            result_.derivations.push_back(std::move(d));
        }
    }

    ConflictStep step(ConjunctRef ref, const FeatureId& feature, bool value) const {
        return {ref, feature, value, e_.describe(ref)};
    }

    ConjunctRef origin(std::size_t v) const { return cnf_.origins[static_cast<std::size_t>(reason_[v])]; }

    void assign(Literal l, std::ptrdiff_t reason) {
        std::size_t v = var(l);
        value_[v] = l > 0 ? 1 : -1;
        reason_[v] = reason;
        position_[v] = trail_.size();
        trail_.push_back(l);
    }

    int value(Literal l) const {
        int v = value_[var(l)];
        return l > 0 ? v : -v;
    }

    static std::size_t var(Literal l) { return static_cast<std::size_t>(std::abs(l)); }

    const EncodedModel& e_;
    CnfClauseSet cnf_;
    std::vector<int> value_;
    std::vector<std::ptrdiff_t> reason_;
    std::vector<std::size_t> position_;
    std::vector<Literal> trail_;
    PropagationResult result_;
};

}  // namespace

PropagationResult propagate(const EncodedModel& e, const Configuration& user) {
    return Propagator(e, to_cnf(e)).run(user);
}

}  // namespace fmcheck
