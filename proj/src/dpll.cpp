#include "fmcheck/dpll.hpp"

#include <algorithm>

namespace fmcheck::solver {

DpllSolver::DpllSolver(const CnfClauseSet& cnf)
    : variable_count_(cnf.variable_count),
      watches_(2 * (cnf.variable_count + 1)),
      assigns_(cnf.variable_count + 1, 0) {
    for (const Clause& raw : cnf.clauses) {
        Clause c = raw;
        std::sort(c.begin(), c.end());
        c.erase(std::unique(c.begin(), c.end()), c.end());
        bool tautology = false;
        for (std::size_t i = 0; i + 1 < c.size() && !tautology; ++i) {
            tautology = std::binary_search(c.begin() + static_cast<std::ptrdiff_t>(i) + 1, c.end(), -c[i]);
        }
        if (tautology) {
            continue;
        }
        if (c.empty()) {
            trivially_unsat_ = true;
        } else if (c.size() == 1) {
            units_.push_back(c[0]);
        } else {
            watches_[code(c[0])].push_back(clauses_.size());
            watches_[code(c[1])].push_back(clauses_.size());
            clauses_.push_back(std::move(c));
        }
    }
}

void DpllSolver::reset() {
    cancel_until(0);
    for (Literal l : trail_) {
        assigns_[static_cast<std::size_t>(l > 0 ? l : -l)] = 0;
    }
    trail_.clear();
    qhead_ = 0;
}

bool DpllSolver::enqueue(Literal l) {
    std::int8_t v = value_of(l);
    if (v != 0) {
        return v > 0;
    }
    assigns_[static_cast<std::size_t>(l > 0 ? l : -l)] = l > 0 ? 1 : -1;
    trail_.push_back(l);
    return true;
}

bool DpllSolver::propagate() {
    while (qhead_ < trail_.size()) {
        Literal falsified = -trail_[qhead_++];
        std::vector<std::size_t>& watchers = watches_[code(falsified)];
        std::size_t keep = 0;
        for (std::size_t w = 0; w < watchers.size(); ++w) {
            std::size_t ci = watchers[w];
            Clause& c = clauses_[ci];
            if (c[0] == falsified) {
                std::swap(c[0], c[1]);
            }
            if (value_of(c[0]) > 0) {
                watchers[keep++] = ci;
                continue;
            }
            bool moved = false;
            for (std::size_t k = 2; k < c.size(); ++k) {
                if (value_of(c[k]) >= 0) {
                    std::swap(c[1], c[k]);
                    watches_[code(c[1])].push_back(ci);
                    moved = true;
                    break;
                }
            }
            if (moved) {
                continue;
            }
            watchers[keep++] = ci;
            if (!enqueue(c[0])) {
                // Conflict: keep the remaining watchers and stop.
                for (++w; w < watchers.size(); ++w) {
                    watchers[keep++] = watchers[w];
                }
                watchers.resize(keep);
                qhead_ = trail_.size();
                return false;
            }
        }
        watchers.resize(keep);
    }
    return true;
}

void DpllSolver::cancel_until(std::size_t level) {
    while (trail_lim_.size() > level) {
        std::size_t start = trail_lim_.back();
        for (std::size_t i = start; i < trail_.size(); ++i) {
            Literal l = trail_[i];
            assigns_[static_cast<std::size_t>(l > 0 ? l : -l)] = 0;
        }
        trail_.resize(start);
        trail_lim_.pop_back();
        flipped_.pop_back();
    }
    qhead_ = std::min(qhead_, trail_.size());
}

bool DpllSolver::solve(std::span<const Literal> assumptions, std::stop_token stop) {
    reset();
    if (stop.stop_requested()) {
        throw Cancelled();
    }
    if (trivially_unsat_) {
        return false;
    }
    for (Literal l : units_) {
        if (!enqueue(l)) {
            return false;
        }
    }
    for (Literal l : assumptions) {
        if (l == 0 || static_cast<std::size_t>(l > 0 ? l : -l) > variable_count_ || !enqueue(l)) {
            return false;
        }
    }
    bool ok = propagate();
    std::size_t next_var = 1;
    for (;;) {
        if (!ok) {
            // Undo levels whose second branch has been tried already.
            while (!trail_lim_.empty() && flipped_.back()) {
                cancel_until(trail_lim_.size() - 1);
            }
            if (trail_lim_.empty()) {
                reset();
                return false;
            }
            Literal decision = trail_[trail_lim_.back()];
            cancel_until(trail_lim_.size() - 1);
            trail_lim_.push_back(trail_.size());
            flipped_.push_back(true);
            enqueue(-decision);
            next_var = 1;
            ok = propagate();
            continue;
        }
        while (next_var <= variable_count_ && assigns_[next_var] != 0) {
            ++next_var;
        }
        if (next_var > variable_count_) {
            break;
        }
        if ((++decisions_ & 0x3ffu) == 0 && stop.stop_requested()) {
            reset();
            throw Cancelled();
        }
        trail_lim_.push_back(trail_.size());
        flipped_.push_back(false);
        enqueue(-static_cast<Literal>(next_var));
        ok = propagate();
    }
    model_.assign(variable_count_, false);
    for (std::size_t v = 1; v <= variable_count_; ++v) {
        model_[v - 1] = assigns_[v] > 0;
    }
    reset();
    return true;
}

}  // namespace fmcheck::solver
