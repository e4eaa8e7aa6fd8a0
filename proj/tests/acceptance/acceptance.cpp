// Acceptance suite: one PASS/FAIL line per criterion.
//
//   acceptance                 run every criterion
//   acceptance ID...           run the named criteria
//   acceptance --list          print the criterion ids
//
// Exit status is non-zero when any selected criterion fails.

#include "fmcheck/analysis.hpp"
#include "fmcheck/cli.hpp"
#include "fmcheck/dsl.hpp"
#include "fmcheck/encoder.hpp"
#include "fmcheck/propagation.hpp"
#include "support/fixtures.hpp"
#include "support/oracle.hpp"
#include "support/random_model.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <functional>
#include <iostream>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

namespace {

using namespace fmcheck;
using Clock = std::chrono::steady_clock;

struct Outcome {
    bool pass = true;
    std::vector<std::string> details;

    void require(bool ok, const std::string& what) {
        if (!ok) {
            pass = false;
            details.push_back("failed: " + what);
        }
    }
    void note(const std::string& what) { details.push_back(what); }
};

struct Criterion {
    std::string id;
    std::string title;
    double budget_seconds;  // 0 = no runtime bound
    std::function<void(Outcome&)> run;
};

std::string config_path(const char* name) { return testing::model_path(std::string("configs/") + name); }

EncodedModel cad_partial() { return encode_model(testing::load_model("cad_partial.fm")); }

std::string join(const std::vector<FeatureId>& ids) {
    std::string out = "{";
    for (std::size_t i = 0; i < ids.size(); ++i) {
        out += (i ? ", " : "") + ids[i];
    }
    return out + "}";
}

// ----------------------------------------------------------------------------

void example_1(Outcome& o) {
    std::istringstream in;
    std::ostringstream out;
    std::ostringstream err;
    int code = cli::run({"check", testing::model_path("cad_partial.fm"), config_path("cad_partial.example1.cfg")}, in,
                        out, err);
    o.require(code == cli::kSuccess, "fmcheck check exits 0 (got " + std::to_string(code) + ")");

    std::istringstream lines(out.str());
    std::size_t conjuncts = 0;
    bool valid_line = false;
    for (std::string line; std::getline(lines, line);) {
        if (line == "result: valid") {
            valid_line = true;
        } else if (line.rfind("model ", 0) != 0) {
            ++conjuncts;
            o.require(line.find("  T  ") != std::string::npos, "conjunct TRUE: " + line);
        }
    }
    o.require(conjuncts == 8, "report lists 8 conjuncts (got " + std::to_string(conjuncts) + ")");
    o.require(valid_line, "report ends with 'result: valid'");
    o.note("8 conjuncts TRUE, Valid");
}

bool is_requires(const EncodedModel& e, ConjunctRef ref, const FeatureId& a, const FeatureId& b) {
    return ref.kind == ConjunctKind::Dependency &&
           e.dependency_conjuncts.at(ref.index).constraint == CrossTreeConstraint{ConstraintKind::Requires, a, b};
}

bool is_alternative_of(const EncodedModel& e, ConjunctRef ref, const FeatureId& parent) {
    return ref.kind == ConjunctKind::Group && e.group_conjuncts.at(ref.index).parent == parent &&
           e.group_conjuncts.at(ref.index).kind == GroupKind::Alternative;
}

void example_2(Outcome& o) {
    EncodedModel e = cad_partial();
    PropagationResult r = propagate(e, testing::load_config("cad_partial.example2.cfg"));
    o.require(!r.has_conflict(), "no conflict");
    const Derivation* v11 = r.derivation_of("v1.1");
    const Derivation* v32 = r.derivation_of("v3.2");
    o.require(v11 && v11->value && is_requires(e, v11->reason, "v2.3.1", "v1.1"),
              "Selected(v1.1) derived from v2.3.1 requires v1.1");
    o.require(v32 && v32->value && is_requires(e, v32->reason, "v2.4", "v3.2"),
              "Selected(v3.2) derived from v2.4 requires v3.2");
    Configuration completed = complete_with_deselection(e, r.decisions);
    o.require(check_full_configuration(e, completed).valid, "completed configuration is Valid");
    if (v11 && v32) {
        o.note("forced v1.1 (" + v11->description + "), v3.2 (" + v32->description + ")");
    }
}

void example_3(Outcome& o) {
    EncodedModel e = cad_partial();
    PropagationResult r = propagate(e, testing::load_config("cad_partial.example3.cfg"));
    o.require(r.has_conflict(), "ConflictReport produced");
    if (!r.conflict) {
        return;
    }
    bool requires_step = false;
    bool xor_step = false;
    for (const ConflictStep& step : r.conflict->cause_chain) {
        requires_step = requires_step || is_requires(e, step.reason, "v2.3.1", "v1.1");
        xor_step = xor_step || is_alternative_of(e, step.reason, "v1");
        o.note(format_step(step));
    }
    o.require(requires_step, "chain contains Requires(v2.3.1, v1.1)");
    o.require(xor_step, "chain contains the v1 Alternative group");
}

void dead_features_criterion(Outcome& o) {
    struct Case {
        const char* label;
        EncodedModel e;
        std::vector<FeatureId> expected;
    };
    std::vector<Case> cases{{"dead fixture", testing::encode(testing::kDeadFixture), {"A"}},
                            {"cad_partial", cad_partial(), {}}};
    for (const Case& c : cases) {
        testing::OracleSets oracle = testing::oracle_sets(c.e.features, testing::formula_models(c.e));
        o.require(oracle.dead == c.expected, std::string(c.label) + ": oracle dead = " + join(c.expected));
        for (SolverBackend b : {SolverBackend::BruteForce, SolverBackend::Dpll}) {
            FeatureSetResult dead = dead_features(c.e, b);
            o.require(!dead.void_model && dead.features == oracle.dead,
                      std::string(c.label) + " [" + std::string(to_string(b)) + "]: dead = " + join(dead.features) +
                          ", oracle " + join(oracle.dead));
        }
        o.note(std::string(c.label) + ": dead = " + join(oracle.dead));
    }
}

void oracle_equivalence(Outcome& o) {
    std::mt19937_64 rng(testing::kPropertySeed);
    std::size_t disagreements = 0;
    std::size_t voids = 0;
    constexpr int kModels = 500;
    for (int i = 0; i < kModels; ++i) {
        FeatureModel m = testing::random_model(rng);
        EncodedModel e = encode_model(m);
        testing::OracleSets oracle = testing::oracle_sets(e.features, testing::formula_models(e));
        voids += oracle.is_void ? 1 : 0;

        std::vector<Assumption> probe;
        for (const FeatureId& f : e.features) {
            if (rng() % 3 == 0) {
                probe.push_back({f, rng() % 2 == 0});
            }
        }
        AnalysisReport brute = analyze(e, SolverBackend::BruteForce);
        AnalysisReport dpll = analyze(e, SolverBackend::Dpll);
        bool sat_b = sat(e, probe, SolverBackend::BruteForce).satisfiable;
        bool sat_d = sat(e, probe, SolverBackend::Dpll).satisfiable;

        bool agree = sat_b == sat_d && brute.is_void == dpll.is_void && brute.dead_features == dpll.dead_features &&
                     brute.core_features == dpll.core_features && brute.is_void == oracle.is_void &&
                     (oracle.is_void || (brute.dead_features == oracle.dead && brute.core_features == oracle.core));
        if (!agree) {
            ++disagreements;
            if (disagreements <= 3) {
                o.note("disagreement on model #" + std::to_string(i) + ":\n" + dsl::serialize_model(m));
            }
        }
    }
    o.require(disagreements == 0, std::to_string(disagreements) + " disagreements");
    o.note(std::to_string(kModels) + " models (" + std::to_string(voids) + " void), 0 disagreements");
}

// Truth tables over the whole model formula: the group sits under a
// non-root parent p so both values of p occur.
void truth_tables(Outcome& o) {
    for (GroupKind kind : {GroupKind::Mandatory, GroupKind::Optional, GroupKind::Alternative,
                           GroupKind::OptionalAlternative, GroupKind::Or, GroupKind::OptionalOr}) {
        for (std::size_t n : {2u, 3u}) {
            std::vector<Feature> children;
            for (std::size_t i = 1; i <= n; ++i) {
                children.push_back(make_feature("c" + std::to_string(i)));
            }
            FeatureModel m;
            m.name = "T";
            m.root = make_feature("R", {ChildGroup{GroupKind::Optional, {make_feature("p", {ChildGroup{kind, children}})}}});
            EncodedModel e = encode_model(m);
            const std::string label = std::string(keyword(kind)) + " n=" + std::to_string(n);

            // Group formula against the tree rule, all 2^(n+1) rows.
            std::vector<FeatureId> vars{"p"};
            for (const Feature& c : children) {
                vars.push_back(c.id);
            }
            const logic::Formula& g = e.group_conjuncts.at(1).formula;
            const ChildGroup& group = m.root.groups[0].children[0].groups[0];
            bool rows_match = true;
            for (std::uint64_t bits = 0; bits < (std::uint64_t{1} << vars.size()); ++bits) {
                Configuration cfg = testing::assignment(vars, bits);
                rows_match = rows_match && logic::eval_formula(g, cfg) ==
                                               testing::group_holds(m.root.groups[0].children[0], group, cfg);
            }
            o.require(rows_match, label + ": group table equals the relationship rule");

            for (const Configuration& model : testing::formula_models(e)) {
                const bool p = testing::selected(model, "p");
                std::size_t on = 0;
                bool equal_to_parent = true;
                for (const Feature& c : children) {
                    on += testing::selected(model, c.id) ? 1 : 0;
                    equal_to_parent = equal_to_parent && testing::selected(model, c.id) == p;
                }
                o.require(testing::selected(model, "R"), label + ": root inclusion");
                if (kind == GroupKind::Alternative) {
                    o.require(p ? on == 1 : on == 0, label + ": exactly-one-if-parent");
                }
                if (kind == GroupKind::Or) {
                    o.require(p == (on >= 1), label + ": parent iff at least one child");
                }
                if (kind == GroupKind::Mandatory) {
                    o.require(equal_to_parent, label + ": child equals parent");
                }
            }
        }
    }
    o.note("all kinds, 2 and 3 children: semantics rules hold");

    // Bit-identity of the 2-child alternative encoding with (c1 ⊕ c2) ⇔ p.
    using logic::Formula;
    Formula ours = encode_group("p", GroupKind::Alternative, {"c1", "c2"});
    Formula xor_form = Formula::iff(Formula::exclusive_or(Formula::var("c1"), Formula::var("c2")), Formula::var("p"));
    const std::vector<FeatureId> vars{"p", "c1", "c2"};
    std::size_t differing = 0;
    for (std::uint64_t bits = 0; bits < 8; ++bits) {
        Configuration cfg = testing::assignment(vars, bits);
        bool a = logic::eval_formula(ours, cfg);
        bool b = logic::eval_formula(xor_form, cfg);
        if (a != b) {
            ++differing;
            char row[96];
            std::snprintf(row, sizeof row, "row p=%c c1=%c c2=%c: exactly-one-if-parent=%c, (c1 ⊕ c2) ⇔ p=%c",
                          (bits & 4) ? 'T' : 'F', (bits & 2) ? 'T' : 'F', (bits & 1) ? 'T' : 'F', a ? 'T' : 'F',
                          b ? 'T' : 'F');
            o.note(row);
        }
    }
    o.require(differing == 0, "2-child Alternative table bit-identical to (c1 ⊕ c2) ⇔ p (" +
                                  std::to_string(differing) + " of 8 rows differ)");
}

void count_regression(Outcome& o) {
    std::uint64_t cad = count_products(cad_partial());
    std::uint64_t small = count_products(testing::encode(testing::kRootOptional));
    o.require(cad == testing::kCadPartialProducts, "count(cad_partial) = " + std::to_string(cad) + ", frozen " +
                                                       std::to_string(testing::kCadPartialProducts));
    o.require(small == 2, "count(root + optional child) = " + std::to_string(small));
    o.note("cad_partial: " + std::to_string(cad) + " products; root + optional: " + std::to_string(small));
}

// Fuzz inputs: raw bytes, token soup, and mutations of valid programs.
std::string fuzz_input(std::mt19937_64& rng, const std::vector<std::string>& seeds) {
    static const std::vector<std::string> tokens{
        "model", "feature", "mandatory", "optional", "xor", "xor?", "or", "or?", "constraints", "requires",
        "excludes", "{", "}", "?", "#", "\n", " ", "a", "b.1", "v2.3.1", "_x", "9", ".", "\t", "\r\n", "\xff", "\x00"};
    std::string s;
    switch (rng() % 3) {
    case 0: {
        std::size_t len = rng() % 96;
        for (std::size_t i = 0; i < len; ++i) {
            s.push_back(static_cast<char>(rng() & 0xff));
        }
        break;
    }
    case 1: {
        std::size_t len = rng() % 48;
        for (std::size_t i = 0; i < len; ++i) {
            const std::string& t = tokens[rng() % tokens.size()];
            s += t;
            if (rng() % 2 == 0) {
                s += ' ';
            }
        }
        break;
    }
    default: {
        s = seeds[rng() % seeds.size()];
        std::size_t edits = 1 + rng() % 4;
        for (std::size_t k = 0; k < edits && !s.empty(); ++k) {
            std::size_t at = rng() % s.size();
            switch (rng() % 4) {
            case 0: s[at] = static_cast<char>(rng() & 0xff); break;
            case 1: s.erase(at, 1 + rng() % 8); break;
            case 2: s.insert(at, tokens[rng() % tokens.size()]); break;
            default: s.resize(at); break;
            }
        }
        break;
    }
    }
    return s;
}

void round_trip_fuzz(Outcome& o) {
    std::mt19937_64 rng(testing::kPropertySeed);
    std::size_t mismatches = 0;
    std::vector<std::string> seeds;
    for (int i = 0; i < 500; ++i) {
        FeatureModel m = testing::random_model(rng);
        std::string text = dsl::serialize_model(m);
        dsl::ParseResult r = dsl::parse_model(text);
        if (!r.ok() || !(*r.model == m)) {
            ++mismatches;
        }
        if (i < 50) {
            seeds.push_back(std::move(text));
        }
    }
    o.require(mismatches == 0, std::to_string(mismatches) + " of 500 round trips differ");
    seeds.push_back(dsl::serialize_model(testing::load_model("cad_partial.fm")));
    seeds.push_back(dsl::serialize_model(testing::load_model("cad_full.fm")));

    constexpr std::size_t kFuzzInputs = 1'000'000;
    std::size_t accepted = 0;
    std::size_t violations = 0;
    for (std::size_t i = 0; i < kFuzzInputs; ++i) {
        std::string input = fuzz_input(rng, seeds);
        try {
            dsl::ParseResult r = dsl::parse_model(input);
            accepted += r.ok() ? 1 : 0;
            bool sane = r.ok() == r.errors.empty() && r.ok() == r.model.has_value();
            for (const dsl::ParseError& e : r.errors) {
                sane = sane && e.span.line >= 1 && e.span.column >= 1 && e.span.offset <= input.size();
            }
            violations += sane ? 0 : 1;
        } catch (const std::exception& ex) {
            ++violations;
            if (violations <= 3) {
                o.note(std::string("exception: ") + ex.what());
            }
        }
    }
    o.require(violations == 0, std::to_string(violations) + " fuzz inputs misbehaved");
    o.note("500 round trips identical; " + std::to_string(kFuzzInputs) + " fuzz inputs survived (" +
           std::to_string(accepted) + " parsed as valid models)");
}

std::vector<Criterion> criteria() {
    return {
        {"example-1", "Example 1 reproduction", 1.0, example_1},
        {"example-2", "Example 2 reproduction", 1.0, example_2},
        {"example-3", "Example 3 reproduction", 1.0, example_3},
        {"dead-features", "Dead-feature detection", 0.0, dead_features_criterion},
        {"oracle-equivalence", "Oracle equivalence", 60.0, oracle_equivalence},
        {"truth-tables", "Encoding truth tables", 0.0, truth_tables},
        {"count-regression", "Count regression", 0.0, count_regression},
        {"round-trip-fuzz", "Round-trip and fuzz", 0.0, round_trip_fuzz},
    };
}

}  // namespace

int main(int argc, char** argv) {
    std::vector<Criterion> all = criteria();
    std::vector<std::string> wanted(argv + 1, argv + argc);
    if (wanted.size() == 1 && wanted[0] == "--list") {
        for (const Criterion& c : all) {
            std::cout << c.id << "\n";
        }
        return 0;
    }
    for (const std::string& id : wanted) {
        if (std::none_of(all.begin(), all.end(), [&](const Criterion& c) { return c.id == id; })) {
            std::cerr << "unknown criterion '" << id << "'; see --list\n";
            return 2;
        }
    }

    int failed = 0;
    for (const Criterion& c : all) {
        if (!wanted.empty() && std::find(wanted.begin(), wanted.end(), c.id) == wanted.end()) {
            continue;
        }
        Outcome o;
        auto start = Clock::now();
        try {
            c.run(o);
        } catch (const std::exception& ex) {
            o.require(false, std::string("exception: ") + ex.what());
        }
        double seconds = std::chrono::duration<double>(Clock::now() - start).count();
        if (c.budget_seconds > 0) {
            char budget[64];
            std::snprintf(budget, sizeof budget, "runtime %.3f s < %.0f s", seconds, c.budget_seconds);
            o.require(seconds < c.budget_seconds, budget);
        }
        char head[160];
        std::snprintf(head, sizeof head, "%s  %-20s %-28s %8.3f s", o.pass ? "PASS" : "FAIL", c.id.c_str(),
                      c.title.c_str(), seconds);
        std::cout << head << "\n";
        for (const std::string& d : o.details) {
            std::cout << "      " << d << "\n";
        }
        failed += o.pass ? 0 : 1;
    }
    return failed == 0 ? 0 : 1;
}
