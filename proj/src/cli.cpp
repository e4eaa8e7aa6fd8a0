#include "fmcheck/cli.hpp"

#include "fmcheck/analysis.hpp"
#include "fmcheck/cnf.hpp"
#include "fmcheck/dsl.hpp"
#include "fmcheck/json_io.hpp"
#include "fmcheck/propagation.hpp"
#include "fmcheck/service.hpp"

#include <CLI11.hpp>
#include <httplib.h>

#include <algorithm>
#include <charconv>
#include <cstdint>
#include <cstdlib>
#include <iostream>
#include <optional>
#include <set>

namespace fmcheck::cli {

namespace {

using json_io::Json;

struct Context {
    std::istream& in;
    std::ostream& out;
    std::ostream& err;
    SolverBackend backend = SolverBackend::Auto;
    bool json = false;
    logic::Notation notation = logic::Notation::Unicode;
    std::size_t cap = kDefaultCountCap;
};

class Failure : public std::runtime_error {
public:
    Failure(int code, const std::string& message) : std::runtime_error(message), code_(code) {}
    int code() const { return code_; }

private:
    int code_;
};

FeatureModel load_model(const Context& ctx, const std::string& path) {
    dsl::ParseResult r;
    try {
        r = dsl::parse_file(path);
    } catch (const std::exception& ex) {
        throw Failure(kUsage, ex.what());
    }
    if (!r.ok()) {
        for (const dsl::ParseError& e : r.errors) {
            ctx.err << path << ":" << e.message() << "\n";
        }
        throw Failure(kUsage, path + ": " + std::to_string(r.errors.size()) + " error(s)");
    }
    return *r.model;
}

Configuration load_configuration(const Context& ctx, const std::string& path, const EncodedModel& e) {
    dsl::ConfigurationParseResult r;
    try {
        r = dsl::parse_configuration_file(path);
    } catch (const std::exception& ex) {
        throw Failure(kUsage, ex.what());
    }
    if (!r.ok()) {
        for (const dsl::ParseError& err : r.errors) {
            ctx.err << path << ":" << err.message() << "\n";
        }
        throw Failure(kUsage, path + ": " + std::to_string(r.errors.size()) + " error(s)");
    }
    for (const auto& [id, d] : r.configuration.decisions()) {
        if (!e.contains(id)) {
            throw Failure(kUsage, path + ": unknown feature '" + id + "'");
        }
    }
    return r.configuration;
}

char sign(bool value) { return value ? '+' : '-'; }

std::string forced_line(const Derivation& d) {
    return std::string("forced ") + sign(d.value) + " " + d.feature + " (" + d.description + ")";
}

void print_conflict(std::ostream& out, const ConflictReport& c) {
    out << "conflict: " << c.conflicting_feature << " cannot be both selected and deselected\n";
    for (const ConflictStep& step : c.cause_chain) {
        out << "  " << format_step(step) << "\n";
    }
}

std::vector<FeatureId> selected_features(const EncodedModel& e, const Configuration& cfg) {
    std::vector<FeatureId> out;
    for (const FeatureId& f : e.features) {
        if (cfg.get(f) == Decision::Selected) {
            out.push_back(f);
        }
    }
    return out;
}

std::string join(const std::vector<FeatureId>& ids, std::string_view empty = "(none)") {
    if (ids.empty()) {
        return std::string(empty);
    }
    std::string out;
    for (const FeatureId& id : ids) {
        if (!out.empty()) {
            out += ' ';
        }
        out += id;
    }
    return out;
}

// ----------------------------------------------------------------------------
// check

int cmd_check(Context& ctx, const std::string& model_path, const std::string& config_path) {
    EncodedModel e = encode_model(load_model(ctx, model_path));
    Configuration user = load_configuration(ctx, config_path, e);
    const bool full = user.is_full(e.features);

    Json report;
    report["model"] = e.name;
    report["complete"] = full;

    Configuration cfg = user;
    std::vector<Derivation> derivations;
    std::vector<FeatureId> completed;
    if (!full) {
        PropagationResult r = propagate(e, user);
        derivations = r.derivations;
        if (r.conflict) {
            if (ctx.json) {
                Json ds = Json::array();
                for (const Derivation& d : derivations) {
                    ds.push_back(json_io::to_json(d));
                }
                report["derivations"] = std::move(ds);
                report["completed_with_deselection"] = Json::array();
                report["conjuncts"] = Json::array();
                report["valid"] = false;
                report["conflict"] = json_io::to_json(*r.conflict);
                ctx.out << report.dump(2) << "\n";
            } else {
                ctx.out << "model " << e.name << "\n";
                ctx.out << "partial configuration: " << user.decisions().size() << " of " << e.features.size()
                        << " features decided\n";
                for (const Derivation& d : derivations) {
                    ctx.out << forced_line(d) << "\n";
                }
                print_conflict(ctx.out, *r.conflict);
                ctx.out << "result: conflict\n";
            }
            return kNegative;
        }
        for (const FeatureId& f : e.features) {
            if (r.decisions.get(f) == Decision::Undecided) {
                completed.push_back(f);
            }
        }
        cfg = complete_with_deselection(e, r.decisions);
    }

    ValidityReport v = check_full_configuration(e, cfg);

    if (ctx.json) {
        Json ds = Json::array();
        for (const Derivation& d : derivations) {
            ds.push_back(json_io::to_json(d));
        }
        Json conjuncts = json_io::conjuncts_json(e, ctx.notation);
        for (std::size_t i = 0; i < conjuncts.size(); ++i) {
            conjuncts[i]["value"] = v.conjuncts[i].value;
        }
        report["derivations"] = std::move(ds);
        report["completed_with_deselection"] = completed;
        report["conjuncts"] = std::move(conjuncts);
        report["valid"] = v.valid;
        report["conflict"] = nullptr;
        ctx.out << report.dump(2) << "\n";
        return v.valid ? kSuccess : kNegative;
    }

    ctx.out << "model " << e.name << "\n";
    if (!full) {
        ctx.out << "partial configuration: " << user.decisions().size() << " of " << e.features.size()
                << " features decided\n";
        for (const Derivation& d : derivations) {
            ctx.out << forced_line(d) << "\n";
        }
        ctx.out << "completed with deselection: " << join(completed) << "\n";
    }
    std::size_t width = 0;
    for (const ConjunctEvaluation& c : v.conjuncts) {
        width = std::max(width, e.label(c.ref).size());
    }
    for (const ConjunctEvaluation& c : v.conjuncts) {
        std::string label = e.label(c.ref);
        label.resize(width, ' ');
        ctx.out << label << "  " << (c.value ? 'T' : 'F') << "  " << logic::to_string(e.formula_of(c.ref), ctx.notation)
                << "\n";
    }
    if (v.valid) {
        ctx.out << "result: valid\n";
    } else {
        std::string failing;
        for (ConjunctRef ref : v.failing) {
            failing += (failing.empty() ? "" : ", ") + e.label(ref);
        }
        ctx.out << "result: invalid (" << failing << ")\n";
    }
    return v.valid ? kSuccess : kNegative;
}

// ----------------------------------------------------------------------------
// analyze, count, enumerate

int cmd_analyze(Context& ctx, const std::string& model_path, bool with_count) {
    FeatureModel m = load_model(ctx, model_path);
    EncodedModel e = encode_model(m);
    const SolverBackend backend = resolve_backend(ctx.backend, e.features.size());
    AnalysisReport report;
    try {
        report = analyze(e, backend, with_count, ctx.cap);
    } catch (const TooLarge& ex) {
        throw Failure(kLimit, ex.what());
    }
    if (ctx.json) {
        Json out;
        out["model"] = e.name;
        out["features"] = e.features.size();
        out["constraints"] = m.constraints.size();
        out["backend"] = to_string(backend);
        out.update(json_io::to_json(report));
        ctx.out << out.dump(2) << "\n";
    } else {
        ctx.out << "model " << e.name << " (" << e.features.size() << " features, " << m.constraints.size()
                << (m.constraints.size() == 1 ? " constraint)\n" : " constraints)\n");
        ctx.out << "backend: " << to_string(backend) << "\n";
        ctx.out << "void: " << (report.is_void ? "yes" : "no") << "\n";
        ctx.out << "dead: " << join(report.dead_features) << "\n";
        ctx.out << "core: " << join(report.core_features) << "\n";
        if (report.product_count) {
            ctx.out << "products: " << *report.product_count << "\n";
        }
    }
    return report.is_void ? kNegative : kSuccess;
}

int cmd_count(Context& ctx, const std::string& model_path) {
    EncodedModel e = encode_model(load_model(ctx, model_path));
    std::uint64_t n = 0;
    try {
        n = count_products(e, ctx.cap);
    } catch (const TooLarge& ex) {
        throw Failure(kLimit, ex.what());
    }
    if (ctx.json) {
        ctx.out << Json{{"model", e.name}, {"count", n}}.dump(2) << "\n";
    } else {
        ctx.out << n << "\n";
    }
    return n == 0 ? kNegative : kSuccess;
}

int cmd_enumerate(Context& ctx, const std::string& model_path, std::size_t limit) {
    EncodedModel e = encode_model(load_model(ctx, model_path));
    std::vector<Configuration> products;
    try {
        products = enumerate_products(e, limit == SIZE_MAX ? limit : limit + 1, ctx.cap);
    } catch (const TooLarge& ex) {
        throw Failure(kLimit, ex.what());
    }
    const bool truncated = products.size() > limit;
    if (truncated) {
        products.resize(limit);
    }
    if (ctx.json) {
        Json list = Json::array();
        for (const Configuration& p : products) {
            list.push_back(selected_features(e, p));
        }
        ctx.out << Json{{"model", e.name}, {"products", std::move(list)}, {"truncated", truncated}}.dump(2) << "\n";
    } else {
        for (const Configuration& p : products) {
            ctx.out << join(selected_features(e, p), "") << "\n";
        }
        if (truncated) {
            ctx.err << "output truncated at " << limit << " products\n";
        }
    }
    return products.empty() ? kNegative : kSuccess;
}

// ----------------------------------------------------------------------------
// encode

int cmd_encode(Context& ctx, const std::string& model_path, bool dimacs) {
    EncodedModel e = encode_model(load_model(ctx, model_path));
    if (dimacs) {
        ctx.out << to_dimacs(to_cnf(e));
        return kSuccess;
    }
    if (ctx.json) {
        ctx.out << Json{{"model", e.name}, {"conjuncts", json_io::conjuncts_json(e, ctx.notation)}}.dump(2) << "\n";
        return kSuccess;
    }
    ctx.out << "model " << e.name << "\n";
    for (ConjunctRef ref : e.conjunct_refs()) {
        ctx.out << e.label(ref) << "  " << e.describe(ref) << "\n";
        const logic::Formula& f = e.formula_of(ref);
        // Top-level conjunctions are listed one part per line.
        if (f.op() == logic::Op::And && ref.kind == ConjunctKind::Group) {
            for (const logic::Formula& part : f.operands()) {
                ctx.out << "  " << logic::to_string(part, ctx.notation) << "\n";
            }
        } else {
            ctx.out << "  " << logic::to_string(f, ctx.notation) << "\n";
        }
    }
    return kSuccess;
}

// ----------------------------------------------------------------------------
// configure

std::string trim(std::string_view s) {
    const auto* ws = " \t\r";
    auto b = s.find_first_not_of(ws);
    if (b == std::string_view::npos) {
        return {};
    }
    auto e = s.find_last_not_of(ws);
    return std::string(s.substr(b, e - b + 1));
}

int finish_configuration(Context& ctx, const EncodedModel& e, const PropagationResult& r) {
    if (r.decisions.is_full(e.features)) {
        bool valid = check_full_configuration(e, r.decisions).valid;
        ctx.out << "complete configuration: " << (valid ? "valid" : "invalid") << "\n";
        return valid ? kSuccess : kNegative;
    }
    bool extensible = sat(e, assumptions_from(r.decisions), ctx.backend).satisfiable;
    ctx.out << "partial configuration: "
            << (extensible ? "extends to a valid product" : "does not extend to any valid product") << "\n";
    return extensible ? kSuccess : kNegative;
}

int cmd_configure(Context& ctx, const std::string& model_path) {
    EncodedModel e = encode_model(load_model(ctx, model_path));
    Configuration user;
    PropagationResult current = propagate(e, user);

    ctx.out << "model " << e.name << ": " << e.features.size() << " features\n";
    for (const Derivation& d : current.derivations) {
        ctx.out << forced_line(d) << "\n";
    }
    if (current.conflict) {
        print_conflict(ctx.out, *current.conflict);
        return kNegative;
    }

    std::string line;
    while (std::getline(ctx.in, line)) {
        std::string cmd = trim(line.substr(0, line.find('#')));
        if (cmd.empty()) {
            continue;
        }
        ctx.out << "> " << cmd << "\n";
        if (cmd == "done") {
            return finish_configuration(ctx, e, current);
        }
        if (cmd == "?") {
            for (const FeatureId& f : e.features) {
                Decision d = current.decisions.get(f);
                char mark = d == Decision::Selected ? '+' : d == Decision::Deselected ? '-' : '?';
                ctx.out << "  " << mark << " " << f;
                if (user.get(f) != Decision::Undecided) {
                    ctx.out << " (user)";
                } else if (const Derivation* der = current.derivation_of(f)) {
                    ctx.out << " (" << der->description << ")";
                }
                ctx.out << "\n";
            }
            continue;
        }
        if (cmd[0] != '+' && cmd[0] != '-') {
            ctx.err << "expected +id, -id, ? or done; ignored: " << cmd << "\n";
            continue;
        }
        const bool value = cmd[0] == '+';
        const FeatureId id = trim(std::string_view(cmd).substr(1));
        if (!e.contains(id)) {
            ctx.err << "unknown feature '" << id << "'; step ignored\n";
            continue;
        }
        Configuration next = user;
        next.set(id, value ? Decision::Selected : Decision::Deselected);
        PropagationResult r = propagate(e, next);
        if (r.conflict) {
            print_conflict(ctx.out, *r.conflict);
            return kNegative;
        }
        for (const Derivation& d : r.derivations) {
            const Derivation* before = current.derivation_of(d.feature);
            if (before == nullptr || before->value != d.value) {
                ctx.out << forced_line(d) << "\n";
            }
        }
        user = std::move(next);
        current = std::move(r);
    }
    return finish_configuration(ctx, e, current);
}

// ----------------------------------------------------------------------------
// serve

int cmd_serve(Context& ctx, const std::string& dir, const std::string& host, int port, const std::string& cors) {
    std::vector<service::LoadError> errors;
    service::ModelRegistry registry;
    try {
        registry = service::ModelRegistry::load_directory(dir, errors);
    } catch (const std::exception& ex) {
        throw Failure(kUsage, "cannot read model directory '" + dir + "': " + ex.what());
    }
    for (const service::LoadError& e : errors) {
        for (const std::string& msg : e.messages) {
            ctx.err << e.file << ":" << msg << "\n";
        }
        ctx.err << "skipped " << e.file << "\n";
    }
    ctx.err << "loaded " << registry.models().size() << " model(s) from " << dir << "\n";

    service::ServiceOptions options;
    options.count_cap = ctx.cap;
    options.backend = ctx.backend;
    service::Service svc(std::move(registry), options);
    httplib::Server server;
    // No SO_REUSEPORT: a port already in use must fail to bind.
    server.set_socket_options([](socket_t sock) {
        int yes = 1;
        setsockopt(sock, SOL_SOCKET, SO_REUSEADDR, reinterpret_cast<const void*>(&yes), sizeof(yes));
    });
    service::mount(server, svc, {cors});

    int bound = port == 0 ? server.bind_to_any_port(host) : (server.bind_to_port(host, port) ? port : -1);
    if (bound < 0) {
        throw Failure(kUsage, "cannot bind " + host + ":" + std::to_string(port));
    }
    ctx.err << "listening on http://" << host << ":" << bound << "\n" << std::flush;
    return server.listen_after_bind() ? kSuccess : kUsage;
}

std::size_t count_cap_from_env() {
    const char* raw = std::getenv("FMCHECK_COUNT_CAP");
    if (raw == nullptr || *raw == '\0') {
        return kDefaultCountCap;
    }
    std::string_view text(raw);
    std::size_t value = 0;
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (ec != std::errc() || ptr != text.data() + text.size() || value == 0) {
        throw Failure(kUsage, "FMCHECK_COUNT_CAP must be a positive integer, got '" + std::string(text) + "'");
    }
    return value;
}

}  // namespace

int run(const std::vector<std::string>& args, std::istream& in, std::ostream& out, std::ostream& err) {
    Context ctx{in, out, err};

    CLI::App app{"Feature model verification toolkit", "fmcheck"};
    app.require_subcommand(1);
    app.fallthrough();

    std::string backend_name = "auto";
    app.add_option("--backend", backend_name, "Satisfiability engine")
        ->check(CLI::IsMember({"brute", "dpll", "auto"}));
    app.add_flag("--json", ctx.json, "Machine-readable output");
    bool ascii = false;
    app.add_flag("--ascii", ascii, "ASCII connectives instead of Unicode");

    std::string model;
    std::string config;

    auto* check = app.add_subcommand("check", "Evaluate a configuration against a model");
    check->add_option("model", model, "Model file (.fm)")->required();
    check->add_option("config", config, "Configuration file (+id / -id lines)")->required();

    bool with_count = false;
    auto* analyze_cmd = app.add_subcommand("analyze", "Void, dead and core features");
    analyze_cmd->add_option("model", model, "Model file (.fm)")->required();
    analyze_cmd->add_flag("--count", with_count, "Also count products");

    auto* configure = app.add_subcommand("configure", "Interactive decisions from stdin: +id, -id, ?, done");
    configure->add_option("model", model, "Model file (.fm)")->required();

    bool dimacs = false;
    bool pretty = false;
    auto* encode = app.add_subcommand("encode", "Print the propositional encoding");
    encode->add_option("model", model, "Model file (.fm)")->required();
    auto* dimacs_flag = encode->add_flag("--dimacs", dimacs, "DIMACS CNF");
    encode->add_flag("--pretty", pretty, "Conjunct list (default)")->excludes(dimacs_flag);

    auto* count = app.add_subcommand("count", "Number of valid products");
    count->add_option("model", model, "Model file (.fm)")->required();

    std::size_t limit = 100;
    auto* enumerate = app.add_subcommand("enumerate", "List valid products in lexicographic order");
    enumerate->add_option("model", model, "Model file (.fm)")->required();
    enumerate->add_option("--limit", limit, "Maximum number of products")->capture_default_str();

    std::string dir;
    std::string host = "127.0.0.1";
    int port = 8080;
    std::string cors;
    auto* serve = app.add_subcommand("serve", "Start the JSON service");
    serve->add_option("dir", dir, "Directory of .fm files")->required();
    serve->add_option("--host", host, "Bind address")->capture_default_str();
    serve->add_option("--port", port, "Port; 0 picks a free one")->capture_default_str()->check(CLI::Range(0, 65535));
    serve->add_option("--cors-origin", cors, "Allowed CORS origin; CORS is off when empty");

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e, out, err);
        return code == 0 ? kSuccess : kUsage;
    }

    ctx.backend = *backend_from_string(backend_name);
    ctx.notation = ascii ? logic::Notation::Ascii : logic::Notation::Unicode;

    try {
        ctx.cap = count_cap_from_env();
        if (check->parsed()) {
            return cmd_check(ctx, model, config);
        }
        if (analyze_cmd->parsed()) {
            return cmd_analyze(ctx, model, with_count);
        }
        if (configure->parsed()) {
            return cmd_configure(ctx, model);
        }
        if (encode->parsed()) {
            return cmd_encode(ctx, model, dimacs);
        }
        if (count->parsed()) {
            return cmd_count(ctx, model);
        }
        if (enumerate->parsed()) {
            return cmd_enumerate(ctx, model, limit);
        }
        if (serve->parsed()) {
            return cmd_serve(ctx, dir, host, port, cors);
        }
    } catch (const Failure& f) {
        err << "fmcheck: " << f.what() << "\n";
        return f.code();
    } catch (const std::exception& ex) {
        err << "fmcheck: " << ex.what() << "\n";
        return kUsage;
    }
    return kUsage;
}

}  // namespace fmcheck::cli
