#include "fmcheck/service.hpp"

#include "fmcheck/dsl.hpp"
#include "fmcheck/propagation.hpp"

#include <httplib.h>

#include <algorithm>
#include <cstdio>
#include <random>

namespace fmcheck::service {

namespace {

Response error(int status, std::string message) { return {status, Json{{"error", std::move(message)}}}; }

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

std::string_view state_name(Decision d, bool forced) {
    if (d == Decision::Selected) {
        return forced ? "forced-selected" : "user-selected";
    }
    if (d == Decision::Deselected) {
        return forced ? "forced-deselected" : "user-deselected";
    }
    return "undecided";
}

std::optional<Decision> decision_from_string(std::string_view text) {
    if (text == "select") {
        return Decision::Selected;
    }
    if (text == "deselect") {
        return Decision::Deselected;
    }
    if (text == "undecide") {
        return Decision::Undecided;
    }
    return std::nullopt;
}

}  // namespace

// ----------------------------------------------------------------------------
// ModelRegistry

ModelRegistry ModelRegistry::load_directory(const std::filesystem::path& dir, std::vector<LoadError>& errors) {
    std::vector<std::filesystem::path> files;
    for (const auto& entry : std::filesystem::directory_iterator(dir)) {
        if (entry.is_regular_file() && entry.path().extension() == ".fm") {
            files.push_back(entry.path());
        }
    }
    std::sort(files.begin(), files.end());

    ModelRegistry registry;
    for (const auto& path : files) {
        LoadError failure{path.filename().string(), {}};
        try {
            dsl::ParseResult r = dsl::parse_file(path.string());
            if (r.ok()) {
                if (!registry.add(*r.model, path.filename().string())) {
                    failure.messages.push_back("duplicate model name '" + r.model->name + "'");
                }
            } else {
                for (const dsl::ParseError& e : r.errors) {
                    failure.messages.push_back(e.message());
                }
            }
        } catch (const std::exception& ex) {
            failure.messages.push_back(ex.what());
        }
        if (!failure.messages.empty()) {
            errors.push_back(std::move(failure));
        }
    }
    return registry;
}

bool ModelRegistry::add(FeatureModel model, std::string file) {
    if (models_.contains(model.name)) {
        return false;
    }
    auto loaded = std::make_shared<LoadedModel>();
    loaded->file = std::move(file);
    loaded->encoded = encode_model(model);
    loaded->model = std::move(model);
    std::string name = loaded->model.name;
    models_.emplace(std::move(name), std::move(loaded));
    return true;
}

const LoadedModel* ModelRegistry::find(std::string_view name) const {
    auto it = models_.find(name);
    return it == models_.end() ? nullptr : it->second.get();
}

// ----------------------------------------------------------------------------
// Service

struct Service::Session {
    std::string id;
    std::shared_ptr<const LoadedModel> model;
    std::chrono::steady_clock::time_point last_used;  // guarded by sessions_mutex_

    std::mutex mutex;
    Configuration user;
    std::optional<FeatureId> flagged;
};

namespace {

Json state_json(const std::string& id, const LoadedModel& m, const Configuration& user,
                const std::optional<FeatureId>& flagged, SolverBackend backend) {
    const EncodedModel& e = m.encoded;
    PropagationResult r = propagate(e, user);

    Json features = Json::array();
    for (const FeatureId& f : e.features) {
        Json node{{"id", f}};
        if (Decision d = user.get(f); d != Decision::Undecided) {
            node["state"] = state_name(d, false);
        } else if (const Derivation* der = r.derivation_of(f)) {
            node["state"] = state_name(der->value ? Decision::Selected : Decision::Deselected, true);
            node["reason"] = der->description;
        } else {
            node["state"] = state_name(Decision::Undecided, false);
        }
        features.push_back(std::move(node));
    }

    Json decisions = Json::object();
    for (const auto& [f, d] : user.decisions()) {
        decisions[f] = d == Decision::Selected ? "select" : "deselect";
    }

    bool extensible = false;
    Json complete_valid = nullptr;
    if (!r.has_conflict()) {
        extensible = sat(e, assumptions_from(r.decisions), backend).satisfiable;
        if (r.decisions.is_full(e.features)) {
            complete_valid = check_full_configuration(e, r.decisions).valid;
        }
    }

    Json out;
    out["session_id"] = id;
    out["model"] = m.model.name;
    out["features"] = std::move(features);
    out["user_decisions"] = std::move(decisions);
    out["conflict"] = r.conflict ? json_io::to_json(*r.conflict) : Json(nullptr);
    out["flagged_decision"] = flagged ? Json(*flagged) : Json(nullptr);
    out["extensible"] = extensible;
    out["complete_valid"] = std::move(complete_valid);
    return out;
}

}  // namespace

Service::Service(ModelRegistry registry, ServiceOptions options)
    : registry_(std::move(registry)), options_(std::move(options)), id_salt_(std::random_device{}()) {
    id_salt_ = (id_salt_ << 32) ^ std::random_device{}();
}

Service::~Service() = default;

std::chrono::steady_clock::time_point Service::now() const {
    return options_.clock ? options_.clock() : std::chrono::steady_clock::now();
}

std::string Service::new_session_id() {
    // Caller holds sessions_mutex_.
    ++id_counter_;
    char buf[33];
    std::snprintf(buf, sizeof buf, "%016llx%016llx",
                  static_cast<unsigned long long>(splitmix64(id_salt_ ^ id_counter_)),
                  static_cast<unsigned long long>(splitmix64(splitmix64(id_salt_) + id_counter_)));
    return buf;
}

Response Service::health() const { return {200, Json{{"status", "ok"}}}; }

Response Service::list_models() const {
    Json out = Json::array();
    for (const auto& [name, m] : registry_.models()) {
        out.push_back({{"name", name},
                       {"feature_count", m->encoded.features.size()},
                       {"constraint_count", m->model.constraints.size()}});
    }
    return {200, std::move(out)};
}

Response Service::tree(std::string_view model) const {
    const LoadedModel* m = registry_.find(model);
    if (m == nullptr) {
        return error(404, "unknown model '" + std::string(model) + "'");
    }
    return {200, json_io::tree_json(m->model)};
}

Response Service::analysis(std::string_view model, bool with_count) {
    const LoadedModel* m = registry_.find(model);
    if (m == nullptr) {
        return error(404, "unknown model '" + std::string(model) + "'");
    }
    auto key = std::make_pair(std::string(model), with_count);
    {
        std::lock_guard lock(cache_mutex_);
        if (auto it = analysis_cache_.find(key); it != analysis_cache_.end()) {
            return {200, it->second};
        }
    }
    Json body;
    try {
        AnalysisReport report = analyze(m->encoded, options_.backend, with_count, options_.count_cap);
        body = json_io::to_json(report);
    } catch (const TooLarge& ex) {
        return error(422, ex.what());
    }
    body["model"] = m->model.name;
    std::lock_guard lock(cache_mutex_);
    // First writer wins; every later reader sees the same body.
    auto [it, inserted] = analysis_cache_.emplace(std::move(key), std::move(body));
    return {200, it->second};
}

Response Service::create_session(const Json& request) {
    if (!request.is_object() || !request.contains("model") || !request["model"].is_string()) {
        return error(400, "request body must be {\"model\": <name>}");
    }
    std::string name = request["model"].get<std::string>();
    auto it = registry_.models().find(name);
    if (it == registry_.models().end()) {
        return error(404, "unknown model '" + name + "'");
    }
    expire_idle();

    auto session = std::make_shared<Session>();
    session->model = it->second;
    {
        std::lock_guard lock(sessions_mutex_);
        session->id = new_session_id();
        session->last_used = now();
        sessions_.emplace(session->id, session);
    }
    std::lock_guard lock(session->mutex);
    Json state = state_json(session->id, *session->model, session->user, session->flagged, options_.backend);
    return {201, Json{{"session_id", session->id}, {"state", std::move(state)}}};
}

std::shared_ptr<Service::Session> Service::find_session(std::string_view id) {
    expire_idle();
    std::lock_guard lock(sessions_mutex_);
    auto it = sessions_.find(id);
    if (it == sessions_.end()) {
        return nullptr;
    }
    it->second->last_used = now();
    return it->second;
}

Response Service::get_session(std::string_view id) {
    std::shared_ptr<Session> session = find_session(id);
    if (!session) {
        return error(404, "unknown session");
    }
    std::lock_guard lock(session->mutex);
    return {200, state_json(session->id, *session->model, session->user, session->flagged, options_.backend)};
}

Response Service::decide(std::string_view id, const Json& request) {
    if (!request.is_object() || !request.contains("feature") || !request["feature"].is_string() ||
        !request.contains("decision") || !request["decision"].is_string()) {
        return error(400, "request body must be {\"feature\": <id>, \"decision\": \"select\"|\"deselect\"|\"undecide\"}");
    }
    std::optional<Decision> decision = decision_from_string(request["decision"].get<std::string>());
    if (!decision) {
        return error(400, "decision must be one of select, deselect, undecide");
    }
    std::shared_ptr<Session> session = find_session(id);
    if (!session) {
        return error(404, "unknown session");
    }
    const FeatureId feature = request["feature"].get<std::string>();
    const EncodedModel& e = session->model->encoded;
    if (!e.contains(feature)) {
        return error(404, "unknown feature '" + feature + "'");
    }

    std::lock_guard lock(session->mutex);
    if (*decision != Decision::Undecided) {
        PropagationResult current = propagate(e, session->user);
        const Derivation* forced = current.derivation_of(feature);
        const bool want = *decision == Decision::Selected;
        if (!current.has_conflict() && forced != nullptr && forced->value != want) {
            Configuration attempted = session->user;
            attempted.set(feature, *decision);
            PropagationResult would_be = propagate(e, attempted);
            ConflictReport report = would_be.conflict.value_or(ConflictReport{
                feature, forced->value, {ConflictStep{forced->reason, feature, forced->value, forced->description}}});
            Json body{{"error", "feature '" + feature + "' is forced " +
                                    (forced->value ? "selected" : "deselected") + " by " + forced->description},
                      {"conflict", json_io::to_json(report)},
                      {"state", state_json(session->id, *session->model, session->user, session->flagged,
                                           options_.backend)}};
            return {409, std::move(body)};
        }
    }

    session->user.set(feature, *decision);
    PropagationResult after = propagate(e, session->user);
    if (after.has_conflict()) {
        session->flagged = feature;
    } else {
        session->flagged.reset();
    }
    return {200, state_json(session->id, *session->model, session->user, session->flagged, options_.backend)};
}

std::size_t Service::expire_idle() {
    const auto cutoff = now() - options_.session_ttl;
    std::lock_guard lock(sessions_mutex_);
    return std::erase_if(sessions_, [&](const auto& entry) { return entry.second->last_used < cutoff; });
}

std::size_t Service::session_count() const {
    std::lock_guard lock(sessions_mutex_);
    return sessions_.size();
}

// ----------------------------------------------------------------------------
// HTTP binding

namespace {

void reply(httplib::Response& res, const Response& r) {
    res.status = r.status;
    res.set_content(r.body.dump(), "application/json");
}

std::optional<Json> parse_body(const httplib::Request& req, httplib::Response& res) {
    Json body = Json::parse(req.body, nullptr, false);
    if (body.is_discarded()) {
        reply(res, error(400, "request body is not valid JSON"));
        return std::nullopt;
    }
    return body;
}

}  // namespace

void mount(httplib::Server& server, Service& service, const ServerOptions& options) {
    server.Get("/api/health", [&service](const httplib::Request&, httplib::Response& res) {
        reply(res, service.health());
    });
    server.Get("/api/models", [&service](const httplib::Request&, httplib::Response& res) {
        reply(res, service.list_models());
    });
    server.Get(R"(/api/models/([^/]+)/tree)", [&service](const httplib::Request& req, httplib::Response& res) {
        reply(res, service.tree(req.matches[1].str()));
    });
    server.Get(R"(/api/models/([^/]+)/analysis)", [&service](const httplib::Request& req, httplib::Response& res) {
        std::string count = req.has_param("count") ? req.get_param_value("count") : "false";
        if (count != "true" && count != "false" && count != "1" && count != "0") {
            reply(res, error(400, "count must be true or false"));
            return;
        }
        reply(res, service.analysis(req.matches[1].str(), count == "true" || count == "1"));
    });
    server.Post("/api/sessions", [&service](const httplib::Request& req, httplib::Response& res) {
        if (auto body = parse_body(req, res)) {
            reply(res, service.create_session(*body));
        }
    });
    server.Get(R"(/api/sessions/([^/]+))", [&service](const httplib::Request& req, httplib::Response& res) {
        reply(res, service.get_session(req.matches[1].str()));
    });
    server.Post(R"(/api/sessions/([^/]+)/decide)", [&service](const httplib::Request& req, httplib::Response& res) {
        if (auto body = parse_body(req, res)) {
            reply(res, service.decide(req.matches[1].str(), *body));
        }
    });

    server.set_error_handler([](const httplib::Request&, httplib::Response& res) {
        if (res.body.empty()) {
            reply(res, error(res.status, res.status == 404 ? "not found" : "request failed"));
        }
    });
    server.set_exception_handler([](const httplib::Request&, httplib::Response& res, std::exception_ptr ep) {
        std::string what = "internal error";
        try {
            std::rethrow_exception(ep);
        } catch (const std::exception& ex) {
            what = ex.what();
        } catch (...) {
        }
        reply(res, error(500, what));
    });

    if (!options.cors_origin.empty()) {
        std::string origin = options.cors_origin;
        server.set_post_routing_handler([origin](const httplib::Request&, httplib::Response& res) {
            res.set_header("Access-Control-Allow-Origin", origin);
        });
        server.Options(R"(/api/.*)", [origin](const httplib::Request&, httplib::Response& res) {
            res.set_header("Access-Control-Allow-Methods", "GET, POST, OPTIONS");
            res.set_header("Access-Control-Allow-Headers", "Content-Type");
            res.status = 204;
        });
    }
}

}  // namespace fmcheck::service
