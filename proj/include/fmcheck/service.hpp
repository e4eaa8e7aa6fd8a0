#pragma once

/**
 * @file service.hpp
 * @brief JSON-over-HTTP facade: models, propagation sessions, analyses.
 *
 * Service holds the request handlers as plain functions returning a status
 * and a JSON body, so they can be exercised without a socket. mount()
 * wires them onto an httplib::Server.
 *
 *     GET  /api/health
 *     GET  /api/models
 *     GET  /api/models/{name}/tree
 *     GET  /api/models/{name}/analysis?count=true|false
 *     POST /api/sessions                 {"model": name}
 *     GET  /api/sessions/{id}
 *     POST /api/sessions/{id}/decide     {"feature": id, "decision": "select"|"deselect"|"undecide"}
 *
 * Session state is recomputed from the user's decisions on every change.
 */

#include "fmcheck/analysis.hpp"
#include "fmcheck/encoder.hpp"
#include "fmcheck/json_io.hpp"
#include "fmcheck/model.hpp"

#include <chrono>
#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <string_view>
#include <vector>

namespace httplib {
class Server;
}

namespace fmcheck::service {

using json_io::Json;

struct LoadedModel {
    std::string file;
    FeatureModel model;
    EncodedModel encoded;
};

struct LoadError {
    std::string file;
    std::vector<std::string> messages;
};

/// Immutable after loading; shared read-only between requests.
class ModelRegistry {
public:
    /// Loads every `*.fm` file in `dir` (not recursive). Files that fail to parse are skipped and reported.
    static ModelRegistry load_directory(const std::filesystem::path& dir, std::vector<LoadError>& errors);

    /// Returns false if a model with the same name is already registered.
    bool add(FeatureModel model, std::string file = {});
    const LoadedModel* find(std::string_view name) const;
    const std::map<std::string, std::shared_ptr<const LoadedModel>, std::less<>>& models() const { return models_; }

private:
    std::map<std::string, std::shared_ptr<const LoadedModel>, std::less<>> models_;
};

struct Response {
    int status = 200;
    Json body;
};

struct ServiceOptions {
    std::chrono::seconds session_ttl{3600};
    std::size_t count_cap = kDefaultCountCap;
    SolverBackend backend = SolverBackend::Auto;
    /// Time source for idle expiry; steady_clock::now when empty.
    std::function<std::chrono::steady_clock::time_point()> clock;
};

class Service {
public:
    explicit Service(ModelRegistry registry, ServiceOptions options = {});
    ~Service();
    Service(const Service&) = delete;
    Service& operator=(const Service&) = delete;

    Response health() const;
    Response list_models() const;
    Response tree(std::string_view model) const;
    Response analysis(std::string_view model, bool with_count);
    Response create_session(const Json& request);
    Response get_session(std::string_view id);
    Response decide(std::string_view id, const Json& request);

    /// Drops sessions idle for longer than the TTL; returns how many were dropped.
    std::size_t expire_idle();
    std::size_t session_count() const;
    const ModelRegistry& registry() const { return registry_; }

private:
    struct Session;

    std::shared_ptr<Session> find_session(std::string_view id);
    std::chrono::steady_clock::time_point now() const;
    std::string new_session_id();

    ModelRegistry registry_;
    ServiceOptions options_;

    mutable std::mutex sessions_mutex_;
    std::map<std::string, std::shared_ptr<Session>, std::less<>> sessions_;
    std::uint64_t id_counter_ = 0;
    std::uint64_t id_salt_ = 0;

    std::mutex cache_mutex_;
    std::map<std::pair<std::string, bool>, Json> analysis_cache_;
};

struct ServerOptions {
    /// Value for Access-Control-Allow-Origin; CORS headers are omitted when empty.
    std::string cors_origin;
};

void mount(httplib::Server& server, Service& service, const ServerOptions& options = {});

}  // namespace fmcheck::service
