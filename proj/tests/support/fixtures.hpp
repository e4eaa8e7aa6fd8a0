#pragma once

#include "fmcheck/dsl.hpp"
#include "fmcheck/encoder.hpp"

#include <stdexcept>
#include <string>

namespace fmcheck::testing {

inline std::string model_path(const std::string& name) { return std::string(FMCHECK_MODELS_DIR) + "/" + name; }

inline FeatureModel load_model(const std::string& name) {
    dsl::ParseResult r = dsl::parse_file(model_path(name));
    if (!r.ok()) {
        throw std::runtime_error("fixture " + name + " failed to parse: " + r.errors.front().message());
    }
    return *r.model;
}

inline FeatureModel parse_or_throw(std::string_view source) {
    dsl::ParseResult r = dsl::parse_model(source);
    if (!r.ok()) {
        throw std::runtime_error("parse failed: " + r.errors.front().message());
    }
    return *r.model;
}

inline EncodedModel encode(std::string_view source) { return encode_model(parse_or_throw(source)); }

inline Configuration load_config(const std::string& name) {
    dsl::ConfigurationParseResult r = dsl::parse_configuration_file(model_path("configs/" + name));
    if (!r.ok()) {
        throw std::runtime_error("config " + name + " failed to parse");
    }
    return r.configuration;
}

inline constexpr const char* kRootOnly = "model M feature Root { }";
inline constexpr const char* kRootOptional = "model M feature Root { optional { c } }";
inline constexpr const char* kDeadFixture = "model D feature Root { xor { A B } } constraints { A requires B }";
inline constexpr const char* kVoidFixture = "model V feature Root { mandatory { A B } } constraints { A excludes B }";

/// Product count of cad_partial; computed once by the exhaustive 2^14 oracle.
inline constexpr std::uint64_t kCadPartialProducts = 56;

}  // namespace fmcheck::testing
