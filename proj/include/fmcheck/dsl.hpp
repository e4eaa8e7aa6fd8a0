#pragma once

/**
 * @file dsl.hpp
 * @brief Textual `.fm` syntax for feature models.
 *
 * Grammar:
 *
 *     model_file  = "model" IDENT root constraints? ;
 *     root        = "feature" IDENT ( "{" group* "}" )? ;
 *     group       = kind "{" child+ "}" ;
 *     child       = "feature"? IDENT ( "{" group* "}" )? ;
 *     kind        = "mandatory" | "optional" | "xor" | "xor?" | "or" | "or?" ;
 *     constraints = "constraints" "{" constraint* "}" ;
 *     constraint  = IDENT ( "requires" | "excludes" ) IDENT ;
 *     IDENT       = [A-Za-z_][A-Za-z0-9_.]* ;
 *
 * `#` starts a comment that runs to the end of the line. Dots are part of
 * identifiers (`v2.3.1`), so there is no member-access syntax. Keywords are
 * reserved and cannot name features.
 *
 * Example:
 *
 *     model CADPartial
 *     feature CAD {
 *       mandatory {
 *         v1 { xor { v1.1 v1.2 } }
 *         v2
 *       }
 *     }
 *     constraints {
 *       v2 requires v1.1
 *     }
 */

#include "fmcheck/model.hpp"

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace fmcheck::dsl {

struct SourceSpan {
    std::size_t line = 1;    ///< 1-based
    std::size_t column = 1;  ///< 1-based, in bytes
    std::size_t length = 1;
    std::size_t offset = 0;  ///< byte offset into the source

    bool operator==(const SourceSpan&) const = default;
};

enum class ErrorCode {
    Lexical,
    Syntax,
    DuplicateFeature,
    UnknownFeature,
    SelfConstraint,
    GroupTooSmall,
    TooDeep,
};

std::string_view to_string(ErrorCode code);

struct ParseError {
    ErrorCode code = ErrorCode::Syntax;
    SourceSpan span;
    std::string expected;
    std::string found;

    /// `<line>:<column>: <code>: expected <expected>, found <found>`
    std::string message() const;
};

struct ParseResult {
    std::optional<FeatureModel> model;
    std::vector<ParseError> errors;

    bool ok() const { return model.has_value(); }
};

/// Maximum feature nesting depth accepted by the parser.
inline constexpr std::size_t kMaxDepth = 256;

/**
 * Parses a `.fm` source. On success the model passes validate_structure().
 * On failure every error found in one pass is reported; the parser resyncs
 * at statement boundaries (the next child, group or constraint).
 */
ParseResult parse_model(std::string_view source);

/// Canonical form: 2-space indent, one feature or constraint per line.
std::string serialize_model(const FeatureModel& model);

/// Reads and parses a file. Throws std::runtime_error when the file cannot be read.
ParseResult parse_file(const std::string& path);

/**
 * Configuration files: one decision per line, `+id` selects and `-id`
 * deselects; unlisted features stay undecided. Blank lines and `#`
 * comments are ignored. A feature listed twice is an error.
 */
struct ConfigurationParseResult {
    Configuration configuration;
    std::vector<ParseError> errors;

    bool ok() const { return errors.empty(); }
};

ConfigurationParseResult parse_configuration(std::string_view source);

/// Throws std::runtime_error when the file cannot be read.
ConfigurationParseResult parse_configuration_file(const std::string& path);

/// Reads a whole file; throws std::runtime_error on failure.
std::string read_file(const std::string& path);

}  // namespace fmcheck::dsl
