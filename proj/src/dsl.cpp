#include "fmcheck/dsl.hpp"

#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>

namespace fmcheck::dsl {

std::string_view to_string(ErrorCode code) {
    switch (code) {
    case ErrorCode::Lexical: return "lexical error";
    case ErrorCode::Syntax: return "syntax error";
    case ErrorCode::DuplicateFeature: return "DuplicateFeature";
    case ErrorCode::UnknownFeature: return "UnknownFeature";
    case ErrorCode::SelfConstraint: return "SelfConstraint";
    case ErrorCode::GroupTooSmall: return "GroupTooSmall";
    case ErrorCode::TooDeep: return "TooDeep";
    }
    return "?";
}

std::string ParseError::message() const {
    return std::to_string(span.line) + ":" + std::to_string(span.column) + ": " +
           std::string(to_string(code)) + ": expected " + expected + ", found " + found;
}

namespace {

enum class Tok {
    Ident,
    KwModel,
    KwFeature,
    KwConstraints,
    KwRequires,
    KwExcludes,
    KwGroup,  // any of the six group keywords
    LBrace,
    RBrace,
    End,
};

struct Token {
    Tok kind = Tok::End;
    std::string_view text;
    SourceSpan span;
};

std::string printable(std::string_view text) {
    std::string out;
    for (unsigned char c : text) {
        if (c >= 0x20 && c < 0x7f && c != '\'') {
            out += static_cast<char>(c);
        } else {
            char buf[8];
            std::snprintf(buf, sizeof buf, "\\x%02x", c);
            out += buf;
        }
    }
    return out;
}

std::string describe(const Token& t) {
    switch (t.kind) {
    case Tok::Ident: return "identifier '" + printable(t.text) + "'";
    case Tok::LBrace: return "'{'";
    case Tok::RBrace: return "'}'";
    case Tok::End: return "end of input";
    default: return "keyword '" + std::string(t.text) + "'";
    }
}

bool ident_start(char c) { return (c >= 'A' && c <= 'Z') || (c >= 'a' && c <= 'z') || c == '_'; }
bool ident_char(char c) { return ident_start(c) || (c >= '0' && c <= '9') || c == '.'; }
bool space(char c) { return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v'; }

class Lexer {
public:
    Lexer(std::string_view src, std::vector<ParseError>& errors) : src_(src), errors_(errors) {}

    std::vector<Token> run() {
        std::vector<Token> tokens;
        for (;;) {
            skip_trivia();
            if (pos_ >= src_.size()) {
                tokens.push_back({Tok::End, {}, span_here(1)});
                return tokens;
            }
            char c = src_[pos_];
            if (c == '{' || c == '}') {
                tokens.push_back({c == '{' ? Tok::LBrace : Tok::RBrace, src_.substr(pos_, 1), span_here(1)});
                advance(1);
            } else if (ident_start(c)) {
                tokens.push_back(word());
            } else {
                junk();
            }
        }
    }

private:
    void skip_trivia() {
        while (pos_ < src_.size()) {
            char c = src_[pos_];
            if (space(c)) {
                advance(1);
            } else if (c == '#') {
                while (pos_ < src_.size() && src_[pos_] != '\n') {
                    advance(1);
                }
            } else {
                break;
            }
        }
    }

    Token word() {
        std::size_t len = 1;
        while (pos_ + len < src_.size() && ident_char(src_[pos_ + len])) {
            ++len;
        }
        std::string_view text = src_.substr(pos_, len);
        if ((text == "xor" || text == "or") && pos_ + len < src_.size() && src_[pos_ + len] == '?') {
            ++len;
            text = src_.substr(pos_, len);
        }
        Token t{classify(text), text, span_here(len)};
        advance(len);
        return t;
    }

    static Tok classify(std::string_view text) {
        static const std::map<std::string_view, Tok> keywords{
            {"model", Tok::KwModel},        {"feature", Tok::KwFeature},   {"constraints", Tok::KwConstraints},
            {"requires", Tok::KwRequires},  {"excludes", Tok::KwExcludes}, {"mandatory", Tok::KwGroup},
            {"optional", Tok::KwGroup},     {"xor", Tok::KwGroup},         {"xor?", Tok::KwGroup},
            {"or", Tok::KwGroup},           {"or?", Tok::KwGroup},
        };
        auto it = keywords.find(text);
        return it == keywords.end() ? Tok::Ident : it->second;
    }

    // A run of bytes that cannot start a token is reported once.
    void junk() {
        std::size_t len = 1;
        while (pos_ + len < src_.size()) {
            char c = src_[pos_ + len];
            if (space(c) || ident_start(c) || c == '{' || c == '}' || c == '#') {
                break;
            }
            ++len;
        }
        errors_.push_back({ErrorCode::Lexical, span_here(len), "token",
                           "character sequence '" + printable(src_.substr(pos_, len)) + "'"});
        advance(len);
    }

    SourceSpan span_here(std::size_t length) const { return {line_, column_, length, pos_}; }

    void advance(std::size_t n) {
        for (std::size_t i = 0; i < n; ++i) {
            if (src_[pos_] == '\n') {
                ++line_;
                column_ = 1;
            } else {
                ++column_;
            }
            ++pos_;
        }
    }

    std::string_view src_;
    std::vector<ParseError>& errors_;
    std::size_t pos_ = 0;
    std::size_t line_ = 1;
    std::size_t column_ = 1;
};

class Parser {
public:
    Parser(std::vector<Token> tokens, std::vector<ParseError>& errors)
        : tokens_(std::move(tokens)), errors_(errors) {}

    std::optional<FeatureModel> run() {
        FeatureModel model;
        parse_header(model);
        if (at(Tok::KwFeature)) {
            next();
            model.root = parse_feature(0);
        } else {
            error_expected("'feature'");
            while (!at(Tok::End) && !at(Tok::KwConstraints)) {
                skip_one();
            }
        }
        while (!at(Tok::End)) {
            if (at(Tok::KwConstraints)) {
                next();
                parse_constraints(model);
            } else {
                error_expected("'constraints' or end of input");
                skip_one();
            }
        }
        check_constraints(model);
        if (!errors_.empty()) {
            return std::nullopt;
        }
        return model;
    }

private:
    void parse_header(FeatureModel& model) {
        if (!at(Tok::KwModel)) {
            error_expected("'model'");
            while (!at(Tok::End) && !at(Tok::KwFeature)) {
                skip_one();
            }
            return;
        }
        next();
        if (at(Tok::Ident)) {
            model.name = std::string(next().text);
        } else {
            error_expected("model name");
            if (!at(Tok::KwFeature)) {
                skip_one();
            }
        }
    }

    // Called with the identifier as the current token.
    Feature parse_feature(std::size_t depth) {
        Feature feature;
        if (!at(Tok::Ident)) {
            error_expected("feature name");
            if (at(Tok::LBrace)) {
                skip_block();
            } else if (!at(Tok::RBrace) && !at(Tok::End)) {
                skip_one();
            }
            return feature;
        }
        Token name = next();
        feature = make_feature(std::string(name.text));
        declare(name);
        if (!at(Tok::LBrace)) {
            return feature;
        }
        if (depth >= kMaxDepth) {
            errors_.push_back({ErrorCode::TooDeep, peek().span, "nesting depth at most " + std::to_string(kMaxDepth),
                               "deeper nesting"});
            skip_block();
            return feature;
        }
        next();
        while (!at(Tok::RBrace) && !at(Tok::End)) {
            if (at(Tok::KwGroup)) {
                parse_group(feature, depth);
            } else {
                error_expected("group kind");
                skip_one();
            }
        }
        expect_rbrace();
        return feature;
    }

    void parse_group(Feature& parent, std::size_t depth) {
        Token kw = next();
        ChildGroup group;
        group.kind = *group_kind_from_keyword(kw.text);
        if (!at(Tok::LBrace)) {
            error_expected("'{'");
            return;
        }
        next();
        while (!at(Tok::RBrace) && !at(Tok::End)) {
            if (at(Tok::KwFeature)) {
                next();
                group.children.push_back(parse_feature(depth + 1));
            } else if (at(Tok::Ident)) {
                group.children.push_back(parse_feature(depth + 1));
            } else {
                error_expected("feature name");
                skip_one();
            }
        }
        expect_rbrace();
        if (group.children.size() < min_children(group.kind)) {
            errors_.push_back({ErrorCode::GroupTooSmall, kw.span,
                               "at least " + std::to_string(min_children(group.kind)) + " children in '" +
                                   std::string(kw.text) + "' group",
                               std::to_string(group.children.size())});
        }
        parent.groups.push_back(std::move(group));
    }

    void parse_constraints(FeatureModel& model) {
        if (!at(Tok::LBrace)) {
            error_expected("'{'");
            return;
        }
        next();
        while (!at(Tok::RBrace) && !at(Tok::End)) {
            if (!parse_constraint(model)) {
                resync_constraint();
            }
        }
        expect_rbrace();
    }

    bool parse_constraint(FeatureModel& model) {
        if (!at(Tok::Ident)) {
            error_expected("feature name");
            return false;
        }
        Token source = next();
        ConstraintKind kind;
        if (at(Tok::KwRequires)) {
            kind = ConstraintKind::Requires;
        } else if (at(Tok::KwExcludes)) {
            kind = ConstraintKind::Excludes;
        } else {
            error_expected("'requires' or 'excludes'");
            return false;
        }
        next();
        if (!at(Tok::Ident)) {
            error_expected("feature name");
            return false;
        }
        Token target = next();
        model.constraints.push_back({kind, std::string(source.text), std::string(target.text)});
        constraint_spans_.push_back({source.span, target.span});
        return true;
    }

    // Skip to the next `IDENT requires|excludes`, a closing brace or the end.
    void resync_constraint() {
        while (!at(Tok::RBrace) && !at(Tok::End)) {
            if (at(Tok::Ident) && (peek(1).kind == Tok::KwRequires || peek(1).kind == Tok::KwExcludes)) {
                return;
            }
            skip_one();
        }
    }

    void check_constraints(const FeatureModel& model) {
        for (std::size_t i = 0; i < model.constraints.size(); ++i) {
            const CrossTreeConstraint& c = model.constraints[i];
            const auto& [source_span, target_span] = constraint_spans_[i];
            if (!declared_.contains(c.source)) {
                errors_.push_back({ErrorCode::UnknownFeature, source_span, "declared feature",
                                   "unknown feature '" + c.source + "'"});
            }
            if (!declared_.contains(c.target)) {
                errors_.push_back({ErrorCode::UnknownFeature, target_span, "declared feature",
                                   "unknown feature '" + c.target + "'"});
            }
            if (c.source == c.target) {
                errors_.push_back({ErrorCode::SelfConstraint, target_span, "a feature other than '" + c.source + "'",
                                   "'" + c.target + "'"});
            }
        }
    }

    void declare(const Token& name) {
        auto [it, inserted] = declared_.emplace(std::string(name.text), name.span);
        if (!inserted) {
            errors_.push_back({ErrorCode::DuplicateFeature, name.span,
                               "unique feature name (first declared at " + std::to_string(it->second.line) + ":" +
                                   std::to_string(it->second.column) + ")",
                               "duplicate '" + std::string(name.text) + "'"});
        }
    }

    void expect_rbrace() {
        if (at(Tok::RBrace)) {
            next();
        } else {
            error_expected("'}'");
        }
    }

    // Skips one token; a '{' takes its whole balanced block with it.
    void skip_one() {
        if (at(Tok::LBrace)) {
            skip_block();
        } else if (!at(Tok::End)) {
            next();
        }
    }

    void skip_block() {
        std::size_t depth = 0;
        do {
            if (at(Tok::LBrace)) {
                ++depth;
            } else if (at(Tok::RBrace)) {
                --depth;
            }
            next();
        } while (depth > 0 && !at(Tok::End));
    }

    void error_expected(std::string expected) {
        errors_.push_back({ErrorCode::Syntax, peek().span, std::move(expected), describe(peek())});
    }

    bool at(Tok kind) const { return peek().kind == kind; }
    const Token& peek(std::size_t ahead = 0) const {
        return tokens_[std::min(pos_ + ahead, tokens_.size() - 1)];
    }
    Token next() {
        Token t = peek();
        if (pos_ + 1 < tokens_.size()) {
            ++pos_;
        }
        return t;
    }

    std::vector<Token> tokens_;
    std::size_t pos_ = 0;
    std::vector<ParseError>& errors_;
    std::map<std::string, SourceSpan> declared_;
    std::vector<std::pair<SourceSpan, SourceSpan>> constraint_spans_;
};

void write_feature(std::ostringstream& out, const Feature& feature, std::size_t indent, bool is_root) {
    std::string pad(indent, ' ');
    out << pad << (is_root ? "feature " : "") << feature.id;
    if (feature.groups.empty() && !is_root) {
        out << '\n';
        return;
    }
    out << " {\n";
    for (const ChildGroup& group : feature.groups) {
        out << pad << "  " << keyword(group.kind) << " {\n";
        for (const Feature& child : group.children) {
            write_feature(out, child, indent + 4, false);
        }
        out << pad << "  }\n";
    }
    out << pad << "}\n";
}

}  // namespace

ParseResult parse_model(std::string_view source) {
    ParseResult result;
    std::vector<Token> tokens = Lexer(source, result.errors).run();
    result.model = Parser(std::move(tokens), result.errors).run();
    return result;
}

std::string serialize_model(const FeatureModel& model) {
    std::ostringstream out;
    out << "model " << model.name << '\n';
    write_feature(out, model.root, 0, true);
    if (!model.constraints.empty()) {
        out << "constraints {\n";
        for (const CrossTreeConstraint& c : model.constraints) {
            out << "  " << c.source << ' ' << keyword(c.kind) << ' ' << c.target << '\n';
        }
        out << "}\n";
    }
    return out.str();
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw std::runtime_error("cannot read '" + path + "'");
    }
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

ParseResult parse_file(const std::string& path) { return parse_model(read_file(path)); }

ConfigurationParseResult parse_configuration(std::string_view source) {
    ConfigurationParseResult result;
    std::map<std::string, std::size_t> first_line;
    std::size_t line_no = 0;
    std::size_t pos = 0;
    while (pos < source.size()) {
        std::size_t eol = source.find('\n', pos);
        if (eol == std::string_view::npos) {
            eol = source.size();
        }
        std::string_view line = source.substr(pos, eol - pos);
        std::size_t line_offset = pos;
        pos = eol + 1;
        ++line_no;

        if (std::size_t hash = line.find('#'); hash != std::string_view::npos) {
            line = line.substr(0, hash);
        }
        std::size_t start = 0;
        while (start < line.size() && space(line[start])) {
            ++start;
        }
        std::size_t end = line.size();
        while (end > start && space(line[end - 1])) {
            --end;
        }
        if (start == end) {
            continue;
        }
        std::string_view entry = line.substr(start, end - start);
        SourceSpan span{line_no, start + 1, entry.size(), line_offset + start};
        char sign = entry.front();
        std::string_view id = entry.substr(1);
        while (!id.empty() && space(id.front())) {
            id.remove_prefix(1);
        }
        if (sign != '+' && sign != '-') {
            result.errors.push_back({ErrorCode::Syntax, span, "'+' or '-'", "'" + printable(entry.substr(0, 1)) + "'"});
            continue;
        }
        if (!is_identifier(id)) {
            result.errors.push_back({ErrorCode::Syntax, span, "feature name", "'" + printable(id) + "'"});
            continue;
        }
        auto [it, inserted] = first_line.emplace(std::string(id), line_no);
        if (!inserted) {
            result.errors.push_back({ErrorCode::DuplicateFeature, span,
                                     "one decision per feature (first on line " + std::to_string(it->second) + ")",
                                     "'" + std::string(id) + "' again"});
            continue;
        }
        result.configuration.set(std::string(id), sign == '+' ? Decision::Selected : Decision::Deselected);
    }
    return result;
}

ConfigurationParseResult parse_configuration_file(const std::string& path) {
    return parse_configuration(read_file(path));
}

}  // namespace fmcheck::dsl
