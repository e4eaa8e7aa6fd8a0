#include "fmcheck/dsl.hpp"
#include "support/fixtures.hpp"
#include "support/random_model.hpp"

#include <doctest.h>

#include <random>

using namespace fmcheck;
using dsl::ErrorCode;

namespace {

const char* const kCadPartialSource = R"(model CADPartial
feature CAD {
  mandatory { v1 { xor { v1.1 v1.2 } } v2 { or { v2.1 v2.2 v2.3 { xor { v2.3.1 v2.3.2 } } v2.4 } } v3 { xor { v3.1 v3.2 } } }
}
constraints {
  v2.3.1 requires v1.1
  v2.4 requires v3.2
}
)";

std::vector<ErrorCode> codes(const dsl::ParseResult& r) {
    std::vector<ErrorCode> out;
    for (const auto& e : r.errors) {
        out.push_back(e.code);
    }
    return out;
}

}  // namespace

TEST_CASE("parse cad_partial source") {
    auto r = dsl::parse_model(kCadPartialSource);
    REQUIRE(r.ok());
    CHECK(r.model->name == "CADPartial");
    CHECK(feature_count(*r.model) == 14);
    REQUIRE(r.model->constraints.size() == 2);
    CHECK(r.model->constraints[0] == CrossTreeConstraint{ConstraintKind::Requires, "v2.3.1", "v1.1"});
    CHECK(r.model->constraints[1] == CrossTreeConstraint{ConstraintKind::Requires, "v2.4", "v3.2"});
    CHECK(validate_structure(*r.model).empty());
    // The shipped file is the same model.
    CHECK(*r.model == testing::load_model("cad_partial.fm"));
}

TEST_CASE("minimal program is a root-only model") {
    auto r = dsl::parse_model("model M feature Root { }");
    REQUIRE(r.ok());
    CHECK(r.model->root.id == "Root");
    CHECK(r.model->root.groups.empty());
    CHECK(dsl::parse_model("model M feature Root").ok());
}

TEST_CASE("one-child xor is GroupTooSmall at the group keyword") {
    auto r = dsl::parse_model("model M feature Root { xor { A } }");
    REQUIRE_FALSE(r.ok());
    REQUIRE(r.errors.size() == 1);
    CHECK(r.errors[0].code == ErrorCode::GroupTooSmall);
    CHECK(r.errors[0].span == dsl::SourceSpan{1, 24, 3, 23});
}

TEST_CASE("all six group keywords and the optional feature keyword") {
    auto r = dsl::parse_model(R"(
        model Kinds
        feature R {
          mandatory { a }
          optional { feature b }
          xor { c d }
          xor? { e f }
          or { g h }
          or? { i j }
        })");
    REQUIRE(r.ok());
    const auto& groups = r.model->root.groups;
    REQUIRE(groups.size() == 6);
    CHECK(groups[0].kind == GroupKind::Mandatory);
    CHECK(groups[1].kind == GroupKind::Optional);
    CHECK(groups[2].kind == GroupKind::Alternative);
    CHECK(groups[3].kind == GroupKind::OptionalAlternative);
    CHECK(groups[4].kind == GroupKind::Or);
    CHECK(groups[5].kind == GroupKind::OptionalOr);
}

TEST_CASE("comments and whitespace") {
    auto r = dsl::parse_model("# header\nmodel M # name\nfeature R{optional{a}}#trailing");
    REQUIRE(r.ok());
    CHECK(feature_count(*r.model) == 2);
}

TEST_CASE("semantic errors") {
    SUBCASE("duplicate feature") {
        auto r = dsl::parse_model("model M feature R { mandatory { a a } }");
        CHECK(codes(r) == std::vector{ErrorCode::DuplicateFeature});
        CHECK(r.errors[0].span.column == 35);
    }
    SUBCASE("unknown feature in constraint") {
        auto r = dsl::parse_model("model M feature R { optional { a } } constraints { v9 requires a }");
        CHECK(codes(r) == std::vector{ErrorCode::UnknownFeature});
        CHECK(r.errors[0].found == "unknown feature 'v9'");
    }
    SUBCASE("self-referential constraint") {
        auto r = dsl::parse_model("model M feature R { optional { a } } constraints { a excludes a }");
        CHECK(codes(r) == std::vector{ErrorCode::SelfConstraint});
    }
    SUBCASE("keywords cannot name features") {
        auto r = dsl::parse_model("model M feature R { optional { or } }");
        CHECK_FALSE(r.ok());
    }
}

TEST_CASE("error recovery reports several errors in one pass") {
    auto r = dsl::parse_model(R"(model M
feature R {
  mandatory { a $ b }
  bogus
  optional { c }
  xor { d }
}
constraints {
  a needs b
  a requires c
  c excludes
  zz requires a
}
)");
    REQUIRE_FALSE(r.ok());
    // '$' lexical, 'bogus' where a group kind belongs, one-child xor,
    // 'needs', the missing target, and unknown 'zz'.
    CHECK(codes(r) == std::vector{ErrorCode::Lexical, ErrorCode::Syntax, ErrorCode::GroupTooSmall, ErrorCode::Syntax,
                                  ErrorCode::Syntax, ErrorCode::UnknownFeature});
    CHECK(r.errors[0].span.line == 3);
    CHECK(r.errors[1].span.line == 4);
    CHECK(r.errors[3].span.line == 9);
    CHECK(r.errors[5].span.line == 12);
}

TEST_CASE("error messages are reproducible") {
    const char* src = "model M feature R { optional { a } \x01\x02 } trailing";
    auto a = dsl::parse_model(src);
    auto b = dsl::parse_model(src);
    REQUIRE(a.errors.size() == b.errors.size());
    REQUIRE_FALSE(a.errors.empty());
    for (std::size_t i = 0; i < a.errors.size(); ++i) {
        CHECK(a.errors[i].message() == b.errors[i].message());
    }
    CHECK(a.errors[0].message() == "1:36: lexical error: expected token, found character sequence '\\x01\\x02'");
}

TEST_CASE("missing pieces at end of input") {
    auto r = dsl::parse_model("model M feature R { optional { a ");
    REQUIRE_FALSE(r.ok());
    CHECK(r.errors.back().found == "end of input");
    CHECK(dsl::parse_model("").errors.size() == 2);  // no 'model', no 'feature'
}

TEST_CASE("nesting deeper than the limit is an error, not a crash") {
    std::string src = "model M feature R { mandatory { ";
    for (std::size_t i = 0; i < dsl::kMaxDepth + 10; ++i) {
        src += "f" + std::to_string(i) + " { mandatory { ";
    }
    src += "leaf";
    for (std::size_t i = 0; i < dsl::kMaxDepth + 11; ++i) {
        src += " } }";
    }
    auto r = dsl::parse_model(src);
    REQUIRE_FALSE(r.ok());
    CHECK(codes(r) == std::vector{ErrorCode::TooDeep});
}

TEST_CASE("serialize_model canonical form") {
    CHECK(dsl::serialize_model(testing::parse_or_throw("model M feature Root { }")) == "model M\nfeature Root {\n}\n");

    auto m = testing::parse_or_throw(
        "model M feature R { optional { a b } } constraints { b excludes a a requires b }");
    CHECK(dsl::serialize_model(m) ==
          "model M\n"
          "feature R {\n"
          "  optional {\n"
          "    a\n"
          "    b\n"
          "  }\n"
          "}\n"
          "constraints {\n"
          "  b excludes a\n"
          "  a requires b\n"
          "}\n");
}

TEST_CASE("round trip of cad_partial") {
    FeatureModel m = testing::load_model("cad_partial.fm");
    auto r = dsl::parse_model(dsl::serialize_model(m));
    REQUIRE(r.ok());
    CHECK(*r.model == m);
}

TEST_CASE("property: parse(serialize(m)) == m on random models") {
    std::mt19937_64 rng(testing::kPropertySeed);
    for (int i = 0; i < 500; ++i) {
        FeatureModel m = testing::random_model(rng);
        std::string text = dsl::serialize_model(m);
        auto r = dsl::parse_model(text);
        REQUIRE_MESSAGE(r.ok(), text);
        CHECK(*r.model == m);
        CHECK(dsl::serialize_model(*r.model) == text);
    }
}

TEST_CASE("property: error spans stay inside the input") {
    std::mt19937_64 rng(7);
    const std::string alphabet = "model feature xor? or mandatory { } ab.1 # \n requires excludes constraints $\x80";
    for (int i = 0; i < 5000; ++i) {
        std::string src;
        std::size_t len = rng() % 60;
        for (std::size_t k = 0; k < len; ++k) {
            src += alphabet[rng() % alphabet.size()];
        }
        auto r = dsl::parse_model(src);
        CHECK(r.ok() == r.errors.empty());
        for (const auto& e : r.errors) {
            CHECK(e.span.line >= 1);
            CHECK(e.span.column >= 1);
            CHECK(e.span.length >= 1);
            CHECK(e.span.offset <= src.size());
            if (e.span.offset < src.size()) {
                CHECK(e.span.offset + e.span.length <= src.size());
            }
        }
    }
}

TEST_CASE("configuration files") {
    auto r = dsl::parse_configuration("# comment\n+a\n  - b.1  \n\n+c # trailing\n");
    REQUIRE(r.ok());
    CHECK(r.configuration.get("a") == Decision::Selected);
    CHECK(r.configuration.get("b.1") == Decision::Deselected);
    CHECK(r.configuration.get("c") == Decision::Selected);
    CHECK(r.configuration.decisions().size() == 3);

    auto bad = dsl::parse_configuration("a\n+9\n+a\n-a\n");
    REQUIRE(bad.errors.size() == 3);
    CHECK(bad.errors[0].span.line == 1);
    CHECK(bad.errors[1].span.line == 2);
    CHECK(bad.errors[2].code == ErrorCode::DuplicateFeature);

    auto ex1 = testing::load_config("cad_partial.example1.cfg");
    CHECK(ex1.decisions().size() == 14);
}
