#include "btfsm/document.hpp"
#include "btfsm/fixtures.hpp"
#include "btfsm/simworld.hpp"
#include "support.hpp"

#include <doctest.h>

using namespace btfsm;

TEST_CASE("literals validate their arity and argument types") {
    CHECK_NOTHROW(validate_literal(lit::battery_above(20)));
    CHECK_THROWS_AS(validate_literal(ConditionLiteral{Predicate::BatteryAbove, {Arg{std::string("x")}}}),
                    ValidationError);
    CHECK_THROWS_AS(validate_literal(ConditionLiteral{Predicate::BatteryAbove, {Arg{std::int64_t{101}}}}),
                    ValidationError);
    CHECK_THROWS_AS(validate_literal(ConditionLiteral{Predicate::ObjectAt, {Arg{std::string("cube2")}}}),
                    ValidationError);
    CHECK(lit::object_at("cube2", "delivery").key() == "object_at(cube2,delivery)");
}

TEST_CASE("fetch library indexes four postcondition keys") {
    auto lib = fixtures::fetch_library();
    CHECK(lib.actions().size() == 4);
    CHECK(lib.postcondition_keys() == 4);
}

TEST_CASE("empty library is rejected") {
    CHECK_THROWS_WITH_AS(validate_action_library({}), doctest::Contains("empty library"), ValidationError);
}

TEST_CASE("two achievers keep declaration order") {
    auto specs = fixtures::fetch_library().actions();
    ActionSpec safe = specs[0];
    safe.name = "safe_move_to";
    specs.push_back(safe);
    auto lib = validate_action_library(specs);
    auto ach = lib.achievers(lit::robot_at("cube2"));
    REQUIRE(ach.size() == 2);
    CHECK(ach[0]->name == "move_to");
    CHECK(ach[1]->name == "safe_move_to");
}

TEST_CASE("an action may not list a literal as both pre and post") {
    ActionSpec a;
    a.name = "loop";
    a.skill = "move_to";
    a.preconditions = {lit::docked()};
    a.postconditions = {lit::docked()};
    CHECK_THROWS_AS(validate_action_library({a}), ValidationError);
}

TEST_CASE("backchained fixture parses to a 14-node tree") {
    auto doc = load_policy(testing::fixture("fig01_backchained_bt"));
    REQUIRE(std::holds_alternative<PolicyTree>(doc));
    CHECK(std::get<PolicyTree>(doc).size() == 14);
    CHECK(document_kind(doc) == "bt");
}

TEST_CASE("dangling child reference is a parse error with a field path") {
    const char* text = R"({"version":1,"kind":"bt","root":1,"nodes":[
        {"id":1,"type":"sequence","name":"s","children":[2,7]},
        {"id":2,"type":"action","name":"a","skill":"tuck","args":[]}]})";
    try {
        parse_policy_document(text);
        FAIL("expected a parse error");
    } catch (const ParseError& e) {
        CHECK(std::string(e.what()).find("7") != std::string::npos);
    }
}

TEST_CASE("syntax errors carry a position") {
    try {
        parse_policy_document("{\"version\": 1,\n  \"kind\": }");
        FAIL("expected a parse error");
    } catch (const ParseError& e) {
        CHECK(std::string(e.what()).find("line 2") != std::string::npos);
    }
}

TEST_CASE("every shipped policy survives a serialize/parse round trip byte for byte") {
    for (const auto& [stem, doc] : fixtures::all_policies()) {
        CAPTURE(stem);
        std::string text = read_file(testing::fixture(stem));
        CHECK(serialize_policy(parse_policy_document(text)) == text);
    }
}

TEST_CASE("shipped fixtures equal the builders that produced them") {
    for (const auto& [stem, doc] : fixtures::all_policies()) {
        CAPTURE(stem);
        CHECK(read_file(testing::fixture(stem)) == serialize_policy(doc));
    }
    for (const auto& s : fixtures::all_scenarios()) {
        CAPTURE(s.name);
        CHECK(read_file(testing::source_dir() / "scenarios" / (s.name + ".json")) == serialize_scenario(s));
    }
    CHECK(read_file(testing::source_dir() / "libraries" / "fetch_library.json") ==
          serialize_action_library(fixtures::fetch_library()));
    CHECK(read_file(testing::source_dir() / "libraries" / "fetch_goal.json") == serialize_goal(fixtures::fetch_goal()));
}

TEST_CASE("library and goal documents round trip") {
    auto lib = fixtures::scalability_library();
    auto again = parse_action_library(serialize_action_library(lib));
    CHECK(again.actions() == lib.actions());
    auto goal = fixtures::docking_goal();
    auto g2 = parse_goal_document(serialize_goal(goal));
    CHECK(g2.conditions == goal.conditions);
    CHECK(g2.initially_true == goal.initially_true);
}

TEST_CASE("wrong document kinds and versions are rejected") {
    CHECK_THROWS_AS(parse_policy_document(R"({"version":2,"kind":"bt","root":1,"nodes":[]})"), ParseError);
    CHECK_THROWS_AS(parse_policy_document(R"({"version":1,"kind":"petri"})"), ParseError);
    CHECK_THROWS_AS(parse_action_library("[]"), ParseError);
}
