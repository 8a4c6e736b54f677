#include "btfsm/document.hpp"
#include "btfsm/fixtures.hpp"
#include "btfsm/metrics.hpp"
#include "btfsm/planner.hpp"
#include "support.hpp"

#include <doctest.h>

using namespace btfsm;

namespace {

double ged_to_fixture(const PolicyTree& t, const std::string& stem) {
    auto fx = std::get<PolicyTree>(load_policy(testing::fixture(stem)));
    auto r = ged_exact(bt_to_graph(t), bt_to_graph(fx), GedCostModel::label_sensitive());
    REQUIRE(r.complete);
    return r.distance;
}

std::vector<std::string> plan_names(const Plan& p) {
    std::vector<std::string> out;
    for (const auto& s : p.steps) out.push_back(s.action.signature());
    return out;
}

std::vector<std::string> preorder_names(const PolicyTree& t) {
    std::vector<std::string> out;
    for (auto id : t.preorder()) out.push_back(t.node(id).name);
    return out;
}

void check_alternation(const PolicyTree& t) {
    for (const auto& [id, n] : t.nodes())
        for (auto c : n.children) {
            const auto& child = t.node(c);
            if (n.kind == BtKind::Fallback) CHECK(child.kind != BtKind::Fallback);
            if (n.kind == BtKind::Sequence) CHECK(child.kind != BtKind::Sequence);
        }
}

}  // namespace

TEST_CASE("safe backchaining reproduces the backchained fixture and naive the chattering one") {
    auto safe = backchain(fixtures::fetch_goal(), fixtures::fetch_library(), Ordering::Safe);
    CHECK(ged_to_fixture(safe, "fig01_backchained_bt") == 0);
    auto naive = backchain(fixtures::fetch_goal(), fixtures::fetch_library(), Ordering::Naive);
    CHECK(ged_to_fixture(naive, "fig03_chattering_bt") == 0);
    // The graph encoding ignores child order, so the two differ only in ordering.
    CHECK(ged_to_fixture(naive, "fig01_backchained_bt") == 0);
    CHECK(preorder_names(naive) != preorder_names(safe));
    CHECK(preorder_names(naive) == preorder_names(std::get<PolicyTree>(load_policy(testing::fixture("fig03_chattering_bt")))));
    CHECK(preorder_names(safe) == preorder_names(std::get<PolicyTree>(load_policy(testing::fixture("fig01_backchained_bt")))));
}

TEST_CASE("backchained trees alternate Fallback and Sequence") {
    check_alternation(backchain(fixtures::fetch_goal(), fixtures::fetch_library()));
    check_alternation(backchain(fixtures::scalability_goal(), fixtures::scalability_library()));
    check_alternation(backchain(fixtures::docking_goal(), fixtures::experiment_library()));
}

TEST_CASE("degenerate goals") {
    // Holds initially and nothing achieves it: a lone condition.
    Goal g{{lit::docked()}, {lit::docked()}};
    auto t = backchain(g, fixtures::fetch_library());
    CHECK(t.size() == 1);
    CHECK(t.node(t.root()).kind == BtKind::Condition);

    Goal never{{lit::docked()}, {}};
    CHECK_THROWS_WITH_AS(backchain(never, fixtures::fetch_library()), doctest::Contains("unachievable"),
                         PlanningError);
}

TEST_CASE("depth bound") {
    CHECK_THROWS_AS(backchain(fixtures::fetch_goal(), fixtures::fetch_library(), Ordering::Safe, 1), PlanningError);
}

TEST_CASE("extract_plan") {
    auto fetch = extract_plan(fixtures::fetch_goal(), fixtures::fetch_library());
    CHECK(plan_names(fetch) ==
          std::vector<std::string>{"move_to(cube2)", "pick(cube2)", "move_to(delivery)", "place(cube2)"});

    auto scal = extract_plan(fixtures::scalability_goal(), fixtures::scalability_library());
    CHECK(scal.steps.size() == 22);
    CHECK(scal.steps.front().action.name == "search");
    CHECK(scal.steps.back().action.name == "dock");

    ActionSpec tuck;
    tuck.name = "tuck";
    tuck.skill = "tuck";
    tuck.postconditions = {lit::arm_tucked()};
    auto one = extract_plan(Goal{{lit::arm_tucked()}, {}}, validate_action_library({tuck}));
    CHECK(one.steps.size() == 1);
}

TEST_CASE("plan and backchained leaves agree") {
    for (const auto& [goal, lib] : {std::pair{fixtures::fetch_goal(), fixtures::fetch_library()},
                                    std::pair{fixtures::scalability_goal(), fixtures::scalability_library()},
                                    std::pair{fixtures::docking_goal(), fixtures::experiment_library()}}) {
        auto b = backchain_detailed(goal, lib);
        std::vector<std::string> leaves;
        for (auto id : b.tree.preorder())
            if (b.tree.node(id).kind == BtKind::Action) leaves.push_back(b.tree.node(id).action->key());
        std::vector<std::string> plan;
        for (const auto& s : extract_plan(goal, lib).steps) plan.push_back(s.action.call().key());
        CHECK(leaves == plan);
    }
}

TEST_CASE("order_preconditions") {
    auto plan = extract_plan(fixtures::fetch_goal(), fixtures::fetch_library());
    const auto lib = fixtures::fetch_library();
    const ActionSpec& place = lib.actions().at(3);
    REQUIRE(place.name == "place");
    CHECK(place.preconditions == std::vector{lit::robot_at("delivery"), lit::in_hand("cube2")});
    CHECK(order_preconditions(place, plan) == std::vector{lit::in_hand("cube2"), lit::robot_at("delivery")});

    const ActionSpec& pick = lib.actions().at(1);
    CHECK(order_preconditions(pick, plan) == pick.preconditions);

    // The shipped dock action has no preconditions; a variant that must wait
    // for the last delivery sorts its literals by the step achieving them.
    auto scal = extract_plan(fixtures::scalability_goal(), fixtures::scalability_library());
    ActionSpec dock;
    dock.name = "dock";
    dock.skill = "dock";
    dock.preconditions = {lit::object_at("cube5", "delivery"), lit::in_hand("cube1"),
                          lit::found({"cube1", "cube2", "cube3", "cube4", "cube5"})};
    dock.postconditions = {lit::docked()};
    auto ordered = order_preconditions(dock, scal);
    CHECK(ordered == std::vector{lit::found({"cube1", "cube2", "cube3", "cube4", "cube5"}), lit::in_hand("cube1"),
                                 lit::object_at("cube5", "delivery")});

    ActionSpec orphan = place;
    orphan.preconditions = {lit::docked()};
    CHECK_THROWS_AS(order_preconditions(orphan, plan), PlanningError);
}

TEST_CASE("two achievers share one Fallback") {
    auto specs = fixtures::fetch_library().actions();
    ActionSpec safe = specs[0];
    safe.name = "safe_move_to";
    safe.skill_args = {Arg{std::string("cube2")}, Arg{std::string("safe")}};
    specs.insert(specs.begin() + 1, safe);
    auto b = backchain_detailed(fixtures::fetch_goal(), validate_action_library(specs));
    auto fb = testing::node_named(b.tree, "achieve robot_at(cube2)");
    CHECK(b.tree.node(fb).children.size() == 3);
    CHECK(b.tree.size() == 15);
}
