#include "btfsm/fixtures.hpp"
#include "btfsm/hfsm.hpp"
#include "btfsm/metrics.hpp"
#include "support.hpp"

#include <doctest.h>

using namespace btfsm;
using testing::FakeWorld;

TEST_CASE("subtree fixture becomes one sequence container holding a fallback and an action") {
    auto h = from_bt(fixtures::fig05_subtree_bt());
    CHECK(h.kind == ContainerKind::Sequence);
    REQUIRE(h.children.size() == 2);
    CHECK(h.children[0].kind == ContainerKind::Fallback);
    CHECK(h.children[0].children.at(0).kind == ContainerKind::Condition);
    CHECK(h.children[0].children.at(1).kind == ContainerKind::Action);
    CHECK(h.children[1].kind == ContainerKind::Action);
    CHECK(h.size() == 5);
    CHECK(h == std::get<HfsmContainer>(fixtures::all_policies().at(5).second));
}

TEST_CASE("single action tree gives a single leaf") {
    auto h = from_bt(PolicyTree::from_spec(bts::action("tuck!", SkillCall{"tuck", {}})));
    CHECK(h.is_leaf());
    CHECK(h.children.empty());
}

TEST_CASE("graph encodings of converted trees") {
    auto g1 = hfsm_to_graph(from_bt(fixtures::fig01_backchained_bt()));
    CHECK(g1.vertices().size() == 17);
    CHECK(g1.edges().size() == 44);
    auto ga = hfsm_to_graph(from_bt(fixtures::fig07a_tuck_bt()));
    CHECK(ga.vertices().size() == 20);
    CHECK(ga.edges().size() == 53);
    auto gc = hfsm_to_graph(from_bt(fixtures::fig07c_dock_bt()));
    CHECK(gc.vertices().size() == 21);
    CHECK(gc.edges().size() == 57);
}

TEST_CASE("sequence and fallback wiring") {
    auto h = from_bt(fixtures::fig05_subtree_bt());
    auto seq = h.wiring();
    // First child: SUCCESS to the next child, FAILURE and RUNNING out.
    auto first = h.children[0].id;
    int checked = 0;
    for (const auto& w : seq) {
        if (w.from != first) continue;
        if (w.status == Status::Success) CHECK(w.next_child == h.children[1].id);
        if (w.status == Status::Failure) CHECK((!w.next_child && w.outcome == Status::Failure));
        if (w.status == Status::Running) CHECK((!w.next_child && w.outcome == Status::Running));
        ++checked;
    }
    CHECK(checked == 3);

    auto fb = h.children[0].wiring();
    auto cond = h.children[0].children[0].id;
    for (const auto& w : fb)
        if (w.from == cond) {
            if (w.status == Status::Failure) CHECK(w.next_child == h.children[0].children[1].id);
            if (w.status == Status::Success) CHECK((!w.next_child && w.outcome == Status::Success));
            CHECK(w.status != Status::Running);  // conditions never run
        }
}

TEST_CASE("parallel trees cannot be converted") {
    auto tree = PolicyTree::from_spec(bts::parallel(
        "p", 1, {bts::action("a", SkillCall{"tuck", {}}), bts::action("b", SkillCall{"dock", {}})}));
    CHECK_THROWS_AS(from_bt(tree), ValidationError);
}

TEST_CASE("one step issues the same commands as one tick") {
    for (auto tree : {fixtures::fig01_backchained_bt(), fixtures::fig07e_all_bt(), fixtures::exp3_bt()}) {
        BtExecutor bt(tree);
        HfsmExecutor hf(from_bt(tree));
        FakeWorld wb, wh;
        // A scripted sequence of worlds; both engines see the same one.
        std::vector<std::vector<ConditionLiteral>> worlds = {
            {},
            {lit::battery_above(20)},
            {lit::battery_above(20), lit::robot_at("cube2")},
            {lit::battery_above(20), lit::in_hand("cube2")},
            {lit::in_hand("cube2")},
            {lit::battery_above(20), lit::object_at("cube2", "delivery")},
            {lit::battery_above(20), lit::object_at("cube2", "delivery"), lit::docked()},
        };
        for (const auto& truths : worlds) {
            wb.truths.clear();
            wh.truths.clear();
            for (const auto& l : truths) {
                wb.set(l);
                wh.set(l);
            }
            CHECK(bt.tick(wb) == hf.step(wh));
            CHECK(bt.halt_unvisited(wb) == hf.halt_unvisited(wh));
            CHECK(wb.started == wh.started);
            CHECK(wb.cancelled == wh.cancelled);
            CHECK(bt.last_tick_visited() == hf.last_step_visited());
            wb.finish("move_to");
            wh.finish("move_to");
        }
    }
}

TEST_CASE("goal-satisfied world: SUCCESS and no skills") {
    HfsmExecutor hf(from_bt(fixtures::fig01_backchained_bt()));
    FakeWorld w;
    w.set(lit::object_at("cube2", "delivery"));
    CHECK(hf.step(w) == Status::Success);
    CHECK(w.started.empty());
}

TEST_CASE("distinct trees give distinct containers") {
    std::vector<HfsmContainer> seen;
    for (const auto& [stem, doc] : fixtures::all_policies())
        if (auto* t = std::get_if<PolicyTree>(&doc)) {
            if (t->size() > 21 || stem.find("memory") != std::string::npos) continue;
            auto h = from_bt(*t);
            for (const auto& other : seen) {
                CAPTURE(stem);
                CHECK_FALSE(isomorphic(hfsm_to_graph(h), hfsm_to_graph(other)));
            }
            seen.push_back(std::move(h));
        }
}
