#include "btfsm/fixtures.hpp"
#include "btfsm/metrics.hpp"
#include "support.hpp"

#include <doctest.h>

#include <random>

using namespace btfsm;

namespace {

PolicyGraph path(std::size_t n) {
    PolicyGraph g;
    for (std::size_t i = 0; i < n; ++i) g.add_vertex("v" + std::to_string(i), "x");
    for (std::size_t i = 1; i < n; ++i) g.add_edge(i - 1, i);
    return g;
}

PolicyGraph random_graph(std::mt19937& rng, std::size_t max_vertices) {
    std::uniform_int_distribution<std::size_t> nv(0, max_vertices);
    std::uniform_int_distribution<int> label(0, 2);
    PolicyGraph g;
    const std::size_t n = nv(rng);
    for (std::size_t i = 0; i < n; ++i) g.add_vertex("v" + std::to_string(i), std::string(1, char('a' + label(rng))));
    if (n == 0) return g;
    std::uniform_int_distribution<std::size_t> pick(0, n - 1);
    std::uniform_int_distribution<std::size_t> ne(0, n * 2);
    const char* labels[] = {"SUCCESS", "FAILURE", "RUNNING"};
    for (std::size_t e = ne(rng); e > 0; --e) g.add_edge(pick(rng), pick(rng), labels[label(rng)]);
    return g;
}

}  // namespace

TEST_CASE("graph encodings") {
    auto b1 = bt_to_graph(fixtures::fig01_backchained_bt());
    CHECK(b1.vertices().size() == 14);
    CHECK(b1.edges().size() == 13);
    for (auto t : {fixtures::fig07c_dock_bt(), fixtures::fig07d_recharge_bt()}) {
        auto g = bt_to_graph(t);
        CHECK(g.vertices().size() == 18);
        CHECK(g.edges().size() == 17);
    }
    auto one = bt_to_graph(PolicyTree::from_spec(bts::action("tuck!", SkillCall{"tuck", {}})));
    CHECK(one.vertices().size() == 1);
    CHECK(one.edges().empty());

    auto f4 = fsm_to_graph(fixtures::fig04_fault_tolerant_fsm());
    CHECK(f4.vertices().size() == 6);
    CHECK(f4.edges().size() == 18);
    auto f11 = fsm_to_graph(fixtures::fig11d_recharge_fsm());
    CHECK(f11.vertices().size() == 7);
    CHECK(f11.edges().size() == 25);
    auto f2 = fsm_to_graph(fixtures::fig02_sequential_fsm());
    CHECK(f2.vertices().size() == 5);
    CHECK(f2.edges().size() == 4);
}

TEST_CASE("exact GED on fixture pairs") {
    auto g1 = bt_to_graph(fixtures::fig01_backchained_bt());
    auto r = ged_exact(g1, bt_to_graph(fixtures::fig07a_tuck_bt()));
    CHECK(r.complete);
    CHECK(r.distance == 6);
    CHECK(r.script.n_star == 3);
    CHECK(ged_exact(g1, g1).distance == 0);
}

TEST_CASE("small GED cases") {
    CHECK(ged_exact(path(3), path(4)).distance == 2);
    CHECK(brute_force_ged(path(3), path(4)) == 2);
    CHECK(brute_force_ged(path(5), path(5)) == 0);
    CHECK_THROWS_AS(brute_force_ged(path(8), path(2)), ValidationError);
}

TEST_CASE("GED properties on random pairs: brute force, symmetry, bounds, witnessing script") {
    std::mt19937 rng(20240611);
    for (int i = 0; i < 60; ++i) {
        auto a = random_graph(rng, 6);
        auto b = random_graph(rng, 6);
        for (const auto& cost : {GedCostModel{}, GedCostModel::label_sensitive()}) {
            auto r = ged_exact(a, b, cost);
            REQUIRE(r.complete);
            CHECK(r.distance == doctest::Approx(brute_force_ged(a, b, cost)));
            CHECK(r.distance == doctest::Approx(ged_exact(b, a, cost).distance));
            CHECK(r.distance >= std::abs(double(a.vertices().size()) - double(b.vertices().size())));
            CHECK(r.script.cost == doctest::Approx(r.distance));
            CHECK(isomorphic(apply_edit_script(a, r.script), b));
            CHECK(ged_anchored(a, b, cost).distance >= r.distance);
        }
    }
}

TEST_CASE("budget exhaustion is flagged, never silent") {
    std::mt19937 rng(7);
    PolicyGraph a, b;
    for (int i = 0; i < 22; ++i) {
        a.add_vertex("a" + std::to_string(i), "x");
        b.add_vertex("b" + std::to_string(i), "x");
    }
    std::uniform_int_distribution<std::size_t> pick(0, 21);
    for (int e = 0; e < 70; ++e) {
        a.add_edge(pick(rng), pick(rng));
        b.add_edge(pick(rng), pick(rng));
    }
    auto r = ged_exact(a, b, {}, std::chrono::milliseconds{1});
    if (!r.complete) {
        CHECK(r.lower_bound <= r.distance);
    }
}

TEST_CASE("anchored GED") {
    auto s = bt_to_graph(fixtures::scalability_bt());
    CHECK(ged_anchored(s, bt_to_graph(fixtures::scalability_recharge_bt())).distance == 6);
    auto f = fsm_to_graph(fixtures::scalability_fsm());
    CHECK(ged_anchored(f, fsm_to_graph(fixtures::scalability_recharge_fsm())).distance == 26);
    CHECK(ged_anchored(f, f).distance == 0);

    std::map<std::string, std::string> bad = {{"n1", "n2"}, {"n3", "n2"}};
    CHECK_THROWS_AS(ged_anchored(s, s, {}, &bad), ValidationError);
}

TEST_CASE("anchored never undercuts exact on the fixture pairs") {
    auto base = bt_to_graph(fixtures::fig01_backchained_bt());
    for (auto t : {fixtures::fig07a_tuck_bt(), fixtures::fig07b_safe_move_bt(), fixtures::fig07c_dock_bt(),
                   fixtures::fig07d_recharge_bt()}) {
        auto g = bt_to_graph(t);
        CHECK(ged_anchored(base, g).distance >= ged_exact(base, g).distance);
    }
}

TEST_CASE("cyclomatic complexity") {
    CHECK(cyclomatic(fsm_to_graph(fixtures::fig04_fault_tolerant_fsm())) == 14);
    CHECK(cyclomatic(fsm_to_graph(fixtures::fig11d_recharge_fsm())) == 20);
    for (const auto& [stem, doc] : fixtures::all_policies())
        if (auto* t = std::get_if<PolicyTree>(&doc)) {
            CAPTURE(stem);
            CHECK(cyclomatic(bt_to_graph(*t)) == 1);
        }
}

TEST_CASE("HFSM edit formula") {
    CHECK(ged_hfsm_formula(1, 1, 1) == 12);
    CHECK(ged_hfsm_formula(0, 0, 0) == 0);
    // Dock subtree: one condition, one action, and the fallback plus the new root sequence.
    auto before = component_counts(fixtures::fig01_backchained_bt());
    auto after = component_counts(fixtures::fig07c_dock_bt());
    CHECK(ged_hfsm_formula(after.conditions - before.conditions, after.actions - before.actions,
                           after.controls - before.controls) == 17);
    auto tuck = component_counts(fixtures::fig07a_tuck_bt());
    CHECK(ged_hfsm_formula(tuck.conditions - before.conditions, tuck.actions - before.actions,
                           tuck.controls - before.controls) == 12);
    auto safe = component_counts(fixtures::fig07b_safe_move_bt());
    CHECK(ged_hfsm_formula(safe.conditions - before.conditions, safe.actions - before.actions,
                           safe.controls - before.controls) == 4);
    auto recharge = component_counts(fixtures::fig07d_recharge_bt());
    CHECK(ged_hfsm_formula(recharge.conditions - before.conditions, recharge.actions - before.actions,
                           recharge.controls - before.controls) == 17);
}

TEST_CASE("effort") {
    CHECK(effort(4, 0) == 15);
    CHECK(effort(0, 0) == 3);
    CHECK(effort(4, 1) == 22);
    CHECK(effort_m(5, 1) == 22);
    for (long ms = 0; ms <= 20; ++ms)
        for (long fc = 0; fc <= 20; ++fc) CHECK(effort(ms, fc) == effort_m(ms + fc, fc));
}

TEST_CASE("effort matches the edit distance from the sequential to the fault-tolerant machine") {
    auto r = ged_exact(fsm_to_graph(fixtures::fig02_sequential_fsm()), fsm_to_graph(fixtures::fig04_fault_tolerant_fsm()));
    REQUIRE(r.complete);
    CHECK(r.distance == effort(4, 0));
}

TEST_CASE("closed-form estimates") {
    auto bt = formula_estimates(4, 0, PolicyKind::BT);
    CHECK(bt.graphical == 27);
    CHECK(bt.active == 14);
    CHECK(bt.approximate);
    auto fsm = formula_estimates(4, 0, PolicyKind::FSM);
    CHECK(fsm.graphical == 24);
    CHECK(fsm.active == 24);
    auto fsm_fc = formula_estimates(5, 1, PolicyKind::FSM);
    auto actual = count_elements(fixtures::fig11d_recharge_fsm());
    CHECK(std::abs(fsm_fc.graphical - double(actual.graphical)) <= 1);
    CHECK(fsm_fc.fully_connected_elements == 20);
}

TEST_CASE("structure counts") {
    auto c = structure_counts(fixtures::fig11d_recharge_fsm());
    CHECK(c.M == 5);
    CHECK(c.M_fc == 1);
    CHECK(c.M_s == 4);
    CHECK(c.T_fc == 4);
    CHECK(c.N == 7);
    CHECK(c.T == 25);
    CHECK(c.S == 32);
}

TEST_CASE("cost model validation") {
    GedCostModel bad;
    bad.edge_insert = -1;
    CHECK_THROWS_AS(bad.validate(), ValidationError);
}
