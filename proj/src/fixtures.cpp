#include "btfsm/fixtures.hpp"

#include "btfsm/hfsm.hpp"
#include "btfsm/planner.hpp"

namespace btfsm::fixtures {

namespace {

ActionSpec action(std::string name, std::vector<std::string> params, std::vector<ConditionLiteral> pre,
                  std::vector<ConditionLiteral> post, std::vector<Arg> skill_args = {}) {
    ActionSpec a;
    a.skill = name;
    a.name = std::move(name);
    a.params = std::move(params);
    a.preconditions = std::move(pre);
    a.postconditions = std::move(post);
    a.skill_args = std::move(skill_args);
    return a;
}

std::vector<ActionSpec> fetch_actions(const std::string& cube) {
    return {
        action("move_to", {cube}, {}, {lit::robot_at(cube)}),
        action("pick", {cube}, {lit::robot_at(cube)}, {lit::in_hand(cube)}),
        action("place", {cube}, {lit::robot_at("delivery"), lit::in_hand(cube)}, {lit::object_at(cube, "delivery")}),
    };
}

ActionSpec move_to_delivery() { return action("move_to", {"delivery"}, {}, {lit::robot_at("delivery")}); }
ActionSpec recharge_action() { return action("recharge", {}, {}, {lit::battery_above(20)}); }
ActionSpec dock_action() { return action("dock", {}, {}, {lit::docked()}); }
ActionSpec tuck_action() { return action("tuck", {}, {}, {lit::arm_tucked()}); }
ActionSpec safe_move_action() {
    ActionSpec a = action("safe_move_to", {"cube2"}, {}, {lit::robot_at("cube2")}, {std::string("cube2"), std::string("safe")});
    a.skill = "move_to";
    return a;
}

std::vector<std::string> cubes() {
    std::vector<std::string> out;
    for (int i = 1; i <= kScalabilityCubes; ++i) out.push_back("cube" + std::to_string(i));
    return out;
}

NodeId node_named(const PolicyTree& tree, const std::string& name) {
    for (const auto& [id, n] : tree.nodes())
        if (n.name == name) return id;
    throw Error("fixture tree has no node named " + name);
}

NodeId state_named(const StateMachine& sm, const std::string& name) {
    for (const auto& [id, s] : sm.states())
        if (s.name == name) return id;
    throw Error("fixture machine has no state named " + name);
}

FsmState new_state(const StateMachine& sm, const ActionSpec& a, std::vector<ConditionLiteral> pre) {
    PlanStep step{a, a.postconditions.front(), std::move(pre), false};
    return make_skill_state(NodeId{sm.next_id()}, step);
}

PolicyTree spec_tree(const PolicyTree& host, const BtSpec& spec) { return PolicyTree::from_spec(spec, NodeId{host.next_id()}); }

PolicyTree add_tuck(PolicyTree t) {
    auto sub = spec_tree(t, tuck_subtree());
    const NodeId parent = node_named(t, "do place(cube2)");
    return insert_subtree(std::move(t), parent, 1, sub);
}
PolicyTree add_safe_move(PolicyTree t) {
    auto sub = spec_tree(t, safe_move_leaf());
    const NodeId parent = node_named(t, "achieve robot_at(cube2)");
    return insert_subtree(std::move(t), parent, 2, sub);
}
PolicyTree add_dock(PolicyTree t) {
    auto sub = spec_tree(t, dock_subtree());
    return append_subtree(std::move(t), sub);
}
PolicyTree add_recharge(PolicyTree t) {
    auto sub = spec_tree(t, recharge_subtree());
    return prepend_priority_subtree(std::move(t), sub);
}

StateMachine add_tuck(StateMachine sm) {
    auto pick = state_named(sm, "pick(cube2)");
    auto next = state_named(sm, "move_to(delivery)");
    auto s = new_state(sm, tuck_action(), {lit::in_hand("cube2")});
    return add_sequential_state(std::move(sm), pick, std::move(s), next);
}
StateMachine add_safe_move(StateMachine sm) {
    auto move = state_named(sm, "move_to(cube2)");
    auto pick = state_named(sm, "pick(cube2)");
    auto s = new_state(sm, safe_move_action(), sm.state(move).precondition);
    return add_alternative_state(std::move(sm), move, std::move(s), pick);
}
StateMachine add_dock(StateMachine sm, std::vector<ConditionLiteral> pre) {
    auto last = sm.plan_order().back();
    auto done = *sm.outcome_state(Status::Success);
    auto s = new_state(sm, dock_action(), std::move(pre));
    return add_sequential_state(std::move(sm), last, std::move(s), done);
}
StateMachine add_recharge(StateMachine sm) {
    auto s = new_state(sm, recharge_action(), {});
    return add_connected_state(std::move(sm), std::move(s), low_battery(), low_battery());
}

}  // namespace

ActionLibrary fetch_library() {
    auto specs = fetch_actions("cube2");
    specs.insert(specs.begin() + 2, move_to_delivery());
    return validate_action_library(std::move(specs));
}

ActionLibrary experiment_library() {
    auto specs = fetch_actions("cube2");
    specs.insert(specs.begin() + 2, move_to_delivery());
    specs.push_back(recharge_action());
    specs.push_back(dock_action());
    specs.push_back(tuck_action());
    return validate_action_library(std::move(specs));
}

ActionLibrary scalability_library() {
    std::vector<ActionSpec> specs;
    std::vector<Arg> markers;
    for (const auto& c : cubes()) markers.emplace_back(c);
    specs.push_back(action("search", {}, {}, {lit::found(cubes())}, markers));
    for (const auto& c : cubes())
        for (auto& a : fetch_actions(c)) specs.push_back(std::move(a));
    specs.push_back(move_to_delivery());
    specs.push_back(dock_action());
    return validate_action_library(std::move(specs));
}

Goal fetch_goal() { return Goal{{lit::object_at("cube2", "delivery")}, {}}; }

Goal docking_goal() {
    return Goal{{lit::battery_above(20), lit::object_at("cube2", "delivery"), lit::docked()}, {}};
}

Goal scalability_goal() {
    Goal g;
    g.conditions.push_back(lit::found(cubes()));
    for (const auto& c : cubes()) g.conditions.push_back(lit::object_at(c, "delivery"));
    g.conditions.push_back(lit::docked());
    return g;
}

Guard low_battery() { return Guard{lit::battery_above(20), true}; }

namespace {
BtSpec guarded(const ActionSpec& a) {
    const auto& post = a.postconditions.front();
    return bts::fallback("achieve " + post.key(),
                         {bts::condition(post.key() + "?", post), bts::action(a.signature() + "!", a.call())});
}
}  // namespace

BtSpec tuck_subtree() { return guarded(tuck_action()); }
BtSpec safe_move_leaf() {
    auto a = safe_move_action();
    return bts::action(a.signature() + "!", a.call());
}
BtSpec dock_subtree() { return guarded(dock_action()); }
BtSpec recharge_subtree() { return guarded(recharge_action()); }

PolicyTree fig01_backchained_bt() { return backchain(fetch_goal(), fetch_library(), Ordering::Safe); }
PolicyTree fig03_chattering_bt() { return backchain(fetch_goal(), fetch_library(), Ordering::Naive); }
StateMachine fig02_sequential_fsm() { return build_sequential(extract_plan(fetch_goal(), fetch_library())); }
StateMachine fig04_fault_tolerant_fsm() { return build_fault_tolerant(extract_plan(fetch_goal(), fetch_library())); }

PolicyTree fig05_subtree_bt() {
    auto move = fetch_actions("cube2")[0];
    auto pick = fetch_actions("cube2")[1];
    return PolicyTree::from_spec(bts::sequence("do " + pick.signature(),
                                               {guarded(move), bts::action(pick.signature() + "!", pick.call())}));
}

PolicyTree fig07a_tuck_bt() { return add_tuck(fig01_backchained_bt()); }
PolicyTree fig07b_safe_move_bt() { return add_safe_move(fig01_backchained_bt()); }
PolicyTree fig07c_dock_bt() { return add_dock(fig01_backchained_bt()); }
PolicyTree fig07d_recharge_bt() { return add_recharge(fig01_backchained_bt()); }
PolicyTree fig07e_all_bt() { return add_dock(add_recharge(add_safe_move(add_tuck(fig01_backchained_bt())))); }

StateMachine fig11a_tuck_fsm() { return add_tuck(fig04_fault_tolerant_fsm()); }
StateMachine fig11b_safe_move_fsm() { return add_safe_move(fig04_fault_tolerant_fsm()); }
StateMachine fig11c_dock_fsm() { return add_dock(fig04_fault_tolerant_fsm(), {lit::object_at("cube2", "delivery")}); }
StateMachine fig11d_recharge_fsm() { return add_recharge(fig04_fault_tolerant_fsm()); }
StateMachine fig11e_all_fsm() {
    auto sm = add_safe_move(add_tuck(fig04_fault_tolerant_fsm()));
    return add_recharge(add_dock(std::move(sm), {lit::object_at("cube2", "delivery")}));
}

PolicyTree fig13_memory_sequence_bt() {
    const auto lib = fetch_library();
    std::vector<BtSpec> steps;
    for (const auto& a : lib.actions()) steps.push_back(bts::action(a.signature() + "!", a.call()));
    return PolicyTree::from_spec(bts::memory_sequence("fetch", std::move(steps)));
}

PolicyTree fig14_gp_bt() {
    const auto lib = fetch_library();
    const auto& acts = lib.actions();
    auto leaf = [](const ActionSpec& a) { return bts::action(a.signature() + "!", a.call()); };
    auto goal = lit::object_at("cube2", "delivery");
    auto held = lit::in_hand("cube2");
    return PolicyTree::from_spec(bts::fallback(
        "root", {bts::condition(goal.key() + "?", goal),
                 bts::sequence("fetch", {bts::fallback("grasped", {bts::condition(held.key() + "?", held), leaf(acts[0])}),
                                         leaf(acts[1]), leaf(acts[2]), leaf(acts[3])})}));
}

PolicyTree exp3_bt() { return add_dock(fig07d_recharge_bt()); }
StateMachine exp3_fsm() { return add_dock(fig11d_recharge_fsm(), {lit::object_at("cube2", "delivery")}); }

PolicyTree scalability_bt() { return backchain(scalability_goal(), scalability_library(), Ordering::Safe); }
StateMachine scalability_fsm() {
    return build_fault_tolerant(extract_plan(scalability_goal(), scalability_library()));
}
PolicyTree scalability_recharge_bt() { return add_recharge(scalability_bt()); }
StateMachine scalability_recharge_fsm() { return add_recharge(scalability_fsm()); }

std::vector<std::pair<std::string, PolicyDocument>> all_policies() {
    std::vector<std::pair<std::string, PolicyDocument>> out;
    out.emplace_back("fig01_backchained_bt", fig01_backchained_bt());
    out.emplace_back("fig02_sequential_fsm", fig02_sequential_fsm());
    out.emplace_back("fig03_chattering_bt", fig03_chattering_bt());
    out.emplace_back("fig04_fault_tolerant_fsm", fig04_fault_tolerant_fsm());
    out.emplace_back("fig05_subtree_bt", fig05_subtree_bt());
    out.emplace_back("fig06_subtree_hfsm", from_bt(fig05_subtree_bt()));
    out.emplace_back("fig07a_tuck_bt", fig07a_tuck_bt());
    out.emplace_back("fig07b_safe_move_bt", fig07b_safe_move_bt());
    out.emplace_back("fig07c_dock_bt", fig07c_dock_bt());
    out.emplace_back("fig07d_recharge_bt", fig07d_recharge_bt());
    out.emplace_back("fig07e_all_bt", fig07e_all_bt());
    out.emplace_back("fig11a_tuck_fsm", fig11a_tuck_fsm());
    out.emplace_back("fig11b_safe_move_fsm", fig11b_safe_move_fsm());
    out.emplace_back("fig11c_dock_fsm", fig11c_dock_fsm());
    out.emplace_back("fig11d_recharge_fsm", fig11d_recharge_fsm());
    out.emplace_back("fig11e_all_fsm", fig11e_all_fsm());
    out.emplace_back("fig13_memory_sequence_bt", fig13_memory_sequence_bt());
    out.emplace_back("fig14_gp_bt", fig14_gp_bt());
    out.emplace_back("exp3_docking_bt", exp3_bt());
    out.emplace_back("exp3_docking_fsm", exp3_fsm());
    out.emplace_back("scalability_bt", scalability_bt());
    out.emplace_back("scalability_fsm", scalability_fsm());
    out.emplace_back("scalability_recharge_bt", scalability_recharge_bt());
    out.emplace_back("scalability_recharge_fsm", scalability_recharge_fsm());
    return out;
}

namespace {
WorldState base_world() {
    WorldState w;
    auto st = default_stations();
    w.stations = {st.begin(), st.end()};
    return w;
}

Perturbation battery_drop(std::int64_t tick) {
    Perturbation p;
    p.tick = tick;
    p.kind = PerturbationKind::SetBattery;
    p.battery = 15;
    return p;
}

Perturbation relocate(std::int64_t tick, std::string item, std::string station) {
    Perturbation p;
    p.tick = tick;
    p.kind = PerturbationKind::SetItemLocation;
    p.item = std::move(item);
    p.station = std::move(station);
    return p;
}
}  // namespace

// Default timeline of the fetch task: move_to(cube2) runs ticks 0-4, pick
// 5-7, move_to(delivery) 8-12, place 13-15; the root first succeeds at 16.
Scenario fetch_scenario(std::string name) {
    Scenario s;
    s.name = name;
    s.initial = base_world();
    s.initial.item_locations["cube2"] = "fetch1";
    s.durations = default_durations();
    if (name == "baseline") {
        // defaults
    } else if (name == "recharge" || name == "docking") {
        s.drain_per_motion_tick = 0;
        s.perturbations.push_back(battery_drop(10));
    } else if (name == "chattering") {
        s.drain_per_motion_tick = 0;
        s.max_ticks = 300;
    } else if (name == "relocation") {
        // the cube is taken out of the gripper on the way to delivery
        s.drain_per_motion_tick = 0;
        s.perturbations.push_back(relocate(10, "cube2", "fetch2"));
    } else if (name == "post_success") {
        s.drain_per_motion_tick = 0;
        s.perturbations.push_back(relocate(18, "cube2", "fetch3"));
    } else if (name == "move_failure") {
        s.failures.push_back({"move_to", 1});
    } else {
        throw Error("unknown fetch scenario " + name);
    }
    return s;
}

Scenario scalability_scenario() {
    Scenario s;
    s.name = "scalability";
    s.initial = base_world();
    int i = 1;
    for (const auto& c : cubes()) s.initial.item_locations[c] = "fetch" + std::to_string(i++);
    s.durations = default_durations();
    s.max_ticks = 400;
    return s;
}

std::vector<Scenario> all_scenarios() {
    std::vector<Scenario> out;
    for (const char* n : {"baseline", "recharge", "docking", "chattering", "relocation", "post_success", "move_failure"})
        out.push_back(fetch_scenario(n));
    out.push_back(scalability_scenario());
    return out;
}

}  // namespace btfsm::fixtures
