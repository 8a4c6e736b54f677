#pragma once

// Canonical inputs: action libraries, goals, the figure policies and the
// default scenarios. Policies are derived from the backchained baseline by
// the edit operations, so node ids line up across variants.

#include "btfsm/bt.hpp"
#include "btfsm/core.hpp"
#include "btfsm/document.hpp"
#include "btfsm/fsm.hpp"
#include "btfsm/simworld.hpp"

#include <string>
#include <utility>
#include <vector>

namespace btfsm::fixtures {

inline constexpr int kScalabilityCubes = 5;

// move_to(cube2), pick(cube2), move_to(delivery), place(cube2). Place
// declares robot_at(delivery) before in_hand(cube2).
ActionLibrary fetch_library();
// The fetch actions plus recharge, dock and tuck.
ActionLibrary experiment_library();
// search, per-cube move/pick/place, move_to(delivery) and dock.
ActionLibrary scalability_library();

Goal fetch_goal();
Goal docking_goal();  // battery_above(20), object_at(cube2,delivery), docked
Goal scalability_goal();

Guard low_battery();

BtSpec tuck_subtree();
BtSpec safe_move_leaf();
BtSpec dock_subtree();
BtSpec recharge_subtree();

PolicyTree fig01_backchained_bt();
StateMachine fig02_sequential_fsm();
PolicyTree fig03_chattering_bt();
StateMachine fig04_fault_tolerant_fsm();
PolicyTree fig05_subtree_bt();
PolicyTree fig07a_tuck_bt();
PolicyTree fig07b_safe_move_bt();
PolicyTree fig07c_dock_bt();
PolicyTree fig07d_recharge_bt();
PolicyTree fig07e_all_bt();
StateMachine fig11a_tuck_fsm();
StateMachine fig11b_safe_move_fsm();
StateMachine fig11c_dock_fsm();
StateMachine fig11d_recharge_fsm();
StateMachine fig11e_all_fsm();
PolicyTree fig13_memory_sequence_bt();
PolicyTree fig14_gp_bt();
PolicyTree exp3_bt();
StateMachine exp3_fsm();
PolicyTree scalability_bt();
StateMachine scalability_fsm();
PolicyTree scalability_recharge_bt();
StateMachine scalability_recharge_fsm();

// File stem -> document, in a stable order.
std::vector<std::pair<std::string, PolicyDocument>> all_policies();

Scenario fetch_scenario(std::string name);
Scenario scalability_scenario();
std::vector<Scenario> all_scenarios();

}  // namespace btfsm::fixtures
