#pragma once

#include "btfsm/core.hpp"

#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace btfsm {

enum class FsmStateKind { Skill, Selector, Outcome };
enum class FsmDesign { Sequential, FaultTolerant };

std::string_view to_string(FsmStateKind kind);
std::string_view to_string(FsmDesign design);

inline const std::string kOnSuccess = "SUCCESS";
inline const std::string kOnFailure = "FAILURE";
inline const std::string kOnRunning = "RUNNING";

// Label of the SELECTOR edge that dispatches to a given state.
std::string dispatch_label(NodeId target);
bool is_dispatch_label(const std::string& label);

// Wiring of a state added with add_connected_state: the guard key used by
// ordinary states and the one used by the SELECTOR.
struct ConnectedWiring {
    std::string condition_key;
    std::string selector_key;

    friend bool operator==(const ConnectedWiring&, const ConnectedWiring&) = default;
};

struct FsmState {
    NodeId id;
    FsmStateKind kind = FsmStateKind::Skill;
    std::string name;
    std::optional<SkillCall> skill;
    std::vector<ConditionLiteral> precondition;   // all must hold for dispatch
    std::optional<ConditionLiteral> postcondition;
    std::vector<std::string> interrupts;          // guard keys, highest priority first
    std::map<std::string, NodeId> transitions;
    Status outcome = Status::Success;             // outcome states only
    std::optional<ConnectedWiring> connected;

    friend bool operator==(const FsmState&, const FsmState&) = default;
};

FsmState make_skill_state(NodeId id, const PlanStep& step);

class StateMachine {
public:
    StateMachine() = default;
    StateMachine(FsmDesign design, std::map<NodeId, FsmState> states, NodeId initial,
                 std::vector<NodeId> plan_order, std::map<std::string, Guard> guards,
                 std::vector<ConditionLiteral> goal, std::int64_t next_id = 0);

    FsmDesign design() const { return design_; }
    NodeId initial() const { return initial_; }
    const std::map<NodeId, FsmState>& states() const { return states_; }
    const FsmState& state(NodeId id) const;
    bool contains(NodeId id) const { return states_.count(id) != 0; }
    const std::vector<NodeId>& plan_order() const { return plan_order_; }
    const std::map<std::string, Guard>& guards() const { return guards_; }
    const std::vector<ConditionLiteral>& goal() const { return goal_; }
    std::int64_t next_id() const { return next_id_; }
    std::optional<NodeId> selector() const;
    std::optional<NodeId> outcome_state(Status status) const;
    std::size_t transition_count() const;

    // Transition totality plus the structural rules of the chosen design.
    void validate() const;

    // States modified by the most recent edit operation.
    std::size_t touched_count() const { return touched_.size(); }

private:
    friend StateMachine add_sequential_state(StateMachine, NodeId, FsmState, NodeId);
    friend StateMachine add_alternative_state(StateMachine, NodeId, FsmState, NodeId);
    friend StateMachine add_connected_state(StateMachine, FsmState, const Guard&, const Guard&);
    friend StateMachine remove_state(StateMachine, NodeId);

    FsmState& touch(NodeId id);
    void insert_state(FsmState state);
    void wire_connected_into(FsmState& state) const;

    FsmDesign design_ = FsmDesign::FaultTolerant;
    std::map<NodeId, FsmState> states_;
    NodeId initial_{};
    std::vector<NodeId> plan_order_;
    std::map<std::string, Guard> guards_;
    std::vector<ConditionLiteral> goal_;
    std::int64_t next_id_ = 1;
    std::set<NodeId> touched_;
};

StateMachine build_sequential(const Plan& plan);
StateMachine build_fault_tolerant(const Plan& plan);

StateMachine add_sequential_state(StateMachine sm, NodeId preceding, FsmState state, NodeId following);
StateMachine add_alternative_state(StateMachine sm, NodeId preceding, FsmState state, NodeId following);
StateMachine add_connected_state(StateMachine sm, FsmState state, const Guard& condition,
                                 const Guard& selector_condition);
StateMachine remove_state(StateMachine sm, NodeId id);

ElementCounts count_elements(const StateMachine& sm);

std::string to_dot(const StateMachine& sm);

class FsmExecutor {
public:
    explicit FsmExecutor(StateMachine sm);

    Status step(WorldPort& world);

    bool terminated() const { return outcome_.has_value(); }
    std::optional<Status> outcome() const { return outcome_; }
    NodeId current() const { return current_; }
    const StateMachine& machine() const { return sm_; }

private:
    bool holds(const Guard& guard, WorldPort& world) const;
    bool all_hold(const std::vector<ConditionLiteral>& literals, WorldPort& world) const;
    std::optional<NodeId> fired_interrupt(const FsmState& state, WorldPort& world) const;
    std::optional<NodeId> route(const FsmState& state, Status status);
    void leave(WorldPort& world);

    StateMachine sm_;
    NodeId current_{};
    std::optional<SkillHandle> running_;
    std::optional<Status> outcome_;
};

}  // namespace btfsm
