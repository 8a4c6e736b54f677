#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>
#include <tuple>
#include <variant>
#include <vector>

namespace btfsm {

enum class Status { Success, Failure, Running };

std::string_view to_string(Status status);
std::optional<Status> parse_status(std::string_view text);

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Schema or syntax problem in an input document; path is a JSON pointer-ish
// location such as "$.nodes[3].children[0]".
class ParseError : public Error {
public:
    ParseError(std::string path, const std::string& message);
    const std::string& path() const { return path_; }

private:
    std::string path_;
};

class ValidationError : public Error {
public:
    using Error::Error;
};

class PlanningError : public Error {
public:
    using Error::Error;
};

class EditError : public Error {
public:
    using Error::Error;
};

class EngineError : public Error {
public:
    using Error::Error;
};

struct NodeId {
    std::int64_t value = 0;

    friend bool operator==(NodeId a, NodeId b) { return a.value == b.value; }
    friend bool operator!=(NodeId a, NodeId b) { return a.value != b.value; }
    friend bool operator<(NodeId a, NodeId b) { return a.value < b.value; }
};

std::string to_string(NodeId id);

using Arg = std::variant<std::string, std::int64_t>;

std::string to_string(const Arg& arg);
std::string join_args(const std::vector<Arg>& args);

enum class Predicate { RobotAt, InHand, ObjectAt, BatteryAbove, ArmTucked, Docked, Found };

std::string_view to_string(Predicate predicate);
std::optional<Predicate> parse_predicate(std::string_view text);

struct ConditionLiteral {
    Predicate predicate = Predicate::RobotAt;
    std::vector<Arg> args;

    // Canonical text form, e.g. "object_at(cube2,delivery)". Used as a map key
    // and as the transition label of condition-keyed FSM edges.
    std::string key() const;

    friend bool operator==(const ConditionLiteral& a, const ConditionLiteral& b) {
        return a.predicate == b.predicate && a.args == b.args;
    }
    friend bool operator!=(const ConditionLiteral& a, const ConditionLiteral& b) { return !(a == b); }
    friend bool operator<(const ConditionLiteral& a, const ConditionLiteral& b) {
        return std::tie(a.predicate, a.args) < std::tie(b.predicate, b.args);
    }
};

// Throws ValidationError when arity or argument types do not fit the predicate.
void validate_literal(const ConditionLiteral& literal);

namespace lit {
ConditionLiteral robot_at(std::string place);
ConditionLiteral in_hand(std::string item);
ConditionLiteral object_at(std::string item, std::string station);
ConditionLiteral battery_above(std::int64_t percent);
ConditionLiteral arm_tucked();
ConditionLiteral docked();
ConditionLiteral found(const std::vector<std::string>& markers);
}  // namespace lit

// A literal or its negation, used for FSM interrupt conditions such as
// "not battery_above(20)".
struct Guard {
    ConditionLiteral literal;
    bool negated = false;

    std::string key() const;

    friend bool operator==(const Guard& a, const Guard& b) {
        return a.negated == b.negated && a.literal == b.literal;
    }
};

struct SkillCall {
    std::string skill;
    std::vector<Arg> args;

    std::string key() const;

    friend bool operator==(const SkillCall& a, const SkillCall& b) {
        return a.skill == b.skill && a.args == b.args;
    }
    friend bool operator!=(const SkillCall& a, const SkillCall& b) { return !(a == b); }
    friend bool operator<(const SkillCall& a, const SkillCall& b) {
        return std::tie(a.skill, a.args) < std::tie(b.skill, b.args);
    }
};

struct ActionSpec {
    std::string name;
    std::vector<std::string> params;
    std::vector<ConditionLiteral> preconditions;
    std::vector<ConditionLiteral> postconditions;
    std::string skill;
    // Arguments handed to the skill; empty means "same as params".
    std::vector<Arg> skill_args;

    std::string signature() const;
    SkillCall call() const;

    friend bool operator==(const ActionSpec&, const ActionSpec&) = default;
};

struct Goal {
    std::vector<ConditionLiteral> conditions;
    std::vector<ConditionLiteral> initially_true;
};

struct PlanStep {
    ActionSpec action;
    // The condition whose Fallback this action sits under.
    ConditionLiteral achieves;
    // Conditions that must hold before the step may be dispatched: the
    // conditions of earlier siblings along the path to the root.
    std::vector<ConditionLiteral> dispatch;
    bool alternative = false;
};

struct Plan {
    std::vector<PlanStep> steps;
    std::vector<ConditionLiteral> goal;
    std::vector<ConditionLiteral> initially_true;
};

class ActionLibrary {
public:
    const std::vector<ActionSpec>& actions() const { return actions_; }
    // Achievers in declaration order.
    std::vector<const ActionSpec*> achievers(const ConditionLiteral& literal) const;
    std::size_t postcondition_keys() const { return index_.size(); }
    const std::map<ConditionLiteral, std::vector<std::size_t>>& index() const { return index_; }

private:
    friend ActionLibrary validate_action_library(std::vector<ActionSpec> specs);
    std::vector<ActionSpec> actions_;
    std::map<ConditionLiteral, std::vector<std::size_t>> index_;
};

ActionLibrary validate_action_library(std::vector<ActionSpec> specs);

// Two literals that cannot hold in the same world state.
bool literals_conflict(const ConditionLiteral& a, const ConditionLiteral& b);

// Symbolic application of an action's postconditions: every literal that
// conflicts with a new postcondition is dropped, then the postconditions are added.
void apply_effects(std::set<ConditionLiteral>& state, const ActionSpec& action);

struct ElementCounts {
    std::size_t nodes = 0;
    std::size_t edges = 0;
    std::size_t graphical = 0;
    std::size_t active = 0;
};

struct SkillHandle {
    std::int64_t value = -1;

    friend bool operator==(SkillHandle a, SkillHandle b) { return a.value == b.value; }
    friend bool operator<(SkillHandle a, SkillHandle b) { return a.value < b.value; }
};

// What every execution engine talks to: a condition evaluator plus a skill
// controller with the start/poll/cancel lifecycle.
class WorldPort {
public:
    virtual ~WorldPort() = default;
    virtual bool evaluate(const ConditionLiteral& literal) = 0;
    virtual SkillHandle start(const SkillCall& call) = 0;
    virtual Status poll(SkillHandle handle) = 0;
    // Returns true when the skill was still running and has now been stopped.
    virtual bool cancel(SkillHandle handle) = 0;
};

}  // namespace btfsm
