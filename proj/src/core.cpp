#include "btfsm/core.hpp"

#include <algorithm>
#include <array>
#include <utility>

namespace btfsm {

namespace {

struct PredicateInfo {
    Predicate predicate;
    std::string_view name;
};

constexpr std::array<PredicateInfo, 7> kPredicates{{
    {Predicate::RobotAt, "robot_at"},
    {Predicate::InHand, "in_hand"},
    {Predicate::ObjectAt, "object_at"},
    {Predicate::BatteryAbove, "battery_above"},
    {Predicate::ArmTucked, "arm_tucked"},
    {Predicate::Docked, "docked"},
    {Predicate::Found, "found"},
}};

bool is_symbol(const Arg& a) { return std::holds_alternative<std::string>(a); }

const std::string& symbol(const Arg& a) { return std::get<std::string>(a); }

}  // namespace

std::string_view to_string(Status status) {
    switch (status) {
    case Status::Success: return "SUCCESS";
    case Status::Failure: return "FAILURE";
    case Status::Running: return "RUNNING";
    }
    return "?";
}

std::optional<Status> parse_status(std::string_view text) {
    if (text == "SUCCESS") return Status::Success;
    if (text == "FAILURE") return Status::Failure;
    if (text == "RUNNING") return Status::Running;
    return std::nullopt;
}

ParseError::ParseError(std::string path, const std::string& message)
    : Error(path.empty() ? message : path + ": " + message), path_(std::move(path)) {}

std::string to_string(NodeId id) { return std::to_string(id.value); }

std::string to_string(const Arg& arg) {
    if (is_symbol(arg)) return symbol(arg);
    return std::to_string(std::get<std::int64_t>(arg));
}

std::string join_args(const std::vector<Arg>& args) {
    std::string out;
    for (std::size_t i = 0; i < args.size(); ++i) {
        if (i) out += ',';
        out += to_string(args[i]);
    }
    return out;
}

std::string_view to_string(Predicate predicate) {
    for (const auto& p : kPredicates)
        if (p.predicate == predicate) return p.name;
    return "?";
}

std::optional<Predicate> parse_predicate(std::string_view text) {
    for (const auto& p : kPredicates)
        if (p.name == text) return p.predicate;
    return std::nullopt;
}

std::string ConditionLiteral::key() const {
    return std::string(to_string(predicate)) + "(" + join_args(args) + ")";
}

void validate_literal(const ConditionLiteral& literal) {
    auto fail = [&](const std::string& why) {
        throw ValidationError("literal " + literal.key() + ": " + why);
    };
    auto all_symbols = [&] {
        return std::all_of(literal.args.begin(), literal.args.end(), is_symbol);
    };
    switch (literal.predicate) {
    case Predicate::RobotAt:
    case Predicate::InHand:
        if (literal.args.size() != 1 || !all_symbols()) fail("expects one symbol argument");
        break;
    case Predicate::ObjectAt:
        if (literal.args.size() != 2 || !all_symbols()) fail("expects an item and a station");
        break;
    case Predicate::BatteryAbove: {
        if (literal.args.size() != 1 || is_symbol(literal.args[0]))
            fail("expects exactly one numeric argument");
        auto v = std::get<std::int64_t>(literal.args[0]);
        if (v < 0 || v > 100) fail("threshold outside [0,100]");
        break;
    }
    case Predicate::ArmTucked:
    case Predicate::Docked:
        if (!literal.args.empty()) fail("takes no arguments");
        break;
    case Predicate::Found:
        if (literal.args.empty() || !all_symbols()) fail("expects one or more marker symbols");
        break;
    }
}

namespace lit {
ConditionLiteral robot_at(std::string place) { return {Predicate::RobotAt, {std::move(place)}}; }
ConditionLiteral in_hand(std::string item) { return {Predicate::InHand, {std::move(item)}}; }
ConditionLiteral object_at(std::string item, std::string station) {
    return {Predicate::ObjectAt, {std::move(item), std::move(station)}};
}
ConditionLiteral battery_above(std::int64_t percent) { return {Predicate::BatteryAbove, {percent}}; }
ConditionLiteral arm_tucked() { return {Predicate::ArmTucked, {}}; }
ConditionLiteral docked() { return {Predicate::Docked, {}}; }
ConditionLiteral found(const std::vector<std::string>& markers) {
    ConditionLiteral l{Predicate::Found, {}};
    for (const auto& m : markers) l.args.emplace_back(m);
    return l;
}
}  // namespace lit

std::string Guard::key() const { return negated ? "not " + literal.key() : literal.key(); }

std::string SkillCall::key() const { return skill + "(" + join_args(args) + ")"; }

std::string ActionSpec::signature() const {
    std::string out = name + "(";
    for (std::size_t i = 0; i < params.size(); ++i) {
        if (i) out += ',';
        out += params[i];
    }
    return out + ")";
}

SkillCall ActionSpec::call() const {
    SkillCall c{skill, skill_args};
    if (c.args.empty())
        for (const auto& p : params) c.args.emplace_back(p);
    return c;
}

std::vector<const ActionSpec*> ActionLibrary::achievers(const ConditionLiteral& literal) const {
    std::vector<const ActionSpec*> out;
    auto it = index_.find(literal);
    if (it == index_.end()) return out;
    for (auto i : it->second) out.push_back(&actions_[i]);
    return out;
}

ActionLibrary validate_action_library(std::vector<ActionSpec> specs) {
    if (specs.empty()) throw ValidationError("empty library");
    ActionLibrary lib;
    std::set<std::string> signatures;
    for (std::size_t i = 0; i < specs.size(); ++i) {
        const auto& a = specs[i];
        if (a.name.empty()) throw ValidationError("action without a name");
        if (a.skill.empty()) throw ValidationError("action " + a.signature() + " names no skill");
        if (!signatures.insert(a.signature()).second)
            throw ValidationError("duplicate action name " + a.signature());
        if (a.postconditions.empty())
            throw ValidationError("action " + a.signature() + " has no postconditions");
        for (const auto& l : a.preconditions) validate_literal(l);
        for (std::size_t p = 0; p < a.postconditions.size(); ++p) {
            const auto& post = a.postconditions[p];
            validate_literal(post);
            for (std::size_t q = 0; q < p; ++q)
                if (a.postconditions[q] == post)
                    throw ValidationError("action " + a.signature() + " repeats postcondition " + post.key());
            if (std::find(a.preconditions.begin(), a.preconditions.end(), post) != a.preconditions.end())
                throw ValidationError("self-loop on literal " + post.key() + " in action " + a.signature() +
                                      ": it is both a precondition and a postcondition");
        }
    }
    lib.actions_ = std::move(specs);
    for (std::size_t i = 0; i < lib.actions_.size(); ++i)
        for (const auto& post : lib.actions_[i].postconditions) lib.index_[post].push_back(i);
    return lib;
}

bool literals_conflict(const ConditionLiteral& a, const ConditionLiteral& b) {
    if (a == b) return false;
    auto one_way = [](const ConditionLiteral& x, const ConditionLiteral& y) {
        if (x.predicate == Predicate::RobotAt && y.predicate == Predicate::RobotAt) return true;
        if (x.predicate == Predicate::InHand && y.predicate == Predicate::InHand) return true;
        if (x.predicate == Predicate::InHand && y.predicate == Predicate::ObjectAt)
            return x.args.at(0) == y.args.at(0);
        if (x.predicate == Predicate::ObjectAt && y.predicate == Predicate::ObjectAt)
            return x.args.at(0) == y.args.at(0);
        if (x.predicate == Predicate::Docked && y.predicate == Predicate::RobotAt)
            return y.args.at(0) != Arg{std::string("dock")};
        return false;
    };
    return one_way(a, b) || one_way(b, a);
}

void apply_effects(std::set<ConditionLiteral>& state, const ActionSpec& action) {
    for (const auto& post : action.postconditions) {
        for (auto it = state.begin(); it != state.end();) {
            if (literals_conflict(*it, post))
                it = state.erase(it);
            else
                ++it;
        }
        state.insert(post);
    }
}

}  // namespace btfsm
