#include "btfsm/fsm.hpp"

#include <algorithm>
#include <sstream>

namespace btfsm {

std::string_view to_string(FsmStateKind kind) {
    switch (kind) {
    case FsmStateKind::Skill: return "skill";
    case FsmStateKind::Selector: return "selector";
    case FsmStateKind::Outcome: return "outcome";
    }
    return "?";
}

std::string_view to_string(FsmDesign design) {
    return design == FsmDesign::Sequential ? "sequential" : "fault_tolerant";
}

std::string dispatch_label(NodeId target) { return "dispatch:" + to_string(target); }

bool is_dispatch_label(const std::string& label) { return label.rfind("dispatch:", 0) == 0; }

namespace {

bool is_status_label(const std::string& label) {
    return label == kOnSuccess || label == kOnFailure || label == kOnRunning;
}

}  // namespace

FsmState make_skill_state(NodeId id, const PlanStep& step) {
    FsmState s;
    s.id = id;
    s.kind = FsmStateKind::Skill;
    s.name = step.action.signature();
    s.skill = step.action.call();
    s.precondition = step.dispatch;
    s.postcondition = step.achieves;
    return s;
}

StateMachine::StateMachine(FsmDesign design, std::map<NodeId, FsmState> states, NodeId initial,
                           std::vector<NodeId> plan_order, std::map<std::string, Guard> guards,
                           std::vector<ConditionLiteral> goal, std::int64_t next_id)
    : design_(design),
      states_(std::move(states)),
      initial_(initial),
      plan_order_(std::move(plan_order)),
      guards_(std::move(guards)),
      goal_(std::move(goal)) {
    std::int64_t max_id = 0;
    for (const auto& [id, s] : states_) max_id = std::max(max_id, id.value);
    next_id_ = std::max(next_id, max_id + 1);
    validate();
}

const FsmState& StateMachine::state(NodeId id) const {
    auto it = states_.find(id);
    if (it == states_.end()) throw EditError("unknown state id " + to_string(id));
    return it->second;
}

std::optional<NodeId> StateMachine::selector() const {
    for (const auto& [id, s] : states_)
        if (s.kind == FsmStateKind::Selector) return id;
    return std::nullopt;
}

std::optional<NodeId> StateMachine::outcome_state(Status status) const {
    for (const auto& [id, s] : states_)
        if (s.kind == FsmStateKind::Outcome && s.outcome == status) return id;
    return std::nullopt;
}

std::size_t StateMachine::transition_count() const {
    std::size_t n = 0;
    for (const auto& [id, s] : states_) n += s.transitions.size();
    return n;
}

void StateMachine::validate() const {
    if (states_.empty()) throw ValidationError("machine has no states");
    if (!contains(initial_)) throw ValidationError("initial state " + to_string(initial_) + " does not exist");
    std::size_t selectors = 0;
    for (const auto& [id, s] : states_) {
        const std::string where = "state " + to_string(id);
        if (id != s.id) throw ValidationError(where + " carries id " + to_string(s.id));
        if (id.value <= 0) throw ValidationError("state ids must be positive");
        if (s.kind == FsmStateKind::Selector) ++selectors;
        if (s.kind == FsmStateKind::Outcome) {
            if (!s.transitions.empty()) throw ValidationError(where + ": outcome states have no transitions");
            if (s.outcome == Status::Running) throw ValidationError(where + ": RUNNING is not an outcome");
            continue;
        }
        if (s.kind == FsmStateKind::Skill && !s.skill) throw ValidationError(where + " names no skill");
        for (const auto& [label, target] : s.transitions) {
            if (!contains(target))
                throw ValidationError(where + ": transition " + label + " targets missing state " + to_string(target));
            if (is_status_label(label)) continue;
            if (is_dispatch_label(label)) {
                if (s.kind != FsmStateKind::Selector)
                    throw ValidationError(where + ": only the SELECTOR dispatches");
                if (label != dispatch_label(target))
                    throw ValidationError(where + ": dispatch label " + label + " does not match its target");
                continue;
            }
            if (!guards_.count(label)) throw ValidationError(where + ": undeclared condition key " + label);
            if (std::find(s.interrupts.begin(), s.interrupts.end(), label) == s.interrupts.end())
                throw ValidationError(where + ": condition key " + label + " is not watched");
        }
        for (const auto& key : s.interrupts)
            if (!s.transitions.count(key)) throw ValidationError(where + ": watched key " + key + " has no transition");
        if (s.kind == FsmStateKind::Skill) {
            if (design_ == FsmDesign::Sequential && !s.transitions.count(kOnSuccess))
                throw ValidationError(where + ": sequential states need a SUCCESS transition");
            if (design_ == FsmDesign::FaultTolerant && !s.transitions.count(kOnFailure))
                throw ValidationError(where + ": fault-tolerant states need a FAILURE transition");
        }
    }
    if (design_ == FsmDesign::FaultTolerant && selectors != 1)
        throw ValidationError("fault-tolerant machines need exactly one SELECTOR");
    if (design_ == FsmDesign::Sequential && selectors != 0)
        throw ValidationError("sequential machines have no SELECTOR");
    std::set<NodeId> seen;
    for (auto id : plan_order_) {
        if (!contains(id) || state(id).kind != FsmStateKind::Skill)
            throw ValidationError("plan order lists " + to_string(id) + ", which is not a skill state");
        if (!seen.insert(id).second) throw ValidationError("plan order repeats " + to_string(id));
    }
}

FsmState& StateMachine::touch(NodeId id) {
    auto it = states_.find(id);
    if (it == states_.end()) throw EditError("unknown state id " + to_string(id));
    touched_.insert(id);
    return it->second;
}

void StateMachine::insert_state(FsmState state) {
    if (state.id.value <= 0) throw EditError("state ids must be positive");
    if (contains(state.id)) throw EditError("id collision on state " + to_string(state.id));
    next_id_ = std::max(next_id_, state.id.value + 1);
    states_.emplace(state.id, std::move(state));
}

void StateMachine::wire_connected_into(FsmState& state) const {
    for (const auto& [id, s] : states_) {
        if (!s.connected) continue;
        state.transitions[s.connected->condition_key] = id;
        state.interrupts.push_back(s.connected->condition_key);
    }
}

namespace {

void check_buildable(const Plan& plan) {
    if (plan.steps.empty()) throw ValidationError("empty plan");
    if (plan.steps.front().alternative) throw ValidationError("plan cannot start with an alternative step");
}

FsmState outcome_state(NodeId id) {
    FsmState s;
    s.id = id;
    s.kind = FsmStateKind::Outcome;
    s.name = "SUCCESS";
    s.outcome = Status::Success;
    return s;
}

}  // namespace

StateMachine build_sequential(const Plan& plan) {
    check_buildable(plan);
    std::map<NodeId, FsmState> states;
    std::vector<NodeId> order;
    const auto m = static_cast<std::int64_t>(plan.steps.size());
    NodeId done{m + 1};
    for (std::int64_t i = 0; i < m; ++i) {
        FsmState s = make_skill_state(NodeId{i + 1}, plan.steps[static_cast<std::size_t>(i)]);
        s.transitions[kOnSuccess] = i + 1 < m ? NodeId{i + 2} : done;
        order.push_back(s.id);
        states.emplace(s.id, std::move(s));
    }
    states.emplace(done, outcome_state(done));
    return StateMachine(FsmDesign::Sequential, std::move(states), NodeId{1}, std::move(order), {}, plan.goal);
}

StateMachine build_fault_tolerant(const Plan& plan) {
    check_buildable(plan);
    const auto m = static_cast<std::int64_t>(plan.steps.size());
    NodeId done{m + 1};
    NodeId sel{m + 2};
    std::map<NodeId, FsmState> states;
    std::vector<NodeId> order;

    FsmState selector;
    selector.id = sel;
    selector.kind = FsmStateKind::Selector;
    selector.name = "SELECTOR";
    selector.transitions[kOnRunning] = sel;
    selector.transitions[kOnSuccess] = done;

    // Main steps first; each alternative is chained behind the step before it.
    std::vector<NodeId> main_ids;
    for (std::int64_t i = 0; i < m; ++i) {
        const auto& step = plan.steps[static_cast<std::size_t>(i)];
        if (!step.alternative && i > 0 && step.dispatch.empty())
            throw ValidationError("action lacking a dispatch precondition: " + step.action.signature());
        if (!step.alternative) main_ids.push_back(NodeId{i + 1});
    }
    auto next_main = [&](NodeId id) {
        auto it = std::upper_bound(main_ids.begin(), main_ids.end(), id);
        return it == main_ids.end() ? done : *it;
    };
    for (std::int64_t i = 0; i < m; ++i) {
        const auto& step = plan.steps[static_cast<std::size_t>(i)];
        FsmState s = make_skill_state(NodeId{i + 1}, step);
        s.transitions[kOnRunning] = s.id;
        s.transitions[kOnFailure] = sel;
        s.transitions[kOnSuccess] = next_main(s.id);
        if (step.alternative) {
            states.at(NodeId{i}).transitions[kOnFailure] = s.id;
        } else {
            selector.transitions[dispatch_label(s.id)] = s.id;
            order.push_back(s.id);
        }
        states.emplace(s.id, std::move(s));
    }
    states.emplace(done, outcome_state(done));
    states.emplace(sel, std::move(selector));
    return StateMachine(FsmDesign::FaultTolerant, std::move(states), sel, std::move(order), {}, plan.goal);
}

StateMachine add_sequential_state(StateMachine sm, NodeId preceding, FsmState state, NodeId following) {
    sm.touched_.clear();
    const FsmState& pre = sm.state(preceding);
    sm.state(following);
    std::optional<std::string> label;
    if (auto it = pre.transitions.find(kOnSuccess); it != pre.transitions.end() && it->second == following)
        label = kOnSuccess;
    for (const auto& [l, t] : pre.transitions)
        if (!label && t == following) label = l;
    if (!label)
        throw EditError("no transition from " + to_string(preceding) + " to " + to_string(following));
    if (state.kind != FsmStateKind::Skill) throw EditError("only skill states can be inserted");

    const NodeId id = state.id;
    state.transitions.clear();
    state.interrupts.clear();
    state.transitions[kOnSuccess] = following;
    auto sel = sm.selector();
    if (sel) {
        state.transitions[kOnRunning] = id;
        state.transitions[kOnFailure] = *sel;
    }
    sm.wire_connected_into(state);
    const bool before_outcome = sm.state(following).kind == FsmStateKind::Outcome;
    std::optional<ConditionLiteral> post = state.postcondition;
    sm.insert_state(std::move(state));

    sm.touch(preceding).transitions[*label] = id;
    if (sel) sm.touch(*sel).transitions[dispatch_label(id)] = id;

    auto& order = sm.plan_order_;
    auto at = std::find(order.begin(), order.end(), preceding);
    if (at != order.end())
        order.insert(at + 1, id);
    else
        order.insert(std::find(order.begin(), order.end(), following), id);
    if (before_outcome && post && std::find(sm.goal_.begin(), sm.goal_.end(), *post) == sm.goal_.end())
        sm.goal_.push_back(*post);
    sm.validate();
    return sm;
}

StateMachine add_alternative_state(StateMachine sm, NodeId preceding, FsmState state, NodeId following) {
    sm.touched_.clear();
    const FsmState& pre = sm.state(preceding);
    if (pre.kind != FsmStateKind::Skill)
        throw EditError("an alternative needs a skill state to back up, not the SELECTOR or an outcome");
    auto sel = sm.selector();
    if (!sel) throw EditError("alternative states need a SELECTOR");
    auto fail = pre.transitions.find(kOnFailure);
    if (fail == pre.transitions.end() || fail->second != *sel)
        throw EditError("state " + to_string(preceding) + " does not fail over to the SELECTOR");
    sm.state(following);
    if (state.kind != FsmStateKind::Skill) throw EditError("only skill states can be inserted");

    const NodeId id = state.id;
    state.transitions.clear();
    state.interrupts.clear();
    state.transitions[kOnSuccess] = following;
    state.transitions[kOnFailure] = *sel;
    state.transitions[kOnRunning] = id;
    sm.wire_connected_into(state);
    sm.insert_state(std::move(state));
    sm.touch(preceding).transitions[kOnFailure] = id;
    sm.validate();
    return sm;
}

StateMachine add_connected_state(StateMachine sm, FsmState state, const Guard& condition,
                                 const Guard& selector_condition) {
    sm.touched_.clear();
    auto sel = sm.selector();
    if (!sel) throw EditError("connected states need a SELECTOR");
    if (state.kind != FsmStateKind::Skill) throw EditError("only skill states can be connected");
    for (const Guard* g : {&condition, &selector_condition}) {
        validate_literal(g->literal);
        auto [it, fresh] = sm.guards_.emplace(g->key(), *g);
        if (!fresh && !(it->second == *g)) throw EditError("condition key " + g->key() + " already bound");
    }
    if (sm.contains(state.id)) throw EditError("id collision on state " + to_string(state.id));

    const NodeId id = state.id;
    std::vector<NodeId> existing;
    for (const auto& [sid, s] : sm.states_)
        if (s.kind != FsmStateKind::Outcome) existing.push_back(sid);
    for (auto sid : existing) {
        FsmState& s = sm.touch(sid);
        const std::string key = s.kind == FsmStateKind::Selector ? selector_condition.key() : condition.key();
        if (s.transitions.count(key)) throw EditError("state " + to_string(sid) + " already watches " + key);
        s.transitions[key] = id;
        s.interrupts.push_back(key);
    }
    state.transitions.clear();
    state.interrupts.clear();
    state.transitions[kOnRunning] = id;
    state.transitions[kOnFailure] = *sel;
    state.connected = ConnectedWiring{condition.key(), selector_condition.key()};
    sm.insert_state(std::move(state));
    sm.validate();
    return sm;
}

StateMachine remove_state(StateMachine sm, NodeId id) {
    sm.touched_.clear();
    const FsmState removed = sm.state(id);
    if (removed.kind == FsmStateKind::Selector) throw EditError("cannot remove the SELECTOR");
    if (removed.kind == FsmStateKind::Outcome) throw EditError("cannot remove an outcome state");

    auto forward = [&](const std::string& label) -> std::optional<NodeId> {
        auto it = removed.transitions.find(label);
        if (it == removed.transitions.end() || it->second == id) return std::nullopt;
        return it->second;
    };
    for (auto& [sid, s] : sm.states_) {
        if (sid == id) continue;
        bool refers = false;
        for (const auto& [l, t] : s.transitions) refers = refers || t == id;
        if (!refers) continue;
        FsmState& st = sm.touch(sid);
        for (auto it = st.transitions.begin(); it != st.transitions.end();) {
            if (it->second != id) {
                ++it;
                continue;
            }
            std::optional<NodeId> splice;
            if (it->first == kOnSuccess || it->first == kOnFailure) splice = forward(it->first);
            if (splice && *splice != sid) {
                it->second = *splice;
                ++it;
            } else {
                const std::string label = it->first;
                it = st.transitions.erase(it);
                st.interrupts.erase(std::remove(st.interrupts.begin(), st.interrupts.end(), label),
                                    st.interrupts.end());
            }
        }
    }
    sm.states_.erase(id);
    sm.plan_order_.erase(std::remove(sm.plan_order_.begin(), sm.plan_order_.end(), id), sm.plan_order_.end());
    if (removed.connected) {
        for (const auto& key : {removed.connected->condition_key, removed.connected->selector_key}) {
            bool used = false;
            for (const auto& [sid, s] : sm.states_) used = used || s.transitions.count(key);
            if (!used) sm.guards_.erase(key);
        }
    }
    if (auto next = forward(kOnSuccess); next && removed.postcondition && sm.goal_.size() > 1 &&
                                         sm.state(*next).kind == FsmStateKind::Outcome) {
        sm.goal_.erase(std::remove(sm.goal_.begin(), sm.goal_.end(), *removed.postcondition), sm.goal_.end());
    }
    if (sm.initial_ == id) {
        auto next = forward(kOnSuccess);
        if (!next) throw EditError("removing the initial state leaves no successor");
        sm.initial_ = *next;
    }
    sm.validate();
    return sm;
}

ElementCounts count_elements(const StateMachine& sm) {
    ElementCounts c;
    c.nodes = sm.states().size();
    c.edges = sm.transition_count();
    c.graphical = c.nodes + c.edges;
    c.active = c.graphical;
    return c;
}

std::string to_dot(const StateMachine& sm) {
    std::ostringstream out;
    out << "digraph fsm {\n  rankdir=LR;\n";
    for (const auto& [id, s] : sm.states()) {
        const char* shape = s.kind == FsmStateKind::Outcome    ? "doublecircle"
                            : s.kind == FsmStateKind::Selector ? "diamond"
                                                               : "box";
        out << "  s" << id.value << " [shape=" << shape << ", label=\"" << s.name << "\"];\n";
    }
    for (const auto& [id, s] : sm.states())
        for (const auto& [label, target] : s.transitions) {
            std::string shown = is_dispatch_label(label) && !sm.state(target).precondition.empty()
                                    ? sm.state(target).precondition.front().key()
                                    : label;
            out << "  s" << id.value << " -> s" << target.value << " [label=\"" << shown << "\"];\n";
        }
    out << "}\n";
    return out.str();
}

FsmExecutor::FsmExecutor(StateMachine sm) : sm_(std::move(sm)), current_(sm_.initial()) {}

bool FsmExecutor::holds(const Guard& guard, WorldPort& world) const {
    return world.evaluate(guard.literal) != guard.negated;
}

bool FsmExecutor::all_hold(const std::vector<ConditionLiteral>& literals, WorldPort& world) const {
    for (const auto& l : literals)
        if (!world.evaluate(l)) return false;
    return true;
}

std::optional<NodeId> FsmExecutor::fired_interrupt(const FsmState& state, WorldPort& world) const {
    for (const auto& key : state.interrupts)
        if (holds(sm_.guards().at(key), world)) return state.transitions.at(key);
    return std::nullopt;
}

std::optional<NodeId> FsmExecutor::route(const FsmState& state, Status status) {
    const std::string& label = status == Status::Success ? kOnSuccess : kOnFailure;
    if (auto it = state.transitions.find(label); it != state.transitions.end()) return it->second;
    // Implicit rules: a finished connected state hands control back to the
    // SELECTOR; an unhandled failure terminates the machine.
    if (status == Status::Success && sm_.selector()) return *sm_.selector();
    return std::nullopt;
}

void FsmExecutor::leave(WorldPort& world) {
    if (running_) world.cancel(*running_);
    running_.reset();
}

Status FsmExecutor::step(WorldPort& world) {
    if (outcome_) return *outcome_;
    std::set<NodeId> entered;
    NodeId cur = current_;
    for (;;) {
        const FsmState& st = sm_.state(cur);
        if (st.kind == FsmStateKind::Outcome) {
            current_ = cur;
            outcome_ = st.outcome;
            return st.outcome;
        }
        if (!entered.insert(cur).second) {
            // Came back to a state already evaluated this step: resume next tick.
            current_ = cur;
            return Status::Running;
        }
        const bool resumed = running_ && cur == current_;
        std::optional<NodeId> next;
        if (auto target = fired_interrupt(st, world)) {
            if (resumed) leave(world);
            next = target;
        } else if (st.kind == FsmStateKind::Selector) {
            if (all_hold(sm_.goal(), world)) {
                next = route(st, Status::Success);
                if (!next) {
                    current_ = cur;
                    outcome_ = Status::Success;
                    return *outcome_;
                }
            } else {
                const auto& order = sm_.plan_order();
                for (auto it = order.rbegin(); it != order.rend() && !next; ++it) {
                    if (!st.transitions.count(dispatch_label(*it))) continue;
                    const FsmState& cand = sm_.state(*it);
                    if (!all_hold(cand.precondition, world)) continue;
                    if (cand.postcondition && world.evaluate(*cand.postcondition)) continue;
                    next = *it;
                }
                if (!next) {
                    current_ = cur;
                    outcome_ = Status::Failure;
                    return *outcome_;
                }
            }
        } else {
            std::optional<Status> status;
            if (sm_.design() == FsmDesign::FaultTolerant) {
                if (st.postcondition && world.evaluate(*st.postcondition))
                    status = Status::Success;
                else if (!all_hold(st.precondition, world))
                    status = Status::Failure;
                if (status && resumed) leave(world);
            }
            if (!status) {
                if (!resumed) running_ = world.start(*st.skill);
                status = world.poll(*running_);
                if (*status != Status::Running) running_.reset();
            }
            if (*status == Status::Running) {
                current_ = cur;
                return Status::Running;
            }
            next = route(st, *status);
            if (!next) {
                current_ = cur;
                outcome_ = *status;
                return *outcome_;
            }
        }
        current_ = cur;
        cur = *next;
    }
}

}  // namespace btfsm
