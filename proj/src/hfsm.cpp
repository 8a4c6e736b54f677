#include "btfsm/hfsm.hpp"

#include <functional>

namespace btfsm {

std::string_view to_string(ContainerKind kind) {
    switch (kind) {
    case ContainerKind::Sequence: return "sequence";
    case ContainerKind::Fallback: return "fallback";
    case ContainerKind::Action: return "action";
    case ContainerKind::Condition: return "condition";
    }
    return "?";
}

std::optional<ContainerKind> parse_container_kind(std::string_view text) {
    for (auto k : {ContainerKind::Sequence, ContainerKind::Fallback, ContainerKind::Action, ContainerKind::Condition})
        if (to_string(k) == text) return k;
    return std::nullopt;
}

std::vector<Status> HfsmContainer::emitted() const {
    if (kind == ContainerKind::Condition) return {Status::Success, Status::Failure};
    return {Status::Success, Status::Failure, Status::Running};
}

std::vector<Wire> HfsmContainer::wiring() const {
    std::vector<Wire> out;
    if (is_leaf()) return out;
    // A sequence moves on when a child succeeds, a fallback when it fails.
    const Status advance = kind == ContainerKind::Sequence ? Status::Success : Status::Failure;
    for (std::size_t i = 0; i < children.size(); ++i) {
        const auto& child = children[i];
        for (Status s : child.emitted()) {
            Wire w{child.id, s, std::nullopt, s};
            if (s == advance && i + 1 < children.size()) w.next_child = children[i + 1].id;
            out.push_back(w);
        }
    }
    return out;
}

std::size_t HfsmContainer::size() const {
    std::size_t n = 1;
    for (const auto& c : children) n += c.size();
    return n;
}

void HfsmContainer::validate() const {
    std::set<NodeId> seen;
    std::function<void(const HfsmContainer&)> walk = [&](const HfsmContainer& c) {
        const std::string where = "container " + to_string(c.id);
        if (!seen.insert(c.id).second) throw ValidationError(where + " appears twice");
        if (c.is_leaf() && !c.children.empty()) throw ValidationError(where + " is a leaf with children");
        if (!c.is_leaf() && c.children.empty()) throw ValidationError(where + " has no children");
        if (c.kind == ContainerKind::Action && !c.action) throw ValidationError(where + " names no skill");
        if (c.kind == ContainerKind::Condition) {
            if (!c.condition) throw ValidationError(where + " has no predicate");
            validate_literal(*c.condition);
        }
        for (const auto& ch : c.children) walk(ch);
    };
    walk(*this);
}

HfsmContainer from_bt(const PolicyTree& tree) {
    std::function<HfsmContainer(NodeId)> convert = [&](NodeId id) {
        const BtNode& n = tree.node(id);
        HfsmContainer c;
        c.id = n.id;
        c.name = n.name;
        switch (n.kind) {
        case BtKind::Sequence: c.kind = ContainerKind::Sequence; break;
        case BtKind::Fallback: c.kind = ContainerKind::Fallback; break;
        case BtKind::Action: c.kind = ContainerKind::Action; break;
        case BtKind::Condition: c.kind = ContainerKind::Condition; break;
        case BtKind::Parallel:
        case BtKind::MemorySequence:
            throw ValidationError("node " + to_string(id) + " is a " + std::string(to_string(n.kind)) +
                                  " node, which has no HFSM counterpart");
        }
        c.action = n.action;
        c.condition = n.condition;
        for (auto ch : n.children) c.children.push_back(convert(ch));
        return c;
    };
    return convert(tree.root());
}

HfsmExecutor::HfsmExecutor(HfsmContainer root) : root_(std::move(root)) {
    root_.validate();
    std::function<void(const HfsmContainer&)> index = [&](const HfsmContainer& c) {
        by_id_[c.id] = &c;
        for (const auto& ch : c.children) index(ch);
    };
    index(root_);
}

Status HfsmExecutor::step(WorldPort& world) {
    visited_.clear();
    return run(root_, world);
}

Status HfsmExecutor::run(const HfsmContainer& c, WorldPort& world) {
    visited_.insert(c.id);
    switch (c.kind) {
    case ContainerKind::Condition:
        return world.evaluate(*c.condition) ? Status::Success : Status::Failure;
    case ContainerKind::Action: {
        auto it = running_.find(c.id);
        Status s;
        if (it != running_.end()) {
            s = world.poll(it->second);
            if (s != Status::Running) running_.erase(it);
        } else {
            SkillHandle h = world.start(*c.action);
            s = world.poll(h);
            if (s == Status::Running) running_[c.id] = h;
        }
        return s;
    }
    case ContainerKind::Sequence:
    case ContainerKind::Fallback:
        break;
    }
    // Follow the wiring table from the entry child until an outcome is reached.
    const auto wires = c.wiring();
    const HfsmContainer* child = &c.children.front();
    for (;;) {
        Status s = run(*child, world);
        const Wire* w = nullptr;
        for (const auto& candidate : wires)
            if (candidate.from == child->id && candidate.status == s) w = &candidate;
        if (!w) throw EngineError("container " + to_string(c.id) + " has no wire for its child's status");
        if (!w->next_child) return w->outcome;
        child = by_id_.at(*w->next_child);
    }
}

std::vector<SkillCall> HfsmExecutor::halt_unvisited(WorldPort& world) {
    std::vector<SkillCall> cancelled;
    for (auto it = running_.begin(); it != running_.end();) {
        if (visited_.count(it->first)) {
            ++it;
            continue;
        }
        if (world.cancel(it->second)) cancelled.push_back(*by_id_.at(it->first)->action);
        it = running_.erase(it);
    }
    return cancelled;
}

}  // namespace btfsm
