#pragma once

#include "btfsm/bt.hpp"
#include "btfsm/core.hpp"

#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace btfsm {

enum class ContainerKind { Sequence, Fallback, Action, Condition };

std::string_view to_string(ContainerKind kind);
std::optional<ContainerKind> parse_container_kind(std::string_view text);

// Where a child's status leads inside its parent container: either to the
// next child (by id) or out through one of the parent's outcomes.
struct Wire {
    NodeId from;
    Status status = Status::Success;
    std::optional<NodeId> next_child;
    Status outcome = Status::Success;

    friend bool operator==(const Wire&, const Wire&) = default;
};

struct HfsmContainer {
    NodeId id;
    ContainerKind kind = ContainerKind::Action;
    std::string name;
    std::optional<SkillCall> action;
    std::optional<ConditionLiteral> condition;
    std::vector<HfsmContainer> children;

    bool is_leaf() const { return kind == ContainerKind::Action || kind == ContainerKind::Condition; }
    // Statuses this container can report upward; conditions never run.
    std::vector<Status> emitted() const;
    // Internal wiring of the children, derived from the container kind.
    std::vector<Wire> wiring() const;
    std::size_t size() const;
    void validate() const;

    friend bool operator==(const HfsmContainer&, const HfsmContainer&) = default;
};

HfsmContainer from_bt(const PolicyTree& tree);

class HfsmExecutor {
public:
    explicit HfsmExecutor(HfsmContainer root);
    HfsmExecutor(const HfsmExecutor&) = delete;
    HfsmExecutor& operator=(const HfsmExecutor&) = delete;

    Status step(WorldPort& world);
    std::vector<SkillCall> halt_unvisited(WorldPort& world);

    const HfsmContainer& root() const { return root_; }
    const std::set<NodeId>& last_step_visited() const { return visited_; }

private:
    Status run(const HfsmContainer& c, WorldPort& world);

    HfsmContainer root_;
    std::map<NodeId, const HfsmContainer*> by_id_;
    std::set<NodeId> visited_;
    std::map<NodeId, SkillHandle> running_;
};

}  // namespace btfsm
