#pragma once

#include "btfsm/core.hpp"

#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace btfsm {

enum class BtKind { Sequence, Fallback, Parallel, MemorySequence, Action, Condition };

std::string_view to_string(BtKind kind);
std::optional<BtKind> parse_bt_kind(std::string_view text);
bool is_control(BtKind kind);

struct BtNode {
    NodeId id;
    BtKind kind = BtKind::Sequence;
    std::string name;
    std::vector<NodeId> children;
    std::optional<SkillCall> action;
    std::optional<ConditionLiteral> condition;
    std::size_t success_threshold = 0;  // parallel only

    friend bool operator==(const BtNode&, const BtNode&) = default;
};

// Id-free description of a subtree. Trees are usually written as a BtSpec and
// then materialised with PolicyTree::from_spec, which numbers nodes in
// pre-order.
struct BtSpec {
    BtKind kind = BtKind::Sequence;
    std::string name;
    std::vector<BtSpec> children;
    std::optional<SkillCall> action;
    std::optional<ConditionLiteral> condition;
    std::size_t success_threshold = 0;
};

namespace bts {
BtSpec sequence(std::string name, std::vector<BtSpec> children);
BtSpec fallback(std::string name, std::vector<BtSpec> children);
BtSpec memory_sequence(std::string name, std::vector<BtSpec> children);
BtSpec parallel(std::string name, std::size_t threshold, std::vector<BtSpec> children);
BtSpec action(std::string name, SkillCall call);
BtSpec condition(std::string name, ConditionLiteral literal);
}  // namespace bts

class PolicyTree {
public:
    PolicyTree() = default;
    // Validates; next_id defaults to one past the largest id in use.
    PolicyTree(std::map<NodeId, BtNode> nodes, NodeId root, std::int64_t next_id = 0);

    static PolicyTree from_spec(const BtSpec& spec, NodeId first_id = NodeId{1});

    NodeId root() const { return root_; }
    std::size_t size() const { return nodes_.size(); }
    bool contains(NodeId id) const { return nodes_.count(id) != 0; }
    const BtNode& node(NodeId id) const;
    const std::map<NodeId, BtNode>& nodes() const { return nodes_; }
    std::optional<NodeId> parent_of(NodeId id) const;
    std::int64_t next_id() const { return next_id_; }

    std::vector<NodeId> preorder() const;
    std::vector<NodeId> subtree(NodeId id) const;

    void validate() const;

    // Number of pre-existing nodes modified by edit operations since the last reset.
    std::size_t mutation_count() const { return mutations_.size(); }
    void reset_mutation_count() { mutations_.clear(); }

private:
    friend PolicyTree insert_subtree(PolicyTree, NodeId, std::size_t, const PolicyTree&);
    friend PolicyTree remove_subtree(PolicyTree, NodeId);
    friend PolicyTree prepend_priority_subtree(PolicyTree, const PolicyTree&);
    friend PolicyTree append_subtree(PolicyTree, const PolicyTree&);

    BtNode& mutate(NodeId id);
    void adopt(const PolicyTree& sub);
    void rebuild_parents();

    std::map<NodeId, BtNode> nodes_;
    std::map<NodeId, NodeId> parent_;
    NodeId root_{};
    std::int64_t next_id_ = 1;
    std::set<NodeId> mutations_;
};

bool structurally_equal(const PolicyTree& a, const PolicyTree& b);

PolicyTree insert_subtree(PolicyTree tree, NodeId parent, std::size_t index, const PolicyTree& sub);
PolicyTree remove_subtree(PolicyTree tree, NodeId node);
PolicyTree prepend_priority_subtree(PolicyTree tree, const PolicyTree& sub);
PolicyTree append_subtree(PolicyTree tree, const PolicyTree& sub);

ElementCounts count_elements(const PolicyTree& tree);

class BtExecutor {
public:
    explicit BtExecutor(PolicyTree tree);

    Status tick(WorldPort& world);
    // Cancels every running action that the latest tick did not reach.
    std::vector<SkillCall> halt_unvisited(WorldPort& world);

    const PolicyTree& tree() const { return tree_; }
    const std::set<NodeId>& last_tick_visited() const { return visited_; }
    std::optional<Status> last_status(NodeId id) const;
    std::vector<SkillCall> running_skills() const;

    // Indented listing with each node's status from the latest tick.
    std::string render() const;

private:
    Status tick_node(NodeId id, WorldPort& world);
    void halt_subtree(NodeId id, WorldPort& world);

    PolicyTree tree_;
    std::set<NodeId> visited_;
    std::map<NodeId, Status> status_;
    std::map<NodeId, SkillHandle> running_;
    std::map<NodeId, std::size_t> memory_;
};

}  // namespace btfsm
