#include "btfsm/bt.hpp"

#include <algorithm>
#include <functional>
#include <sstream>

namespace btfsm {

std::string_view to_string(BtKind kind) {
    switch (kind) {
    case BtKind::Sequence: return "sequence";
    case BtKind::Fallback: return "fallback";
    case BtKind::Parallel: return "parallel";
    case BtKind::MemorySequence: return "memory_sequence";
    case BtKind::Action: return "action";
    case BtKind::Condition: return "condition";
    }
    return "?";
}

std::optional<BtKind> parse_bt_kind(std::string_view text) {
    for (auto k : {BtKind::Sequence, BtKind::Fallback, BtKind::Parallel, BtKind::MemorySequence,
                   BtKind::Action, BtKind::Condition})
        if (to_string(k) == text) return k;
    return std::nullopt;
}

bool is_control(BtKind kind) { return kind != BtKind::Action && kind != BtKind::Condition; }

namespace bts {
BtSpec sequence(std::string name, std::vector<BtSpec> children) {
    return {BtKind::Sequence, std::move(name), std::move(children), {}, {}, 0};
}
BtSpec fallback(std::string name, std::vector<BtSpec> children) {
    return {BtKind::Fallback, std::move(name), std::move(children), {}, {}, 0};
}
BtSpec memory_sequence(std::string name, std::vector<BtSpec> children) {
    return {BtKind::MemorySequence, std::move(name), std::move(children), {}, {}, 0};
}
BtSpec parallel(std::string name, std::size_t threshold, std::vector<BtSpec> children) {
    return {BtKind::Parallel, std::move(name), std::move(children), {}, {}, threshold};
}
BtSpec action(std::string name, SkillCall call) {
    return {BtKind::Action, std::move(name), {}, std::move(call), {}, 0};
}
BtSpec condition(std::string name, ConditionLiteral literal) {
    return {BtKind::Condition, std::move(name), {}, {}, std::move(literal), 0};
}
}  // namespace bts

PolicyTree::PolicyTree(std::map<NodeId, BtNode> nodes, NodeId root, std::int64_t next_id)
    : nodes_(std::move(nodes)), root_(root) {
    std::int64_t max_id = 0;
    for (const auto& [id, n] : nodes_) max_id = std::max(max_id, id.value);
    next_id_ = std::max(next_id, max_id + 1);
    rebuild_parents();
    validate();
}

PolicyTree PolicyTree::from_spec(const BtSpec& spec, NodeId first_id) {
    std::map<NodeId, BtNode> nodes;
    std::int64_t next = first_id.value;
    std::function<NodeId(const BtSpec&)> build = [&](const BtSpec& s) {
        NodeId id{next++};
        BtNode n{id, s.kind, s.name, {}, s.action, s.condition, s.success_threshold};
        for (const auto& c : s.children) n.children.push_back(build(c));
        nodes.emplace(id, std::move(n));
        return id;
    };
    NodeId root = build(spec);
    return PolicyTree(std::move(nodes), root, next);
}

const BtNode& PolicyTree::node(NodeId id) const {
    auto it = nodes_.find(id);
    if (it == nodes_.end()) throw EditError("unknown node id " + to_string(id));
    return it->second;
}

std::optional<NodeId> PolicyTree::parent_of(NodeId id) const {
    auto it = parent_.find(id);
    if (it == parent_.end()) return std::nullopt;
    return it->second;
}

std::vector<NodeId> PolicyTree::subtree(NodeId id) const {
    std::vector<NodeId> out;
    std::vector<NodeId> stack{id};
    while (!stack.empty()) {
        NodeId cur = stack.back();
        stack.pop_back();
        out.push_back(cur);
        const auto& ch = node(cur).children;
        for (auto it = ch.rbegin(); it != ch.rend(); ++it) stack.push_back(*it);
    }
    return out;
}

std::vector<NodeId> PolicyTree::preorder() const {
    if (nodes_.empty()) return {};
    return subtree(root_);
}

void PolicyTree::rebuild_parents() {
    parent_.clear();
    for (const auto& [id, n] : nodes_)
        for (auto c : n.children) {
            if (!parent_.emplace(c, id).second)
                throw ValidationError("node " + to_string(c) + " has more than one parent");
        }
}

void PolicyTree::validate() const {
    if (nodes_.empty()) throw ValidationError("tree has no nodes");
    if (!contains(root_)) throw ValidationError("root " + to_string(root_) + " is not a node");
    if (parent_.count(root_)) throw ValidationError("root " + to_string(root_) + " has a parent");
    for (const auto& [id, n] : nodes_) {
        if (id != n.id) throw ValidationError("node keyed " + to_string(id) + " carries id " + to_string(n.id));
        if (id.value <= 0) throw ValidationError("node ids must be positive");
        for (auto c : n.children)
            if (!contains(c))
                throw ValidationError("node " + to_string(id) + " references missing child " + to_string(c));
        if (is_control(n.kind)) {
            if (n.children.empty())
                throw ValidationError(std::string(to_string(n.kind)) + " node " + to_string(id) + " has no children");
            if (n.kind == BtKind::Parallel &&
                (n.success_threshold < 1 || n.success_threshold > n.children.size()))
                throw ValidationError("parallel node " + to_string(id) + " threshold out of range");
        } else {
            if (!n.children.empty()) throw ValidationError("leaf node " + to_string(id) + " has children");
            if (n.kind == BtKind::Action && !n.action)
                throw ValidationError("action node " + to_string(id) + " names no skill");
            if (n.kind == BtKind::Condition && !n.condition)
                throw ValidationError("condition node " + to_string(id) + " has no predicate");
            if (n.condition) validate_literal(*n.condition);
        }
    }
    // single parent is enforced by rebuild_parents; reachability rules out cycles
    std::set<NodeId> seen;
    std::vector<NodeId> stack{root_};
    while (!stack.empty()) {
        NodeId cur = stack.back();
        stack.pop_back();
        if (!seen.insert(cur).second) throw ValidationError("cycle through node " + to_string(cur));
        for (auto c : node(cur).children) stack.push_back(c);
    }
    if (seen.size() != nodes_.size()) throw ValidationError("tree has nodes unreachable from the root");
}

BtNode& PolicyTree::mutate(NodeId id) {
    auto it = nodes_.find(id);
    if (it == nodes_.end()) throw EditError("unknown node id " + to_string(id));
    mutations_.insert(id);
    return it->second;
}

void PolicyTree::adopt(const PolicyTree& sub) {
    for (const auto& [id, n] : sub.nodes_)
        if (contains(id)) throw EditError("id collision on node " + to_string(id));
    for (const auto& [id, n] : sub.nodes_) {
        nodes_.emplace(id, n);
        for (auto c : n.children) parent_[c] = id;
    }
    next_id_ = std::max(next_id_, sub.next_id_);
}

bool structurally_equal(const PolicyTree& a, const PolicyTree& b) {
    return a.root() == b.root() && a.nodes() == b.nodes();
}

PolicyTree insert_subtree(PolicyTree tree, NodeId parent, std::size_t index, const PolicyTree& sub) {
    const BtNode& p = tree.node(parent);
    if (!is_control(p.kind)) throw EditError("cannot insert under leaf node " + to_string(parent));
    if (index > p.children.size()) throw EditError("insert position out of range");
    tree.adopt(sub);
    auto& kids = tree.mutate(parent).children;
    kids.insert(kids.begin() + static_cast<std::ptrdiff_t>(index), sub.root());
    tree.parent_[sub.root()] = parent;
    return tree;
}

PolicyTree remove_subtree(PolicyTree tree, NodeId node) {
    if (!tree.contains(node)) throw EditError("unknown node id " + to_string(node));
    if (node == tree.root()) throw EditError("cannot remove the root");
    NodeId parent = *tree.parent_of(node);
    if (tree.node(parent).children.size() == 1)
        throw EditError("removing node " + to_string(node) + " would leave its parent without children");
    for (auto id : tree.subtree(node)) {
        tree.nodes_.erase(id);
        tree.parent_.erase(id);
    }
    auto& kids = tree.mutate(parent).children;
    kids.erase(std::find(kids.begin(), kids.end(), node));
    return tree;
}

namespace {

PolicyTree wrap_in_sequence(PolicyTree tree, const PolicyTree& sub, bool sub_first) {
    if (tree.node(tree.root()).kind == BtKind::Sequence) {
        NodeId root = tree.root();
        std::size_t at = sub_first ? 0 : tree.node(root).children.size();
        return insert_subtree(std::move(tree), root, at, sub);
    }
    NodeId fresh{std::max(tree.next_id(), sub.next_id())};
    std::map<NodeId, BtNode> nodes = tree.nodes();
    for (const auto& [id, n] : sub.nodes()) {
        if (nodes.count(id)) throw EditError("id collision on node " + to_string(id));
        nodes.emplace(id, n);
    }
    BtNode root{fresh, BtKind::Sequence, "Root", {}, {}, {}, 0};
    root.children = sub_first ? std::vector<NodeId>{sub.root(), tree.root()}
                              : std::vector<NodeId>{tree.root(), sub.root()};
    nodes.emplace(fresh, root);
    return PolicyTree(std::move(nodes), fresh, fresh.value + 1);
}

}  // namespace

PolicyTree prepend_priority_subtree(PolicyTree tree, const PolicyTree& sub) {
    return wrap_in_sequence(std::move(tree), sub, true);
}

PolicyTree append_subtree(PolicyTree tree, const PolicyTree& sub) {
    return wrap_in_sequence(std::move(tree), sub, false);
}

ElementCounts count_elements(const PolicyTree& tree) {
    ElementCounts c;
    c.nodes = tree.size();
    c.edges = c.nodes ? c.nodes - 1 : 0;
    c.graphical = c.nodes + c.edges;
    c.active = c.nodes;
    return c;
}

BtExecutor::BtExecutor(PolicyTree tree) : tree_(std::move(tree)) {}

Status BtExecutor::tick(WorldPort& world) {
    visited_.clear();
    status_.clear();
    return tick_node(tree_.root(), world);
}

Status BtExecutor::tick_node(NodeId id, WorldPort& world) {
    visited_.insert(id);
    const BtNode& n = tree_.node(id);
    Status result = Status::Failure;
    switch (n.kind) {
    case BtKind::Sequence:
        result = Status::Success;
        for (auto c : n.children) {
            result = tick_node(c, world);
            if (result != Status::Success) break;
        }
        break;
    case BtKind::Fallback:
        result = Status::Failure;
        for (auto c : n.children) {
            result = tick_node(c, world);
            if (result != Status::Failure) break;
        }
        break;
    case BtKind::Parallel: {
        std::size_t ok = 0, failed = 0;
        for (auto c : n.children) {
            Status s = tick_node(c, world);
            if (s == Status::Success) ++ok;
            if (s == Status::Failure) ++failed;
        }
        if (ok >= n.success_threshold)
            result = Status::Success;
        else if (failed > n.children.size() - n.success_threshold)
            result = Status::Failure;
        else
            result = Status::Running;
        if (result != Status::Running)
            for (auto c : n.children) halt_subtree(c, world);
        break;
    }
    case BtKind::MemorySequence: {
        std::size_t& mark = memory_[id];
        result = Status::Success;
        for (; mark < n.children.size(); ++mark) {
            result = tick_node(n.children[mark], world);
            if (result != Status::Success) break;
        }
        if (result != Status::Running) mark = 0;
        break;
    }
    case BtKind::Action: {
        auto it = running_.find(id);
        if (it != running_.end()) {
            result = world.poll(it->second);
            if (result != Status::Running) running_.erase(it);
        } else {
            SkillHandle h = world.start(*n.action);
            result = world.poll(h);
            if (result == Status::Running) running_[id] = h;
        }
        break;
    }
    case BtKind::Condition:
        result = world.evaluate(*n.condition) ? Status::Success : Status::Failure;
        break;
    }
    status_[id] = result;
    return result;
}

void BtExecutor::halt_subtree(NodeId id, WorldPort& world) {
    for (auto d : tree_.subtree(id)) {
        auto it = running_.find(d);
        if (it == running_.end()) continue;
        world.cancel(it->second);
        running_.erase(it);
    }
}

std::vector<SkillCall> BtExecutor::halt_unvisited(WorldPort& world) {
    std::vector<SkillCall> cancelled;
    for (auto it = running_.begin(); it != running_.end();) {
        if (visited_.count(it->first)) {
            ++it;
            continue;
        }
        if (world.cancel(it->second)) cancelled.push_back(*tree_.node(it->first).action);
        it = running_.erase(it);
    }
    return cancelled;
}

std::optional<Status> BtExecutor::last_status(NodeId id) const {
    auto it = status_.find(id);
    if (it == status_.end()) return std::nullopt;
    return it->second;
}

std::vector<SkillCall> BtExecutor::running_skills() const {
    std::vector<SkillCall> out;
    for (const auto& [id, h] : running_) out.push_back(*tree_.node(id).action);
    return out;
}

std::string BtExecutor::render() const {
    std::ostringstream out;
    std::function<void(NodeId, int)> walk = [&](NodeId id, int depth) {
        const BtNode& n = tree_.node(id);
        auto st = last_status(id);
        out << std::string(static_cast<std::size_t>(depth) * 2, ' ') << '['
            << (st ? to_string(*st) : std::string_view("-")) << "] " << to_string(n.kind);
        if (n.action) out << ' ' << n.action->key();
        if (n.condition) out << ' ' << n.condition->key() << '?';
        if (!n.name.empty()) out << "  \"" << n.name << '"';
        out << '\n';
        for (auto c : n.children) walk(c, depth + 1);
    };
    walk(tree_.root(), 0);
    return out.str();
}

}  // namespace btfsm
