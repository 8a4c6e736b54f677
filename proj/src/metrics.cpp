#include "btfsm/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <functional>
#include <limits>
#include <numeric>
#include <queue>
#include <sstream>

namespace btfsm {

std::size_t PolicyGraph::add_vertex(std::string id, std::string label, bool sink) {
    if (index_.count(id)) throw ValidationError("duplicate vertex id " + id);
    index_[id] = vertices_.size();
    vertices_.push_back(Vertex{std::move(id), std::move(label), sink});
    return vertices_.size() - 1;
}

void PolicyGraph::add_edge(std::size_t from, std::size_t to, std::string label) {
    if (from >= vertices_.size() || to >= vertices_.size()) throw ValidationError("edge references a missing vertex");
    edges_.push_back(Edge{from, to, std::move(label)});
}

void PolicyGraph::add_edge(const std::string& from, const std::string& to, std::string label) {
    auto a = index_of(from), b = index_of(to);
    if (!a || !b) throw ValidationError("edge " + from + "->" + to + " references a missing vertex");
    add_edge(*a, *b, std::move(label));
}

std::optional<std::size_t> PolicyGraph::index_of(const std::string& id) const {
    auto it = index_.find(id);
    if (it == index_.end()) return std::nullopt;
    return it->second;
}

std::size_t PolicyGraph::sink_count() const {
    return static_cast<std::size_t>(std::count_if(vertices_.begin(), vertices_.end(), [](const Vertex& v) { return v.sink; }));
}

PolicyGraph bt_to_graph(const PolicyTree& tree) {
    PolicyGraph g(GraphKind::BehaviorTree);
    for (auto id : tree.preorder()) {
        const BtNode& n = tree.node(id);
        std::string label(to_string(n.kind));
        if (n.action) label += ":" + n.action->key();
        if (n.condition) label += ":" + n.condition->key();
        g.add_vertex("n" + to_string(id), label, n.children.empty());
    }
    for (auto id : tree.preorder())
        for (auto c : tree.node(id).children) g.add_edge("n" + to_string(id), "n" + to_string(c));
    return g;
}

PolicyGraph fsm_to_graph(const StateMachine& sm) {
    PolicyGraph g(GraphKind::StateMachine);
    for (const auto& [id, s] : sm.states()) {
        std::string label(to_string(s.kind));
        if (s.skill) label += ":" + s.skill->key();
        if (s.kind == FsmStateKind::Outcome) label += ":" + std::string(to_string(s.outcome));
        g.add_vertex("s" + to_string(id), label, s.kind == FsmStateKind::Outcome);
    }
    for (const auto& [id, s] : sm.states())
        for (const auto& [label, target] : s.transitions)
            g.add_edge("s" + to_string(id), "s" + to_string(target), is_dispatch_label(label) ? "dispatch" : label);
    return g;
}

PolicyGraph hfsm_to_graph(const HfsmContainer& root) {
    PolicyGraph g(GraphKind::Hierarchical);
    for (Status s : {Status::Success, Status::Failure, Status::Running})
        g.add_vertex("OUT:" + std::string(to_string(s)), "outcome:" + std::string(to_string(s)), true);
    std::function<void(const HfsmContainer&)> add = [&](const HfsmContainer& c) {
        std::string label(to_string(c.kind));
        if (c.action) label += ":" + c.action->key();
        if (c.condition) label += ":" + c.condition->key();
        g.add_vertex("c" + to_string(c.id), label);
        for (const auto& ch : c.children) add(ch);
    };
    add(root);
    std::function<void(const HfsmContainer&)> wire = [&](const HfsmContainer& c) {
        const std::string id = "c" + to_string(c.id);
        for (Status s : c.emitted()) g.add_edge(id, "OUT:" + std::string(to_string(s)), std::string(to_string(s)));
        if (!c.children.empty()) g.add_edge(id, "c" + to_string(c.children.front().id), "entry");
        for (const auto& ch : c.children) wire(ch);
    };
    wire(root);
    return g;
}

void GedCostModel::validate() const {
    for (double c : {node_insert, node_delete, node_substitute, edge_insert, edge_delete, edge_substitute})
        if (!(c >= 0)) throw ValidationError("edit costs must be non-negative");
}

std::string_view to_string(EditKind kind) {
    switch (kind) {
    case EditKind::InsertVertex: return "insert-vertex";
    case EditKind::DeleteVertex: return "delete-vertex";
    case EditKind::SubstituteVertex: return "relabel-vertex";
    case EditKind::InsertEdge: return "insert-edge";
    case EditKind::DeleteEdge: return "delete-edge";
    case EditKind::SubstituteEdge: return "relabel-edge";
    }
    return "?";
}

std::string to_string(const EditScript& script) {
    std::ostringstream out;
    for (const auto& op : script.ops) {
        out << to_string(op.kind) << ' ';
        switch (op.kind) {
        case EditKind::InsertVertex:
        case EditKind::DeleteVertex: out << op.vertex << " [" << op.label << ']'; break;
        case EditKind::SubstituteVertex: out << op.vertex << " [" << op.label << " -> " << op.new_label << ']'; break;
        case EditKind::InsertEdge:
        case EditKind::DeleteEdge: out << op.from << " -> " << op.to << " [" << op.label << ']'; break;
        case EditKind::SubstituteEdge:
            out << op.from << " -> " << op.to << " [" << op.label << " -> " << op.new_label << ']';
            break;
        }
        out << "  cost " << op.cost << '\n';
    }
    out << "total " << script.cost << ", vertex operations " << script.n_star << '\n';
    return out.str();
}

namespace {

constexpr double kEps = 1e-9;
constexpr int kNone = -1;  // vertex mapped to nothing

// Sorted edge labels per ordered vertex pair.
class PairTable {
public:
    explicit PairTable(const PolicyGraph& g) : n_(g.vertices().size()), cells_(n_ * n_) {
        for (const auto& e : g.edges()) cells_[e.from * n_ + e.to].push_back(e.label);
        for (auto& c : cells_) std::sort(c.begin(), c.end());
    }
    const std::vector<std::string>& at(int a, int b) const {
        static const std::vector<std::string> empty;
        if (a == kNone || b == kNone) return empty;
        return cells_[static_cast<std::size_t>(a) * n_ + static_cast<std::size_t>(b)];
    }

private:
    std::size_t n_;
    std::vector<std::vector<std::string>> cells_;
};

std::size_t common_labels(const std::vector<std::string>& a, const std::vector<std::string>& b) {
    std::size_t i = 0, j = 0, m = 0;
    while (i < a.size() && j < b.size()) {
        if (a[i] == b[j]) {
            ++m, ++i, ++j;
        } else if (a[i] < b[j]) {
            ++i;
        } else {
            ++j;
        }
    }
    return m;
}

// Cheapest way to turn one multiset of parallel edges into another.
double pair_cost(const std::vector<std::string>& a, const std::vector<std::string>& b, const GedCostModel& c) {
    if (a.empty() && b.empty()) return 0;
    const double m = static_cast<double>(common_labels(a, b));
    const double ra = static_cast<double>(a.size()) - m;
    const double rb = static_cast<double>(b.size()) - m;
    const double s = std::min(ra, rb);
    return s * std::min(c.edge_substitute, c.edge_delete + c.edge_insert) + (ra - s) * c.edge_delete +
           (rb - s) * c.edge_insert;
}

double vertex_cost(const PolicyGraph& g1, const PolicyGraph& g2, int u, int t, const GedCostModel& c) {
    if (u == kNone && t == kNone) return 0;
    if (u == kNone) return c.node_insert;
    if (t == kNone) return c.node_delete;
    return g1.vertices()[static_cast<std::size_t>(u)].label == g2.vertices()[static_cast<std::size_t>(t)].label
               ? 0
               : c.node_substitute;
}

std::string result_id(const PolicyGraph& g1, const PolicyGraph& g2, int u1, int u2) {
    if (u1 != kNone) return g1.vertices()[static_cast<std::size_t>(u1)].id;
    return "+" + g2.vertices()[static_cast<std::size_t>(u2)].id;
}

void edge_ops(const std::vector<std::string>& a, const std::vector<std::string>& b, const std::string& from,
              const std::string& to, const GedCostModel& c, std::vector<EditOp>& removals, std::vector<EditOp>& additions) {
    std::vector<std::string> ra, rb;
    std::set_difference(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(ra));
    std::set_difference(b.begin(), b.end(), a.begin(), a.end(), std::back_inserter(rb));
    std::size_t i = 0;
    if (c.edge_substitute <= c.edge_delete + c.edge_insert)
        for (; i < std::min(ra.size(), rb.size()); ++i)
            removals.push_back({EditKind::SubstituteEdge, {}, from, to, ra[i], rb[i], c.edge_substitute});
    for (std::size_t k = i; k < ra.size(); ++k)
        removals.push_back({EditKind::DeleteEdge, {}, from, to, ra[k], {}, c.edge_delete});
    for (std::size_t k = i; k < rb.size(); ++k)
        additions.push_back({EditKind::InsertEdge, {}, from, to, rb[k], {}, c.edge_insert});
}

// Builds the edit script induced by a complete vertex mapping g1 -> g2.
EditScript script_for_mapping(const PolicyGraph& g1, const PolicyGraph& g2, const std::vector<int>& map,
                              const GedCostModel& c) {
    const PairTable t1(g1), t2(g2);
    const int n1 = static_cast<int>(g1.vertices().size());
    const int n2 = static_cast<int>(g2.vertices().size());
    std::vector<int> inverse(static_cast<std::size_t>(n2), kNone);
    for (int u = 0; u < n1; ++u)
        if (map[static_cast<std::size_t>(u)] != kNone) inverse[static_cast<std::size_t>(map[static_cast<std::size_t>(u)])] = u;

    std::vector<EditOp> edge_removals, vertex_ops, edge_additions;
    for (int u = 0; u < n1; ++u) {
        const auto& v = g1.vertices()[static_cast<std::size_t>(u)];
        int t = map[static_cast<std::size_t>(u)];
        if (t == kNone) {
            vertex_ops.push_back({EditKind::DeleteVertex, v.id, {}, {}, v.label, {}, c.node_delete});
        } else if (v.label != g2.vertices()[static_cast<std::size_t>(t)].label) {
            vertex_ops.push_back({EditKind::SubstituteVertex, v.id, {}, {}, v.label,
                                  g2.vertices()[static_cast<std::size_t>(t)].label, c.node_substitute});
        }
    }
    for (int t = 0; t < n2; ++t)
        if (inverse[static_cast<std::size_t>(t)] == kNone) {
            const auto& v = g2.vertices()[static_cast<std::size_t>(t)];
            vertex_ops.push_back({EditKind::InsertVertex, "+" + v.id, {}, {}, v.label, {}, c.node_insert});
        }
    // Every ordered pair of result vertices: g1 vertices carry their images,
    // inserted vertices come from g2 alone.
    std::vector<std::pair<int, int>> result;  // (g1 index or none, g2 index or none)
    for (int u = 0; u < n1; ++u) result.emplace_back(u, map[static_cast<std::size_t>(u)]);
    for (int t = 0; t < n2; ++t)
        if (inverse[static_cast<std::size_t>(t)] == kNone) result.emplace_back(kNone, t);
    for (const auto& [a1, a2] : result)
        for (const auto& [b1, b2] : result) {
            const auto& la = t1.at(a1, b1);
            const auto& lb = t2.at(a2, b2);
            if (la.empty() && lb.empty()) continue;
            edge_ops(la, lb, result_id(g1, g2, a1, a2), result_id(g1, g2, b1, b2), c, edge_removals, edge_additions);
        }
    EditScript s;
    for (auto* part : {&edge_removals, &vertex_ops, &edge_additions})
        for (auto& op : *part) {
            s.cost += op.cost;
            if (op.kind == EditKind::InsertVertex || op.kind == EditKind::DeleteVertex) ++s.n_star;
            s.ops.push_back(std::move(op));
        }
    return s;
}

class AStar {
public:
    AStar(const PolicyGraph& g1, const PolicyGraph& g2, const GedCostModel& c)
        : g1_(g1), g2_(g2), c_(c), t1_(g1), t2_(g2),
          n1_(static_cast<int>(g1.vertices().size())), n2_(static_cast<int>(g2.vertices().size())) {
        order_ = vertex_order(g1);
        std::vector<int> pos(static_cast<std::size_t>(n1_));
        for (int k = 0; k < n1_; ++k) pos[static_cast<std::size_t>(order_[static_cast<std::size_t>(k)])] = k;
        // g1 edges still unaccounted once the first k vertices are placed
        e1_rem_.assign(static_cast<std::size_t>(n1_) + 1, 0);
        for (const auto& e : g1.edges()) {
            int last = std::max(pos[e.from], pos[e.to]);
            for (int k = 0; k <= last; ++k) ++e1_rem_[static_cast<std::size_t>(k)];
        }
        cnt2_.assign(static_cast<std::size_t>(n2_ * n2_), 0);
        for (const auto& e : g2.edges()) ++cnt2_[e.from * static_cast<std::size_t>(n2_) + e.to];
    }

    GedResult solve(std::chrono::milliseconds budget) {
        const auto deadline = std::chrono::steady_clock::now() + budget;
        nodes_.push_back(Node{-1, 0, kNone, 0, 0, 0, false});
        nodes_[0].f = heuristic(0, 0, 0);
        dive();
        using Entry = std::tuple<double, int, int>;  // f, -depth, index
        std::priority_queue<Entry, std::vector<Entry>, std::greater<>> open;
        open.emplace(nodes_[0].f, 0, 0);
        std::size_t expanded = 0;
        bool exhausted = false;
        double lower = nodes_[0].f;
        while (!open.empty()) {
            auto [f, negdepth, idx] = open.top();
            open.pop();
            lower = f;
            if (f >= best_ - kEps) {
                lower = best_;
                break;
            }
            const Node node = nodes_[static_cast<std::size_t>(idx)];
            if (node.complete) {
                record(idx);
                lower = best_;
                break;
            }
            if ((++expanded & 255) == 0 &&
                (std::chrono::steady_clock::now() > deadline || nodes_.size() > kNodeCap)) {
                exhausted = true;
                break;
            }
            for (int child : expand(idx)) {
                const double cf = nodes_[static_cast<std::size_t>(child)].f;
                if (cf < best_ - kEps) open.emplace(cf, -nodes_[static_cast<std::size_t>(child)].depth, child);
            }
        }
        GedResult r;
        r.complete = !exhausted;
        r.distance = best_;
        r.lower_bound = exhausted ? std::min(lower, best_) : best_;
        r.script = script_for_mapping(g1_, g2_, best_map_, c_);
        r.expanded = expanded;
        return r;
    }

private:
    struct Node {
        int parent;
        int depth;   // g1 vertices placed
        int target;  // image of order_[depth-1]
        double g;
        double f;
        int e2_inside;  // g2 edges with both endpoints already used as images
        bool complete;
    };

    static constexpr std::size_t kNodeCap = 30'000'000;

    static std::vector<int> vertex_order(const PolicyGraph& g) {
        const int n = static_cast<int>(g.vertices().size());
        std::vector<int> degree(static_cast<std::size_t>(n), 0);
        std::vector<std::vector<int>> adj(static_cast<std::size_t>(n));
        for (const auto& e : g.edges()) {
            ++degree[e.from], ++degree[e.to];
            adj[e.from].push_back(static_cast<int>(e.to));
            adj[e.to].push_back(static_cast<int>(e.from));
        }
        auto by_degree = [&](int a, int b) {
            return degree[static_cast<std::size_t>(a)] != degree[static_cast<std::size_t>(b)]
                       ? degree[static_cast<std::size_t>(a)] > degree[static_cast<std::size_t>(b)]
                       : a < b;
        };
        std::vector<int> all(static_cast<std::size_t>(n));
        std::iota(all.begin(), all.end(), 0);
        std::stable_sort(all.begin(), all.end(), by_degree);
        std::vector<char> seen(static_cast<std::size_t>(n), 0);
        std::vector<int> order;
        for (int start : all) {
            if (seen[static_cast<std::size_t>(start)]) continue;
            std::deque<int> queue{start};
            seen[static_cast<std::size_t>(start)] = 1;
            while (!queue.empty()) {
                int v = queue.front();
                queue.pop_front();
                order.push_back(v);
                auto nb = adj[static_cast<std::size_t>(v)];
                std::sort(nb.begin(), nb.end(), by_degree);
                for (int w : nb)
                    if (!seen[static_cast<std::size_t>(w)]) {
                        seen[static_cast<std::size_t>(w)] = 1;
                        queue.push_back(w);
                    }
            }
        }
        return order;
    }

    double heuristic(int depth, int used, int e2_inside) const {
        const int r1 = n1_ - depth;
        const int f2 = n2_ - used;
        double h = r1 > f2 ? (r1 - f2) * c_.node_delete : (f2 - r1) * c_.node_insert;
        const int e1 = e1_rem_[static_cast<std::size_t>(depth)];
        const int e2 = static_cast<int>(g2_.edges().size()) - e2_inside;
        h += e1 > e2 ? (e1 - e2) * c_.edge_delete : (e2 - e1) * c_.edge_insert;
        return h;
    }

    void mapping_of(int idx, std::vector<int>& map) const {
        map.assign(static_cast<std::size_t>(n1_), kNone);
        for (int i = idx; nodes_[static_cast<std::size_t>(i)].depth > 0; i = nodes_[static_cast<std::size_t>(i)].parent) {
            const Node& nd = nodes_[static_cast<std::size_t>(i)];
            if (nd.complete) continue;
            map[static_cast<std::size_t>(order_[static_cast<std::size_t>(nd.depth - 1)])] = nd.target;
        }
    }

    std::vector<int> expand(int idx) {
        std::vector<int> children;
        const Node node = nodes_[static_cast<std::size_t>(idx)];
        mapping_of(idx, scratch_map_);
        std::vector<char> used(static_cast<std::size_t>(n2_), 0);
        int used_count = 0;
        for (int v : scratch_map_)
            if (v != kNone) used[static_cast<std::size_t>(v)] = 1, ++used_count;
        if (node.depth == n1_) {
            const double extra = (n2_ - used_count) * c_.node_insert +
                                 (static_cast<int>(g2_.edges().size()) - node.e2_inside) * c_.edge_insert;
            nodes_.push_back(Node{idx, node.depth, kNone, node.g + extra, node.g + extra, node.e2_inside, true});
            children.push_back(static_cast<int>(nodes_.size()) - 1);
            return children;
        }
        const int u = order_[static_cast<std::size_t>(node.depth)];
        auto try_target = [&](int t) {
            double inc = vertex_cost(g1_, g2_, u, t, c_) + pair_cost(t1_.at(u, u), t2_.at(t, t), c_);
            int inside = node.e2_inside;
            if (t != kNone) inside += cnt2_[static_cast<std::size_t>(t * n2_ + t)];
            for (int k = 0; k < node.depth; ++k) {
                const int w = order_[static_cast<std::size_t>(k)];
                const int tw = scratch_map_[static_cast<std::size_t>(w)];
                inc += pair_cost(t1_.at(w, u), t2_.at(tw, t), c_) + pair_cost(t1_.at(u, w), t2_.at(t, tw), c_);
                if (t != kNone && tw != kNone)
                    inside += cnt2_[static_cast<std::size_t>(tw * n2_ + t)] + cnt2_[static_cast<std::size_t>(t * n2_ + tw)];
            }
            const double g = node.g + inc;
            const double f = g + heuristic(node.depth + 1, used_count + (t != kNone ? 1 : 0), inside);
            nodes_.push_back(Node{idx, node.depth + 1, t, g, f, inside, false});
            children.push_back(static_cast<int>(nodes_.size()) - 1);
        };
        for (int t = 0; t < n2_; ++t)
            if (!used[static_cast<std::size_t>(t)]) try_target(t);
        try_target(kNone);
        return children;
    }

    void record(int idx) {
        const Node& nd = nodes_[static_cast<std::size_t>(idx)];
        if (nd.g < best_ - kEps || best_map_.empty()) {
            best_ = nd.g;
            mapping_of(idx, best_map_);
        }
    }

    // Greedy descent to get an initial upper bound.
    void dive() {
        int idx = 0;
        for (;;) {
            auto kids = expand(idx);
            int pick = kids.front();
            for (int k : kids)
                if (nodes_[static_cast<std::size_t>(k)].f < nodes_[static_cast<std::size_t>(pick)].f - kEps) pick = k;
            if (nodes_[static_cast<std::size_t>(pick)].complete) {
                record(pick);
                return;
            }
            idx = pick;
        }
    }

    const PolicyGraph& g1_;
    const PolicyGraph& g2_;
    const GedCostModel& c_;
    PairTable t1_, t2_;
    int n1_, n2_;
    std::vector<int> order_;
    std::vector<int> e1_rem_;
    std::vector<int> cnt2_;
    std::vector<Node> nodes_;
    std::vector<int> scratch_map_;
    double best_ = std::numeric_limits<double>::infinity();
    std::vector<int> best_map_;
};

}  // namespace

GedResult ged_exact(const PolicyGraph& g1, const PolicyGraph& g2, const GedCostModel& cost,
                    std::chrono::milliseconds budget) {
    cost.validate();
    return AStar(g1, g2, cost).solve(budget);
}

GedResult ged_anchored(const PolicyGraph& g1, const PolicyGraph& g2, const GedCostModel& cost,
                       const std::map<std::string, std::string>* anchor) {
    cost.validate();
    std::vector<int> map(g1.vertices().size(), kNone);
    std::vector<char> taken(g2.vertices().size(), 0);
    for (std::size_t u = 0; u < g1.vertices().size(); ++u) {
        std::string target = g1.vertices()[u].id;
        if (anchor) {
            auto it = anchor->find(target);
            if (it == anchor->end()) continue;
            target = it->second;
        }
        auto t = g2.index_of(target);
        if (!t) continue;
        if (taken[*t]) throw ValidationError("anchor maps two ids to " + target);
        taken[*t] = 1;
        map[u] = static_cast<int>(*t);
    }
    GedResult r;
    r.script = script_for_mapping(g1, g2, map, cost);
    r.distance = r.lower_bound = r.script.cost;
    return r;
}

double brute_force_ged(const PolicyGraph& g1, const PolicyGraph& g2, const GedCostModel& cost) {
    cost.validate();
    const std::size_t n1 = g1.vertices().size(), n2 = g2.vertices().size();
    if (n1 > kBruteForceLimit || n2 > kBruteForceLimit)
        throw ValidationError("brute-force GED is limited to " + std::to_string(kBruteForceLimit) + " vertices");

    // Edge label multisets keyed by endpoint pair; inserted g2 vertices are
    // offset by n1 so that every result vertex has one index.
    auto total = [&](const std::vector<int>& map) {
        double sum = 0;
        std::vector<int> image_of(n2, -1);
        for (std::size_t u = 0; u < n1; ++u) {
            if (map[u] < 0) {
                sum += cost.node_delete;
            } else {
                image_of[static_cast<std::size_t>(map[u])] = static_cast<int>(u);
                if (g1.vertices()[u].label != g2.vertices()[static_cast<std::size_t>(map[u])].label)
                    sum += cost.node_substitute;
            }
        }
        for (std::size_t t = 0; t < n2; ++t)
            if (image_of[t] < 0) sum += cost.node_insert;
        std::map<std::pair<long, long>, std::pair<std::multiset<std::string>, std::multiset<std::string>>> pairs;
        for (const auto& e : g1.edges()) {
            long a = map[e.from] < 0 ? -1 - static_cast<long>(e.from) : map[e.from];
            long b = map[e.to] < 0 ? -1 - static_cast<long>(e.to) : map[e.to];
            pairs[{a, b}].first.insert(e.label);
        }
        for (const auto& e : g2.edges()) pairs[{static_cast<long>(e.from), static_cast<long>(e.to)}].second.insert(e.label);
        for (auto& [key, sides] : pairs) {
            auto& [left, right] = sides;
            double common = 0;
            for (auto it = left.begin(); it != left.end();) {
                auto hit = right.find(*it);
                if (hit != right.end()) {
                    right.erase(hit);
                    it = left.erase(it);
                    ++common;
                } else {
                    ++it;
                }
            }
            const double a = static_cast<double>(left.size()), b = static_cast<double>(right.size());
            const double s = std::min(a, b);
            sum += s * std::min(cost.edge_substitute, cost.edge_delete + cost.edge_insert) +
                   (a - s) * cost.edge_delete + (b - s) * cost.edge_insert;
        }
        return sum;
    };

    double best = std::numeric_limits<double>::infinity();
    std::vector<int> map(n1, -1);
    std::vector<char> used(n2, 0);
    std::function<void(std::size_t)> rec = [&](std::size_t u) {
        if (u == n1) {
            best = std::min(best, total(map));
            return;
        }
        for (std::size_t t = 0; t < n2; ++t) {
            if (used[t]) continue;
            used[t] = 1;
            map[u] = static_cast<int>(t);
            rec(u + 1);
            used[t] = 0;
        }
        map[u] = -1;
        rec(u + 1);
    };
    rec(0);
    return best;
}

PolicyGraph apply_edit_script(const PolicyGraph& g1, const EditScript& script) {
    std::vector<std::pair<std::string, std::string>> verts;  // id, label
    for (const auto& v : g1.vertices()) verts.emplace_back(v.id, v.label);
    struct E {
        std::string from, to, label;
    };
    std::vector<E> edges;
    for (const auto& e : g1.edges()) edges.push_back({g1.vertices()[e.from].id, g1.vertices()[e.to].id, e.label});
    auto find_vertex = [&](const std::string& id) {
        auto it = std::find_if(verts.begin(), verts.end(), [&](const auto& v) { return v.first == id; });
        if (it == verts.end()) throw ValidationError("edit script references missing vertex " + id);
        return it;
    };
    auto find_edge = [&](const EditOp& op) {
        auto it = std::find_if(edges.begin(), edges.end(), [&](const E& e) {
            return e.from == op.from && e.to == op.to && e.label == op.label;
        });
        if (it == edges.end()) throw ValidationError("edit script references missing edge " + op.from + "->" + op.to);
        return it;
    };
    for (const auto& op : script.ops) {
        switch (op.kind) {
        case EditKind::InsertVertex:
            if (std::any_of(verts.begin(), verts.end(), [&](const auto& v) { return v.first == op.vertex; }))
                throw ValidationError("edit script inserts existing vertex " + op.vertex);
            verts.emplace_back(op.vertex, op.label);
            break;
        case EditKind::DeleteVertex: {
            auto it = find_vertex(op.vertex);
            for (const auto& e : edges)
                if (e.from == op.vertex || e.to == op.vertex)
                    throw ValidationError("edit script deletes vertex " + op.vertex + " with edges attached");
            verts.erase(it);
            break;
        }
        case EditKind::SubstituteVertex: find_vertex(op.vertex)->second = op.new_label; break;
        case EditKind::InsertEdge:
            find_vertex(op.from);
            find_vertex(op.to);
            edges.push_back({op.from, op.to, op.label});
            break;
        case EditKind::DeleteEdge: edges.erase(find_edge(op)); break;
        case EditKind::SubstituteEdge: find_edge(op)->label = op.new_label; break;
        }
    }
    PolicyGraph out(g1.kind());
    for (const auto& [id, label] : verts) out.add_vertex(id, label);
    for (const auto& e : edges) out.add_edge(e.from, e.to, e.label);
    return out;
}

bool isomorphic(const PolicyGraph& a, const PolicyGraph& b, bool compare_labels) {
    const std::size_t n = a.vertices().size();
    if (n != b.vertices().size() || a.edges().size() != b.edges().size()) return false;
    const PairTable ta(a), tb(b);
    auto signature = [&](const PolicyGraph& g, std::size_t v) {
        std::size_t in = 0, out = 0;
        for (const auto& e : g.edges()) in += e.to == v, out += e.from == v;
        return std::make_tuple(in, out, compare_labels ? g.vertices()[v].label : std::string());
    };
    std::vector<std::tuple<std::size_t, std::size_t, std::string>> sa, sb;
    for (std::size_t v = 0; v < n; ++v) sa.push_back(signature(a, v)), sb.push_back(signature(b, v));
    {
        auto x = sa, y = sb;
        std::sort(x.begin(), x.end());
        std::sort(y.begin(), y.end());
        if (x != y) return false;
    }
    auto labels = [&](const std::vector<std::string>& l) {
        return compare_labels ? l : std::vector<std::string>(l.size());
    };
    std::vector<int> map(n, kNone);
    std::vector<char> used(n, 0);
    std::function<bool(std::size_t)> rec = [&](std::size_t v) {
        if (v == n) return true;
        for (std::size_t t = 0; t < n; ++t) {
            if (used[t] || sa[v] != sb[t]) continue;
            bool ok = labels(ta.at(static_cast<int>(v), static_cast<int>(v))) == labels(tb.at(static_cast<int>(t), static_cast<int>(t)));
            for (std::size_t w = 0; ok && w < v; ++w) {
                const int tw = map[w];
                ok = labels(ta.at(static_cast<int>(w), static_cast<int>(v))) == labels(tb.at(tw, static_cast<int>(t))) &&
                     labels(ta.at(static_cast<int>(v), static_cast<int>(w))) == labels(tb.at(static_cast<int>(t), tw));
            }
            if (!ok) continue;
            used[t] = 1;
            map[v] = static_cast<int>(t);
            if (rec(v + 1)) return true;
            used[t] = 0;
        }
        return false;
    };
    return rec(0);
}

long cyclomatic(const PolicyGraph& g) {
    const long a = static_cast<long>(g.edges().size());
    const long n = static_cast<long>(g.vertices().size());
    const long s = g.kind() == GraphKind::BehaviorTree ? 1 : static_cast<long>(g.sink_count());
    return a + s - n + 1;
}

long ged_hfsm_formula(long delta_conditions, long delta_actions, long delta_controls) {
    return 3 * delta_conditions + 4 * delta_actions + 5 * delta_controls;
}

ComponentCounts component_counts(const PolicyTree& tree) {
    ComponentCounts c;
    for (const auto& [id, n] : tree.nodes()) {
        if (n.kind == BtKind::Condition)
            ++c.conditions;
        else if (n.kind == BtKind::Action)
            ++c.actions;
        else
            ++c.controls;
    }
    return c;
}

long effort(long m_s, long m_fc) { return 3 * (m_s + 1) + m_fc * ((m_s + m_fc - 1) + 3); }

long effort_m(long m, long m_fc) { return 3 * (m + 1) + m_fc * (m - 1); }

std::string_view to_string(PolicyKind kind) {
    switch (kind) {
    case PolicyKind::BT: return "bt";
    case PolicyKind::FSM: return "fsm";
    case PolicyKind::HFSM: return "hfsm";
    }
    return "?";
}

std::optional<PolicyKind> parse_policy_kind(std::string_view text) {
    for (auto k : {PolicyKind::BT, PolicyKind::FSM, PolicyKind::HFSM})
        if (to_string(k) == text) return k;
    return std::nullopt;
}

Estimate formula_estimates(long m, long m_fc, PolicyKind kind) {
    Estimate e;
    const double M = static_cast<double>(m);
    switch (kind) {
    case PolicyKind::BT:
        e.graphical = 7 * M - 1;
        e.active = 3.5 * M;
        break;
    case PolicyKind::FSM:
        e.graphical = e.active = 5 * M + 4 + static_cast<double>(m_fc * (m - 1));
        break;
    case PolicyKind::HFSM:
        e.graphical = 36 * M - 3;
        e.active = 29 * M - 3;
        break;
    }
    e.fully_connected_elements = M * (M - 1);
    return e;
}

StructureCounts structure_counts(const StateMachine& sm) {
    StructureCounts c;
    for (const auto& [id, s] : sm.states()) {
        if (s.kind != FsmStateKind::Skill) continue;
        ++c.M;
        if (s.connected) ++c.M_fc;
    }
    c.M_s = c.M - c.M_fc;
    c.T_fc = c.M_fc * (c.M - 1);
    c.N = static_cast<long>(sm.states().size());
    c.T = static_cast<long>(sm.transition_count());
    c.S = c.N + c.T;
    return c;
}

}  // namespace btfsm
