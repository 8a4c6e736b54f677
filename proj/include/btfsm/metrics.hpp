#pragma once

#include "btfsm/bt.hpp"
#include "btfsm/fsm.hpp"
#include "btfsm/hfsm.hpp"

#include <chrono>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace btfsm {

enum class GraphKind { BehaviorTree, StateMachine, Hierarchical, Generic };

struct Vertex {
    std::string id;
    std::string label;
    bool sink = false;
};

struct Edge {
    std::size_t from = 0;
    std::size_t to = 0;
    std::string label;
};

// Directed, labelled multigraph; self-loops allowed.
class PolicyGraph {
public:
    explicit PolicyGraph(GraphKind kind = GraphKind::Generic) : kind_(kind) {}

    std::size_t add_vertex(std::string id, std::string label, bool sink = false);
    void add_edge(std::size_t from, std::size_t to, std::string label = {});
    void add_edge(const std::string& from, const std::string& to, std::string label = {});

    GraphKind kind() const { return kind_; }
    const std::vector<Vertex>& vertices() const { return vertices_; }
    const std::vector<Edge>& edges() const { return edges_; }
    std::optional<std::size_t> index_of(const std::string& id) const;
    std::size_t sink_count() const;

private:
    GraphKind kind_;
    std::vector<Vertex> vertices_;
    std::vector<Edge> edges_;
    std::map<std::string, std::size_t> index_;
};

PolicyGraph bt_to_graph(const PolicyTree& tree);
PolicyGraph fsm_to_graph(const StateMachine& sm);
PolicyGraph hfsm_to_graph(const HfsmContainer& root);

struct GedCostModel {
    double node_insert = 1;
    double node_delete = 1;
    double node_substitute = 0;
    double edge_insert = 1;
    double edge_delete = 1;
    double edge_substitute = 0;

    static GedCostModel label_sensitive() { return {1, 1, 1, 1, 1, 1}; }
    void validate() const;
};

enum class EditKind { InsertVertex, DeleteVertex, SubstituteVertex, InsertEdge, DeleteEdge, SubstituteEdge };

std::string_view to_string(EditKind kind);

// Vertex references name vertices of the graph being edited: g1 ids for
// existing vertices, "+" followed by the g2 id for inserted ones.
struct EditOp {
    EditKind kind = EditKind::InsertVertex;
    std::string vertex;
    std::string from;
    std::string to;
    std::string label;
    std::string new_label;
    double cost = 0;
};

struct EditScript {
    std::vector<EditOp> ops;
    std::size_t n_star = 0;
    double cost = 0;
};

struct GedResult {
    double distance = 0;
    bool complete = true;
    double lower_bound = 0;
    EditScript script;
    std::size_t expanded = 0;
};

std::string to_string(const EditScript& script);

inline constexpr std::chrono::milliseconds kDefaultGedBudget{60'000};

GedResult ged_exact(const PolicyGraph& g1, const PolicyGraph& g2, const GedCostModel& cost = {},
                    std::chrono::milliseconds budget = kDefaultGedBudget);

// Edit script induced by matching vertices with equal ids, or through an
// explicit id map from g1 to g2.
GedResult ged_anchored(const PolicyGraph& g1, const PolicyGraph& g2, const GedCostModel& cost = {},
                       const std::map<std::string, std::string>* anchor = nullptr);

inline constexpr std::size_t kBruteForceLimit = 7;
double brute_force_ged(const PolicyGraph& g1, const PolicyGraph& g2, const GedCostModel& cost = {});

PolicyGraph apply_edit_script(const PolicyGraph& g1, const EditScript& script);
bool isomorphic(const PolicyGraph& a, const PolicyGraph& b, bool compare_labels = true);

// a + s - n + 1; behaviour-tree graphs count a single exit.
long cyclomatic(const PolicyGraph& g);

long ged_hfsm_formula(long delta_conditions, long delta_actions, long delta_controls);

struct ComponentCounts {
    long conditions = 0;
    long actions = 0;
    long controls = 0;
};
ComponentCounts component_counts(const PolicyTree& tree);

long effort(long m_s, long m_fc);
long effort_m(long m, long m_fc);

enum class PolicyKind { BT, FSM, HFSM };
std::string_view to_string(PolicyKind kind);
std::optional<PolicyKind> parse_policy_kind(std::string_view text);

struct Estimate {
    double graphical = 0;
    double active = 0;
    bool approximate = true;
    double fully_connected_elements = 0;  // S = M(M-1)
};
Estimate formula_estimates(long m, long m_fc, PolicyKind kind);

struct StructureCounts {
    long M = 0;     // skill states
    long M_s = 0;   // sequential (non-connected) skill states
    long M_fc = 0;  // fully connected states
    long T_fc = 0;  // M_fc * (M - 1)
    long N = 0;     // nodes
    long T = 0;     // transitions
    long S = 0;     // N + T
};
StructureCounts structure_counts(const StateMachine& sm);

}  // namespace btfsm
