#include "btfsm/document.hpp"

#include "json_util.hpp"

#include <fstream>
#include <functional>
#include <sstream>

namespace btfsm {

using detail::json;
using detail::at;
using detail::fail;

std::string_view document_kind(const PolicyDocument& doc) {
    switch (doc.index()) {
    case 0: return "bt";
    case 1: return "fsm";
    default: return "hfsm";
    }
}

namespace {

NodeId parse_id(const json& j, const std::string& path) {
    auto v = detail::as_int(j, path);
    if (v <= 0) fail(path, "ids are positive integers");
    return NodeId{v};
}

// ---- behaviour trees ----

PolicyTree parse_tree(const json& doc) {
    const auto& nodes = detail::as_array(detail::member(doc, "$", "nodes"), "$.nodes");
    std::map<NodeId, BtNode> out;
    for (std::size_t i = 0; i < nodes.size(); ++i) {
        const std::string path = at("$.nodes", i);
        const json& j = nodes[i];
        BtNode n;
        n.id = parse_id(detail::member(j, path, "id"), at(path, "id"));
        const auto type = detail::as_string(detail::member(j, path, "type"), at(path, "type"));
        auto kind = parse_bt_kind(type);
        if (!kind) fail(at(path, "type"), "unknown node kind \"" + type + "\"");
        n.kind = *kind;
        if (const json* name = detail::optional_member(j, path, "name")) n.name = detail::as_string(*name, at(path, "name"));
        if (is_control(n.kind)) {
            const auto& kids = detail::as_array(detail::member(j, path, "children"), at(path, "children"));
            for (std::size_t k = 0; k < kids.size(); ++k)
                n.children.push_back(parse_id(kids[k], at(at(path, "children"), k)));
        } else if (detail::optional_member(j, path, "children")) {
            fail(at(path, "children"), "leaf nodes have no children");
        }
        if (n.kind == BtKind::Parallel) {
            auto t = detail::as_int(detail::member(j, path, "threshold"), at(path, "threshold"));
            if (t < 1) fail(at(path, "threshold"), "threshold must be at least 1");
            n.success_threshold = static_cast<std::size_t>(t);
        }
        if (n.kind == BtKind::Action) {
            SkillCall call{detail::as_string(detail::member(j, path, "skill"), at(path, "skill")), {}};
            if (const json* a = detail::optional_member(j, path, "args")) call.args = detail::parse_args(*a, at(path, "args"));
            n.action = call;
        }
        if (n.kind == BtKind::Condition) n.condition = detail::parse_literal(j, path, "predicate");
        if (!out.emplace(n.id, n).second) fail(at(path, "id"), "duplicate id " + to_string(n.id));
    }
    for (std::size_t i = 0; i < nodes.size(); ++i) {
        const BtNode& n = out.at(parse_id(nodes[i]["id"], ""));
        for (std::size_t k = 0; k < n.children.size(); ++k)
            if (!out.count(n.children[k]))
                fail(at(at(at("$.nodes", i), "children"), k), "dangling reference to id " + to_string(n.children[k]));
    }
    NodeId root = parse_id(detail::member(doc, "$", "root"), "$.root");
    if (!out.count(root)) fail("$.root", "dangling reference to id " + to_string(root));
    std::int64_t next = 0;
    if (const json* nx = detail::optional_member(doc, "$", "next_id")) next = detail::as_int(*nx, "$.next_id");
    try {
        return PolicyTree(std::move(out), root, next);
    } catch (const ValidationError& e) {
        fail("$.nodes", e.what());
    }
}

json tree_json(const PolicyTree& tree) {
    json doc = json::object();
    doc["version"] = 1;
    doc["kind"] = "bt";
    doc["root"] = tree.root().value;
    doc["next_id"] = tree.next_id();
    json nodes = json::array();
    for (const auto& [id, n] : tree.nodes()) {
        json j = json::object();
        j["id"] = id.value;
        j["type"] = std::string(to_string(n.kind));
        j["name"] = n.name;
        if (is_control(n.kind)) {
            json kids = json::array();
            for (auto c : n.children) kids.push_back(c.value);
            j["children"] = kids;
        }
        if (n.kind == BtKind::Parallel) j["threshold"] = n.success_threshold;
        if (n.action) {
            j["skill"] = n.action->skill;
            j["args"] = detail::args_json(n.action->args);
        }
        if (n.condition) {
            j["predicate"] = std::string(to_string(n.condition->predicate));
            j["args"] = detail::args_json(n.condition->args);
        }
        nodes.push_back(j);
    }
    doc["nodes"] = nodes;
    return doc;
}

// ---- state machines ----

StateMachine parse_machine(const json& doc) {
    FsmDesign design = FsmDesign::FaultTolerant;
    if (const json* d = detail::optional_member(doc, "$", "design")) {
        auto text = detail::as_string(*d, "$.design");
        if (text == "sequential")
            design = FsmDesign::Sequential;
        else if (text != "fault_tolerant")
            fail("$.design", "expected \"sequential\" or \"fault_tolerant\"");
    }
    std::map<std::string, Guard> guards;
    if (const json* conds = detail::optional_member(doc, "$", "conditions")) {
        if (!conds->is_object()) fail("$.conditions", "expected an object");
        for (auto it = conds->begin(); it != conds->end(); ++it) {
            const std::string path = "$.conditions." + it.key();
            Guard g{detail::parse_literal(it.value(), path), false};
            if (const json* neg = detail::optional_member(it.value(), path, "negated"))
                g.negated = detail::as_bool(*neg, at(path, "negated"));
            if (g.key() != it.key()) fail(path, "key does not match its condition (expected \"" + g.key() + "\")");
            guards.emplace(it.key(), g);
        }
    }
    std::vector<ConditionLiteral> goal;
    if (const json* g = detail::optional_member(doc, "$", "goal")) goal = detail::parse_literals(*g, "$.goal");

    const auto& states = detail::as_array(detail::member(doc, "$", "states"), "$.states");
    std::map<NodeId, FsmState> out;
    for (std::size_t i = 0; i < states.size(); ++i) {
        const std::string path = at("$.states", i);
        const json& j = states[i];
        FsmState s;
        s.id = parse_id(detail::member(j, path, "id"), at(path, "id"));
        const auto type = detail::as_string(detail::member(j, path, "type"), at(path, "type"));
        if (type == "skill")
            s.kind = FsmStateKind::Skill;
        else if (type == "selector")
            s.kind = FsmStateKind::Selector;
        else if (type == "outcome")
            s.kind = FsmStateKind::Outcome;
        else
            fail(at(path, "type"), "unknown state kind \"" + type + "\"");
        if (const json* name = detail::optional_member(j, path, "name")) s.name = detail::as_string(*name, at(path, "name"));
        if (s.kind == FsmStateKind::Skill) {
            SkillCall call{detail::as_string(detail::member(j, path, "skill"), at(path, "skill")), {}};
            if (const json* a = detail::optional_member(j, path, "args")) call.args = detail::parse_args(*a, at(path, "args"));
            s.skill = call;
            if (const json* pre = detail::optional_member(j, path, "pre")) s.precondition = detail::parse_literals(*pre, at(path, "pre"));
            if (const json* post = detail::optional_member(j, path, "post"); post && !post->is_null())
                s.postcondition = detail::parse_literal(*post, at(path, "post"));
            if (const json* c = detail::optional_member(j, path, "connected")) {
                const std::string cp = at(path, "connected");
                s.connected = ConnectedWiring{detail::as_string(detail::member(*c, cp, "condition"), at(cp, "condition")),
                                              detail::as_string(detail::member(*c, cp, "selector_condition"),
                                                                at(cp, "selector_condition"))};
            }
        }
        if (s.kind == FsmStateKind::Outcome) {
            auto text = detail::as_string(detail::member(j, path, "status"), at(path, "status"));
            auto st = parse_status(text);
            if (!st) fail(at(path, "status"), "unknown status \"" + text + "\"");
            s.outcome = *st;
            if (s.name.empty()) s.name = text;
        }
        if (const json* ints = detail::optional_member(j, path, "interrupts")) {
            const auto& arr = detail::as_array(*ints, at(path, "interrupts"));
            for (std::size_t k = 0; k < arr.size(); ++k)
                s.interrupts.push_back(detail::as_string(arr[k], at(at(path, "interrupts"), k)));
        }
        if (const json* tr = detail::optional_member(j, path, "transitions")) {
            if (!tr->is_object()) fail(at(path, "transitions"), "expected an object");
            for (auto it = tr->begin(); it != tr->end(); ++it)
                s.transitions[it.key()] = parse_id(it.value(), at(at(path, "transitions"), it.key().c_str()));
        }
        if (!out.emplace(s.id, s).second) fail(at(path, "id"), "duplicate id " + to_string(s.id));
    }
    for (std::size_t i = 0; i < states.size(); ++i) {
        const FsmState& s = out.at(parse_id(states[i]["id"], ""));
        for (const auto& [label, target] : s.transitions)
            if (!out.count(target))
                fail(at(at(at("$.states", i), "transitions"), label.c_str()), "dangling reference to id " + to_string(target));
    }
    NodeId initial = parse_id(detail::member(doc, "$", "initial"), "$.initial");
    if (!out.count(initial)) fail("$.initial", "dangling reference to id " + to_string(initial));
    std::vector<NodeId> order;
    if (const json* po = detail::optional_member(doc, "$", "plan_order")) {
        const auto& arr = detail::as_array(*po, "$.plan_order");
        for (std::size_t k = 0; k < arr.size(); ++k) {
            NodeId id = parse_id(arr[k], at("$.plan_order", k));
            if (!out.count(id)) fail(at("$.plan_order", k), "dangling reference to id " + to_string(id));
            order.push_back(id);
        }
    }
    std::int64_t next = 0;
    if (const json* nx = detail::optional_member(doc, "$", "next_id")) next = detail::as_int(*nx, "$.next_id");
    try {
        return StateMachine(design, std::move(out), initial, std::move(order), std::move(guards), std::move(goal), next);
    } catch (const ValidationError& e) {
        fail("$.states", e.what());
    }
}

json machine_json(const StateMachine& sm) {
    json doc = json::object();
    doc["version"] = 1;
    doc["kind"] = "fsm";
    doc["design"] = std::string(to_string(sm.design()));
    doc["initial"] = sm.initial().value;
    doc["next_id"] = sm.next_id();
    doc["goal"] = detail::literals_json(sm.goal());
    json order = json::array();
    for (auto id : sm.plan_order()) order.push_back(id.value);
    doc["plan_order"] = order;
    json conds = json::object();
    for (const auto& [key, g] : sm.guards()) {
        json c = detail::literal_json(g.literal);
        c["negated"] = g.negated;
        conds[key] = c;
    }
    doc["conditions"] = conds;
    json states = json::array();
    for (const auto& [id, s] : sm.states()) {
        json j = json::object();
        j["id"] = id.value;
        j["type"] = std::string(to_string(s.kind));
        j["name"] = s.name;
        if (s.kind == FsmStateKind::Skill) {
            j["skill"] = s.skill->skill;
            j["args"] = detail::args_json(s.skill->args);
            j["pre"] = detail::literals_json(s.precondition);
            if (s.postcondition) j["post"] = detail::literal_json(*s.postcondition);
            if (s.connected) {
                json c = json::object();
                c["condition"] = s.connected->condition_key;
                c["selector_condition"] = s.connected->selector_key;
                j["connected"] = c;
            }
        }
        if (s.kind == FsmStateKind::Outcome) j["status"] = std::string(to_string(s.outcome));
        if (s.kind != FsmStateKind::Outcome) {
            j["interrupts"] = s.interrupts;
            json tr = json::object();
            for (const auto& [label, target] : s.transitions) tr[label] = target.value;
            j["transitions"] = tr;
        }
        states.push_back(j);
    }
    doc["states"] = states;
    return doc;
}

// ---- hierarchical machines ----

json wire_target(const Wire& w) {
    if (w.next_child) return w.next_child->value;
    return std::string(to_string(w.outcome));
}

HfsmContainer parse_hfsm(const json& doc) {
    const auto& items = detail::as_array(detail::member(doc, "$", "containers"), "$.containers");
    struct Raw {
        HfsmContainer c;
        std::vector<NodeId> kids;
        std::size_t index;
    };
    std::map<NodeId, Raw> raw;
    for (std::size_t i = 0; i < items.size(); ++i) {
        const std::string path = at("$.containers", i);
        const json& j = items[i];
        Raw r;
        r.index = i;
        r.c.id = parse_id(detail::member(j, path, "id"), at(path, "id"));
        const auto type = detail::as_string(detail::member(j, path, "type"), at(path, "type"));
        auto kind = parse_container_kind(type);
        if (!kind) fail(at(path, "type"), "unknown container kind \"" + type + "\"");
        r.c.kind = *kind;
        if (const json* name = detail::optional_member(j, path, "name")) r.c.name = detail::as_string(*name, at(path, "name"));
        if (r.c.kind == ContainerKind::Action) {
            SkillCall call{detail::as_string(detail::member(j, path, "skill"), at(path, "skill")), {}};
            if (const json* a = detail::optional_member(j, path, "args")) call.args = detail::parse_args(*a, at(path, "args"));
            r.c.action = call;
        }
        if (r.c.kind == ContainerKind::Condition) r.c.condition = detail::parse_literal(j, path, "predicate");
        if (const json* kids = detail::optional_member(j, path, "children")) {
            const auto& arr = detail::as_array(*kids, at(path, "children"));
            for (std::size_t k = 0; k < arr.size(); ++k) r.kids.push_back(parse_id(arr[k], at(at(path, "children"), k)));
        }
        NodeId id = r.c.id;
        if (!raw.emplace(id, std::move(r)).second) fail(at(path, "id"), "duplicate id " + to_string(id));
    }
    std::set<NodeId> placed;
    std::function<HfsmContainer(NodeId, const std::string&)> build = [&](NodeId id, const std::string& ref) {
        auto it = raw.find(id);
        if (it == raw.end()) fail(ref, "dangling reference to id " + to_string(id));
        if (!placed.insert(id).second) fail(ref, "container " + to_string(id) + " is nested twice");
        HfsmContainer c = it->second.c;
        const std::string path = at("$.containers", it->second.index);
        for (std::size_t k = 0; k < it->second.kids.size(); ++k)
            c.children.push_back(build(it->second.kids[k], at(at(path, "children"), k)));
        // explicit wiring must agree with the container kind
        json expected = json::array();
        for (const auto& w : c.wiring()) {
            json e = json::object();
            e["from"] = w.from.value;
            e["status"] = std::string(to_string(w.status));
            e["to"] = wire_target(w);
            expected.push_back(e);
        }
        const json* wiring = detail::optional_member(items[it->second.index], path, "wiring");
        const json given = wiring ? *wiring : json::array();
        if (given != expected) fail(at(path, "wiring"), "wiring does not match a " + std::string(to_string(c.kind)) + " container");
        return c;
    };
    NodeId root = parse_id(detail::member(doc, "$", "root"), "$.root");
    HfsmContainer out = build(root, "$.root");
    if (placed.size() != raw.size()) fail("$.containers", "containers unreachable from the root");
    try {
        out.validate();
    } catch (const ValidationError& e) {
        fail("$.containers", e.what());
    }
    return out;
}

json hfsm_json(const HfsmContainer& root) {
    json doc = json::object();
    doc["version"] = 1;
    doc["kind"] = "hfsm";
    doc["root"] = root.id.value;
    json items = json::array();
    std::function<void(const HfsmContainer&)> add = [&](const HfsmContainer& c) {
        json j = json::object();
        j["id"] = c.id.value;
        j["type"] = std::string(to_string(c.kind));
        j["name"] = c.name;
        if (c.action) {
            j["skill"] = c.action->skill;
            j["args"] = detail::args_json(c.action->args);
        }
        if (c.condition) {
            j["predicate"] = std::string(to_string(c.condition->predicate));
            j["args"] = detail::args_json(c.condition->args);
        }
        if (!c.is_leaf()) {
            json kids = json::array();
            for (const auto& ch : c.children) kids.push_back(ch.id.value);
            j["children"] = kids;
            json wiring = json::array();
            for (const auto& w : c.wiring()) {
                json e = json::object();
                e["from"] = w.from.value;
                e["status"] = std::string(to_string(w.status));
                e["to"] = wire_target(w);
                wiring.push_back(e);
            }
            j["wiring"] = wiring;
        }
        items.push_back(j);
        for (const auto& ch : c.children) add(ch);
    };
    add(root);
    doc["containers"] = items;
    return doc;
}

}  // namespace

PolicyDocument parse_policy_document(std::string_view text) {
    json doc = detail::parse_json(text);
    if (!doc.is_object()) fail("$", "expected an object");
    detail::check_version(doc);
    const auto kind = detail::as_string(detail::member(doc, "$", "kind"), "$.kind");
    if (kind == "bt") return parse_tree(doc);
    if (kind == "fsm") return parse_machine(doc);
    if (kind == "hfsm") return parse_hfsm(doc);
    fail("$.kind", "unknown policy kind \"" + kind + "\"");
}

std::string serialize_policy(const PolicyTree& tree) { return detail::dump(tree_json(tree)); }
std::string serialize_policy(const StateMachine& sm) { return detail::dump(machine_json(sm)); }
std::string serialize_policy(const HfsmContainer& root) { return detail::dump(hfsm_json(root)); }
std::string serialize_policy(const PolicyDocument& doc) {
    return std::visit([](const auto& p) { return serialize_policy(p); }, doc);
}

ActionLibrary parse_action_library(std::string_view text) {
    json doc = detail::parse_json(text);
    detail::check_version(doc);
    const auto& arr = detail::as_array(detail::member(doc, "$", "actions"), "$.actions");
    std::vector<ActionSpec> specs;
    for (std::size_t i = 0; i < arr.size(); ++i) {
        const std::string path = at("$.actions", i);
        const json& j = arr[i];
        ActionSpec a;
        a.name = detail::as_string(detail::member(j, path, "name"), at(path, "name"));
        if (const json* p = detail::optional_member(j, path, "params")) {
            const auto& ps = detail::as_array(*p, at(path, "params"));
            for (std::size_t k = 0; k < ps.size(); ++k) a.params.push_back(detail::as_string(ps[k], at(at(path, "params"), k)));
        }
        if (const json* pre = detail::optional_member(j, path, "pre")) a.preconditions = detail::parse_literals(*pre, at(path, "pre"));
        a.postconditions = detail::parse_literals(detail::member(j, path, "post"), at(path, "post"));
        a.skill = detail::as_string(detail::member(j, path, "skill"), at(path, "skill"));
        if (const json* sa = detail::optional_member(j, path, "skill_args")) a.skill_args = detail::parse_args(*sa, at(path, "skill_args"));
        specs.push_back(std::move(a));
    }
    try {
        return validate_action_library(std::move(specs));
    } catch (const ValidationError& e) {
        fail("$.actions", e.what());
    }
}

std::string serialize_action_library(const ActionLibrary& library) {
    json doc = json::object();
    doc["version"] = 1;
    json arr = json::array();
    for (const auto& a : library.actions()) {
        json j = json::object();
        j["name"] = a.name;
        j["params"] = a.params;
        j["pre"] = detail::literals_json(a.preconditions);
        j["post"] = detail::literals_json(a.postconditions);
        j["skill"] = a.skill;
        if (!a.skill_args.empty()) j["skill_args"] = detail::args_json(a.skill_args);
        arr.push_back(j);
    }
    doc["actions"] = arr;
    return detail::dump(doc);
}

Goal parse_goal_document(std::string_view text) {
    json doc = detail::parse_json(text);
    detail::check_version(doc);
    Goal g;
    g.conditions = detail::parse_literals(detail::member(doc, "$", "goal"), "$.goal");
    if (g.conditions.empty()) fail("$.goal", "goal is empty");
    if (const json* it = detail::optional_member(doc, "$", "initially_true"))
        g.initially_true = detail::parse_literals(*it, "$.initially_true");
    return g;
}

std::string serialize_goal(const Goal& goal) {
    json doc = json::object();
    doc["version"] = 1;
    doc["goal"] = detail::literals_json(goal.conditions);
    doc["initially_true"] = detail::literals_json(goal.initially_true);
    return detail::dump(doc);
}

std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot open " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

void write_file(const std::filesystem::path& path, std::string_view text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write " + path.string());
    out << text;
}

PolicyDocument load_policy(const std::filesystem::path& path) {
    try {
        return parse_policy_document(read_file(path));
    } catch (const ParseError& e) {
        throw ParseError(path.string(), e.what());
    }
}

}  // namespace btfsm
