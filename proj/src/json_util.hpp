#pragma once

// Helpers shared by the JSON readers: every accessor carries the field path
// so that schema errors point at the offending element.

#include "btfsm/core.hpp"

#include <json.hpp>

#include <string>
#include <string_view>

namespace btfsm::detail {

using json = nlohmann::ordered_json;

[[noreturn]] inline void fail(const std::string& path, const std::string& message) {
    throw ParseError(path, message);
}

inline json parse_json(std::string_view text) {
    try {
        return json::parse(text.begin(), text.end());
    } catch (const json::parse_error& e) {
        std::size_t line = 1, column = 1;
        for (std::size_t i = 0; i + 1 < e.byte && i < text.size(); ++i) {
            if (text[i] == '\n') {
                ++line;
                column = 1;
            } else {
                ++column;
            }
        }
        fail("line " + std::to_string(line) + ", column " + std::to_string(column), "malformed JSON");
    }
}

inline const json& member(const json& obj, const std::string& path, const char* key) {
    if (!obj.is_object()) fail(path, "expected an object");
    auto it = obj.find(key);
    if (it == obj.end()) fail(path, std::string("missing field \"") + key + "\"");
    return *it;
}

inline const json* optional_member(const json& obj, const std::string& path, const char* key) {
    if (!obj.is_object()) fail(path, "expected an object");
    auto it = obj.find(key);
    return it == obj.end() ? nullptr : &*it;
}

inline std::string as_string(const json& j, const std::string& path) {
    if (!j.is_string()) fail(path, "expected a string");
    return j.get<std::string>();
}

inline std::int64_t as_int(const json& j, const std::string& path) {
    if (!j.is_number_integer()) fail(path, "expected an integer");
    return j.get<std::int64_t>();
}

inline double as_number(const json& j, const std::string& path) {
    if (!j.is_number()) fail(path, "expected a number");
    return j.get<double>();
}

inline bool as_bool(const json& j, const std::string& path) {
    if (!j.is_boolean()) fail(path, "expected true or false");
    return j.get<bool>();
}

inline const json& as_array(const json& j, const std::string& path) {
    if (!j.is_array()) fail(path, "expected an array");
    return j;
}

inline std::string at(const std::string& path, const char* key) { return path + "." + key; }
inline std::string at(const std::string& path, std::size_t index) {
    return path + "[" + std::to_string(index) + "]";
}

inline void check_version(const json& doc) {
    if (const json* v = optional_member(doc, "$", "version"); v && as_int(*v, "$.version") != 1)
        fail("$.version", "unsupported version (only 1 is defined)");
}

inline Arg parse_arg(const json& j, const std::string& path) {
    if (j.is_string()) return j.get<std::string>();
    if (j.is_number_integer()) return j.get<std::int64_t>();
    fail(path, "arguments are strings or integers");
}

inline std::vector<Arg> parse_args(const json& j, const std::string& path) {
    std::vector<Arg> out;
    const auto& arr = as_array(j, path);
    for (std::size_t i = 0; i < arr.size(); ++i) out.push_back(parse_arg(arr[i], at(path, i)));
    return out;
}

inline json args_json(const std::vector<Arg>& args) {
    json out = json::array();
    for (const auto& a : args) {
        if (std::holds_alternative<std::string>(a))
            out.push_back(std::get<std::string>(a));
        else
            out.push_back(std::get<std::int64_t>(a));
    }
    return out;
}

// Literal objects use "pred" in libraries, goals and machines, "predicate" in
// tree nodes.
inline ConditionLiteral parse_literal(const json& j, const std::string& path, const char* pred_key = "pred") {
    const auto name = as_string(member(j, path, pred_key), at(path, pred_key));
    auto pred = parse_predicate(name);
    if (!pred) fail(at(path, pred_key), "unknown predicate \"" + name + "\"");
    ConditionLiteral l{*pred, {}};
    if (const json* a = optional_member(j, path, "args")) l.args = parse_args(*a, at(path, "args"));
    try {
        validate_literal(l);
    } catch (const ValidationError& e) {
        fail(path, e.what());
    }
    return l;
}

inline std::vector<ConditionLiteral> parse_literals(const json& j, const std::string& path) {
    std::vector<ConditionLiteral> out;
    const auto& arr = as_array(j, path);
    for (std::size_t i = 0; i < arr.size(); ++i) out.push_back(parse_literal(arr[i], at(path, i)));
    return out;
}

inline json literal_json(const ConditionLiteral& l) {
    json out = json::object();
    out["pred"] = std::string(to_string(l.predicate));
    out["args"] = args_json(l.args);
    return out;
}

inline json literals_json(const std::vector<ConditionLiteral>& ls) {
    json out = json::array();
    for (const auto& l : ls) out.push_back(literal_json(l));
    return out;
}

inline std::string dump(const json& j) { return j.dump(2) + "\n"; }

}  // namespace btfsm::detail
