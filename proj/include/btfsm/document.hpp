#pragma once

#include "btfsm/bt.hpp"
#include "btfsm/core.hpp"
#include "btfsm/fsm.hpp"
#include "btfsm/hfsm.hpp"

#include <filesystem>
#include <string>
#include <string_view>
#include <variant>

namespace btfsm {

using PolicyDocument = std::variant<PolicyTree, StateMachine, HfsmContainer>;

std::string_view document_kind(const PolicyDocument& doc);

// Throws ParseError with a line/column for syntax errors and a field path for
// schema violations.
PolicyDocument parse_policy_document(std::string_view text);

std::string serialize_policy(const PolicyTree& tree);
std::string serialize_policy(const StateMachine& sm);
std::string serialize_policy(const HfsmContainer& root);
std::string serialize_policy(const PolicyDocument& doc);

ActionLibrary parse_action_library(std::string_view text);
std::string serialize_action_library(const ActionLibrary& library);

Goal parse_goal_document(std::string_view text);
std::string serialize_goal(const Goal& goal);

std::string read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, std::string_view text);

PolicyDocument load_policy(const std::filesystem::path& path);

}  // namespace btfsm
