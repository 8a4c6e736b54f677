#pragma once

#include "btfsm/bt.hpp"
#include "btfsm/core.hpp"

#include <string>
#include <vector>

namespace btfsm {

enum class Ordering { Safe, Naive };

std::string_view to_string(Ordering ordering);
std::optional<Ordering> parse_ordering(std::string_view text);

inline constexpr int kDefaultDepthBound = 10;

struct Backchained {
    PolicyTree tree;
    Plan plan;  // action leaves, left to right
    std::vector<std::string> warnings;
};

Backchained backchain_detailed(const Goal& goal, const ActionLibrary& library,
                               Ordering ordering = Ordering::Safe, int depth_bound = kDefaultDepthBound);

PolicyTree backchain(const Goal& goal, const ActionLibrary& library, Ordering ordering = Ordering::Safe,
                     int depth_bound = kDefaultDepthBound);

Plan extract_plan(const Goal& goal, const ActionLibrary& library);

// Sorts the action's preconditions by the index of the plan step that makes
// them true; initially-true literals come first.
std::vector<ConditionLiteral> order_preconditions(const ActionSpec& action, const Plan& plan);

}  // namespace btfsm
