#include "btfsm/planner.hpp"

#include <algorithm>
#include <numeric>
#include <set>

namespace btfsm {

std::string_view to_string(Ordering ordering) { return ordering == Ordering::Safe ? "safe" : "naive"; }

std::optional<Ordering> parse_ordering(std::string_view text) {
    if (text == "safe") return Ordering::Safe;
    if (text == "naive") return Ordering::Naive;
    return std::nullopt;
}

namespace {

using State = std::set<ConditionLiteral>;

// Permutations beyond this many preconditions fall back to declared order.
constexpr std::size_t kMaxPermuted = 6;

class Backchainer {
public:
    Backchainer(const Goal& goal, const ActionLibrary& library, Ordering ordering, int depth_bound)
        : goal_(goal), library_(library), ordering_(ordering), depth_bound_(depth_bound) {}

    Backchained run() {
        if (goal_.conditions.empty()) throw PlanningError("empty goal");
        for (const auto& c : goal_.conditions) validate_literal(c);
        State state(goal_.initially_true.begin(), goal_.initially_true.end());
        BtSpec root;
        if (goal_.conditions.size() == 1) {
            root = expand(goal_.conditions.front(), state, {}, 0);
        } else {
            root = bts::sequence("goal", {});
            std::vector<ConditionLiteral> ctx;
            for (const auto& c : goal_.conditions) {
                root.children.push_back(expand(c, state, ctx, 0));
                ctx.push_back(c);
            }
        }
        Backchained out{PolicyTree::from_spec(root), {}, std::move(warnings_)};
        out.plan.steps = std::move(steps_);
        out.plan.goal = goal_.conditions;
        out.plan.initially_true = goal_.initially_true;
        return out;
    }

    // Symbolically achieves `c` from `state`, returning false when impossible.
    bool achieve(const ConditionLiteral& c, State& state, int depth) const {
        if (state.count(c)) return true;
        if (depth > depth_bound_) return false;
        auto achievers = library_.achievers(c);
        if (achievers.empty()) return false;
        const ActionSpec& a = *achievers.front();
        auto pres = safe_order(a, state, depth + 1);
        for (const auto& p : pres)
            if (!achieve(p, state, depth + 1)) return false;
        for (const auto& p : pres)
            if (!state.count(p)) return false;
        apply_effects(state, a);
        return true;
    }

    // First permutation (in lexicographic order of declaration) whose
    // sequential sub-plans leave every precondition true at the end.
    std::vector<ConditionLiteral> safe_order(const ActionSpec& a, const State& state, int depth) const {
        const auto& pre = a.preconditions;
        if (pre.size() < 2 || pre.size() > kMaxPermuted) return pre;
        std::vector<std::size_t> idx(pre.size());
        std::iota(idx.begin(), idx.end(), 0);
        do {
            State s = state;
            bool ok = true;
            for (auto i : idx) ok = ok && achieve(pre[i], s, depth);
            for (const auto& p : pre) ok = ok && s.count(p);
            if (ok) {
                std::vector<ConditionLiteral> out;
                for (auto i : idx) out.push_back(pre[i]);
                return out;
            }
        } while (std::next_permutation(idx.begin(), idx.end()));
        return pre;
    }

private:
    BtSpec expand(const ConditionLiteral& c, State& state, const std::vector<ConditionLiteral>& ctx, int depth) {
        validate_literal(c);
        if (depth > depth_bound_)
            throw PlanningError("expansion of " + c.key() + " exceeds the depth bound of " +
                                std::to_string(depth_bound_));
        auto achievers = library_.achievers(c);
        if (achievers.empty()) {
            if (std::find(goal_.initially_true.begin(), goal_.initially_true.end(), c) != goal_.initially_true.end())
                return bts::condition(c.key() + "?", c);
            throw PlanningError("unachievable condition " + c.key());
        }
        BtSpec fb = bts::fallback("achieve " + c.key(), {bts::condition(c.key() + "?", c)});
        State after = state;
        for (std::size_t k = 0; k < achievers.size(); ++k) {
            const ActionSpec& a = *achievers[k];
            State branch = state;
            std::vector<ConditionLiteral> pres = a.preconditions;
            if (ordering_ == Ordering::Safe) {
                auto ordered = safe_order(a, branch, depth + 1);
                if (ordered == pres && pres.size() > 1 && !valid_order(pres, branch, depth + 1))
                    warnings_.push_back("no interference-free precondition order for " + a.signature() +
                                        "; keeping declared order");
                pres = ordered;
            }
            BtSpec leaf = bts::action(a.signature() + "!", a.call());
            std::vector<ConditionLiteral> dispatch = ctx;
            if (pres.empty()) {
                fb.children.push_back(leaf);
            } else {
                BtSpec seq = bts::sequence("do " + a.signature(), {});
                std::set<ConditionLiteral> side_effects;
                for (const auto& p : pres) {
                    if (side_effects.count(p)) {
                        warnings_.push_back(p.key() + " is already achieved by an earlier sibling of " +
                                            a.signature() + "; emitted as a condition only");
                        seq.children.push_back(bts::condition(p.key() + "?", p));
                    } else {
                        std::size_t first_step = steps_.size();
                        seq.children.push_back(expand(p, branch, dispatch, depth + 1));
                        for (std::size_t i = first_step; i < steps_.size(); ++i)
                            for (const auto& post : steps_[i].action.postconditions)
                                if (post != steps_[i].achieves) side_effects.insert(post);
                    }
                    dispatch.push_back(p);
                }
                seq.children.push_back(leaf);
                fb.children.push_back(std::move(seq));
            }
            steps_.push_back(PlanStep{a, c, dispatch, k > 0});
            if (k == 0) {
                apply_effects(branch, a);
                after = branch;
            }
        }
        state = after;
        return fb;
    }

    bool valid_order(const std::vector<ConditionLiteral>& pres, const State& state, int depth) const {
        State s = state;
        for (const auto& p : pres)
            if (!achieve(p, s, depth)) return false;
        for (const auto& p : pres)
            if (!s.count(p)) return false;
        return true;
    }

    const Goal& goal_;
    const ActionLibrary& library_;
    Ordering ordering_;
    int depth_bound_;
    std::vector<PlanStep> steps_;
    std::vector<std::string> warnings_;
};

}  // namespace

Backchained backchain_detailed(const Goal& goal, const ActionLibrary& library, Ordering ordering, int depth_bound) {
    return Backchainer(goal, library, ordering, depth_bound).run();
}

PolicyTree backchain(const Goal& goal, const ActionLibrary& library, Ordering ordering, int depth_bound) {
    return backchain_detailed(goal, library, ordering, depth_bound).tree;
}

Plan extract_plan(const Goal& goal, const ActionLibrary& library) {
    return backchain_detailed(goal, library, Ordering::Safe).plan;
}

std::vector<ConditionLiteral> order_preconditions(const ActionSpec& action, const Plan& plan) {
    // The action's own position bounds the search for achievers.
    std::size_t limit = plan.steps.size();
    for (std::size_t i = 0; i < plan.steps.size(); ++i)
        if (plan.steps[i].action.signature() == action.signature()) limit = i;
    std::vector<std::pair<long, ConditionLiteral>> keyed;
    for (const auto& p : action.preconditions) {
        long index = -2;
        if (std::find(plan.initially_true.begin(), plan.initially_true.end(), p) != plan.initially_true.end())
            index = -1;
        else
            for (std::size_t i = 0; i < limit; ++i) {
                const auto& posts = plan.steps[i].action.postconditions;
                if (std::find(posts.begin(), posts.end(), p) != posts.end()) index = static_cast<long>(i);
            }
        if (index == -2)
            throw PlanningError("precondition " + p.key() + " of " + action.signature() +
                                " is achieved by no plan step and is not initially true");
        keyed.emplace_back(index, p);
    }
    std::stable_sort(keyed.begin(), keyed.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
    std::vector<ConditionLiteral> out;
    for (auto& [i, p] : keyed) out.push_back(std::move(p));
    return out;
}

}  // namespace btfsm
