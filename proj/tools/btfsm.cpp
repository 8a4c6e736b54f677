// Command-line entry point. Exit codes: 0 ok / episode SUCCESS, 1 usage,
// parse or planning error, 2 episode FAILURE, 3 episode TIMEOUT, 4 GED
// search incomplete, 5 report with unexplained deviations.

#include "btfsm/document.hpp"
#include "btfsm/metrics.hpp"
#include "btfsm/planner.hpp"
#include "btfsm/report.hpp"
#include "btfsm/simworld.hpp"

#include <CLI11.hpp>

#include <iostream>
#include <optional>

using namespace btfsm;

namespace {

void emit(const std::string& text, const std::string& out) {
    if (out.empty())
        std::cout << text;
    else
        write_file(out, text);
}

PolicyGraph graph_of(const PolicyDocument& doc) {
    return std::visit(
        [](const auto& p) -> PolicyGraph {
            using T = std::decay_t<decltype(p)>;
            if constexpr (std::is_same_v<T, PolicyTree>)
                return bt_to_graph(p);
            else if constexpr (std::is_same_v<T, StateMachine>)
                return fsm_to_graph(p);
            else
                return hfsm_to_graph(p);
        },
        doc);
}

int cmd_build(const std::string& goal_path, const std::string& library_path, const std::string& kind,
              const std::string& ordering_text, const std::string& out) {
    Goal goal = parse_goal_document(read_file(goal_path));
    ActionLibrary library = parse_action_library(read_file(library_path));
    auto ordering = parse_ordering(ordering_text);
    if (!ordering) throw ValidationError("unknown ordering " + ordering_text);

    if (kind == "bt") {
        Backchained b = backchain_detailed(goal, library, *ordering);
        for (const auto& w : b.warnings) std::cerr << "warning: " << w << "\n";
        emit(serialize_policy(b.tree), out);
    } else {
        Plan plan = extract_plan(goal, library);
        emit(serialize_policy(kind == "fsm-seq" ? build_sequential(plan) : build_fault_tolerant(plan)), out);
    }
    return 0;
}

int cmd_to_hfsm(const std::string& in, const std::string& out) {
    PolicyDocument doc = load_policy(in);
    auto* tree = std::get_if<PolicyTree>(&doc);
    if (!tree) throw ValidationError(in + ": to-hfsm needs a bt document, found " + std::string(document_kind(doc)));
    emit(serialize_policy(from_bt(*tree)), out);
    return 0;
}

int cmd_run(const std::string& policy_path, const std::string& scenario_path, std::optional<std::int64_t> max_ticks,
            const std::string& trace_path) {
    PolicyDocument policy = load_policy(policy_path);
    Scenario scenario;
    try {
        scenario = parse_scenario(read_file(scenario_path));
    } catch (const ParseError& e) {
        throw ParseError(scenario_path, e.what());
    }
    if (max_ticks) scenario.max_ticks = *max_ticks;
    scenario.validate();

    EpisodeResult r = run_episode(policy, scenario);
    if (!trace_path.empty()) write_file(trace_path, r.trace.to_jsonl());
    std::cout << "outcome: " << to_string(r.outcome) << "\n"
              << "ticks: " << r.ticks << "\n"
              << "skills_started: " << r.skills_started << "\n"
              << "first_success_tick: " << r.first_success_tick << "\n"
              << "min_battery: " << r.min_battery << "\n";
    switch (r.outcome) {
        case EpisodeOutcome::Success: return 0;
        case EpisodeOutcome::Failure: return 2;
        case EpisodeOutcome::Timeout: return 3;
    }
    return 1;
}

struct MetricsArgs {
    std::vector<std::string> ged;
    std::string cc;
    std::string counts;
    std::vector<long> effort;
    std::vector<std::string> estimate;
    bool label_sensitive = false;
};

int cmd_metrics(const MetricsArgs& a) {
    int code = 0;
    if (!a.ged.empty()) {
        GedCostModel cost = a.label_sensitive ? GedCostModel::label_sensitive() : GedCostModel{};
        GedResult r = ged_exact(graph_of(load_policy(a.ged[0])), graph_of(load_policy(a.ged[1])), cost,
                                ged_budget_from_env().value_or(kDefaultGedBudget));
        if (r.complete) {
            std::cout << "ged: " << r.distance << "\n";
        } else {
            std::cout << "ged: >= " << r.lower_bound << " (best found " << r.distance << ") INCOMPLETE\n";
            code = 4;
        }
        std::cout << "script:\n" << to_string(r.script);
    }
    if (!a.cc.empty()) std::cout << "cc: " << cyclomatic(graph_of(load_policy(a.cc))) << "\n";
    if (!a.counts.empty()) {
        PolicyDocument doc = load_policy(a.counts);
        PolicyGraph g = graph_of(doc);
        std::cout << "vertices: " << g.vertices().size() << "\nedges: " << g.edges().size() << "\n";
        if (auto* t = std::get_if<PolicyTree>(&doc)) {
            auto c = count_elements(*t);
            std::cout << "graphical: " << c.graphical << "\nactive: " << c.active << "\n";
        } else if (auto* s = std::get_if<StateMachine>(&doc)) {
            auto c = count_elements(*s);
            std::cout << "graphical: " << c.graphical << "\nactive: " << c.active << "\n";
        }
    }
    if (!a.effort.empty()) {
        if (a.effort[0] < 0 || a.effort[1] < 0) throw ValidationError("effort counts must be non-negative");
        std::cout << "effort: " << effort(a.effort[0], a.effort[1]) << "\n";
    }
    if (!a.estimate.empty()) {
        auto kind = parse_policy_kind(a.estimate[0]);
        if (!kind) throw ValidationError("unknown policy kind " + a.estimate[0]);
        Estimate e = formula_estimates(std::stol(a.estimate[1]), std::stol(a.estimate[2]), *kind);
        std::cout << "graphical: ~" << e.graphical << "\nactive: ~" << e.active
                  << "\nfully_connected_elements: " << e.fully_connected_elements << "\n";
    }
    return code;
}

int cmd_report(int table, const std::string& fixtures, const std::string& out) {
    Report r = reproduce_table(table, fixtures, ged_budget_from_env().value_or(kDefaultGedBudget));
    std::cout << render_text(r);
    if (!out.empty()) write_file(out, render_json(r));
    return r.ok() ? 0 : 5;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Behavior tree and state machine policy toolkit"};
    app.require_subcommand(1);

    std::string goal, library, kind = "bt", ordering = "safe", out;
    auto* build = app.add_subcommand("build", "synthesize a policy from a goal and an action library");
    build->add_option("goal", goal, "goal document")->required();
    build->add_option("library", library, "action library document")->required();
    build->add_option("--kind", kind)->check(CLI::IsMember({"bt", "fsm-seq", "fsm-ft"}));
    build->add_option("--ordering", ordering)->check(CLI::IsMember({"safe", "naive"}));
    build->add_option("-o,--output", out);

    std::string policy_in;
    auto* to_hfsm = app.add_subcommand("to-hfsm", "convert a behavior tree into a hierarchical state machine");
    to_hfsm->add_option("policy", policy_in)->required();
    to_hfsm->add_option("-o,--output", out);

    std::string scenario, trace;
    std::optional<std::int64_t> max_ticks;
    auto* run = app.add_subcommand("run", "run a policy in the simulator");
    run->add_option("policy", policy_in)->required();
    run->add_option("scenario", scenario)->required();
    run->add_option("--max-ticks", max_ticks)->check(CLI::PositiveNumber);
    run->add_option("--trace", trace, "write the event trace as JSON lines");

    MetricsArgs m;
    auto* metrics = app.add_subcommand("metrics", "structural metrics");
    metrics->add_option("--ged", m.ged, "exact graph edit distance between two policies")->expected(2);
    metrics->add_option("--cc", m.cc, "cyclomatic complexity");
    metrics->add_option("--counts", m.counts, "graph and element counts");
    metrics->add_option("--effort", m.effort, "Ms Mfc")->expected(2);
    metrics->add_option("--estimate", m.estimate, "kind M Mfc")->expected(3);
    metrics->add_flag("--label-sensitive", m.label_sensitive, "charge label substitutions");

    int table = 2;
    std::string fixtures = "fixtures";
    auto* report = app.add_subcommand("report", "regenerate a published table from the fixtures");
    report->add_option("--table", table)->check(CLI::IsMember({2, 3}))->required();
    report->add_option("-o,--output", out, "JSON report path");
    report->add_option("--fixtures", fixtures, "fixture directory");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : 1;
    }

    try {
        if (*build) return cmd_build(goal, library, kind, ordering, out);
        if (*to_hfsm) return cmd_to_hfsm(policy_in, out);
        if (*run) return cmd_run(policy_in, scenario, max_ticks, trace);
        if (*metrics) {
            if (m.ged.empty() && m.cc.empty() && m.counts.empty() && m.effort.empty() && m.estimate.empty()) {
                std::cerr << "metrics: choose at least one of --ged, --cc, --counts, --effort, --estimate\n";
                return 1;
            }
            return cmd_metrics(m);
        }
        if (*report) return cmd_report(table, fixtures, out);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 1;
}
