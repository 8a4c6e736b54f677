#pragma once

// Regenerates the published comparison tables from the policy fixtures on
// disk. Every computed value comes from parsing the fixture files and running
// the metrics over them.

#include <chrono>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace btfsm {

enum class CellStatus { Matched, DocumentedDeviation, Mismatch, Incomplete };

std::string_view to_string(CellStatus status);

struct ReportCell {
    std::string row;
    std::string column;
    std::string policy;  // BT, FSM or HFSM
    double value = 0;
    bool complete = true;
    std::optional<double> published;
    CellStatus status = CellStatus::Matched;
    std::string note;
    double seconds = 0;
};

struct Report {
    int table = 0;
    std::vector<ReportCell> cells;

    std::size_t count(CellStatus status) const;
    // No mismatches and no incomplete searches.
    bool ok() const;
};

// Throws Error when the directory is missing and ParseError/ValidationError
// when a fixture is malformed or has the wrong kind.
Report reproduce_table(int table, const std::filesystem::path& fixtures_dir,
                       std::chrono::milliseconds ged_budget = std::chrono::milliseconds{60'000});

std::string render_text(const Report& report);
std::string render_json(const Report& report);

// BTFSM_GED_BUDGET in whole seconds, if set and valid.
std::optional<std::chrono::milliseconds> ged_budget_from_env();

}  // namespace btfsm
