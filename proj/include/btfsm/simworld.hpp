#pragma once

#include "btfsm/core.hpp"
#include "btfsm/document.hpp"

#include <cstdint>
#include <map>
#include <optional>
#include <random>
#include <set>
#include <string>
#include <vector>

namespace btfsm {

inline const std::string kTransit = "TRANSIT";

std::vector<std::string> default_stations();

struct WorldState {
    std::int64_t tick = 0;
    std::string robot_location = "center";
    std::int64_t battery = 100;
    std::optional<std::string> holding;
    bool arm_tucked = false;
    bool docked = false;
    std::map<std::string, std::string> item_locations;
    std::set<std::string> found_markers;
    std::set<std::string> stations;

    void validate() const;

    friend bool operator==(const WorldState&, const WorldState&) = default;
};

enum class SkillPhase { Idle, Running, Succeeded, Failed, Cancelled };

std::string_view to_string(SkillPhase phase);

struct SkillRuntime {
    SkillCall call;
    SkillPhase phase = SkillPhase::Idle;
    std::int64_t remaining = 0;
    std::int64_t started_at = 0;
    bool doomed = false;  // an injected failure fires on completion
    std::string target;   // move_to: station resolved when the skill starts
};

bool is_motion_skill(const std::string& skill);

struct FailureInjection {
    std::string skill;
    std::int64_t nth = 1;  // 1-based invocation count of that skill
};

enum class PerturbationKind { SetItemLocation, SetBattery, ForceFailNext };

std::string_view to_string(PerturbationKind kind);

struct Perturbation {
    std::int64_t tick = 0;
    PerturbationKind kind = PerturbationKind::SetBattery;
    std::string item;     // set_item_location
    std::string station;  // set_item_location
    std::int64_t battery = 0;
    std::string skill;    // force_fail_next

    std::string describe() const;
};

struct Scenario {
    std::string name;
    WorldState initial;
    std::map<std::string, std::int64_t> durations;
    std::int64_t search_viewpoints = 5;
    std::vector<FailureInjection> failures;
    double failure_rate = 0;  // per invocation, drawn from the seeded generator
    std::int64_t drain_per_motion_tick = 2;
    std::int64_t battery_threshold = 20;
    std::vector<Perturbation> perturbations;
    std::int64_t max_ticks = 200;
    std::uint64_t seed = 0;
    // Consecutive SUCCESS ticks that end an episode.
    std::int64_t settle_ticks = 5;

    std::int64_t duration(const std::string& skill) const;
    void validate() const;
};

std::map<std::string, std::int64_t> default_durations();

Scenario parse_scenario(std::string_view text);
std::string serialize_scenario(const Scenario& scenario);

class Simulator {
public:
    explicit Simulator(const Scenario& scenario);

    const WorldState& world() const { return world_; }
    const Scenario& scenario() const { return scenario_; }

    bool evaluate(const ConditionLiteral& literal) const;

    SkillHandle start(const SkillCall& call);
    Status poll(SkillHandle handle) const;
    bool cancel(SkillHandle handle);
    const SkillRuntime& runtime(SkillHandle handle) const;

    // One tick of progress; returns the skills that finished in it. Battery
    // drains when a motion skill was running.
    std::vector<SkillHandle> advance();
    void perturb(const Perturbation& p);

    bool motion_running() const;

private:
    void complete(SkillRuntime& rt);

    Scenario scenario_;
    WorldState world_;
    std::map<SkillHandle, SkillRuntime> skills_;
    std::map<std::string, std::int64_t> invocations_;
    std::set<std::string> force_fail_;
    std::mt19937_64 rng_;
    std::int64_t next_handle_ = 1;
};

enum class EventKind { SkillStart, SkillEnd, SkillPreempt, Perturbation, PolicyStatus };

std::string_view to_string(EventKind kind);

struct TraceEvent {
    std::int64_t tick = 0;
    EventKind kind = EventKind::SkillStart;
    std::string skill;
    std::vector<Arg> args;
    std::string outcome;
    std::string detail;
};

struct Trace {
    std::vector<TraceEvent> events;

    std::string to_jsonl() const;
    std::size_t count(EventKind kind, const std::string& skill = {}) const;
};

enum class EpisodeOutcome { Success, Failure, Timeout };

std::string_view to_string(EpisodeOutcome outcome);

struct EpisodeResult {
    Trace trace;
    EpisodeOutcome outcome = EpisodeOutcome::Timeout;
    std::int64_t ticks = 0;
    std::int64_t first_success_tick = -1;
    std::size_t skills_started = 0;
    std::int64_t min_battery = 100;
    WorldState final_world;
};

EpisodeResult run_episode(const PolicyDocument& policy, const Scenario& scenario);

// Compares the ordered (skill, args, lifecycle outcome) projections.
bool traces_equivalent(const Trace& a, const Trace& b);

bool detect_chattering(const Trace& trace, std::size_t k = 3);

}  // namespace btfsm
