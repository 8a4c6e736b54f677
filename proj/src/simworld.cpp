#include "btfsm/simworld.hpp"

#include "btfsm/bt.hpp"
#include "btfsm/fsm.hpp"
#include "btfsm/hfsm.hpp"
#include "json_util.hpp"

#include <algorithm>
#include <memory>
#include <sstream>

namespace btfsm {

std::vector<std::string> default_stations() {
    return {"center", "fetch1", "fetch2", "fetch3", "fetch4", "fetch5", "delivery", "recharge", "dock"};
}

void WorldState::validate() const {
    if (battery < 0 || battery > 100) throw ValidationError("battery must lie in [0,100]");
    if (robot_location != kTransit && !stations.count(robot_location))
        throw ValidationError("robot location " + robot_location + " is not a declared station");
    for (const auto& [item, station] : item_locations)
        if (!stations.count(station)) throw ValidationError("item " + item + " sits at undeclared station " + station);
    if (holding && item_locations.count(*holding))
        throw ValidationError("held item " + *holding + " also has a station");
}

std::string_view to_string(SkillPhase phase) {
    switch (phase) {
    case SkillPhase::Idle: return "idle";
    case SkillPhase::Running: return "running";
    case SkillPhase::Succeeded: return "succeeded";
    case SkillPhase::Failed: return "failed";
    case SkillPhase::Cancelled: return "cancelled";
    }
    return "?";
}

bool is_motion_skill(const std::string& skill) {
    return skill == "move_to" || skill == "recharge" || skill == "dock" || skill == "search";
}

namespace {
const std::set<std::string> kSkills = {"move_to", "pick", "place", "recharge", "dock", "tuck", "search"};

std::string symbol_arg(const SkillCall& call, std::size_t i) {
    if (i >= call.args.size() || !std::holds_alternative<std::string>(call.args[i]))
        throw EngineError("skill " + call.key() + " expects a symbol as argument " + std::to_string(i + 1));
    return std::get<std::string>(call.args[i]);
}
}  // namespace

std::string_view to_string(PerturbationKind kind) {
    switch (kind) {
    case PerturbationKind::SetItemLocation: return "set_item_location";
    case PerturbationKind::SetBattery: return "set_battery";
    case PerturbationKind::ForceFailNext: return "force_fail_next";
    }
    return "?";
}

std::string Perturbation::describe() const {
    switch (kind) {
    case PerturbationKind::SetItemLocation: return "set_item_location(" + item + "," + station + ")";
    case PerturbationKind::SetBattery: return "set_battery(" + std::to_string(battery) + ")";
    case PerturbationKind::ForceFailNext: return "force_fail_next(" + skill + ")";
    }
    return "?";
}

std::map<std::string, std::int64_t> default_durations() {
    return {{"move_to", 5}, {"pick", 3}, {"place", 3}, {"tuck", 3}, {"dock", 3}, {"recharge", 2}, {"search", 4}};
}

std::int64_t Scenario::duration(const std::string& skill) const {
    auto it = durations.find(skill);
    std::int64_t d = it != durations.end() ? it->second : default_durations().at(skill);
    if (skill == "search") d *= search_viewpoints;
    return std::max<std::int64_t>(d, 1);
}

void Scenario::validate() const {
    initial.validate();
    for (const auto& [skill, d] : durations) {
        if (!kSkills.count(skill)) throw ValidationError("duration given for unknown skill " + skill);
        if (d < 1) throw ValidationError("duration of " + skill + " must be at least 1 tick");
    }
    for (const auto& f : failures) {
        if (!kSkills.count(f.skill)) throw ValidationError("failure injected into unknown skill " + f.skill);
        if (f.nth < 1) throw ValidationError("failure invocation counts start at 1");
    }
    if (failure_rate < 0 || failure_rate > 1) throw ValidationError("failure_rate must lie in [0,1]");
    if (drain_per_motion_tick < 0) throw ValidationError("battery drain cannot be negative");
    if (battery_threshold < 0 || battery_threshold > 100) throw ValidationError("battery threshold must lie in [0,100]");
    if (max_ticks < 1) throw ValidationError("max_ticks must be positive");
    if (settle_ticks < 1) throw ValidationError("settle_ticks must be positive");
    if (search_viewpoints < 1) throw ValidationError("search needs at least one viewpoint");
    for (std::size_t i = 0; i < perturbations.size(); ++i) {
        const auto& p = perturbations[i];
        if (i && p.tick <= perturbations[i - 1].tick)
            throw ValidationError("perturbation ticks must be strictly increasing");
        if (p.tick < 0) throw ValidationError("perturbation tick cannot be negative");
        if (p.kind == PerturbationKind::SetBattery && (p.battery < 0 || p.battery > 100))
            throw ValidationError("set_battery value must lie in [0,100]");
        if (p.kind == PerturbationKind::SetItemLocation && !initial.stations.count(p.station))
            throw ValidationError("set_item_location targets undeclared station " + p.station);
        if (p.kind == PerturbationKind::ForceFailNext && !kSkills.count(p.skill))
            throw ValidationError("force_fail_next names unknown skill " + p.skill);
    }
}

// ---------------------------------------------------------------- simulator

Simulator::Simulator(const Scenario& scenario) : scenario_(scenario), world_(scenario.initial), rng_(scenario.seed) {
    scenario_.validate();
}

bool Simulator::evaluate(const ConditionLiteral& l) const {
    auto sym = [&](std::size_t i) { return std::get<std::string>(l.args.at(i)); };
    switch (l.predicate) {
    case Predicate::RobotAt: {
        // an item name stands for the station the item currently sits at
        if (world_.robot_location == kTransit) return false;
        if (world_.stations.count(sym(0))) return world_.robot_location == sym(0);
        auto it = world_.item_locations.find(sym(0));
        return it != world_.item_locations.end() && it->second == world_.robot_location;
    }
    case Predicate::InHand: return world_.holding && *world_.holding == sym(0);
    case Predicate::ObjectAt: {
        auto it = world_.item_locations.find(sym(0));
        return it != world_.item_locations.end() && it->second == sym(1);
    }
    case Predicate::BatteryAbove: return world_.battery > std::get<std::int64_t>(l.args.at(0));
    case Predicate::ArmTucked: return world_.arm_tucked;
    case Predicate::Docked: return world_.docked;
    case Predicate::Found:
        return std::all_of(l.args.begin(), l.args.end(),
                           [&](const Arg& a) { return world_.found_markers.count(std::get<std::string>(a)) != 0; });
    }
    throw EngineError("unknown predicate");
}

SkillHandle Simulator::start(const SkillCall& call) {
    if (!kSkills.count(call.skill)) throw EngineError("unknown skill " + call.skill);
    if (is_motion_skill(call.skill) && motion_running())
        throw EngineError("cannot start " + call.key() + " while another motion skill runs");

    SkillRuntime rt{call, SkillPhase::Running, scenario_.duration(call.skill), world_.tick, false, {}};
    const auto n = ++invocations_[call.skill];
    for (const auto& f : scenario_.failures)
        if (f.skill == call.skill && f.nth == n) rt.doomed = true;
    if (force_fail_.erase(call.skill)) rt.doomed = true;
    if (scenario_.failure_rate > 0 && std::uniform_real_distribution<double>(0, 1)(rng_) < scenario_.failure_rate)
        rt.doomed = true;

    // Guard violations fail at once and leave the world untouched.
    bool ok = true;
    if (call.skill == "move_to") {
        const auto target = symbol_arg(call, 0);
        if (world_.stations.count(target)) {
            rt.target = target;
        } else if (auto it = world_.item_locations.find(target); it != world_.item_locations.end()) {
            rt.target = it->second;
        } else {
            ok = false;
        }
    } else if (call.skill == "pick") {
        auto it = world_.item_locations.find(symbol_arg(call, 0));
        ok = !world_.holding && it != world_.item_locations.end() && it->second == world_.robot_location;
    } else if (call.skill == "place") {
        ok = world_.holding && *world_.holding == symbol_arg(call, 0) && world_.robot_location != kTransit;
    }
    if (!ok) {
        rt.phase = SkillPhase::Failed;
        rt.remaining = 0;
    } else if (call.skill == "move_to" || call.skill == "recharge" || call.skill == "dock") {
        world_.robot_location = kTransit;
        world_.docked = false;
    } else if (call.skill == "pick" || call.skill == "place") {
        world_.arm_tucked = false;
    }
    SkillHandle h{next_handle_++};
    skills_.emplace(h, rt);
    return h;
}

const SkillRuntime& Simulator::runtime(SkillHandle handle) const {
    auto it = skills_.find(handle);
    if (it == skills_.end()) throw EngineError("unknown skill handle " + std::to_string(handle.value));
    return it->second;
}

Status Simulator::poll(SkillHandle handle) const {
    switch (runtime(handle).phase) {
    case SkillPhase::Succeeded: return Status::Success;
    case SkillPhase::Failed:
    case SkillPhase::Cancelled: return Status::Failure;
    default: return Status::Running;
    }
}

bool Simulator::cancel(SkillHandle handle) {
    auto it = skills_.find(handle);
    if (it == skills_.end() || it->second.phase != SkillPhase::Running) return false;
    it->second.phase = SkillPhase::Cancelled;
    return true;
}

bool Simulator::motion_running() const {
    return std::any_of(skills_.begin(), skills_.end(), [](const auto& kv) {
        return kv.second.phase == SkillPhase::Running && is_motion_skill(kv.second.call.skill);
    });
}

void Simulator::complete(SkillRuntime& rt) {
    if (rt.doomed) {
        rt.phase = SkillPhase::Failed;
        return;
    }
    const auto& c = rt.call;
    if (c.skill == "move_to") {
        world_.robot_location = rt.target;
    } else if (c.skill == "pick") {
        auto item = symbol_arg(c, 0);
        auto it = world_.item_locations.find(item);
        // the cube may have been moved away while the arm was reaching
        if (it == world_.item_locations.end() || it->second != world_.robot_location || world_.holding) {
            rt.phase = SkillPhase::Failed;
            return;
        }
        world_.item_locations.erase(it);
        world_.holding = item;
    } else if (c.skill == "place") {
        if (!world_.holding || *world_.holding != symbol_arg(c, 0)) {
            rt.phase = SkillPhase::Failed;
            return;
        }
        world_.item_locations[*world_.holding] = world_.robot_location;
        world_.holding.reset();
    } else if (c.skill == "recharge") {
        world_.robot_location = "recharge";
        world_.battery = 100;
    } else if (c.skill == "dock") {
        world_.robot_location = "dock";
        world_.docked = true;
    } else if (c.skill == "tuck") {
        world_.arm_tucked = true;
    } else if (c.skill == "search") {
        for (std::size_t i = 0; i < c.args.size(); ++i) world_.found_markers.insert(symbol_arg(c, i));
    }
    rt.phase = SkillPhase::Succeeded;
}

std::vector<SkillHandle> Simulator::advance() {
    // Drain first so that a recharge finishing in this tick ends at 100.
    if (motion_running()) world_.battery = std::max<std::int64_t>(0, world_.battery - scenario_.drain_per_motion_tick);
    std::vector<SkillHandle> finished;
    for (auto& [h, rt] : skills_) {
        if (rt.phase != SkillPhase::Running) continue;
        if (--rt.remaining <= 0) {
            complete(rt);
            finished.push_back(h);
        }
    }
    ++world_.tick;
    return finished;
}

void Simulator::perturb(const Perturbation& p) {
    switch (p.kind) {
    case PerturbationKind::SetBattery: world_.battery = p.battery; break;
    case PerturbationKind::SetItemLocation:
        if (world_.holding && *world_.holding == p.item) world_.holding.reset();
        world_.item_locations[p.item] = p.station;
        break;
    case PerturbationKind::ForceFailNext: force_fail_.insert(p.skill); break;
    }
}

// ---------------------------------------------------------------- traces

std::string_view to_string(EventKind kind) {
    switch (kind) {
    case EventKind::SkillStart: return "skill_start";
    case EventKind::SkillEnd: return "skill_end";
    case EventKind::SkillPreempt: return "skill_preempt";
    case EventKind::Perturbation: return "perturbation";
    case EventKind::PolicyStatus: return "policy_status";
    }
    return "?";
}

std::string Trace::to_jsonl() const {
    std::string out;
    for (const auto& e : events) {
        detail::json j = detail::json::object();
        j["tick"] = e.tick;
        j["kind"] = std::string(to_string(e.kind));
        if (!e.skill.empty()) {
            j["skill"] = e.skill;
            j["args"] = detail::args_json(e.args);
        }
        if (!e.outcome.empty()) j["outcome"] = e.outcome;
        if (!e.detail.empty()) j["detail"] = e.detail;
        out += j.dump();
        out += '\n';
    }
    return out;
}

std::size_t Trace::count(EventKind kind, const std::string& skill) const {
    return static_cast<std::size_t>(std::count_if(events.begin(), events.end(), [&](const TraceEvent& e) {
        return e.kind == kind && (skill.empty() || e.skill == skill);
    }));
}

std::string_view to_string(EpisodeOutcome outcome) {
    switch (outcome) {
    case EpisodeOutcome::Success: return "SUCCESS";
    case EpisodeOutcome::Failure: return "FAILURE";
    case EpisodeOutcome::Timeout: return "TIMEOUT";
    }
    return "?";
}

namespace {

// Skill starts requested during a policy evaluation are held back until the
// evaluation's cancellations have gone through, so a preempting skill never
// overlaps the one it replaces.
class EpisodePort : public WorldPort {
public:
    EpisodePort(Simulator& sim, Trace& trace) : sim_(sim), trace_(trace) {}

    bool evaluate(const ConditionLiteral& literal) override { return sim_.evaluate(literal); }

    SkillHandle start(const SkillCall& call) override {
        SkillHandle h{next_++};
        pending_.push_back({h, call});
        return h;
    }

    Status poll(SkillHandle handle) override {
        auto it = live_.find(handle);
        if (it == live_.end()) return Status::Running;  // committed at the end of this tick
        return sim_.poll(it->second);
    }

    bool cancel(SkillHandle handle) override {
        auto p = std::find_if(pending_.begin(), pending_.end(), [&](const auto& x) { return x.first == handle; });
        if (p != pending_.end()) {
            pending_.erase(p);
            return false;
        }
        auto it = live_.find(handle);
        if (it == live_.end() || !sim_.cancel(it->second)) return false;
        const auto& call = sim_.runtime(it->second).call;
        trace_.events.push_back({sim_.world().tick, EventKind::SkillPreempt, call.skill, call.args, "PREEMPTED", ""});
        return true;
    }

    std::size_t commit() {
        std::size_t n = 0;
        for (const auto& [h, call] : pending_) {
            SkillHandle real = sim_.start(call);
            live_[h] = real;
            trace_.events.push_back({sim_.world().tick, EventKind::SkillStart, call.skill, call.args, "", ""});
            if (sim_.runtime(real).phase == SkillPhase::Failed)
                trace_.events.push_back({sim_.world().tick, EventKind::SkillEnd, call.skill, call.args, "FAILURE",
                                         "precondition unmet"});
            ++n;
        }
        pending_.clear();
        return n;
    }

    void advance() {
        const auto tick = sim_.world().tick;
        for (SkillHandle h : sim_.advance()) {
            const auto& rt = sim_.runtime(h);
            trace_.events.push_back({tick, EventKind::SkillEnd, rt.call.skill, rt.call.args,
                                     rt.phase == SkillPhase::Succeeded ? "SUCCESS" : "FAILURE", ""});
        }
    }

private:
    Simulator& sim_;
    Trace& trace_;
    std::vector<std::pair<SkillHandle, SkillCall>> pending_;
    std::map<SkillHandle, SkillHandle> live_;
    std::int64_t next_ = 1;
};

class Engine {
public:
    virtual ~Engine() = default;
    virtual Status evaluate(EpisodePort& port) = 0;
};

class BtEngine : public Engine {
public:
    explicit BtEngine(const PolicyTree& tree) : exec_(tree) {}
    Status evaluate(EpisodePort& port) override {
        Status s = exec_.tick(port);
        exec_.halt_unvisited(port);
        return s;
    }

private:
    BtExecutor exec_;
};

class HfsmEngine : public Engine {
public:
    explicit HfsmEngine(const HfsmContainer& root) : exec_(root) {}
    Status evaluate(EpisodePort& port) override {
        Status s = exec_.step(port);
        exec_.halt_unvisited(port);
        return s;
    }

private:
    HfsmExecutor exec_;
};

// A terminated machine keeps reporting its outcome without acting.
class FsmEngine : public Engine {
public:
    explicit FsmEngine(const StateMachine& sm) : exec_(sm) {}
    Status evaluate(EpisodePort& port) override {
        if (exec_.terminated()) return *exec_.outcome();
        return exec_.step(port);
    }

private:
    FsmExecutor exec_;
};

std::unique_ptr<Engine> make_engine(const PolicyDocument& policy) {
    if (auto t = std::get_if<PolicyTree>(&policy)) return std::make_unique<BtEngine>(*t);
    if (auto m = std::get_if<StateMachine>(&policy)) return std::make_unique<FsmEngine>(*m);
    return std::make_unique<HfsmEngine>(std::get<HfsmContainer>(policy));
}

}  // namespace

EpisodeResult run_episode(const PolicyDocument& policy, const Scenario& scenario) {
    Simulator sim(scenario);
    EpisodeResult result;
    EpisodePort port(sim, result.trace);
    auto engine = make_engine(policy);

    std::size_t next_perturbation = 0;
    std::optional<Status> last;
    std::int64_t stable = 0;
    result.min_battery = sim.world().battery;

    while (sim.world().tick < scenario.max_ticks) {
        const auto tick = sim.world().tick;
        while (next_perturbation < scenario.perturbations.size() &&
               scenario.perturbations[next_perturbation].tick == tick) {
            const auto& p = scenario.perturbations[next_perturbation++];
            sim.perturb(p);
            result.trace.events.push_back({tick, EventKind::Perturbation, "", {}, "", p.describe()});
        }

        Status status = engine->evaluate(port);
        if (status != last)
            result.trace.events.push_back({tick, EventKind::PolicyStatus, "", {}, std::string(to_string(status)), ""});
        last = status;

        result.skills_started += port.commit();
        port.advance();
        result.min_battery = std::min(result.min_battery, sim.world().battery);

        if (status == Status::Failure) {
            result.outcome = EpisodeOutcome::Failure;
            result.ticks = tick + 1;
            result.final_world = sim.world();
            return result;
        }
        if (status == Status::Success) {
            if (result.first_success_tick < 0) result.first_success_tick = tick;
            if (++stable >= scenario.settle_ticks) {
                result.outcome = EpisodeOutcome::Success;
                result.ticks = tick + 1;
                result.final_world = sim.world();
                return result;
            }
        } else {
            stable = 0;
        }
    }
    result.outcome = EpisodeOutcome::Timeout;
    result.ticks = sim.world().tick;
    result.final_world = sim.world();
    return result;
}

namespace {
std::vector<std::string> projection(const Trace& t) {
    std::vector<std::string> out;
    for (const auto& e : t.events) {
        if (e.kind == EventKind::SkillStart)
            out.push_back(e.skill + "(" + join_args(e.args) + ") START");
        else if (e.kind == EventKind::SkillEnd || e.kind == EventKind::SkillPreempt)
            out.push_back(e.skill + "(" + join_args(e.args) + ") " + e.outcome);
    }
    return out;
}
}  // namespace

bool traces_equivalent(const Trace& a, const Trace& b) { return projection(a) == projection(b); }

// A switch is a preempted motion skill immediately replaced, in the same tick,
// by a different motion skill. Chattering is k consecutive switches between
// the same two skills.
bool detect_chattering(const Trace& trace, std::size_t k) {
    if (k == 0) return true;
    std::optional<std::pair<std::string, std::string>> pair;
    std::size_t run = 0;
    const auto& ev = trace.events;
    for (std::size_t i = 0; i + 1 < ev.size(); ++i) {
        if (ev[i].kind != EventKind::SkillPreempt || !is_motion_skill(ev[i].skill)) continue;
        std::size_t j = i + 1;
        while (j < ev.size() && ev[j].tick == ev[i].tick && ev[j].kind == EventKind::SkillPreempt) ++j;
        if (j >= ev.size() || ev[j].tick != ev[i].tick || ev[j].kind != EventKind::SkillStart ||
            !is_motion_skill(ev[j].skill))
            continue;
        std::string from = ev[i].skill + "(" + join_args(ev[i].args) + ")";
        std::string to = ev[j].skill + "(" + join_args(ev[j].args) + ")";
        if (from == to) continue;
        std::pair<std::string, std::string> key = from < to ? std::pair(from, to) : std::pair(to, from);
        if (pair && *pair == key) {
            ++run;
        } else {
            pair = key;
            run = 1;
        }
        if (run >= k) return true;
    }
    return false;
}

// ---------------------------------------------------------------- scenario documents

using detail::at;
using detail::fail;
using detail::json;

namespace {
std::string opt_string(const json& obj, const std::string& path, const char* key, std::string fallback) {
    const json* v = detail::optional_member(obj, path, key);
    return v ? detail::as_string(*v, at(path, key)) : fallback;
}
std::int64_t opt_int(const json& obj, const std::string& path, const char* key, std::int64_t fallback) {
    const json* v = detail::optional_member(obj, path, key);
    return v ? detail::as_int(*v, at(path, key)) : fallback;
}
std::vector<std::string> string_list(const json& j, const std::string& path) {
    std::vector<std::string> out;
    const auto& arr = detail::as_array(j, path);
    for (std::size_t i = 0; i < arr.size(); ++i) out.push_back(detail::as_string(arr[i], at(path, i)));
    return out;
}
}  // namespace

Scenario parse_scenario(std::string_view text) {
    json doc = detail::parse_json(text);
    if (!doc.is_object()) fail("$", "expected an object");
    detail::check_version(doc);
    Scenario s;
    s.name = opt_string(doc, "$", "name", "");

    const json& init = detail::member(doc, "$", "initial");
    const std::string ip = "$.initial";
    WorldState& w = s.initial;
    w.robot_location = opt_string(init, ip, "robot_location", "center");
    w.battery = opt_int(init, ip, "battery", 100);
    if (const json* h = detail::optional_member(init, ip, "holding"); h && !h->is_null())
        w.holding = detail::as_string(*h, at(ip, "holding"));
    if (const json* v = detail::optional_member(init, ip, "arm_tucked")) w.arm_tucked = detail::as_bool(*v, at(ip, "arm_tucked"));
    if (const json* v = detail::optional_member(init, ip, "docked")) w.docked = detail::as_bool(*v, at(ip, "docked"));
    if (const json* items = detail::optional_member(init, ip, "item_locations")) {
        if (!items->is_object()) fail(at(ip, "item_locations"), "expected an object");
        for (auto it = items->begin(); it != items->end(); ++it)
            w.item_locations[it.key()] = detail::as_string(it.value(), at(at(ip, "item_locations"), it.key().c_str()));
    }
    if (const json* f = detail::optional_member(init, ip, "found_markers"))
        for (auto& m : string_list(*f, at(ip, "found_markers"))) w.found_markers.insert(m);
    std::vector<std::string> stations = default_stations();
    if (const json* st = detail::optional_member(init, ip, "stations")) stations = string_list(*st, at(ip, "stations"));
    w.stations = {stations.begin(), stations.end()};

    if (const json* d = detail::optional_member(doc, "$", "durations")) {
        if (!d->is_object()) fail("$.durations", "expected an object");
        for (auto it = d->begin(); it != d->end(); ++it)
            s.durations[it.key()] = detail::as_int(it.value(), at("$.durations", it.key().c_str()));
    }
    s.search_viewpoints = opt_int(doc, "$", "search_viewpoints", s.search_viewpoints);
    if (const json* f = detail::optional_member(doc, "$", "failures")) {
        const auto& arr = detail::as_array(*f, "$.failures");
        for (std::size_t i = 0; i < arr.size(); ++i) {
            const std::string p = at("$.failures", i);
            s.failures.push_back({detail::as_string(detail::member(arr[i], p, "skill"), at(p, "skill")),
                                  opt_int(arr[i], p, "nth", 1)});
        }
    }
    if (const json* r = detail::optional_member(doc, "$", "failure_rate")) s.failure_rate = detail::as_number(*r, "$.failure_rate");
    s.drain_per_motion_tick = opt_int(doc, "$", "drain_per_motion_tick", s.drain_per_motion_tick);
    s.battery_threshold = opt_int(doc, "$", "battery_threshold", s.battery_threshold);
    if (const json* ps = detail::optional_member(doc, "$", "perturbations")) {
        const auto& arr = detail::as_array(*ps, "$.perturbations");
        for (std::size_t i = 0; i < arr.size(); ++i) {
            const std::string p = at("$.perturbations", i);
            Perturbation pt;
            pt.tick = detail::as_int(detail::member(arr[i], p, "tick"), at(p, "tick"));
            const auto ev = detail::as_string(detail::member(arr[i], p, "event"), at(p, "event"));
            if (ev == "set_battery") {
                pt.kind = PerturbationKind::SetBattery;
                pt.battery = detail::as_int(detail::member(arr[i], p, "value"), at(p, "value"));
            } else if (ev == "set_item_location") {
                pt.kind = PerturbationKind::SetItemLocation;
                pt.item = detail::as_string(detail::member(arr[i], p, "item"), at(p, "item"));
                pt.station = detail::as_string(detail::member(arr[i], p, "station"), at(p, "station"));
            } else if (ev == "force_fail_next") {
                pt.kind = PerturbationKind::ForceFailNext;
                pt.skill = detail::as_string(detail::member(arr[i], p, "skill"), at(p, "skill"));
            } else {
                fail(at(p, "event"), "unknown perturbation \"" + ev + "\"");
            }
            s.perturbations.push_back(pt);
        }
    }
    s.max_ticks = opt_int(doc, "$", "max_ticks", s.max_ticks);
    if (const json* sd = detail::optional_member(doc, "$", "seed")) {
        if (!sd->is_number_unsigned()) fail("$.seed", "expected a non-negative integer");
        s.seed = sd->get<std::uint64_t>();
    }
    s.settle_ticks = opt_int(doc, "$", "settle_ticks", s.settle_ticks);
    try {
        s.validate();
    } catch (const ValidationError& e) {
        fail("$", e.what());
    }
    return s;
}

std::string serialize_scenario(const Scenario& s) {
    json doc = json::object();
    doc["version"] = 1;
    doc["name"] = s.name;
    json init = json::object();
    init["robot_location"] = s.initial.robot_location;
    init["battery"] = s.initial.battery;
    init["holding"] = s.initial.holding ? json(*s.initial.holding) : json(nullptr);
    init["arm_tucked"] = s.initial.arm_tucked;
    init["docked"] = s.initial.docked;
    json items = json::object();
    for (const auto& [k, v] : s.initial.item_locations) items[k] = v;
    init["item_locations"] = items;
    init["found_markers"] = std::vector<std::string>(s.initial.found_markers.begin(), s.initial.found_markers.end());
    init["stations"] = std::vector<std::string>(s.initial.stations.begin(), s.initial.stations.end());
    doc["initial"] = init;
    json d = json::object();
    for (const auto& [k, v] : s.durations) d[k] = v;
    doc["durations"] = d;
    doc["search_viewpoints"] = s.search_viewpoints;
    json f = json::array();
    for (const auto& x : s.failures) f.push_back({{"skill", x.skill}, {"nth", x.nth}});
    doc["failures"] = f;
    doc["failure_rate"] = s.failure_rate;
    doc["drain_per_motion_tick"] = s.drain_per_motion_tick;
    doc["battery_threshold"] = s.battery_threshold;
    json ps = json::array();
    for (const auto& p : s.perturbations) {
        json j = json::object();
        j["tick"] = p.tick;
        j["event"] = std::string(to_string(p.kind));
        if (p.kind == PerturbationKind::SetBattery) j["value"] = p.battery;
        if (p.kind == PerturbationKind::SetItemLocation) {
            j["item"] = p.item;
            j["station"] = p.station;
        }
        if (p.kind == PerturbationKind::ForceFailNext) j["skill"] = p.skill;
        ps.push_back(j);
    }
    doc["perturbations"] = ps;
    doc["max_ticks"] = s.max_ticks;
    doc["seed"] = s.seed;
    doc["settle_ticks"] = s.settle_ticks;
    return detail::dump(doc);
}

}  // namespace btfsm
