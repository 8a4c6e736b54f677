#pragma once

#include "btfsm/bt.hpp"
#include "btfsm/core.hpp"

#include <filesystem>
#include <map>
#include <set>
#include <string>
#include <vector>

#ifndef BTFSM_SOURCE_DIR
#define BTFSM_SOURCE_DIR "."
#endif

namespace testing {

inline std::filesystem::path source_dir() { return BTFSM_SOURCE_DIR; }
inline std::filesystem::path fixture(const std::string& stem) {
    return source_dir() / "fixtures" / (stem + ".json");
}

// Scripted world: conditions are looked up by literal key, skills stay
// RUNNING until the test says otherwise, and every command is recorded.
class FakeWorld : public btfsm::WorldPort {
public:
    std::set<std::string> truths;
    std::vector<btfsm::SkillCall> started;
    std::vector<btfsm::SkillCall> cancelled;
    std::map<std::int64_t, btfsm::SkillCall> calls;
    std::map<std::int64_t, btfsm::Status> status;

    void set(const btfsm::ConditionLiteral& l, bool value = true) {
        if (value)
            truths.insert(l.key());
        else
            truths.erase(l.key());
    }

    bool evaluate(const btfsm::ConditionLiteral& literal) override { return truths.count(literal.key()) != 0; }

    btfsm::SkillHandle start(const btfsm::SkillCall& call) override {
        btfsm::SkillHandle h{next_++};
        started.push_back(call);
        calls[h.value] = call;
        status[h.value] = btfsm::Status::Running;
        return h;
    }

    btfsm::Status poll(btfsm::SkillHandle h) override { return status.at(h.value); }

    bool cancel(btfsm::SkillHandle h) override {
        if (status.at(h.value) != btfsm::Status::Running) return false;
        cancelled.push_back(calls.at(h.value));
        status[h.value] = btfsm::Status::Failure;
        return true;
    }

    // Finishes every running instance of the skill.
    void finish(const std::string& skill, btfsm::Status s = btfsm::Status::Success) {
        for (auto& [h, call] : calls)
            if (call.skill == skill && status[h] == btfsm::Status::Running) status[h] = s;
    }

    void clear_log() {
        started.clear();
        cancelled.clear();
    }

private:
    std::int64_t next_ = 1;
};

inline btfsm::NodeId node_named(const btfsm::PolicyTree& t, const std::string& name) {
    for (const auto& [id, n] : t.nodes())
        if (n.name == name) return id;
    throw btfsm::Error("no node named " + name);
}

}  // namespace testing
