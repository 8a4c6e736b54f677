// Regenerates the checked-in fixture corpus: policies under fixtures/,
// scenarios under scenarios/, libraries and goals under libraries/.
//
//   gen_fixtures [ROOT]

#include "btfsm/fixtures.hpp"

#include <filesystem>
#include <iostream>

using namespace btfsm;

int main(int argc, char** argv) {
    namespace fs = std::filesystem;
    const fs::path root = argc > 1 ? fs::path(argv[1]) : fs::current_path();
    try {
        for (const char* sub : {"fixtures", "scenarios", "libraries"}) fs::create_directories(root / sub);

        for (const auto& [stem, doc] : fixtures::all_policies())
            write_file(root / "fixtures" / (stem + ".json"), serialize_policy(doc));
        for (const auto& s : fixtures::all_scenarios())
            write_file(root / "scenarios" / (s.name + ".json"), serialize_scenario(s));

        const fs::path lib = root / "libraries";
        write_file(lib / "fetch_library.json", serialize_action_library(fixtures::fetch_library()));
        write_file(lib / "experiment_library.json", serialize_action_library(fixtures::experiment_library()));
        write_file(lib / "scalability_library.json", serialize_action_library(fixtures::scalability_library()));
        write_file(lib / "fetch_goal.json", serialize_goal(fixtures::fetch_goal()));
        write_file(lib / "docking_goal.json", serialize_goal(fixtures::docking_goal()));
        write_file(lib / "scalability_goal.json", serialize_goal(fixtures::scalability_goal()));
    } catch (const std::exception& e) {
        std::cerr << "gen_fixtures: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
