#pragma once

#include <functional>
#include <string>
#include <vector>

#include <json.hpp>

namespace wittlab {

struct CriterionResult {
    int id = 0;
    std::string name;
    bool pass = false;
    uint64_t checks = 0;
    std::string detail;
    std::vector<std::string> notes;
    double seconds = 0;

    nlohmann::json to_json() const;
    std::string line() const;
};

struct SelftestOptions {
    int jobs = 4;
    // empty runs criteria 1..10
    std::vector<int> only;
    uint64_t seed = 20240601;
};

// runs the pinned acceptance suite; on_result is called as each criterion finishes
std::vector<CriterionResult> run_selftest(const SelftestOptions& opt,
                                          const std::function<void(const CriterionResult&)>& on_result = nullptr);

}  // namespace wittlab
