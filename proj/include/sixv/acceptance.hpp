#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

namespace sixv::acceptance {

enum class Status { pass, fail, warn };

struct CriterionResult {
    int id = 0;
    std::string name;
    Status status = Status::fail;
    bool soft = false;   // soft criteria report warn instead of fail
    double seconds = 0.0;
    std::string detail;
};

struct Options {
    std::uint64_t seed = 2024;
    long exactness_sweeps = 1000000;
    long gff_samples = 200000;     // per chain
    int gff_chains = 4;
    int threads = 0;
};

inline constexpr int kCriteria = 11;

const char* status_name(Status s);
CriterionResult run_criterion(int id, const Options& opt = {});
// Runs the given criteria (all when empty); `progress` is called after each one.
std::vector<CriterionResult> run_all(const Options& opt = {}, const std::vector<int>& ids = {},
                                     const std::function<void(const CriterionResult&)>& progress = {});
bool all_passed(const std::vector<CriterionResult>& results);  // warn counts as passed

}  // namespace sixv::acceptance
