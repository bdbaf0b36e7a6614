#pragma once

#include <cstdint>
#include <map>
#include <string>

#include "repomech/contract.hpp"
#include "repomech/schedule.hpp"

namespace repomech::config {

// key = value lines; '#' starts a comment, blank lines are skipped.
// Duplicate keys and lines without '=' are errors. Loaders below collect
// every problem in one ConfigError instead of stopping at the first.
std::map<std::string, std::string> parse_key_values(const std::string& text);

std::string read_file(const std::string& path);  // throws ConfigError when unreadable

// One curve. Keys: side (demand|supply), family (sqrt | quadratic-cap |
// custom-tabulated), a, r_b, theta (optional, default 1), and for the
// tabulated family a `table` of comma-separated rate:volume pairs.
ScheduleModel parse_schedule_config(const std::string& text);
ScheduleModel load_schedule_config(const std::string& path);

// A full engine run: where the two curves live, how fine the reporting
// ladder is, the dealers' true spread floors, the protocol clock, and the
// seed for randomized procedures.
struct RunConfig {
    std::string demand_config;
    std::string supply_config;
    int grid_i = 3;
    double kappa_mm = 0;
    double kappa_rm = 0;
    contract::Deadlines deadlines{10, 20, 30, 40};
    uint64_t seed = 1;
};

RunConfig parse_run_config(const std::string& text);
RunConfig load_run_config(const std::string& path);  // curve paths resolve beside the file

}  // namespace repomech::config
