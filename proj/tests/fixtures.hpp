#pragma once

// Shared protocol fixtures: the three-level reference book committed onto
// the default cast, plus canned event runs ending settled or aborted.

#include <stdexcept>
#include <string>
#include <vector>

#include "repomech/contract.hpp"

namespace fixtures {

using repomech::contract::ContractState;
using repomech::contract::Event;
using repomech::contract::GenesisConfig;
using repomech::wire::Fp;
using repomech::wire::Salt;
using repomech::wire::ScheduleEntry;

inline Salt test_salt(unsigned i) {
    Salt s{};
    for (unsigned j = 0; j < s.size(); ++j)
        s[j] = static_cast<unsigned char>((i * 37u + j * 11u + 1u) & 0xffu);
    return s;
}

inline std::vector<Salt> salts_for(size_t n, unsigned base) {
    std::vector<Salt> out;
    for (size_t i = 0; i < n; ++i) out.push_back(test_salt(base + static_cast<unsigned>(i)));
    return out;
}

// Three-level discretization of the symmetric sqrt market (a=1, r_b=6).
inline std::vector<Fp> grid3() { return {0, 866025404, 1732050808}; }

inline std::vector<ScheduleEntry> mm_entries3() {
    return {{0, 0}, {866025404, 750000000}, {1732050808, 3000000000}};
}

inline std::vector<ScheduleEntry> rm_entries3() {
    return {{0, 6000000000}, {866025404, 5250000000}, {1732050808, 3000000000}};
}

inline GenesisConfig genesis3() {
    GenesisConfig cfg;
    cfg.grid = grid3();
    cfg.deadlines = {10, 20, 30, 40};
    return cfg;
}

inline void must_apply(ContractState& st, const Event& ev) {
    auto r = repomech::contract::apply_event(st, ev);
    if (!r.accepted) throw std::runtime_error("fixture event rejected: " + r.reason);
}

inline repomech::contract::SubmitSchedule mm_schedule_event() {
    return {"BD-mm", mm_entries3(), salts_for(3, 10), "sig:MM", "sig:BD-mm"};
}

inline repomech::contract::SubmitSchedule rm_schedule_event() {
    return {"BD-rm", rm_entries3(), salts_for(3, 20), "sig:RM", "sig:BD-rm"};
}

// Both schedules in, both deposits posted: phase == negotiate.
inline ContractState negotiating_state() {
    auto st = repomech::contract::genesis(genesis3());
    must_apply(st, mm_schedule_event());
    must_apply(st, rm_schedule_event());
    must_apply(st, repomech::contract::PostDeposit{"MM", repomech::contract::Asset::cash,
                                                   1732050808});
    must_apply(st, repomech::contract::PostDeposit{"RM", repomech::contract::Asset::securities,
                                                   1732050808});
    return st;
}

// Accepted opener at kappa = 1.0: selects level 1 and settles.
inline ContractState settled_state() {
    auto st = negotiating_state();
    must_apply(st, repomech::contract::SubmitFirstSpread{"BD-mm", 1000000000});
    must_apply(st, repomech::contract::RespondSpread{"BD-rm", true, 0});
    must_apply(st, repomech::contract::RequestExecute{"MM"});
    must_apply(st, repomech::contract::RequestExecute{"RM"});
    return st;
}

// Counter to kappa = 2.5 beats every quoted half-spread: feasible set empty,
// the run aborts with full refunds.
inline ContractState aborted_state() {
    auto st = negotiating_state();
    must_apply(st, repomech::contract::SubmitFirstSpread{"BD-mm", 1000000000});
    must_apply(st, repomech::contract::RespondSpread{"BD-rm", false, 2500000000});
    return st;
}

}  // namespace fixtures
