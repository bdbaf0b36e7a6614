#pragma once

#include <array>
#include <cstdint>

#include "repomech/fixed.hpp"

namespace repomech::wire {

// Protocol-side numerics: fixed point at 1e-9 (see fixed.hpp).
using Fp = int64_t;

// Blinding value for one committed schedule entry.
using Salt = std::array<unsigned char, 32>;

// One rung of a reported client schedule: the volume ladder position and
// the rate the dealer's client authorized at that volume.
struct ScheduleEntry {
    Fp volume = 0;
    Fp rate = 0;

    bool operator==(const ScheduleEntry&) const = default;
};

}  // namespace repomech::wire
