#pragma once

#include <optional>
#include <string>
#include <vector>

#include "repomech/commitments.hpp"
#include "repomech/contract.hpp"

namespace repomech::audit {

using commitments::MembershipProof;
using commitments::SealedBox;
using contract::SelectedTrade;
using hashing::Digest;
using wire::Fp;
using wire::Salt;
using wire::ScheduleEntry;

// Full plaintext of one dealer's report, disclosed only to the auditor.
struct Opening {
    std::vector<ScheduleEntry> entries;
    std::vector<Salt> salts;
};

// Everything an after-the-fact checker needs. The public form discloses the
// selected row (via its membership proofs) and nothing else about the
// schedules; the auditor form adds full openings for replay.
struct AuditTranscript {
    std::vector<Fp> grid;
    std::string final_phase;
    std::optional<Digest> root_mm;
    std::optional<Digest> root_rm;
    std::optional<Fp> kappa_hat;
    std::optional<SelectedTrade> outcome;
    std::optional<MembershipProof> proof_mm;
    std::optional<MembershipProof> proof_rm;
    std::vector<SealedBox> sealed;  // outcome boxes, one per dealer
    std::vector<contract::LogEntry> log;
    Digest chain{};
    std::optional<Opening> opening_mm;
    std::optional<Opening> opening_rm;
};

// Roots the checker obtained out of band (e.g. countersigned at intake).
struct ExpectedRoots {
    std::optional<Digest> mm;
    std::optional<Digest> rm;
};

// Sealed-box plaintext for the trade outcome.
std::string outcome_payload(const SelectedTrade& t);

// Snapshot a finished run (settled or aborted). auditor_mode adds the
// openings. Throws ProtocolError on a run still in flight.
AuditTranscript build_transcript(const contract::ContractState& st, bool auditor_mode);

struct Verdict {
    enum class Tier { fail, public_ok, full_ok };
    Tier tier = Tier::fail;
    std::string failed_check;  // empty unless tier == fail

    bool passed() const { return tier != Tier::fail; }
};

// Re-derives every claim in the transcript: roots against expectations and
// the hash chain, proofs against roots, the spread floor at the selected
// row, sealed boxes byte for byte, and (with openings) full filter/select
// replay. Stops at the first broken check and names it.
Verdict verify_transcript(const AuditTranscript& t, const ExpectedRoots& expected);

std::string serialize_transcript(const AuditTranscript& t);
AuditTranscript parse_transcript(const std::string& json_text);  // throws Error

}  // namespace repomech::audit
