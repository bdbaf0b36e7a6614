#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "repomech/hashing.hpp"
#include "repomech/wire.hpp"

namespace repomech::commitments {

using hashing::Digest;
using wire::Fp;
using wire::Salt;
using wire::ScheduleEntry;

// Committed leaf bytes: tag || index (8B LE) || rate (8B LE, two's
// complement) || volume (8B LE) || salt (32B). The index lives inside the
// leaf so a proof cannot be replayed at another position.
std::string leaf_bytes(uint32_t index, const ScheduleEntry& entry, const Salt& salt);
Digest leaf_digest(uint32_t index, const ScheduleEntry& entry, const Salt& salt);

struct ScheduleCommitment {
    Digest root{};
    uint32_t leaf_count = 0;
    std::vector<Digest> salt_commitments;  // per-leaf digests binding the salts
};

// Binary hash tree over the leaves; an odd node at any level is promoted
// unchanged to the next level.
ScheduleCommitment commit_schedule(const std::vector<ScheduleEntry>& entries,
                                   const std::vector<Salt>& salts);

// One authentication step. A `promoted` step carries no sibling: the node
// passed through that level unchanged. Every proof has exactly
// ceil(log2(leaf_count)) steps; the verifier recomputes from (leaf_count,
// index) where promoted steps are legal.
struct ProofStep {
    bool promoted = false;
    bool sibling_on_left = false;
    Digest sibling{};
};

struct MembershipProof {
    uint32_t index = 0;
    uint32_t leaf_count = 0;
    ScheduleEntry entry;
    Salt salt{};
    std::vector<ProofStep> path;
};

MembershipProof prove_membership(const std::vector<ScheduleEntry>& entries,
                                 const std::vector<Salt>& salts, uint32_t index);
bool verify_membership(const Digest& root, const MembershipProof& proof);

// Deterministic sealing stub keyed by the recipient id: a keystream XOR with
// a MAC over the ciphertext. Stands in for recipient-key encryption so
// transcripts stay reproducible; swap behind this interface for real keys.
struct SealedBox {
    std::string recipient;
    std::vector<unsigned char> ciphertext;
    Digest mac{};

    bool operator==(const SealedBox&) const = default;
};
SealedBox seal_for(const std::string& recipient, std::string_view payload);
std::string open_sealed(const SealedBox& box);  // throws on MAC mismatch

}  // namespace repomech::commitments
