#include "repomech/audit.hpp"

#include <algorithm>

#include "json.hpp"
#include "repomech/errors.hpp"

namespace repomech::commitments {

namespace {

constexpr std::string_view kLeafTag = "LEAF";
constexpr std::string_view kNodeTag = "NODE";
constexpr std::string_view kSaltTag = "SALT";
constexpr std::string_view kSealTag = "SEAL";
constexpr std::string_view kSealMacTag = "SEALMAC";

std::string_view salt_view(const Salt& s) {
    return {reinterpret_cast<const char*>(s.data()), s.size()};
}

std::string index_bytes(uint32_t index) {
    std::string buf;
    fp::append_le8(buf, static_cast<uint64_t>(index));
    return buf;
}

Digest node_digest(const Digest& left, const Digest& right) {
    return hashing::tagged(kNodeTag, {hashing::view(left), hashing::view(right)});
}

}  // namespace

std::string leaf_bytes(uint32_t index, const ScheduleEntry& entry, const Salt& salt) {
    std::string buf;
    buf.reserve(kLeafTag.size() + 8 + 8 + 8 + salt.size());
    buf.append(kLeafTag);
    fp::append_le8(buf, static_cast<uint64_t>(index));
    fp::append_le8(buf, entry.rate);
    fp::append_le8(buf, entry.volume);
    buf.append(salt_view(salt));
    return buf;
}

Digest leaf_digest(uint32_t index, const ScheduleEntry& entry, const Salt& salt) {
    return hashing::sha256(leaf_bytes(index, entry, salt));
}

ScheduleCommitment commit_schedule(const std::vector<ScheduleEntry>& entries,
                                   const std::vector<Salt>& salts) {
    if (entries.empty()) throw DomainError("commitment: no entries");
    if (entries.size() != salts.size())
        throw DomainError("commitment: one salt per entry required");
    ScheduleCommitment c;
    c.leaf_count = static_cast<uint32_t>(entries.size());
    std::vector<Digest> level;
    level.reserve(entries.size());
    for (uint32_t i = 0; i < entries.size(); ++i) {
        level.push_back(leaf_digest(i, entries[i], salts[i]));
        c.salt_commitments.push_back(
            hashing::tagged(kSaltTag, {index_bytes(i), salt_view(salts[i])}));
    }
    while (level.size() > 1) {
        std::vector<Digest> next;
        next.reserve((level.size() + 1) / 2);
        for (size_t i = 0; i + 1 < level.size(); i += 2)
            next.push_back(node_digest(level[i], level[i + 1]));
        if (level.size() % 2 == 1) next.push_back(level.back());  // promoted
        level = std::move(next);
    }
    c.root = level.front();
    return c;
}

MembershipProof prove_membership(const std::vector<ScheduleEntry>& entries,
                                 const std::vector<Salt>& salts, uint32_t index) {
    if (entries.empty() || entries.size() != salts.size())
        throw DomainError("proof: malformed committed data");
    if (index >= entries.size()) throw DomainError("proof: index out of range");
    MembershipProof p;
    p.index = index;
    p.leaf_count = static_cast<uint32_t>(entries.size());
    p.entry = entries[index];
    p.salt = salts[index];

    std::vector<Digest> level;
    level.reserve(entries.size());
    for (uint32_t i = 0; i < entries.size(); ++i)
        level.push_back(leaf_digest(i, entries[i], salts[i]));
    size_t pos = index;
    while (level.size() > 1) {
        ProofStep step;
        if (pos % 2 == 0 && pos + 1 == level.size()) {
            step.promoted = true;  // odd node carried up unchanged
        } else if (pos % 2 == 0) {
            step.sibling_on_left = false;
            step.sibling = level[pos + 1];
        } else {
            step.sibling_on_left = true;
            step.sibling = level[pos - 1];
        }
        p.path.push_back(step);
        std::vector<Digest> next;
        next.reserve((level.size() + 1) / 2);
        for (size_t i = 0; i + 1 < level.size(); i += 2)
            next.push_back(node_digest(level[i], level[i + 1]));
        if (level.size() % 2 == 1) next.push_back(level.back());
        level = std::move(next);
        pos /= 2;
    }
    return p;
}

bool verify_membership(const Digest& root, const MembershipProof& proof) {
    if (proof.leaf_count == 0 || proof.index >= proof.leaf_count) return false;
    Digest acc = leaf_digest(proof.index, proof.entry, proof.salt);
    size_t pos = proof.index;
    size_t width = proof.leaf_count;
    size_t consumed = 0;
    while (width > 1) {
        if (consumed >= proof.path.size()) return false;
        const ProofStep& step = proof.path[consumed++];
        bool must_promote = (pos % 2 == 0 && pos + 1 == width);
        if (step.promoted != must_promote) return false;
        if (!step.promoted) {
            bool expect_left = (pos % 2 == 1);
            if (step.sibling_on_left != expect_left) return false;
            acc = expect_left ? node_digest(step.sibling, acc)
                              : node_digest(acc, step.sibling);
        }
        pos /= 2;
        width = (width + 1) / 2;
    }
    if (consumed != proof.path.size()) return false;
    return acc == root;
}

SealedBox seal_for(const std::string& recipient, std::string_view payload) {
    SealedBox box;
    box.recipient = recipient;
    box.ciphertext.resize(payload.size());
    size_t off = 0;
    uint64_t block = 0;
    while (off < payload.size()) {
        std::string ctr;
        fp::append_le8(ctr, block++);
        Digest ks = hashing::tagged(kSealTag, {recipient, ctr});
        for (size_t i = 0; i < ks.size() && off < payload.size(); ++i, ++off)
            box.ciphertext[off] = static_cast<unsigned char>(payload[off]) ^ ks[i];
    }
    box.mac = hashing::tagged(
        kSealMacTag,
        {recipient, std::string_view(reinterpret_cast<const char*>(box.ciphertext.data()),
                                     box.ciphertext.size())});
    return box;
}

std::string open_sealed(const SealedBox& box) {
    Digest mac = hashing::tagged(
        kSealMacTag,
        {box.recipient, std::string_view(reinterpret_cast<const char*>(box.ciphertext.data()),
                                         box.ciphertext.size())});
    if (mac != box.mac) throw Error("sealed box: authentication failed");
    std::string out(box.ciphertext.size(), '\0');
    size_t off = 0;
    uint64_t block = 0;
    while (off < box.ciphertext.size()) {
        std::string ctr;
        fp::append_le8(ctr, block++);
        Digest ks = hashing::tagged(kSealTag, {box.recipient, ctr});
        for (size_t i = 0; i < ks.size() && off < box.ciphertext.size(); ++i, ++off)
            out[off] = static_cast<char>(box.ciphertext[off] ^ ks[i]);
    }
    return out;
}

}  // namespace repomech::commitments

namespace repomech::audit {

using nlohmann::json;

std::string outcome_payload(const SelectedTrade& t) {
    std::string buf = "OUTCOME";
    fp::append_le8(buf, static_cast<uint64_t>(t.index));
    fp::append_le8(buf, t.volume);
    fp::append_le8(buf, t.rate_mm);
    fp::append_le8(buf, t.rate_rm);
    fp::append_le8(buf, t.rate_bd);
    return buf;
}

AuditTranscript build_transcript(const contract::ContractState& st, bool auditor_mode) {
    using contract::Phase;
    if (st.phase != Phase::settled && st.phase != Phase::aborted)
        throw ProtocolError("transcripts cover finished runs only");
    AuditTranscript t;
    t.grid = st.config.grid;
    t.final_phase = contract::to_string(st.phase);
    if (st.report_mm) t.root_mm = st.report_mm->root;
    if (st.report_rm) t.root_rm = st.report_rm->root;
    t.kappa_hat = st.kappa_hat;
    t.log = st.log;
    t.chain = st.chain;
    if (st.phase == Phase::settled) {
        t.outcome = st.outcome;
        uint32_t idx = static_cast<uint32_t>(st.outcome->index);
        t.proof_mm = commitments::prove_membership(st.report_mm->entries, st.report_mm->salts, idx);
        t.proof_rm = commitments::prove_membership(st.report_rm->entries, st.report_rm->salts, idx);
        std::string payload = outcome_payload(*st.outcome);
        t.sealed.push_back(commitments::seal_for(st.config.dealer_mm, payload));
        t.sealed.push_back(commitments::seal_for(st.config.dealer_rm, payload));
    }
    if (auditor_mode) {
        if (st.report_mm) t.opening_mm = Opening{st.report_mm->entries, st.report_mm->salts};
        if (st.report_rm) t.opening_rm = Opening{st.report_rm->entries, st.report_rm->salts};
    }
    return t;
}

// ---- verification -----------------------------------------------------------

namespace {

struct CheckFailure {
    std::string name;
};

[[noreturn]] void fail(const std::string& name) { throw CheckFailure{name}; }

void require(bool cond, const std::string& name) {
    if (!cond) fail(name);
}

json body_of(const contract::LogEntry& e, const std::string& check) {
    json b = json::parse(e.body, nullptr, false);
    if (b.is_discarded() || !b.is_object()) fail(check);
    return b;
}

// Pull one named field with an exact-type read; malformed bodies fail the
// calling check rather than throwing a json exception out of the verifier.
template <typename T>
T field(const json& b, const char* key, const std::string& check) {
    auto it = b.find(key);
    if (it == b.end()) fail(check);
    try {
        return it->get<T>();
    } catch (const json::exception&) {
        fail(check);
    }
}

struct LogFacts {
    std::string dealer_mm, dealer_rm;
    std::vector<Fp> grid;
    std::optional<std::string> root_mm_hex, root_rm_hex;
    std::optional<Fp> kappa_hat;
    std::optional<uint64_t> feasible_count;
    std::optional<json> select_body;
    std::string last_phase;
};

// Walk the log once, extracting the facts every later check compares
// against. The chain digest is what makes these facts trustworthy.
LogFacts extract_facts(const std::vector<contract::LogEntry>& log) {
    require(!log.empty() && log.front().type == "genesis", "log-genesis");
    LogFacts f;
    json g = body_of(log.front(), "log-genesis");
    json agents = field<json>(g, "agents", "log-genesis");
    f.dealer_mm = field<std::string>(agents, "dealer_mm", "log-genesis");
    f.dealer_rm = field<std::string>(agents, "dealer_rm", "log-genesis");
    f.grid = field<std::vector<Fp>>(g, "grid", "log-genesis");
    for (const auto& e : log) {
        json b = body_of(e, "log-body");
        if (e.type == "schedule") {
            std::string dealer = field<std::string>(b, "dealer", "log-schedule");
            std::string root = field<std::string>(b, "root", "log-schedule");
            if (dealer == f.dealer_mm)
                f.root_mm_hex = root;
            else if (dealer == f.dealer_rm)
                f.root_rm_hex = root;
            else
                fail("log-schedule");
        } else if (e.type == "respond") {
            f.kappa_hat = field<Fp>(b, "kappa_hat", "log-respond");
            f.feasible_count = field<uint64_t>(b, "feasible_count", "log-respond");
        } else if (e.type == "select") {
            f.select_body = b;
        }
        f.last_phase = field<std::string>(b, "phase_after", "log-body");
    }
    return f;
}

void check_outcome_against_log(const AuditTranscript& t, const LogFacts& facts) {
    require(facts.select_body.has_value(), "outcome-log");
    const json& b = *facts.select_body;
    const SelectedTrade& o = *t.outcome;
    require(field<int32_t>(b, "index", "outcome-log") == o.index, "outcome-log");
    require(field<Fp>(b, "volume", "outcome-log") == o.volume, "outcome-log");
    require(field<Fp>(b, "rate_mm", "outcome-log") == o.rate_mm, "outcome-log");
    require(field<Fp>(b, "rate_rm", "outcome-log") == o.rate_rm, "outcome-log");
    require(field<Fp>(b, "rate_bd", "outcome-log") == o.rate_bd, "outcome-log");
}

void check_proofs(const AuditTranscript& t) {
    const SelectedTrade& o = *t.outcome;
    require(t.proof_mm && t.proof_rm, "proof-missing");
    const auto& pm = *t.proof_mm;
    const auto& pr = *t.proof_rm;
    require(pm.index == static_cast<uint32_t>(o.index) && pr.index == pm.index, "proof-index");
    require(pm.leaf_count == t.grid.size() && pr.leaf_count == t.grid.size(), "proof-width");
    require(pm.entry.volume == o.volume && pr.entry.volume == o.volume, "proof-entry");
    require(pm.entry.rate == o.rate_mm && pr.entry.rate == o.rate_rm, "proof-entry");
    require(fp::midpoint(o.rate_mm, o.rate_rm) == o.rate_bd, "outcome-midpoint");
    require(t.root_mm && commitments::verify_membership(*t.root_mm, pm), "proof-mm");
    require(t.root_rm && commitments::verify_membership(*t.root_rm, pr), "proof-rm");
}

void check_sealed(const AuditTranscript& t, const LogFacts& facts) {
    require(t.sealed.size() == 2, "sealed-count");
    std::string payload = outcome_payload(*t.outcome);
    require(t.sealed[0].recipient == facts.dealer_mm, "sealed-recipient");
    require(t.sealed[1].recipient == facts.dealer_rm, "sealed-recipient");
    require(commitments::seal_for(facts.dealer_mm, payload) == t.sealed[0], "sealed-mm");
    require(commitments::seal_for(facts.dealer_rm, payload) == t.sealed[1], "sealed-rm");
}

void check_opening(const Opening& op, const Digest& root, const std::vector<Fp>& grid,
                   const std::string& which) {
    require(op.entries.size() == grid.size(), "opening-grid-" + which);
    for (size_t i = 0; i < grid.size(); ++i)
        require(op.entries[i].volume == grid[i], "opening-grid-" + which);
    auto com = commitments::commit_schedule(op.entries, op.salts);
    require(com.root == root, "opening-root-" + which);
}

void check_replay(const AuditTranscript& t, const LogFacts& facts) {
    const auto& mm = t.opening_mm->entries;
    const auto& rm = t.opening_rm->entries;
    auto feas = contract::filter_feasible(mm, rm, *t.kappa_hat);
    require(facts.feasible_count && feas.size() == *facts.feasible_count, "replay-filter");
    auto chosen = contract::select_trade(mm, rm, feas);
    if (t.final_phase == "settled") {
        require(chosen.has_value(), "replay-select");
        const SelectedTrade& o = *t.outcome;
        require(chosen->index == o.index && chosen->volume == o.volume &&
                    chosen->rate_mm == o.rate_mm && chosen->rate_rm == o.rate_rm &&
                    chosen->rate_bd == o.rate_bd,
                "replay-select");
    }
}

}  // namespace

Verdict verify_transcript(const AuditTranscript& t, const ExpectedRoots& expected) {
    try {
        // Chain first: everything else leans on log bodies being authentic.
        Digest acc{};
        for (const auto& e : t.log) acc = contract::chain_step(acc, e);
        require(acc == t.chain, "chain-mismatch");

        LogFacts facts = extract_facts(t.log);
        require(facts.grid == t.grid, "grid-log");
        require(facts.last_phase == t.final_phase, "phase-log");
        require(t.final_phase == "settled" || t.final_phase == "aborted", "phase-terminal");

        // Roots: out-of-band expectations and the in-chain intake records
        // must both agree with the transcript.
        if (expected.mm) require(t.root_mm && *t.root_mm == *expected.mm, "root-mm-mismatch");
        if (expected.rm) require(t.root_rm && *t.root_rm == *expected.rm, "root-rm-mismatch");
        require(t.root_mm.has_value() == facts.root_mm_hex.has_value(), "root-mm-log");
        if (t.root_mm) require(hashing::hex(*t.root_mm) == *facts.root_mm_hex, "root-mm-log");
        require(t.root_rm.has_value() == facts.root_rm_hex.has_value(), "root-rm-log");
        if (t.root_rm) require(hashing::hex(*t.root_rm) == *facts.root_rm_hex, "root-rm-log");

        require(t.kappa_hat == facts.kappa_hat, "kappa-log");

        if (t.final_phase == "settled") {
            require(t.outcome.has_value(), "outcome-missing");
            check_outcome_against_log(t, facts);
            check_proofs(t);
            require(t.kappa_hat.has_value(), "kappa-missing");
            require(t.outcome->rate_rm - t.outcome->rate_mm >= 2 * *t.kappa_hat, "spread-floor");
            require(t.outcome->volume > 0, "spread-floor");
            check_sealed(t, facts);
        } else {
            require(!t.outcome && !t.proof_mm && !t.proof_rm && t.sealed.empty(),
                    "aborted-extras");
        }

        bool full = t.opening_mm.has_value() || t.opening_rm.has_value();
        if (full) {
            require(t.opening_mm.has_value() == t.root_mm.has_value(), "opening-mm");
            require(t.opening_rm.has_value() == t.root_rm.has_value(), "opening-rm");
            if (t.opening_mm) check_opening(*t.opening_mm, *t.root_mm, t.grid, "mm");
            if (t.opening_rm) check_opening(*t.opening_rm, *t.root_rm, t.grid, "rm");
            if (t.opening_mm && t.opening_rm && t.kappa_hat) check_replay(t, facts);
        }
        return {full ? Verdict::Tier::full_ok : Verdict::Tier::public_ok, ""};
    } catch (const CheckFailure& f) {
        return {Verdict::Tier::fail, f.name};
    } catch (const std::exception& e) {
        return {Verdict::Tier::fail, std::string("verifier-error: ") + e.what()};
    }
}

// ---- serialization ----------------------------------------------------------

namespace {

std::string salt_hex(const Salt& s) {
    Digest d;
    std::copy(s.begin(), s.end(), d.begin());
    return hashing::hex(d);
}

Salt salt_unhex(const std::string& h) {
    Digest d = hashing::unhex(h);
    Salt s;
    std::copy(d.begin(), d.end(), s.begin());
    return s;
}

json proof_json(const MembershipProof& p) {
    json steps = json::array();
    for (const auto& s : p.path)
        steps.push_back({{"promoted", s.promoted},
                         {"left", s.sibling_on_left},
                         {"sibling", hashing::hex(s.sibling)}});
    return {{"index", p.index},
            {"leaf_count", p.leaf_count},
            {"entry", {{"volume", p.entry.volume}, {"rate", p.entry.rate}}},
            {"salt", salt_hex(p.salt)},
            {"path", steps}};
}

MembershipProof proof_from_json(const json& j) {
    MembershipProof p;
    p.index = j.at("index").get<uint32_t>();
    p.leaf_count = j.at("leaf_count").get<uint32_t>();
    p.entry = {j.at("entry").at("volume").get<Fp>(), j.at("entry").at("rate").get<Fp>()};
    p.salt = salt_unhex(j.at("salt").get<std::string>());
    for (const auto& s : j.at("path")) {
        commitments::ProofStep step;
        step.promoted = s.at("promoted").get<bool>();
        step.sibling_on_left = s.at("left").get<bool>();
        step.sibling = hashing::unhex(s.at("sibling").get<std::string>());
        p.path.push_back(step);
    }
    return p;
}

json outcome_json(const SelectedTrade& o) {
    return {{"index", o.index},
            {"volume", o.volume},
            {"rate_mm", o.rate_mm},
            {"rate_rm", o.rate_rm},
            {"rate_bd", o.rate_bd}};
}

SelectedTrade outcome_from_json(const json& j) {
    return {j.at("index").get<int32_t>(), j.at("volume").get<Fp>(), j.at("rate_mm").get<Fp>(),
            j.at("rate_rm").get<Fp>(), j.at("rate_bd").get<Fp>()};
}

json opening_json(const Opening& op) {
    json entries = json::array();
    for (const auto& e : op.entries) entries.push_back({{"volume", e.volume}, {"rate", e.rate}});
    std::vector<std::string> salts;
    for (const auto& s : op.salts) salts.push_back(salt_hex(s));
    return {{"entries", entries}, {"salts", salts}};
}

Opening opening_from_json(const json& j) {
    Opening op;
    for (const auto& e : j.at("entries"))
        op.entries.push_back({e.at("volume").get<Fp>(), e.at("rate").get<Fp>()});
    for (const auto& s : j.at("salts")) op.salts.push_back(salt_unhex(s.get<std::string>()));
    return op;
}

std::string cipher_hex(const std::vector<unsigned char>& bytes) {
    static const char* digits = "0123456789abcdef";
    std::string out;
    out.reserve(bytes.size() * 2);
    for (unsigned char b : bytes) {
        out.push_back(digits[b >> 4]);
        out.push_back(digits[b & 0xf]);
    }
    return out;
}

std::vector<unsigned char> cipher_unhex(const std::string& h) {
    if (h.size() % 2 != 0) throw Error("transcript: odd ciphertext hex");
    auto nib = [](char c) -> int {
        if (c >= '0' && c <= '9') return c - '0';
        if (c >= 'a' && c <= 'f') return c - 'a' + 10;
        throw Error("transcript: bad ciphertext hex");
    };
    std::vector<unsigned char> out(h.size() / 2);
    for (size_t i = 0; i < out.size(); ++i)
        out[i] = static_cast<unsigned char>((nib(h[2 * i]) << 4) | nib(h[2 * i + 1]));
    return out;
}

}  // namespace

std::string serialize_transcript(const AuditTranscript& t) {
    json doc;
    doc["version"] = 1;
    doc["grid"] = t.grid;
    doc["final_phase"] = t.final_phase;
    if (t.root_mm) doc["root_mm"] = hashing::hex(*t.root_mm);
    if (t.root_rm) doc["root_rm"] = hashing::hex(*t.root_rm);
    if (t.kappa_hat) doc["kappa_hat"] = *t.kappa_hat;
    if (t.outcome) doc["outcome"] = outcome_json(*t.outcome);
    if (t.proof_mm) doc["proof_mm"] = proof_json(*t.proof_mm);
    if (t.proof_rm) doc["proof_rm"] = proof_json(*t.proof_rm);
    json sealed = json::array();
    for (const auto& b : t.sealed)
        sealed.push_back({{"recipient", b.recipient},
                          {"ciphertext", cipher_hex(b.ciphertext)},
                          {"mac", hashing::hex(b.mac)}});
    doc["sealed"] = sealed;
    json log = json::array();
    for (const auto& e : t.log)
        log.push_back({{"seq", e.seq}, {"time", e.time}, {"type", e.type}, {"body", e.body}});
    doc["log"] = log;
    doc["chain"] = hashing::hex(t.chain);
    if (t.opening_mm) doc["opening_mm"] = opening_json(*t.opening_mm);
    if (t.opening_rm) doc["opening_rm"] = opening_json(*t.opening_rm);
    return doc.dump();
}

AuditTranscript parse_transcript(const std::string& json_text) {
    json doc = json::parse(json_text, nullptr, false);
    if (doc.is_discarded() || !doc.is_object()) throw Error("transcript: not a json object");
    try {
        AuditTranscript t;
        if (doc.at("version").get<int>() != 1) throw Error("transcript: unknown version");
        t.grid = doc.at("grid").get<std::vector<Fp>>();
        t.final_phase = doc.at("final_phase").get<std::string>();
        if (doc.contains("root_mm"))
            t.root_mm = hashing::unhex(doc["root_mm"].get<std::string>());
        if (doc.contains("root_rm"))
            t.root_rm = hashing::unhex(doc["root_rm"].get<std::string>());
        if (doc.contains("kappa_hat")) t.kappa_hat = doc["kappa_hat"].get<Fp>();
        if (doc.contains("outcome")) t.outcome = outcome_from_json(doc["outcome"]);
        if (doc.contains("proof_mm")) t.proof_mm = proof_from_json(doc["proof_mm"]);
        if (doc.contains("proof_rm")) t.proof_rm = proof_from_json(doc["proof_rm"]);
        for (const auto& b : doc.at("sealed")) {
            commitments::SealedBox box;
            box.recipient = b.at("recipient").get<std::string>();
            box.ciphertext = cipher_unhex(b.at("ciphertext").get<std::string>());
            box.mac = hashing::unhex(b.at("mac").get<std::string>());
            t.sealed.push_back(std::move(box));
        }
        for (const auto& e : doc.at("log")) {
            contract::LogEntry le;
            le.seq = e.at("seq").get<uint64_t>();
            le.time = e.at("time").get<int64_t>();
            le.type = e.at("type").get<std::string>();
            le.body = e.at("body").get<std::string>();
            t.log.push_back(std::move(le));
        }
        t.chain = hashing::unhex(doc.at("chain").get<std::string>());
        if (doc.contains("opening_mm")) t.opening_mm = opening_from_json(doc["opening_mm"]);
        if (doc.contains("opening_rm")) t.opening_rm = opening_from_json(doc["opening_rm"]);
        return t;
    } catch (const json::exception& e) {
        throw Error(std::string("transcript: ") + e.what());
    }
}

}  // namespace repomech::audit
