#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "repomech/errors.hpp"
#include "repomech/hashing.hpp"
#include "repomech/wire.hpp"

namespace repomech::contract {

using hashing::Digest;
using wire::Fp;
using wire::Salt;
using wire::ScheduleEntry;

enum class Phase { commit, negotiate, select, execute, settled, aborted };
enum class Asset { cash, securities };

std::string to_string(Phase p);
std::string to_string(Asset a);

struct Deadlines {
    int64_t commit = 0;
    int64_t negotiate = 0;
    int64_t select = 0;
    int64_t execute = 0;
};

// Fixed four-agent cast plus the shared volume ladder and the expected
// authorization bytes (byte-equality stands in for signature checking).
struct GenesisConfig {
    std::string dealer_mm = "BD-mm";
    std::string dealer_rm = "BD-rm";
    std::string client_mm = "MM";
    std::string client_rm = "RM";
    std::vector<Fp> grid;  // strictly increasing volumes, first entry 0
    Deadlines deadlines;
    std::string client_sig_mm = "sig:MM";
    std::string dealer_sig_mm = "sig:BD-mm";
    std::string client_sig_rm = "sig:RM";
    std::string dealer_sig_rm = "sig:BD-rm";
};

// ---- events ---------------------------------------------------------------

struct SubmitSchedule {
    std::string dealer_id;
    std::vector<ScheduleEntry> entries;  // must cover the genesis grid exactly
    std::vector<Salt> salts;             // one blinding salt per entry
    std::string client_sig;
    std::string dealer_sig;
};

struct PostDeposit {
    std::string agent_id;
    Asset asset = Asset::cash;
    Fp amount = 0;
};

struct SubmitFirstSpread {
    std::string dealer_id;
    Fp kappa = 0;
};

struct RespondSpread {
    std::string dealer_id;
    bool accept = false;
    Fp kappa = 0;  // ignored when accepting; must not undercut otherwise
};

struct Tick {
    int64_t time = 0;
};

struct RequestExecute {
    std::string agent_id;
};

using Event = std::variant<SubmitSchedule, PostDeposit, SubmitFirstSpread, RespondSpread,
                           Tick, RequestExecute>;

// ---- escrow ---------------------------------------------------------------

struct Transfer {
    enum class Kind { deposit, internal, withdraw };
    Kind kind = Kind::internal;
    std::string from;  // empty for deposits (external source)
    std::string to;    // empty for withdrawals (external sink)
    Asset asset = Asset::cash;
    Fp amount = 0;
};

// Balances held in escrow per agent and asset with explicit boundary
// accounting, so conservation is checkable at any point: for each asset,
// sum(balances) == deposited - withdrawn and no balance is negative.
class EscrowLedger {
  public:
    void deposit(const std::string& agent, Asset asset, Fp amount);
    void transfer(const std::string& from, const std::string& to, Asset asset, Fp amount);
    void withdraw(const std::string& agent, Asset asset, Fp amount);

    Fp balance(const std::string& agent, Asset asset) const;
    bool conserved() const;
    bool empty() const;  // nothing left inside escrow
    Fp total_deposited(Asset asset) const;
    Fp total_withdrawn(Asset asset) const;
    const std::vector<Transfer>& movements() const { return log_; }
    const std::map<std::string, std::array<Fp, 2>>& balances() const { return bal_; }

  private:
    std::map<std::string, std::array<Fp, 2>> bal_;
    std::array<Fp, 2> in_{0, 0};
    std::array<Fp, 2> out_{0, 0};
    std::vector<Transfer> log_;
};

// ---- state ----------------------------------------------------------------

struct StoredReport {
    std::vector<ScheduleEntry> entries;
    std::vector<Salt> salts;
    Digest root{};                         // schedule commitment root
    std::vector<Digest> salt_commitments;  // per-leaf salt digests
};

struct SelectedTrade {
    int32_t index = -1;
    Fp volume = 0;
    Fp rate_mm = 0;
    Fp rate_rm = 0;
    Fp rate_bd = 0;
};

// Second-leg repurchase obligation, recorded at settlement, not executed.
struct Obligation {
    std::string payer;
    std::string payee;
    Fp cash_amount = 0;  // volume * (1 + rate)
    Fp rate = 0;
};

struct LogEntry {
    uint64_t seq = 0;
    int64_t time = 0;
    std::string type;
    std::string body;  // canonical JSON record (stable key order, integers only)
};

// One fold of the log hash chain; the genesis fold starts from 32 zero
// bytes. Auditors refold the published log and compare digests.
Digest chain_step(const Digest& prev, const LogEntry& entry);

struct ContractState {
    GenesisConfig config;
    Phase phase = Phase::commit;
    int64_t now = 0;
    bool expired = false;
    std::optional<StoredReport> report_mm;
    std::optional<StoredReport> report_rm;
    bool deposited_mm = false;
    bool deposited_rm = false;
    std::optional<Fp> first_kappa;
    std::optional<Fp> kappa_hat;
    std::vector<int32_t> feasible;
    std::optional<SelectedTrade> outcome;
    std::vector<Obligation> obligations;
    EscrowLedger escrow;
    std::vector<LogEntry> log;
    Digest chain{};  // hash chain over the log

    const std::string& first_mover() const;
    const std::string& second_mover() const;
    Fp required_deposit() const { return config.grid.empty() ? 0 : config.grid.back(); }
};

// Validates ids, grid and deadline monotonicity; writes the genesis log entry.
ContractState genesis(GenesisConfig cfg);

struct ApplyResult {
    bool accepted = false;
    std::string reason;  // empty when accepted
};

// Advances the machine by one event. Rejected events leave the state
// untouched (same bytes, same chain digest) and report the reason.
ApplyResult apply_event(ContractState& st, const Event& ev);

// Hurdle filter over aligned reports: keeps indices whose dealer spread
// clears twice kappa_hat and whose volume is positive.
std::vector<int32_t> filter_feasible(const std::vector<ScheduleEntry>& mm,
                                     const std::vector<ScheduleEntry>& rm, Fp kappa_hat);

// Joint-profit argmax over the feasible indices; ties go to the larger
// volume. Empty input gives no trade.
std::optional<SelectedTrade> select_trade(const std::vector<ScheduleEntry>& mm,
                                          const std::vector<ScheduleEntry>& rm,
                                          const std::vector<int32_t>& feasible);

// First-leg settlement: chained cash and securities transfers, excess
// deposit refunds, second-leg obligations; moves execute -> settled.
// Throws ProtocolError unless an outcome is fixed and the phase is execute.
void settle(ContractState& st);

// Splits the named defaulters' posted deposits equally among the other
// agents, refunds the others' own deposits, and aborts. Commit phase only.
void distribute_default(ContractState& st, const std::vector<std::string>& defaulter_ids);

// True iff `now` is strictly past the phase deadline (the boundary instant
// itself is still on time). Terminal phases have no deadline.
bool check_deadline(const ContractState& st, Phase phase, int64_t now);

// Canonical JSON documents (sorted keys, fixed-point integers); replays of
// the same event sequence serialize bit-identically.
std::string serialize_state(const ContractState& st);
std::string serialize_log(const ContractState& st);

// Event list parser for protocol runs driven from a JSON file.
std::vector<Event> parse_events(const std::string& json_text);

}  // namespace repomech::contract
