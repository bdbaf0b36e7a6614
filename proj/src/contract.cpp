#include "repomech/contract.hpp"

#include <algorithm>
#include <set>

#include "json.hpp"
#include "repomech/commitments.hpp"
#include "repomech/fixed.hpp"

namespace repomech::contract {

using nlohmann::json;

std::string to_string(Phase p) {
    switch (p) {
        case Phase::commit: return "commit";
        case Phase::negotiate: return "negotiate";
        case Phase::select: return "select";
        case Phase::execute: return "execute";
        case Phase::settled: return "settled";
        case Phase::aborted: return "aborted";
    }
    return "?";
}

std::string to_string(Asset a) { return a == Asset::cash ? "cash" : "securities"; }

// ---- escrow ---------------------------------------------------------------

namespace {
int asset_slot(Asset a) { return a == Asset::cash ? 0 : 1; }
}  // namespace

void EscrowLedger::deposit(const std::string& agent, Asset asset, Fp amount) {
    if (amount <= 0) throw ProtocolError("escrow deposit must be positive");
    bal_[agent][asset_slot(asset)] += amount;
    in_[asset_slot(asset)] += amount;
    log_.push_back({Transfer::Kind::deposit, "", agent, asset, amount});
}

void EscrowLedger::transfer(const std::string& from, const std::string& to, Asset asset,
                            Fp amount) {
    if (amount < 0) throw ProtocolError("escrow transfer cannot be negative");
    if (amount == 0) return;
    Fp& src = bal_[from][asset_slot(asset)];
    if (src < amount) throw ProtocolError("escrow overdraft by " + from);
    src -= amount;
    bal_[to][asset_slot(asset)] += amount;
    log_.push_back({Transfer::Kind::internal, from, to, asset, amount});
}

void EscrowLedger::withdraw(const std::string& agent, Asset asset, Fp amount) {
    if (amount < 0) throw ProtocolError("escrow withdrawal cannot be negative");
    if (amount == 0) return;
    Fp& src = bal_[agent][asset_slot(asset)];
    if (src < amount) throw ProtocolError("escrow overdraft by " + agent);
    src -= amount;
    out_[asset_slot(asset)] += amount;
    log_.push_back({Transfer::Kind::withdraw, agent, "", asset, amount});
}

Fp EscrowLedger::balance(const std::string& agent, Asset asset) const {
    auto it = bal_.find(agent);
    if (it == bal_.end()) return 0;
    return it->second[asset_slot(asset)];
}

bool EscrowLedger::conserved() const {
    for (int s = 0; s < 2; ++s) {
        Fp held = 0;
        for (const auto& [agent, b] : bal_) {
            if (b[s] < 0) return false;
            held += b[s];
        }
        if (held != in_[s] - out_[s]) return false;
    }
    return true;
}

bool EscrowLedger::empty() const {
    for (const auto& [agent, b] : bal_)
        if (b[0] != 0 || b[1] != 0) return false;
    return true;
}

Fp EscrowLedger::total_deposited(Asset asset) const { return in_[asset_slot(asset)]; }
Fp EscrowLedger::total_withdrawn(Asset asset) const { return out_[asset_slot(asset)]; }

// ---- log chain ------------------------------------------------------------

Digest chain_step(const Digest& prev, const LogEntry& entry) {
    std::string msg(hashing::view(prev));
    fp::append_le8(msg, entry.seq);
    fp::append_le8(msg, entry.time);
    msg.push_back(static_cast<char>(entry.type.size()));
    msg += entry.type;
    msg += entry.body;
    return hashing::tagged("EVENT", {msg});
}

namespace {

void append_log(ContractState& st, const std::string& type, json body) {
    body["phase_after"] = to_string(st.phase);
    LogEntry e;
    e.seq = st.log.size();
    e.time = st.now;
    e.type = type;
    e.body = body.dump();
    st.chain = chain_step(st.chain, e);
    st.log.push_back(std::move(e));
}

// Abort path: every balance still inside escrow goes back out to whoever
// holds it, so nothing can be stranded.
void refund_everything(ContractState& st) {
    auto snapshot = st.escrow.balances();
    for (const auto& [agent, b] : snapshot) {
        if (b[0] > 0) st.escrow.withdraw(agent, Asset::cash, b[0]);
        if (b[1] > 0) st.escrow.withdraw(agent, Asset::securities, b[1]);
    }
}

int64_t phase_deadline(const Deadlines& d, Phase p) {
    switch (p) {
        case Phase::commit: return d.commit;
        case Phase::negotiate: return d.negotiate;
        case Phase::select: return d.select;
        case Phase::execute: return d.execute;
        default: throw ConfigError({"terminal phase has no deadline"});
    }
}

}  // namespace

// ---- state helpers --------------------------------------------------------

const std::string& ContractState::first_mover() const {
    return std::min(config.dealer_mm, config.dealer_rm);
}

const std::string& ContractState::second_mover() const {
    return std::max(config.dealer_mm, config.dealer_rm);
}

bool check_deadline(const ContractState& st, Phase phase, int64_t now) {
    return now > phase_deadline(st.config.deadlines, phase);
}

// ---- genesis --------------------------------------------------------------

ContractState genesis(GenesisConfig cfg) {
    std::vector<std::string> issues;
    std::vector<std::string> ids{cfg.dealer_mm, cfg.dealer_rm, cfg.client_mm, cfg.client_rm};
    for (const auto& id : ids)
        if (id.empty()) issues.push_back("agent id must not be empty");
    std::set<std::string> uniq(ids.begin(), ids.end());
    if (uniq.size() != ids.size()) issues.push_back("agent ids must be distinct");
    if (cfg.grid.size() < 2) {
        issues.push_back("volume grid needs at least two levels");
    } else {
        if (cfg.grid.front() != 0) issues.push_back("volume grid must start at zero");
        for (size_t i = 1; i < cfg.grid.size(); ++i)
            if (cfg.grid[i] <= cfg.grid[i - 1]) {
                issues.push_back("volume grid must be strictly increasing");
                break;
            }
    }
    const auto& dl = cfg.deadlines;
    if (dl.commit < 0) issues.push_back("commit deadline must be nonnegative");
    if (!(dl.commit < dl.negotiate && dl.negotiate < dl.select && dl.select < dl.execute))
        issues.push_back("deadlines must be strictly increasing across phases");
    if (!issues.empty()) throw ConfigError(issues);

    ContractState st;
    st.config = std::move(cfg);
    st.phase = Phase::commit;
    st.now = 0;
    st.chain = Digest{};  // the chain folds forward from 32 zero bytes

    json body;
    body["agents"] = {{"dealer_mm", st.config.dealer_mm},
                      {"dealer_rm", st.config.dealer_rm},
                      {"client_mm", st.config.client_mm},
                      {"client_rm", st.config.client_rm}};
    body["grid"] = st.config.grid;
    body["deadlines"] = {{"commit", dl.commit},
                         {"negotiate", dl.negotiate},
                         {"select", dl.select},
                         {"execute", dl.execute}};
    append_log(st, "genesis", std::move(body));
    return st;
}

// ---- mechanism primitives ---------------------------------------------------

std::vector<int32_t> filter_feasible(const std::vector<ScheduleEntry>& mm,
                                     const std::vector<ScheduleEntry>& rm, Fp kappa_hat) {
    if (mm.size() != rm.size()) throw ProtocolError("schedule reports are misaligned");
    std::vector<int32_t> keep;
    for (size_t i = 0; i < mm.size(); ++i) {
        if (mm[i].volume != rm[i].volume) throw ProtocolError("schedule reports are misaligned");
        if (mm[i].volume <= 0) continue;
        // Integer form of half-spread >= kappa_hat: no division, no rounding.
        if (rm[i].rate - mm[i].rate >= 2 * kappa_hat) keep.push_back(static_cast<int32_t>(i));
    }
    return keep;
}

std::optional<SelectedTrade> select_trade(const std::vector<ScheduleEntry>& mm,
                                          const std::vector<ScheduleEntry>& rm,
                                          const std::vector<int32_t>& feasible) {
    std::optional<SelectedTrade> best;
    __int128 best_profit = 0;
    for (int32_t i : feasible) {
        const auto& lo = mm[static_cast<size_t>(i)];
        const auto& hi = rm[static_cast<size_t>(i)];
        __int128 profit = static_cast<__int128>(hi.rate - lo.rate) * lo.volume;
        bool better = !best || profit > best_profit ||
                      (profit == best_profit && lo.volume > best->volume);
        if (better) {
            best = SelectedTrade{i, lo.volume, lo.rate, hi.rate, fp::midpoint(lo.rate, hi.rate)};
            best_profit = profit;
        }
    }
    return best;
}

// ---- settlement -------------------------------------------------------------

void settle(ContractState& st) {
    if (st.phase != Phase::execute) throw ProtocolError("settlement requires the execute phase");
    if (!st.outcome) throw ProtocolError("no trade selected");
    const auto& cfg = st.config;
    const Fp t = st.outcome->volume;
    const Fp posted = st.required_deposit();

    // First leg: cash rolls down the chain, securities roll back up it.
    st.escrow.transfer(cfg.client_mm, cfg.dealer_mm, Asset::cash, t);
    st.escrow.transfer(cfg.dealer_mm, cfg.dealer_rm, Asset::cash, t);
    st.escrow.transfer(cfg.dealer_rm, cfg.client_rm, Asset::cash, t);
    st.escrow.transfer(cfg.client_rm, cfg.dealer_rm, Asset::securities, t);
    st.escrow.transfer(cfg.dealer_rm, cfg.dealer_mm, Asset::securities, t);
    st.escrow.transfer(cfg.dealer_mm, cfg.client_mm, Asset::securities, t);

    // Deliver proceeds and refund the unused slice of each deposit.
    st.escrow.withdraw(cfg.client_mm, Asset::securities, t);
    st.escrow.withdraw(cfg.client_rm, Asset::cash, t);
    st.escrow.withdraw(cfg.client_mm, Asset::cash, posted - t);
    st.escrow.withdraw(cfg.client_rm, Asset::securities, posted - t);

    // Second leg is recorded, not executed: each borrower owes principal
    // plus interest in cash at its own leg's rate.
    const Fp one = fp::kScale;
    st.obligations.push_back(
        {cfg.dealer_mm, cfg.client_mm, fp::mul(t, one + st.outcome->rate_mm), st.outcome->rate_mm});
    st.obligations.push_back(
        {cfg.dealer_rm, cfg.dealer_mm, fp::mul(t, one + st.outcome->rate_bd), st.outcome->rate_bd});
    st.obligations.push_back(
        {cfg.client_rm, cfg.dealer_rm, fp::mul(t, one + st.outcome->rate_rm), st.outcome->rate_rm});

    st.phase = Phase::settled;
}

// ---- default distribution ---------------------------------------------------

void distribute_default(ContractState& st, const std::vector<std::string>& defaulter_ids) {
    if (st.phase != Phase::commit)
        throw ProtocolError("default distribution applies only during the deposit window");
    if (defaulter_ids.empty()) throw ProtocolError("no defaulters named");
    const auto& cfg = st.config;
    std::set<std::string> cast{cfg.dealer_mm, cfg.dealer_rm, cfg.client_mm, cfg.client_rm};
    std::set<std::string> defaulters;
    for (const auto& id : defaulter_ids) {
        if (!cast.count(id)) throw ProtocolError("unknown defaulter: " + id);
        if (!defaulters.insert(id).second) throw ProtocolError("duplicate defaulter: " + id);
    }
    std::vector<std::string> recipients;
    for (const auto& id : cast)
        if (!defaulters.count(id)) recipients.push_back(id);
    if (recipients.empty()) throw ProtocolError("no agents left to receive the penalty");
    std::sort(recipients.begin(), recipients.end());

    for (Asset asset : {Asset::cash, Asset::securities}) {
        Fp pool = 0;
        for (const auto& id : defaulters) pool += st.escrow.balance(id, asset);
        if (pool == 0) continue;
        const Fp n = static_cast<Fp>(recipients.size());
        // Equal shares; the indivisible remainder goes one base unit at a
        // time to the lexicographically first recipients.
        std::vector<Fp> quota(recipients.size(), pool / n);
        for (Fp r = 0; r < pool % n; ++r) quota[static_cast<size_t>(r)] += 1;
        size_t next = 0;
        for (const auto& id : defaulters) {
            Fp avail = st.escrow.balance(id, asset);
            while (avail > 0) {
                while (next < quota.size() && quota[next] == 0) ++next;
                Fp chunk = std::min(avail, quota[next]);
                st.escrow.transfer(id, recipients[next], asset, chunk);
                avail -= chunk;
                quota[next] -= chunk;
            }
        }
    }

    st.phase = Phase::aborted;
    refund_everything(st);  // recipients take penalty + their own deposit out
    json body;
    body["defaulters"] = std::vector<std::string>(defaulters.begin(), defaulters.end());
    append_log(st, "default", std::move(body));
}

// ---- event application ------------------------------------------------------

namespace {

struct Apply {
    ContractState& st;

    ApplyResult reject(std::string why) { return {false, std::move(why)}; }

    ApplyResult ok(const std::string& type, json body) {
        append_log(st, type, std::move(body));
        return {true, ""};
    }

    ApplyResult operator()(const SubmitSchedule& ev) {
        if (st.phase != Phase::commit) return reject("schedules are accepted only during commit");
        const auto& cfg = st.config;
        bool is_mm = ev.dealer_id == cfg.dealer_mm;
        bool is_rm = ev.dealer_id == cfg.dealer_rm;
        if (!is_mm && !is_rm) return reject("unknown dealer: " + ev.dealer_id);
        if ((is_mm && st.report_mm) || (is_rm && st.report_rm))
            return reject("schedule already submitted by " + ev.dealer_id);
        const std::string& want_client = is_mm ? cfg.client_sig_mm : cfg.client_sig_rm;
        const std::string& want_dealer = is_mm ? cfg.dealer_sig_mm : cfg.dealer_sig_rm;
        if (ev.client_sig != want_client) return reject("client authorization does not verify");
        if (ev.dealer_sig != want_dealer) return reject("dealer authorization does not verify");
        if (ev.entries.size() != cfg.grid.size())
            return reject("schedule must quote every grid level");
        for (size_t i = 0; i < ev.entries.size(); ++i)
            if (ev.entries[i].volume != cfg.grid[i])
                return reject("schedule volumes must match the grid");
        if (ev.salts.size() != ev.entries.size())
            return reject("each schedule entry needs one blinding salt");
        for (const auto& e : ev.entries)
            if (e.rate < 0) return reject("rates must be nonnegative");
        for (size_t i = 1; i < ev.entries.size(); ++i) {
            if (is_mm && ev.entries[i].rate < ev.entries[i - 1].rate)
                return reject("funding rates must be nondecreasing in volume");
            if (is_rm && ev.entries[i].rate > ev.entries[i - 1].rate)
                return reject("lending rates must be nonincreasing in volume");
        }

        auto com = commitments::commit_schedule(ev.entries, ev.salts);
        StoredReport rep{ev.entries, ev.salts, com.root, com.salt_commitments};
        (is_mm ? st.report_mm : st.report_rm) = std::move(rep);
        maybe_open_negotiation();

        json body;
        body["dealer"] = ev.dealer_id;
        body["root"] = hashing::hex(com.root);
        std::vector<std::string> salts_hex;
        for (const auto& d : com.salt_commitments) salts_hex.push_back(hashing::hex(d));
        body["salt_commitments"] = salts_hex;
        return ok("schedule", std::move(body));
    }

    ApplyResult operator()(const PostDeposit& ev) {
        if (st.phase != Phase::commit) return reject("deposits are accepted only during commit");
        const auto& cfg = st.config;
        bool is_mm = ev.agent_id == cfg.client_mm;
        bool is_rm = ev.agent_id == cfg.client_rm;
        if (!is_mm && !is_rm) return reject("only clients post deposits");
        Asset want = is_mm ? Asset::cash : Asset::securities;
        if (ev.asset != want)
            return reject(ev.agent_id + " must deposit " + to_string(want));
        if ((is_mm && st.deposited_mm) || (is_rm && st.deposited_rm))
            return reject("deposit already posted by " + ev.agent_id);
        if (ev.amount != st.required_deposit())
            return reject("deposit must cover the largest quoted volume exactly");

        st.escrow.deposit(ev.agent_id, ev.asset, ev.amount);
        (is_mm ? st.deposited_mm : st.deposited_rm) = true;
        maybe_open_negotiation();

        json body;
        body["agent"] = ev.agent_id;
        body["asset"] = to_string(ev.asset);
        body["amount"] = ev.amount;
        return ok("deposit", std::move(body));
    }

    ApplyResult operator()(const SubmitFirstSpread& ev) {
        if (st.phase != Phase::negotiate)
            return reject("spread proposals are accepted only during negotiate");
        if (ev.dealer_id != st.first_mover())
            return reject("the opening proposal belongs to " + st.first_mover());
        if (st.first_kappa) return reject("a proposal is already on the table");
        if (ev.kappa < 0) return reject("spread floor must be nonnegative");

        st.first_kappa = ev.kappa;
        json body;
        body["dealer"] = ev.dealer_id;
        body["kappa"] = ev.kappa;
        return ok("propose", std::move(body));
    }

    ApplyResult operator()(const RespondSpread& ev) {
        if (st.phase != Phase::negotiate)
            return reject("spread responses are accepted only during negotiate");
        if (!st.first_kappa) return reject("no proposal to respond to");
        if (ev.dealer_id != st.second_mover())
            return reject("the response belongs to " + st.second_mover());
        if (!ev.accept && ev.kappa < *st.first_kappa)
            return reject("a counter must not undercut the open proposal");

        Fp hat = ev.accept ? *st.first_kappa : ev.kappa;
        st.kappa_hat = hat;
        st.feasible = filter_feasible(st.report_mm->entries, st.report_rm->entries, hat);
        json body;
        body["dealer"] = ev.dealer_id;
        body["accept"] = ev.accept;
        body["kappa"] = ev.accept ? *st.first_kappa : ev.kappa;
        body["kappa_hat"] = hat;
        body["feasible_count"] = st.feasible.size();
        if (st.feasible.empty()) {
            st.phase = Phase::aborted;
            refund_everything(st);
            return ok("respond", std::move(body));
        }
        st.phase = Phase::select;
        return ok("respond", std::move(body));
    }

    ApplyResult operator()(const Tick& ev) {
        if (st.phase == Phase::settled || st.phase == Phase::aborted)
            return reject("the contract is closed");
        if (ev.time < st.now) return reject("time cannot move backwards");
        st.now = ev.time;
        json body;
        body["time"] = ev.time;
        bool late = check_deadline(st, st.phase, st.now);
        body["expired"] = late;
        if (late) {
            st.expired = true;
            st.phase = Phase::aborted;
            refund_everything(st);
        }
        return ok("tick", std::move(body));
    }

    ApplyResult operator()(const RequestExecute& ev) {
        const auto& cfg = st.config;
        if (ev.agent_id != cfg.dealer_mm && ev.agent_id != cfg.dealer_rm &&
            ev.agent_id != cfg.client_mm && ev.agent_id != cfg.client_rm)
            return reject("unknown agent: " + ev.agent_id);
        if (st.phase == Phase::select) {
            st.outcome = select_trade(st.report_mm->entries, st.report_rm->entries, st.feasible);
            if (!st.outcome) throw ProtocolError("select phase with no feasible trade");
            st.phase = Phase::execute;
            json body;
            body["agent"] = ev.agent_id;
            body["index"] = st.outcome->index;
            body["volume"] = st.outcome->volume;
            body["rate_mm"] = st.outcome->rate_mm;
            body["rate_rm"] = st.outcome->rate_rm;
            body["rate_bd"] = st.outcome->rate_bd;
            return ok("select", std::move(body));
        }
        if (st.phase == Phase::execute) {
            settle(st);
            json body;
            body["agent"] = ev.agent_id;
            json obl = json::array();
            for (const auto& o : st.obligations)
                obl.push_back({{"payer", o.payer},
                               {"payee", o.payee},
                               {"cash_amount", o.cash_amount},
                               {"rate", o.rate}});
            body["obligations"] = obl;
            return ok("settle", std::move(body));
        }
        return reject("nothing to execute in this phase");
    }

    void maybe_open_negotiation() {
        if (st.phase == Phase::commit && st.report_mm && st.report_rm && st.deposited_mm &&
            st.deposited_rm)
            st.phase = Phase::negotiate;
    }
};

}  // namespace

ApplyResult apply_event(ContractState& st, const Event& ev) {
    return std::visit(Apply{st}, ev);
}

// ---- serialization ----------------------------------------------------------

namespace {

json report_json(const StoredReport& rep) {
    json entries = json::array();
    for (const auto& e : rep.entries) entries.push_back({{"volume", e.volume}, {"rate", e.rate}});
    std::vector<std::string> salts;
    for (const auto& s : rep.salts) {
        Digest d;
        std::copy(s.begin(), s.end(), d.begin());
        salts.push_back(hashing::hex(d));
    }
    std::vector<std::string> salt_coms;
    for (const auto& d : rep.salt_commitments) salt_coms.push_back(hashing::hex(d));
    return {{"entries", entries},
            {"salts", salts},
            {"root", hashing::hex(rep.root)},
            {"salt_commitments", salt_coms}};
}

json log_json(const ContractState& st) {
    json entries = json::array();
    for (const auto& e : st.log)
        entries.push_back(
            {{"seq", e.seq}, {"time", e.time}, {"type", e.type}, {"body", json::parse(e.body)}});
    return entries;
}

}  // namespace

std::string serialize_log(const ContractState& st) {
    json doc;
    doc["entries"] = log_json(st);
    doc["chain"] = hashing::hex(st.chain);
    return doc.dump(2);
}

std::string serialize_state(const ContractState& st) {
    json doc;
    doc["phase"] = to_string(st.phase);
    doc["now"] = st.now;
    doc["expired"] = st.expired;
    doc["grid"] = st.config.grid;
    if (st.report_mm) doc["report_mm"] = report_json(*st.report_mm);
    if (st.report_rm) doc["report_rm"] = report_json(*st.report_rm);
    doc["deposited_mm"] = st.deposited_mm;
    doc["deposited_rm"] = st.deposited_rm;
    if (st.first_kappa) doc["first_kappa"] = *st.first_kappa;
    if (st.kappa_hat) doc["kappa_hat"] = *st.kappa_hat;
    doc["feasible"] = st.feasible;
    if (st.outcome)
        doc["outcome"] = {{"index", st.outcome->index},
                          {"volume", st.outcome->volume},
                          {"rate_mm", st.outcome->rate_mm},
                          {"rate_rm", st.outcome->rate_rm},
                          {"rate_bd", st.outcome->rate_bd}};
    json obl = json::array();
    for (const auto& o : st.obligations)
        obl.push_back({{"payer", o.payer},
                       {"payee", o.payee},
                       {"cash_amount", o.cash_amount},
                       {"rate", o.rate}});
    doc["obligations"] = obl;
    json balances;
    for (const auto& [agent, b] : st.escrow.balances())
        balances[agent] = {{"cash", b[0]}, {"securities", b[1]}};
    doc["escrow"] = {{"balances", balances},
                     {"conserved", st.escrow.conserved()},
                     {"deposited_cash", st.escrow.total_deposited(Asset::cash)},
                     {"deposited_securities", st.escrow.total_deposited(Asset::securities)},
                     {"withdrawn_cash", st.escrow.total_withdrawn(Asset::cash)},
                     {"withdrawn_securities", st.escrow.total_withdrawn(Asset::securities)}};
    doc["log"] = log_json(st);
    doc["chain"] = hashing::hex(st.chain);
    return doc.dump(2);
}

// ---- event file parsing -----------------------------------------------------

namespace {

Salt parse_salt(const json& j) {
    Digest d = hashing::unhex(j.get<std::string>());
    Salt s;
    std::copy(d.begin(), d.end(), s.begin());
    return s;
}

Event parse_one(const json& j) {
    std::string kind = j.at("event").get<std::string>();
    if (kind == "submit_schedule") {
        SubmitSchedule ev;
        ev.dealer_id = j.at("dealer").get<std::string>();
        for (const auto& e : j.at("entries"))
            ev.entries.push_back({e.at("volume").get<Fp>(), e.at("rate").get<Fp>()});
        for (const auto& s : j.at("salts")) ev.salts.push_back(parse_salt(s));
        ev.client_sig = j.at("client_sig").get<std::string>();
        ev.dealer_sig = j.at("dealer_sig").get<std::string>();
        return ev;
    }
    if (kind == "post_deposit") {
        PostDeposit ev;
        ev.agent_id = j.at("agent").get<std::string>();
        std::string asset = j.at("asset").get<std::string>();
        if (asset != "cash" && asset != "securities")
            throw Error("unknown asset: " + asset);
        ev.asset = asset == "cash" ? Asset::cash : Asset::securities;
        ev.amount = j.at("amount").get<Fp>();
        return ev;
    }
    if (kind == "first_spread")
        return SubmitFirstSpread{j.at("dealer").get<std::string>(), j.at("kappa").get<Fp>()};
    if (kind == "respond_spread")
        return RespondSpread{j.at("dealer").get<std::string>(), j.at("accept").get<bool>(),
                             j.value("kappa", Fp{0})};
    if (kind == "tick") return Tick{j.at("time").get<int64_t>()};
    if (kind == "request_execute") return RequestExecute{j.at("agent").get<std::string>()};
    throw Error("unknown event kind: " + kind);
}

}  // namespace

std::vector<Event> parse_events(const std::string& json_text) {
    json doc;
    try {
        doc = json::parse(json_text);
    } catch (const json::exception& e) {
        throw ConfigError({std::string("event file is not valid json: ") + e.what()});
    }
    if (!doc.is_array()) throw ConfigError({"event file must be a json array"});
    std::vector<Event> out;
    std::vector<std::string> issues;
    for (size_t i = 0; i < doc.size(); ++i) {
        try {
            out.push_back(parse_one(doc[i]));
        } catch (const std::exception& e) {
            issues.push_back("event " + std::to_string(i) + ": " + e.what());
        }
    }
    if (!issues.empty()) throw ConfigError(issues);
    return out;
}

}  // namespace repomech::contract
