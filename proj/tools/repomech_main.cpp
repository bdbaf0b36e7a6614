#include <algorithm>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"
#include "repomech/audit.hpp"
#include "repomech/bayesian.hpp"
#include "repomech/config.hpp"
#include "repomech/contract.hpp"
#include "repomech/equilibrium.hpp"
#include "repomech/fixed.hpp"
#include "repomech/format.hpp"
#include "repomech/strategy.hpp"

namespace {

using namespace repomech;

Market market_from(const config::RunConfig& rc) {
    return make_market(config::load_schedule_config(rc.demand_config),
                       config::load_schedule_config(rc.supply_config));
}

// Writes to the named file, or stdout when the name is empty.
void emit(const std::string& out_path, const std::string& payload) {
    if (out_path.empty()) {
        std::cout << payload;
        return;
    }
    std::ofstream out(out_path, std::ios::binary);
    if (!out) throw ConfigError({"cannot write file: " + out_path});
    out << payload;
}

std::vector<double> parse_number_list(const std::string& csv) {
    std::vector<double> out;
    std::istringstream in(csv);
    std::string item;
    while (std::getline(in, item, ',')) {
        try {
            size_t used = 0;
            double v = std::stod(item, &used);
            while (used < item.size() && (item[used] == ' ' || item[used] == '\t')) ++used;
            if (used != item.size()) throw std::invalid_argument(item);
            out.push_back(v);
        } catch (const std::exception&) {
            throw ConfigError({"not a number: '" + item + "'"});
        }
    }
    if (out.empty()) throw ConfigError({"empty number list"});
    return out;
}

int run_eq(const config::RunConfig& rc, int seeds, const std::string& out_path) {
    Market m = market_from(rc);
    auto points = enumerate_equilibria(m, seeds);
    Crossing x = crossing(m.demand, m.supply);
    std::vector<double> seed_rates;
    for (int i = 0; i < seeds; ++i)
        seed_rates.push_back(seeds == 1 ? 0.0 : x.rate * i / double(seeds - 1));
    std::ostringstream csv;
    write_equilibria_csv(csv, seed_rates, points);
    emit(out_path, csv.str());
    return 0;
}

int run_jpm(const config::RunConfig& rc, double kappa, bool kappa_set) {
    Market m = market_from(rc);
    EquilibriumPoint p;
    if (kappa_set) {
        auto capped = max_joint_profit(m, kappa);
        if (!capped) {
            std::cout << "feasible=0\n";
            return 0;
        }
        p = *capped;
    } else {
        p = max_joint_profit(m);
    }
    std::cout << "feasible=1\n";
    std::cout << "t_star=" << fmt9(p.volume) << "\n";
    std::cout << "r_mm=" << fmt9(p.r_mm) << "\n";
    std::cout << "r_rm=" << fmt9(p.r_rm) << "\n";
    std::cout << "r_bd=" << fmt9(p.r_bd) << "\n";
    std::cout << "spread=" << fmt9(p.r_rm - p.r_mm) << "\n";
    std::cout << "joint_profit=" << fmt9(p.joint_profit) << "\n";
    return 0;
}

contract::ContractState protocol_genesis(const config::RunConfig& rc) {
    Market m = market_from(rc);
    auto book = discretize(m.demand, m.supply, rc.grid_i);
    contract::GenesisConfig cfg;
    for (double v : book.volume) cfg.grid.push_back(fp::encode(v));
    cfg.deadlines = rc.deadlines;
    return contract::genesis(cfg);
}

int run_protocol(const config::RunConfig& rc, const std::string& events_path,
                 const std::string& transcript_path, bool auditor, bool dump_state) {
    auto st = protocol_genesis(rc);
    auto events = contract::parse_events(config::read_file(events_path));
    for (const auto& ev : events) {
        auto res = contract::apply_event(st, ev);
        const std::string& type = st.log.empty() ? std::string("?") : st.log.back().type;
        if (res.accepted)
            std::cout << "ok " << type << "\n";
        else
            std::cout << "rejected: " << res.reason << "\n";
    }
    std::cout << "phase=" << contract::to_string(st.phase) << "\n";
    std::cout << "conserved=" << (st.escrow.conserved() ? 1 : 0) << "\n";
    std::cout << "escrow_empty=" << (st.escrow.empty() ? 1 : 0) << "\n";
    if (st.outcome) {
        std::cout << "index=" << st.outcome->index << "\n";
        std::cout << "volume=" << fmt9(fp::decode(st.outcome->volume)) << "\n";
        std::cout << "rate_mm=" << fmt9(fp::decode(st.outcome->rate_mm)) << "\n";
        std::cout << "rate_rm=" << fmt9(fp::decode(st.outcome->rate_rm)) << "\n";
        std::cout << "rate_bd=" << fmt9(fp::decode(st.outcome->rate_bd)) << "\n";
    }
    std::cout << "chain=" << hashing::hex(st.chain) << "\n";
    if (!transcript_path.empty())
        emit(transcript_path, audit::serialize_transcript(audit::build_transcript(st, auditor)));
    if (dump_state) std::cout << contract::serialize_state(st) << "\n";
    return 0;
}

int run_audit(const std::string& transcript_path, const std::string& root_mm_hex,
              const std::string& root_rm_hex) {
    auto t = audit::parse_transcript(config::read_file(transcript_path));
    audit::ExpectedRoots expected;
    if (!root_mm_hex.empty()) expected.mm = hashing::unhex(root_mm_hex);
    if (!root_rm_hex.empty()) expected.rm = hashing::unhex(root_rm_hex);
    auto verdict = audit::verify_transcript(t, expected);
    switch (verdict.tier) {
        case audit::Verdict::Tier::full_ok:
            std::cout << "verdict=full-ok\n";
            return 0;
        case audit::Verdict::Tier::public_ok:
            std::cout << "verdict=public-ok\n";
            return 0;
        case audit::Verdict::Tier::fail:
            break;
    }
    std::cout << "verdict=fail\n";
    std::cout << "check=" << verdict.failed_check << "\n";
    std::cerr << "error: transcript failed verification: " << verdict.failed_check << "\n";
    return 1;
}

int run_sweep_schedule(const config::RunConfig& rc, double kappa, bool kappa_set,
                       double offset_max, int offset_steps, const std::string& out_path) {
    Market m = market_from(rc);
    auto book = discretize(m.demand, m.supply, rc.grid_i);
    double hat = kappa_set ? kappa : std::max(rc.kappa_mm, rc.kappa_rm);
    if (offset_steps < 2) throw ConfigError({"offset-steps: need at least 2"});
    std::vector<double> offsets;
    for (int i = 0; i < offset_steps; ++i)
        offsets.push_back(offset_max * i / double(offset_steps - 1));
    auto sweep = strategy::sweep_schedule_misreports(book, hat, offsets, offsets);
    std::cout << "cells=" << sweep.cells.size() << "\n";
    std::cout << "truthful_payoff=" << fmt9(sweep.at(0, 0).payoff_mm) << "\n";
    std::cout << "violations_mm=" << sweep.violations_mm << "\n";
    std::cout << "violations_rm=" << sweep.violations_rm << "\n";
    std::cout << "max_gain_mm=" << fmt9(sweep.max_gain_mm) << "\n";
    std::cout << "max_gain_rm=" << fmt9(sweep.max_gain_rm) << "\n";
    if (!out_path.empty()) {
        std::ostringstream csv;
        strategy::write_report_sweep_csv(csv, sweep);
        emit(out_path, csv.str());
    }
    return 0;
}

int run_sweep_spread(const config::RunConfig& rc, const std::string& candidates_csv,
                     const std::string& out_path) {
    Market m = market_from(rc);
    auto book = discretize(m.demand, m.supply, rc.grid_i);
    auto candidates = parse_number_list(candidates_csv);
    auto sweep = strategy::sweep_spread_misreports(book, rc.kappa_mm, rc.kappa_rm, candidates);
    std::cout << "cells=" << sweep.cells.size() << "\n";
    std::cout << "truthful_payoff_first=" << fmt9(sweep.truthful_payoff_first) << "\n";
    std::cout << "truthful_payoff_second=" << fmt9(sweep.truthful_payoff_second) << "\n";
    std::cout << "max_gain_first=" << fmt9(sweep.max_gain_first) << "\n";
    std::cout << "max_gain_second=" << fmt9(sweep.max_gain_second) << "\n";
    std::ostringstream am;
    for (size_t i = 0; i < sweep.argmax_first.size(); ++i)
        am << (i ? "," : "") << fmt9(sweep.argmax_first[i]);
    std::cout << "argmax_first=" << am.str() << "\n";
    std::ostringstream ph;
    for (size_t i = 0; i < sweep.path_kappa_hats.size(); ++i)
        ph << (i ? "," : "") << fmt9(sweep.path_kappa_hats[i]);
    std::cout << "path_kappa_hats=" << ph.str() << "\n";
    if (!out_path.empty()) {
        std::ostringstream csv;
        strategy::write_spread_sweep_csv(csv, sweep);
        emit(out_path, csv.str());
    }
    return 0;
}

int run_bayes(const config::RunConfig& rc, double volume, bool volume_set, int scan_n, int draws,
              int rate_grid, int jobs, const TypeDist& mm_types, const TypeDist& rm_types,
              const std::string& out_path) {
    Market m = market_from(rc);
    if (volume_set) {
        auto verdict = check_target_equilibrium(m, volume, mm_types, rm_types);
        std::cout << "feasible=" << (verdict.feasible ? 1 : 0) << "\n";
        std::cout << "margin_mm=" << fmt9(verdict.margin_mm) << "\n";
        std::cout << "margin_rm=" << fmt9(verdict.margin_rm) << "\n";
        if (draws > 0) {
            if (jobs <= 0) jobs = std::max(1u, std::thread::hardware_concurrency());
            auto report =
                monte_carlo_deviation(m, volume, mm_types, rm_types, draws, rate_grid, rc.seed, jobs);
            std::cout << "draws=" << draws << "\n";
            std::cout << "max_gain=" << fmt9(report.max_gain) << "\n";
            if (!out_path.empty()) {
                std::ostringstream csv;
                write_deviation_csv(csv, report);
                emit(out_path, csv.str());
            }
        }
        return 0;
    }
    if (scan_n < 2) throw ConfigError({"scan: need at least 2 volumes (or pass --volume)"});
    auto rows = enumerate_target_volumes(m, scan_n, mm_types, rm_types);
    std::cout << "max_volume=" << fmt9(max_target_volume(m, mm_types, rm_types)) << "\n";
    std::ostringstream csv;
    write_target_scan_csv(csv, rows);
    emit(out_path, csv.str());
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"mechanism engine for dealer-intermediated repo"};
    app.require_subcommand(1);

    std::string config_path, out_path;

    auto* eq = app.add_subcommand("eq", "walk balanced seeds to Nash rate pairs (CSV)");
    int eq_seeds = 1;
    eq->add_option("--config", config_path, "run configuration file")->required();
    eq->add_option("--seeds", eq_seeds, "number of evenly spaced seeds")
        ->check(CLI::PositiveNumber);
    eq->add_option("--out", out_path, "write CSV here instead of stdout");

    auto* jpm = app.add_subcommand("jpm", "joint-profit-maximizing trade");
    double jpm_kappa = 0;
    jpm->add_option("--config", config_path, "run configuration file")->required();
    auto* jpm_kappa_opt =
        jpm->add_option("--kappa", jpm_kappa, "restrict to half-spreads clearing this floor");

    auto* protocol = app.add_subcommand("protocol", "drive the escrow contract from an event file");
    std::string events_path, transcript_path;
    bool auditor = false, dump_state = false;
    protocol->add_option("--config", config_path, "run configuration file")->required();
    protocol->add_option("--events", events_path, "json array of events")->required();
    protocol->add_option("--transcript", transcript_path, "write the run transcript here");
    protocol->add_flag("--auditor", auditor, "include schedule openings in the transcript");
    protocol->add_flag("--state", dump_state, "print the final contract state as json");

    auto* aud = app.add_subcommand("audit", "verify a run transcript");
    std::string audit_transcript, root_mm_hex, root_rm_hex;
    aud->add_option("--transcript", audit_transcript, "transcript json file")->required();
    aud->add_option("--root-mm", root_mm_hex, "expected funding-leg commitment root (hex)");
    aud->add_option("--root-rm", root_rm_hex, "expected lending-leg commitment root (hex)");

    auto* sweep = app.add_subcommand("sweep", "brute-force misreport sweeps");
    std::string sweep_mode, candidates_csv = "0.5,1.0,1.5,2.0,2.5,3.0,3.5";
    double sweep_kappa = 0, offset_max = 0.5;
    int offset_steps = 11;
    sweep->add_option("--config", config_path, "run configuration file")->required();
    sweep->add_option("--mode", sweep_mode, "schedule | spread")
        ->required()
        ->check(CLI::IsMember({"schedule", "spread"}));
    auto* sweep_kappa_opt = sweep->add_option(
        "--kappa", sweep_kappa, "agreed spread floor (default: max of the configured floors)");
    sweep->add_option("--offset-max", offset_max, "largest uniform shading offset");
    sweep->add_option("--offset-steps", offset_steps, "offsets per side including 0");
    sweep->add_option("--candidates", candidates_csv, "comma list of negotiable floors");
    sweep->add_option("--out", out_path, "write the cell CSV here");

    auto* bayes = app.add_subcommand("bayes", "private-type target-volume analysis");
    double bayes_volume = 0;
    int scan_n = 0, draws = 0, rate_grid = 200, jobs = 0;
    double th_mm_lo = 1, th_mm_hi = 2, th_rm_lo = 1, th_rm_hi = 2;
    bayes->add_option("--config", config_path, "run configuration file")->required();
    auto* bayes_volume_opt =
        bayes->add_option("--volume", bayes_volume, "target volume to check");
    bayes->add_option("--scan", scan_n, "scan this many volumes up to the cap (CSV)");
    bayes->add_option("--draws", draws, "monte-carlo deviation draws");
    bayes->add_option("--rate-grid", rate_grid, "deviation scan rates per draw");
    bayes->add_option("--jobs", jobs, "worker threads (0 = all cores)");
    bayes->add_option("--theta-mm-lo", th_mm_lo, "funding-side type lower bound");
    bayes->add_option("--theta-mm-hi", th_mm_hi, "funding-side type upper bound");
    bayes->add_option("--theta-rm-lo", th_rm_lo, "lending-side type lower bound");
    bayes->add_option("--theta-rm-hi", th_rm_hi, "lending-side type upper bound");
    bayes->add_option("--out", out_path, "write CSV here instead of stdout");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        if (app.got_subcommand(eq)) return run_eq(config::load_run_config(config_path), eq_seeds, out_path);
        if (app.got_subcommand(jpm))
            return run_jpm(config::load_run_config(config_path), jpm_kappa,
                           jpm_kappa_opt->count() > 0);
        if (app.got_subcommand(protocol))
            return run_protocol(config::load_run_config(config_path), events_path, transcript_path,
                                auditor, dump_state);
        if (app.got_subcommand(aud)) return run_audit(audit_transcript, root_mm_hex, root_rm_hex);
        if (app.got_subcommand(sweep)) {
            auto rc = config::load_run_config(config_path);
            if (sweep_mode == "schedule")
                return run_sweep_schedule(rc, sweep_kappa, sweep_kappa_opt->count() > 0,
                                          offset_max, offset_steps, out_path);
            return run_sweep_spread(rc, candidates_csv, out_path);
        }
        if (app.got_subcommand(bayes)) {
            TypeDist mm_types{th_mm_lo, th_mm_hi, {}};
            TypeDist rm_types{th_rm_lo, th_rm_hi, {}};
            return run_bayes(config::load_run_config(config_path), bayes_volume,
                             bayes_volume_opt->count() > 0, scan_n, draws, rate_grid, jobs,
                             mm_types, rm_types, out_path);
        }
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 2;
}
