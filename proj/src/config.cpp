#include "repomech/config.hpp"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <vector>

namespace repomech::config {

namespace {

std::string trim(const std::string& s) {
    size_t b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    size_t e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

double to_double(const std::string& v, const std::string& key, std::vector<std::string>& issues) {
    char* end = nullptr;
    double x = std::strtod(v.c_str(), &end);
    if (v.empty() || end != v.c_str() + v.size()) {
        issues.push_back(key + ": not a number: '" + v + "'");
        return 0;
    }
    return x;
}

int64_t to_int(const std::string& v, const std::string& key, std::vector<std::string>& issues) {
    char* end = nullptr;
    long long x = std::strtoll(v.c_str(), &end, 10);
    if (v.empty() || end != v.c_str() + v.size()) {
        issues.push_back(key + ": not an integer: '" + v + "'");
        return 0;
    }
    return x;
}

// pull a key out of the map, noting whether it was present; whatever
// remains unpulled at the end is unknown.
std::string take(std::map<std::string, std::string>& kv, const std::string& key, bool& present) {
    auto it = kv.find(key);
    if (it == kv.end()) {
        present = false;
        return "";
    }
    present = true;
    std::string v = it->second;
    kv.erase(it);
    return v;
}

void flag_unknown(const std::map<std::string, std::string>& kv,
                  std::vector<std::string>& issues) {
    for (const auto& [k, v] : kv) issues.push_back("unknown key: " + k);
}

}  // namespace

std::map<std::string, std::string> parse_key_values(const std::string& text) {
    std::map<std::string, std::string> kv;
    std::vector<std::string> issues;
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (size_t hash = line.find('#'); hash != std::string::npos) line.resize(hash);
        line = trim(line);
        if (line.empty()) continue;
        size_t eq = line.find('=');
        if (eq == std::string::npos) {
            issues.push_back("line " + std::to_string(lineno) + ": expected key = value");
            continue;
        }
        std::string key = trim(line.substr(0, eq));
        std::string value = trim(line.substr(eq + 1));
        if (key.empty()) {
            issues.push_back("line " + std::to_string(lineno) + ": empty key");
            continue;
        }
        if (!kv.emplace(key, value).second)
            issues.push_back("line " + std::to_string(lineno) + ": duplicate key: " + key);
    }
    if (!issues.empty()) throw ConfigError(issues);
    return kv;
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError({"cannot read file: " + path});
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

ScheduleModel parse_schedule_config(const std::string& text) {
    auto kv = parse_key_values(text);
    std::vector<std::string> issues;

    bool has_side = false, has_family = false, has_a = false, has_rb = false, has_theta = false,
         has_table = false;
    std::string side_s = take(kv, "side", has_side);
    std::string family_s = take(kv, "family", has_family);
    std::string a_s = take(kv, "a", has_a);
    std::string rb_s = take(kv, "r_b", has_rb);
    std::string theta_s = take(kv, "theta", has_theta);
    std::string table_s = take(kv, "table", has_table);
    flag_unknown(kv, issues);

    Side side = Side::demand;
    if (!has_side)
        issues.push_back("side: required (demand|supply)");
    else if (side_s == "demand")
        side = Side::demand;
    else if (side_s == "supply")
        side = Side::supply;
    else
        issues.push_back("side: expected demand or supply, got '" + side_s + "'");

    enum { kSqrt, kQuad, kTab } fam = kSqrt;
    if (!has_family)
        issues.push_back("family: required (sqrt|quadratic-cap|custom-tabulated)");
    else if (family_s == "sqrt")
        fam = kSqrt;
    else if (family_s == "quadratic-cap")
        fam = kQuad;
    else if (family_s == "custom-tabulated")
        fam = kTab;
    else
        issues.push_back("family: unknown family '" + family_s + "'");

    double theta = has_theta ? to_double(theta_s, "theta", issues) : 1.0;

    if (has_family && fam == kTab) {
        if (has_a) issues.push_back("a: not used by the tabulated family");
        if (has_rb) issues.push_back("r_b: not used by the tabulated family");
        std::vector<std::pair<double, double>> table;
        if (!has_table) {
            issues.push_back("table: required for the tabulated family");
        } else {
            std::istringstream ts(table_s);
            std::string item;
            int n = 0;
            while (std::getline(ts, item, ',')) {
                ++n;
                item = trim(item);
                size_t colon = item.find(':');
                if (colon == std::string::npos) {
                    issues.push_back("table: entry " + std::to_string(n) +
                                     ": expected rate:volume");
                    continue;
                }
                double r = to_double(trim(item.substr(0, colon)),
                                     "table entry " + std::to_string(n) + " rate", issues);
                double v = to_double(trim(item.substr(colon + 1)),
                                     "table entry " + std::to_string(n) + " volume", issues);
                table.push_back({r, v});
            }
        }
        if (!issues.empty()) throw ConfigError(issues);
        try {
            return ScheduleModel::tabulated(side, std::move(table), theta);
        } catch (const Error& e) {
            throw ConfigError({e.what()});
        }
    }

    if (has_table) issues.push_back("table: only used by the tabulated family");
    double a = 1.0, rb = 0.0;
    if (!has_a)
        issues.push_back("a: required for analytic families");
    else
        a = to_double(a_s, "a", issues);
    if (!has_rb)
        issues.push_back("r_b: required for analytic families");
    else
        rb = to_double(rb_s, "r_b", issues);
    if (!issues.empty()) throw ConfigError(issues);
    try {
        return ScheduleModel::analytic(side, fam == kQuad ? Family::quadratic_cap : Family::sqrt_curve,
                                       a, rb, theta);
    } catch (const Error& e) {
        throw ConfigError({e.what()});
    }
}

ScheduleModel load_schedule_config(const std::string& path) {
    try {
        return parse_schedule_config(read_file(path));
    } catch (const ConfigError& e) {
        std::vector<std::string> issues;
        for (const auto& i : e.issues) issues.push_back(path + ": " + i);
        throw ConfigError(issues);
    }
}

RunConfig parse_run_config(const std::string& text) {
    auto kv = parse_key_values(text);
    std::vector<std::string> issues;
    RunConfig rc;

    bool present = false;
    rc.demand_config = take(kv, "demand_config", present);
    if (!present) issues.push_back("demand_config: required");
    rc.supply_config = take(kv, "supply_config", present);
    if (!present) issues.push_back("supply_config: required");

    std::string v = take(kv, "grid_i", present);
    if (present) rc.grid_i = static_cast<int>(to_int(v, "grid_i", issues));
    v = take(kv, "kappa_mm", present);
    if (present) rc.kappa_mm = to_double(v, "kappa_mm", issues);
    v = take(kv, "kappa_rm", present);
    if (present) rc.kappa_rm = to_double(v, "kappa_rm", issues);
    v = take(kv, "deadline_commit", present);
    if (present) rc.deadlines.commit = to_int(v, "deadline_commit", issues);
    v = take(kv, "deadline_negotiate", present);
    if (present) rc.deadlines.negotiate = to_int(v, "deadline_negotiate", issues);
    v = take(kv, "deadline_select", present);
    if (present) rc.deadlines.select = to_int(v, "deadline_select", issues);
    v = take(kv, "deadline_execute", present);
    if (present) rc.deadlines.execute = to_int(v, "deadline_execute", issues);
    v = take(kv, "seed", present);
    if (present) rc.seed = static_cast<uint64_t>(to_int(v, "seed", issues));
    flag_unknown(kv, issues);

    if (!issues.empty()) throw ConfigError(issues);
    return rc;
}

RunConfig load_run_config(const std::string& path) {
    RunConfig rc;
    try {
        rc = parse_run_config(read_file(path));
    } catch (const ConfigError& e) {
        std::vector<std::string> issues;
        for (const auto& i : e.issues) issues.push_back(path + ": " + i);
        throw ConfigError(issues);
    }
    // Curve files named relative to the run config sit beside it.
    auto resolve = [&](const std::string& p) {
        std::filesystem::path fp(p);
        if (fp.is_absolute()) return p;
        return (std::filesystem::path(path).parent_path() / fp).string();
    };
    rc.demand_config = resolve(rc.demand_config);
    rc.supply_config = resolve(rc.supply_config);
    return rc;
}

}  // namespace repomech::config
