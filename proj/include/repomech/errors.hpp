#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace repomech {

// Base for every library error. The CLI maps any of these to exit code 1
// with a single-line diagnostic.
struct Error : std::runtime_error {
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

// Argument outside the mathematical domain of an operation (rate off the
// schedule support, seed off the balance segment, negative spread, ...).
struct DomainError : Error {
    explicit DomainError(const std::string& what) : Error(what) {}
};

// Requested volume not attainable on the schedule.
struct InfeasibleVolumeError : Error {
    explicit InfeasibleVolumeError(const std::string& what) : Error(what) {}
};

// Funding-commitment floor that no rate can honour.
struct InfeasibleCommitmentError : Error {
    explicit InfeasibleCommitmentError(const std::string& what) : Error(what) {}
};

// Contract driven outside its protocol order (e.g. settling before an
// outcome is fixed). Out-of-phase *events* are rejected without throwing;
// this is for direct API misuse.
struct ProtocolError : Error {
    explicit ProtocolError(const std::string& what) : Error(what) {}
};

// Configuration file problems. Collects every issue, not just the first.
struct ConfigError : Error {
    std::vector<std::string> issues;

    explicit ConfigError(std::vector<std::string> found)
        : Error(join(found)), issues(std::move(found)) {}

  private:
    static std::string join(const std::vector<std::string>& found) {
        std::string out = "config error:";
        for (const auto& i : found) {
            out += ' ';
            out += i;
            out += ';';
        }
        if (!found.empty()) out.pop_back();
        return out;
    }
};

}  // namespace repomech
