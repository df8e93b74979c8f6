#pragma once

// Verification records and the suite that produces them.

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "json.hpp"

#include "iuws/config.hpp"

namespace iuws {

struct CheckRecord {
    std::string id;
    /// the statement the check exercises
    std::string anchor;
    std::string description;
    nlohmann::json measured = nlohmann::json::object();
    nlohmann::json constants = nlohmann::json::object();
    bool pass = false;
    bool skipped = false;
    std::string skip_reason;
    double runtime = 0.0;
};

struct VerificationReport {
    double h = 0.02;
    std::string corpus;
    std::uint64_t seed = 1;
    std::vector<CheckRecord> checks;
    double runtime = 0.0;

    bool all_pass() const;
};

/// Infinite widths are written as null with "infinite": true.
nlohmann::json to_json(const CapWidthResult& r);

/// Finite numbers as-is, infinities and NaN as null.
nlohmann::json number(double x);

nlohmann::json to_json(const CheckRecord& r, bool timestamps);
nlohmann::json to_json(const VerificationReport& r, bool timestamps);

struct VerifyOptions {
    double h = 0.02;
    /// "standard" or a directory of config files
    std::string corpus = "standard";
    std::uint64_t seed = 1;
    /// restrict to check ids starting with one of these prefixes
    std::vector<std::string> only;
    /// progress sink, one line per finished check
    std::function<void(const CheckRecord&)> progress;
};

/// The standard corpus as configs (names match corpus/*.json).
std::vector<RunConfig> standard_corpus();

/// Configs from `corpus`, with h replaced by `h`.
std::vector<RunConfig> load_corpus(const std::string& corpus, double h);

VerificationReport run_verify(const VerifyOptions& opts);

}  // namespace iuws
