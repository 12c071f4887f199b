#pragma once

#include "crum/families/family.hpp"
#include "crum/families/params.hpp"

#include <json.hpp>

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace crum::verify {

inline constexpr const char* kReportSchema = "crum-report/1";

struct Tolerances {
    double algebraic = 1e-9;
    double quadrature = 1e-7;
    double oracle = 1e-5;
    /// Per-identity overrides, keyed by the identity name used in the report.
    std::map<std::string, double> overrides;

    double get(const std::string& identity, double class_default) const;
};

enum class Precision { double_, extended };

struct RunConfig {
    std::string family;
    ParamSet params;
    int depth = 2;
    int nmax = 5;
    /// Real-axis sample count; dQM families add half as many on each strip line.
    int samples = 20;
    Tolerances tolerances;
    Precision precision = Precision::double_;
    std::string out;
    std::string csv;
    std::uint64_t seed = 1;
    /// Adds the limit tables to the report.
    bool limits = false;

    nlohmann::json to_json() const;
    static RunConfig from_json(const nlohmann::json& j);
};

/// Replaces the seed with CRUM_SEED when that variable is set.
void apply_env(RunConfig& cfg);

/// Golden-ratio sequence with a seeded random offset over the central 90% of the window.
std::vector<double> real_samples(Interval window, int count, std::uint64_t seed);
/// real_samples plus count/2 points on each line Im x = +-gamma/2, +-gamma.
std::vector<cplx> strip_samples(const DqmFamily& fam, int count, std::uint64_t seed);

/// Builds the family and its chain and runs every applicable identity, oracle and
/// structure check. Failures of a stage are recorded in the report, never thrown,
/// except CapabilityError for unsupported requests.
nlohmann::json run_suite(const RunConfig& cfg);

/// The report without its wall-time field, for comparing two runs.
nlohmann::json strip_timing(nlohmann::json report);

} // namespace crum::verify
