#pragma once

#include <iosfwd>
#include <optional>
#include <set>
#include <string>

#include "aon/divergence.hpp"

namespace aon {

enum class Task { kMmse, kMleRisk, kDetectResidual, kDetectLinear, kDivergence };

const char* task_name(Task t);
std::optional<Task> task_from_name(const std::string& name);

/// A sweep over sample sizes at fixed (p, k, sigma2). Grid points come either
/// from explicit n values or from ratios n/n* (converted via ceil(r n*)).
struct SweepConfig {
    int p = 24;
    int k = 3;
    double sigma2 = 0.03;
    std::vector<double> ratios;  ///< used when n_values is empty
    std::vector<int> n_values;
    long trials = 200;
    Seed seed{};
    std::set<Task> tasks{Task::kMmse};
    bool lambda_matched = true;     ///< lambda = lambda0 (covariance-matched null)
    double lambda_explicit = 1.0;   ///< used when lambda_matched is false
    double alpha = 0.1;             ///< residual-test level
    std::uint64_t budget = kDefaultEnumBudget;
    std::uint64_t compute_cap = 1'000'000'000;  ///< cap on C(p,k) * trials * |grid|

    double lambda_for(const ModelParams& params) const {
        return lambda_matched ? params.lambda0() : lambda_explicit;
    }
};

struct SweepRow {
    int n = 0;
    double n_over_nstar = 0.0;
    std::optional<double> mmse_ratio, mmse_se;
    std::optional<double> mle_fail_rate;
    std::optional<double> detect_risk_residual, detect_risk_linear;
    std::optional<double> chi2_exact, kl_mc, tv_mc;
    double wall_time_s = 0.0;
};

struct SweepResult {
    SweepConfig config;
    std::vector<SweepRow> rows;
};

/// The n values a config expands to (ratio grid resolved against n*).
std::vector<int> sweep_grid(const SweepConfig& config);

SweepResult run_sweep(const SweepConfig& config, int threads = 1);

enum class EmitFormat { kCsv, kJson };

inline constexpr const char* kCsvHeader =
    "n,n_over_nstar,mmse_ratio,mmse_se,mle_fail_rate,detect_risk_residual,"
    "detect_risk_linear,chi2_exact,kl_mc,tv_mc,wall_time_s";

/// Writes CSV (exact 11-column header above, floats with 10 significant
/// digits, empty fields for missing tasks) or JSON (rows plus a config echo).
/// path "-" writes to stdout.
void emit(const SweepResult& result, EmitFormat format, const std::string& path);

void emit_csv(const SweepResult& result, std::ostream& os);
void emit_json(const SweepResult& result, std::ostream& os);

/// Parses the key = value section format documented in the README.
SweepConfig parse_config(std::istream& is);
SweepConfig parse_config_file(const std::string& path);

/// Reads back a JSON file produced by emit().
SweepResult read_result_json(const std::string& path);

}  // namespace aon
