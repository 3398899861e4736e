#include "aon/sweep.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include <json.hpp>

#include "aon/detection.hpp"
#include "aon/estimators.hpp"
#include "aon/parallel.hpp"

namespace aon {

namespace {

using nlohmann::json;

constexpr std::uint64_t task_id(Task t) { return static_cast<std::uint64_t>(t); }

std::string fmt10(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.10g", v);
    return buf;
}

std::string opt_field(const std::optional<double>& v) {
    return v ? fmt10(*v) : std::string();
}

void set_opt(json& j, const char* key, const std::optional<double>& v) {
    if (v) {
        j[key] = *v;
    } else {
        j[key] = nullptr;
    }
}

std::optional<double> get_opt(const json& j, const char* key) {
    if (!j.contains(key) || j.at(key).is_null()) return std::nullopt;
    return j.at(key).get<double>();
}

std::string trim(const std::string& s) {
    const auto a = s.find_first_not_of(" \t\r\n");
    if (a == std::string::npos) return "";
    const auto b = s.find_last_not_of(" \t\r\n");
    return s.substr(a, b - a + 1);
}

std::vector<std::string> tokenize(const std::string& s) {
    std::vector<std::string> out;
    std::string cur;
    for (char ch : s) {
        if (ch == ' ' || ch == '\t' || ch == ',') {
            if (!cur.empty()) out.push_back(cur);
            cur.clear();
        } else {
            cur.push_back(ch);
        }
    }
    if (!cur.empty()) out.push_back(cur);
    return out;
}

}  // namespace

const char* task_name(Task t) {
    switch (t) {
        case Task::kMmse: return "mmse";
        case Task::kMleRisk: return "mle_risk";
        case Task::kDetectResidual: return "detect_residual";
        case Task::kDetectLinear: return "detect_linear";
        case Task::kDivergence: return "divergence";
    }
    return "?";
}

std::optional<Task> task_from_name(const std::string& name) {
    for (Task t : {Task::kMmse, Task::kMleRisk, Task::kDetectResidual, Task::kDetectLinear,
                   Task::kDivergence}) {
        if (name == task_name(t)) return t;
    }
    return std::nullopt;
}

std::vector<int> sweep_grid(const SweepConfig& config) {
    ModelParams base{config.p, config.k, config.sigma2, 0, 1.0};
    base.validate();
    if (!config.n_values.empty()) {
        for (int n : config.n_values) {
            if (n < 0) throw PreconditionError("sweep: n values must be >= 0");
        }
        return config.n_values;
    }
    std::vector<double> ratios = config.ratios;
    if (ratios.empty()) {
        ratios = {0.25, 0.5, 0.75, 1.0, 1.25, 1.5, 2.0, 3.0};  // brackets the step at n*
    }
    const double nstar = critical_sample_size(base);
    std::vector<int> grid;
    grid.reserve(ratios.size());
    for (double r : ratios) {
        if (r < 0.0) throw PreconditionError("sweep: ratios must be >= 0");
        grid.push_back(static_cast<int>(std::ceil(r * nstar)));
    }
    return grid;
}

SweepResult run_sweep(const SweepConfig& config, int threads) {
    if (config.trials < 1) throw PreconditionError("sweep: trials must be >= 1");
    const std::vector<int> grid = sweep_grid(config);
    if (grid.empty()) throw PreconditionError("sweep: n grid is empty");

    const std::uint64_t num_supports =
        check_enumeration_budget(config.p, config.k, config.budget);
    const double work = static_cast<double>(num_supports) *
                        static_cast<double>(config.trials) * static_cast<double>(grid.size());
    if (work > static_cast<double>(config.compute_cap)) {
        throw BudgetExceeded(
            "sweep: C(p,k) * trials * |grid| = " + std::to_string(work) + " exceeds compute cap " +
            std::to_string(config.compute_cap) +
            "; shrink the grid, lower trials, or reduce p/k (or raise compute_cap)");
    }

    ModelParams base{config.p, config.k, config.sigma2, 0, 1.0};
    base.lambda = config.lambda_for(base);
    const double nstar = critical_sample_size(base);

    SweepResult result;
    result.config = config;
    result.rows.reserve(grid.size());

    for (std::size_t g = 0; g < grid.size(); ++g) {
        const auto t0 = std::chrono::steady_clock::now();
        const ModelParams params = base.with_n(grid[g]);
        SweepRow row;
        row.n = params.n;
        row.n_over_nstar = params.n / nstar;

        const auto task_seed = [&](Task t) {
            return substream(config.seed, {stream_tag::kSweep, task_id(t), g});
        };

        if (config.tasks.count(Task::kMmse)) {
            const MmseEstimate est =
                mmse_mc(params, config.trials, task_seed(Task::kMmse), threads, config.budget);
            row.mmse_ratio = est.ratio;
            row.mmse_se = est.ratio_se;
        }
        if (config.tasks.count(Task::kMleRisk)) {
            const MleTailBound tail = mle_tail_bound(params);
            const Seed s = task_seed(Task::kMleRisk);
            std::vector<char> fail(config.trials);
            parallel_for(config.trials, threads, [&](std::int64_t t) {
                const Instance inst =
                    sample_planted(params, substream(s, {static_cast<std::uint64_t>(t)}));
                const SupportVector hat = mle(inst, params, config.budget);
                const double err = 2.0 * (params.k - overlap(hat, *inst.truth));
                fail[t] = err >= tail.threshold;
            });
            long c = 0;
            for (char f : fail) c += f;
            row.mle_fail_rate = static_cast<double>(c) / config.trials;
        }
        if (config.tasks.count(Task::kDetectResidual)) {
            const RiskReport r =
                test_risk_mc(params, DetectionRule::kResidualRatio, config.alpha, config.trials,
                             task_seed(Task::kDetectResidual), threads, config.budget);
            row.detect_risk_residual = r.sum;
        }
        if (config.tasks.count(Task::kDetectLinear)) {
            const RiskReport r =
                test_risk_mc(params, DetectionRule::kLinearCorr, config.alpha, config.trials,
                             task_seed(Task::kDetectLinear), threads, config.budget);
            row.detect_risk_linear = r.sum;
        }
        if (config.tasks.count(Task::kDivergence)) {
            const DivergenceReport rep =
                mc_divergences(params, base.lambda, config.trials,
                               task_seed(Task::kDivergence), threads, config.budget);
            row.chi2_exact = rep.chi2_exact;
            row.kl_mc = rep.kl_mc;
            row.tv_mc = rep.tv_mc;
        }

        row.wall_time_s =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        result.rows.push_back(std::move(row));
    }
    return result;
}

void emit_csv(const SweepResult& result, std::ostream& os) {
    os << kCsvHeader << "\n";
    for (const SweepRow& r : result.rows) {
        os << r.n << ',' << fmt10(r.n_over_nstar) << ',' << opt_field(r.mmse_ratio) << ','
           << opt_field(r.mmse_se) << ',' << opt_field(r.mle_fail_rate) << ','
           << opt_field(r.detect_risk_residual) << ',' << opt_field(r.detect_risk_linear) << ','
           << opt_field(r.chi2_exact) << ',' << opt_field(r.kl_mc) << ',' << opt_field(r.tv_mc)
           << ',' << fmt10(r.wall_time_s) << "\n";
    }
}

namespace {

json config_to_json(const SweepConfig& c) {
    json tasks = json::array();
    for (Task t : c.tasks) tasks.push_back(task_name(t));
    return json{{"p", c.p},
                {"k", c.k},
                {"sigma2", c.sigma2},
                {"ratios", c.ratios},
                {"n", c.n_values},
                {"trials", c.trials},
                {"seed", c.seed.value},
                {"stream", c.seed.stream},
                {"tasks", tasks},
                {"lambda", c.lambda_matched ? json("matched") : json(c.lambda_explicit)},
                {"alpha", c.alpha},
                {"budget", c.budget},
                {"compute_cap", c.compute_cap}};
}

}  // namespace

void emit_json(const SweepResult& result, std::ostream& os) {
    json rows = json::array();
    for (const SweepRow& r : result.rows) {
        json j{{"n", r.n}, {"n_over_nstar", r.n_over_nstar}, {"wall_time_s", r.wall_time_s}};
        set_opt(j, "mmse_ratio", r.mmse_ratio);
        set_opt(j, "mmse_se", r.mmse_se);
        set_opt(j, "mle_fail_rate", r.mle_fail_rate);
        set_opt(j, "detect_risk_residual", r.detect_risk_residual);
        set_opt(j, "detect_risk_linear", r.detect_risk_linear);
        set_opt(j, "chi2_exact", r.chi2_exact);
        set_opt(j, "kl_mc", r.kl_mc);
        set_opt(j, "tv_mc", r.tv_mc);
        rows.push_back(std::move(j));
    }
    const json doc{{"config", config_to_json(result.config)}, {"rows", rows}};
    os << doc.dump(2) << "\n";
}

void emit(const SweepResult& result, EmitFormat format, const std::string& path) {
    const auto write = [&](std::ostream& os) {
        if (format == EmitFormat::kCsv) {
            emit_csv(result, os);
        } else {
            emit_json(result, os);
        }
    };
    if (path == "-") {
        write(std::cout);
        return;
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("emit: cannot open '" + path + "' for writing");
    write(out);
    if (!out) throw std::runtime_error("emit: write to '" + path + "' failed");
}

SweepConfig parse_config(std::istream& is) {
    SweepConfig config;
    config.tasks.clear();
    bool tasks_seen = false;
    std::string line, section;
    int lineno = 0;
    while (std::getline(is, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']') {
                throw PreconditionError("config line " + std::to_string(lineno) +
                                        ": malformed section header");
            }
            section = trim(line.substr(1, line.size() - 2));
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            throw PreconditionError("config line " + std::to_string(lineno) + ": expected key = value");
        }
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        try {
            if (section == "model") {
                if (key == "p") config.p = std::stoi(value);
                else if (key == "k") config.k = std::stoi(value);
                else if (key == "sigma2") config.sigma2 = std::stod(value);
                else throw PreconditionError("unknown [model] key '" + key + "'");
            } else if (section == "sweep") {
                if (key == "ratios") {
                    config.ratios.clear();
                    for (const auto& tok : tokenize(value)) config.ratios.push_back(std::stod(tok));
                } else if (key == "n") {
                    config.n_values.clear();
                    for (const auto& tok : tokenize(value)) config.n_values.push_back(std::stoi(tok));
                } else if (key == "trials") {
                    config.trials = std::stol(value);
                } else if (key == "seed") {
                    config.seed.value = std::stoull(value);
                } else if (key == "stream") {
                    config.seed.stream = std::stoull(value);
                } else if (key == "tasks") {
                    tasks_seen = true;
                    for (const auto& tok : tokenize(value)) {
                        const auto t = task_from_name(tok);
                        if (!t) throw PreconditionError("unknown task '" + tok + "'");
                        config.tasks.insert(*t);
                    }
                } else if (key == "lambda") {
                    if (value == "matched") {
                        config.lambda_matched = true;
                    } else {
                        config.lambda_matched = false;
                        config.lambda_explicit = std::stod(value);
                    }
                } else if (key == "alpha") {
                    config.alpha = std::stod(value);
                } else if (key == "budget") {
                    config.budget = std::stoull(value);
                } else if (key == "compute_cap") {
                    config.compute_cap = std::stoull(value);
                } else {
                    throw PreconditionError("unknown [sweep] key '" + key + "'");
                }
            } else {
                throw PreconditionError("unknown section '" + section + "'");
            }
        } catch (const std::invalid_argument&) {
            throw PreconditionError("config line " + std::to_string(lineno) + ": bad value for '" +
                                    key + "'");
        } catch (const std::out_of_range&) {
            throw PreconditionError("config line " + std::to_string(lineno) + ": value out of range");
        }
    }
    if (!tasks_seen) config.tasks = {Task::kMmse};
    return config;
}

SweepConfig parse_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw PreconditionError("cannot open config file '" + path + "'");
    return parse_config(in);
}

SweepResult read_result_json(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open '" + path + "'");
    json doc = json::parse(in);
    SweepResult result;
    const json& c = doc.at("config");
    result.config.p = c.at("p").get<int>();
    result.config.k = c.at("k").get<int>();
    result.config.sigma2 = c.at("sigma2").get<double>();
    result.config.ratios = c.at("ratios").get<std::vector<double>>();
    result.config.n_values = c.at("n").get<std::vector<int>>();
    result.config.trials = c.at("trials").get<long>();
    result.config.seed.value = c.at("seed").get<std::uint64_t>();
    result.config.seed.stream = c.at("stream").get<std::uint64_t>();
    result.config.tasks.clear();
    for (const auto& t : c.at("tasks")) {
        const auto task = task_from_name(t.get<std::string>());
        if (task) result.config.tasks.insert(*task);
    }
    if (c.at("lambda").is_string()) {
        result.config.lambda_matched = true;
    } else {
        result.config.lambda_matched = false;
        result.config.lambda_explicit = c.at("lambda").get<double>();
    }
    result.config.alpha = c.at("alpha").get<double>();
    result.config.budget = c.at("budget").get<std::uint64_t>();
    result.config.compute_cap = c.at("compute_cap").get<std::uint64_t>();
    for (const auto& j : doc.at("rows")) {
        SweepRow r;
        r.n = j.at("n").get<int>();
        r.n_over_nstar = j.at("n_over_nstar").get<double>();
        r.wall_time_s = j.at("wall_time_s").get<double>();
        r.mmse_ratio = get_opt(j, "mmse_ratio");
        r.mmse_se = get_opt(j, "mmse_se");
        r.mle_fail_rate = get_opt(j, "mle_fail_rate");
        r.detect_risk_residual = get_opt(j, "detect_risk_residual");
        r.detect_risk_linear = get_opt(j, "detect_risk_linear");
        r.chi2_exact = get_opt(j, "chi2_exact");
        r.kl_mc = get_opt(j, "kl_mc");
        r.tv_mc = get_opt(j, "tv_mc");
        result.rows.push_back(std::move(r));
    }
    return result;
}

}  // namespace aon
