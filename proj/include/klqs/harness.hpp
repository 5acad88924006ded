#pragma once

// Experiment orchestration: reference-table reproduction with side-by-side
// diffs, clause-density sweeps over satisfiable ensembles, concentration
// studies of the normalized cost diagonal, spectral-gap scans, and the
// end-to-end solver sweep. One engine runs every per-instance job family:
// it derives one seed per (cell, instance), fans tasks over a thread pool,
// and journals finished tasks to an append-only log so interrupted sweeps
// resume instead of recomputing. Record content never depends on thread
// count or interleaving — canonical sorting restores a unique order.

#include "baselines.hpp"
#include "hamiltonian.hpp"
#include "instances.hpp"
#include "report.hpp"
#include "rng.hpp"
#include "search.hpp"
#include "simulator.hpp"
#include "spectral.hpp"

#include <atomic>
#include <chrono>
#include <filesystem>
#include <functional>
#include <map>
#include <mutex>
#include <thread>

namespace klqs {

enum class ExperimentKind { table1, table2, fig_qs_density, fig_aqs_density, concentration, gapscan, solve };

inline const char* kind_name(ExperimentKind kind)
{
    switch (kind) {
    case ExperimentKind::table1: return "table1";
    case ExperimentKind::table2: return "table2";
    case ExperimentKind::fig_qs_density: return "fig_qs_density";
    case ExperimentKind::fig_aqs_density: return "fig_aqs_density";
    case ExperimentKind::concentration: return "concentration";
    case ExperimentKind::gapscan: return "gapscan";
    case ExperimentKind::solve: return "solve";
    }
    throw std::invalid_argument("kind_name: unknown kind");
}

// Clause-count rule m = round(c · n^power); power 0 is an absolute count.
struct MSpec {
    double c = 1.0;
    int power = 0;

    std::int64_t resolve(int n) const
    {
        double v = c;
        for (int i = 0; i < power; ++i)
            v *= n;
        const std::int64_t m = std::llround(v);
        if (m < 1)
            throw std::invalid_argument("m_spec: clause count must resolve to a positive integer");
        return m;
    }
};

// Accepts "196", "2.5n", "4n2", "4n^2".
inline MSpec parse_m_spec(const std::string& text)
{
    const std::size_t pos = text.find('n');
    MSpec spec;
    const std::string coeff = pos == std::string::npos ? text : text.substr(0, pos);
    if (coeff.empty())
        spec.c = 1.0;
    else {
        char* end = nullptr;
        spec.c = std::strtod(coeff.c_str(), &end);
        if (end != coeff.c_str() + coeff.size())
            throw std::invalid_argument("m_spec: bad coefficient in " + text);
    }
    if (pos == std::string::npos)
        return spec;
    const std::string tail = text.substr(pos + 1);
    if (tail.empty())
        spec.power = 1;
    else if (tail == "2" || tail == "^2")
        spec.power = 2;
    else
        throw std::invalid_argument("m_spec: bad power suffix in " + text);
    return spec;
}

struct ExperimentConfig {
    ExperimentKind kind = ExperimentKind::table1;
    std::vector<int> n_list;      // empty → per-kind default
    int k = 3;
    MSpec m_spec{};               // concentration / solve clause counts
    std::vector<double> c_list;   // density-sweep coefficients; empty → per-kind default
    int instance_count = 100;
    std::uint64_t seed = 1;
    double theta = std::numbers::pi;
    double threshold = 0.99;
    std::string out_dir;          // empty → no persistence, no resume
    int jobs = 0;                 // 0 → hardware concurrency
};

namespace detail {

inline std::vector<int> default_n_list(ExperimentKind kind)
{
    switch (kind) {
    case ExperimentKind::table1:
    case ExperimentKind::table2: return {10, 11, 12, 13, 14, 15, 16, 17, 18, 19, 20};
    case ExperimentKind::fig_qs_density: return {12, 14};
    case ExperimentKind::fig_aqs_density: return {16};
    case ExperimentKind::concentration: return {10};
    case ExperimentKind::gapscan: return {12};
    case ExperimentKind::solve: return {14};
    }
    return {};
}

inline std::vector<double> default_c_list(ExperimentKind kind)
{
    if (kind == ExperimentKind::fig_qs_density)
        return {1.0, 2.0, 4.0};
    if (kind == ExperimentKind::fig_aqs_density)
        return {2.5, 4.0, 5.0, 7.0, 10.0};
    return {};
}

struct SweepCell {
    int n = 0;
    int k = 0;
    std::int64_t m = 0;
};

// A finished task's records are journaled together, terminated by this
// marker metric; on resume only marker-bearing (cell, instance) pairs are
// trusted, so a torn tail line can never smuggle in a half-finished task.
inline constexpr const char* task_done_metric = "task_done";

struct SweepPlan {
    std::string kind;
    std::vector<SweepCell> cells;
    int instance_count = 1;
    std::uint64_t seed = 0;
    int jobs = 0;
    std::string out_dir;
    bool record_failures = false;  // true: a throwing task becomes a "failure" record
};

using SweepTask = std::function<std::vector<ResultRecord>(const SweepCell& cell, std::size_t cell_idx,
                                                          int instance, std::uint64_t inst_seed)>;

inline std::vector<ResultRecord> run_sweep(const SweepPlan& plan, const SweepTask& task)
{
    namespace fs = std::filesystem;
    if (plan.instance_count < 1)
        throw std::invalid_argument("sweep: instance_count must be >= 1");

    // Resume state: records of previously completed (cell, instance) pairs,
    // keyed by (n, k, m, instance) and trusted only when the journaled seed
    // matches what this config would derive.
    std::map<std::tuple<int, int, std::int64_t, std::int64_t>, std::vector<ResultRecord>> journal;
    std::ofstream log;
    if (!plan.out_dir.empty()) {
        fs::create_directories(plan.out_dir);
        const fs::path log_path = fs::path(plan.out_dir) / "records.log";
        bool tail_unterminated = false;
        if (fs::exists(log_path)) {
            {
                // A crash mid-write can leave the last line without its
                // newline; appending straight after it would merge this run's
                // first record into the torn line and lose it.
                std::ifstream raw(log_path, std::ios::binary | std::ios::ate);
                if (raw && raw.tellg() > 0) {
                    raw.seekg(-1, std::ios::end);
                    char last = '\n';
                    raw.get(last);
                    tail_unterminated = last != '\n';
                }
            }
            std::ifstream in(log_path);
            std::string line;
            while (std::getline(in, line)) {
                if (line.empty())
                    continue;
                try {
                    ResultRecord r = parse_record_csv(line);
                    journal[{r.n, r.k, r.m, r.instance_id}].push_back(std::move(r));
                } catch (const std::exception&) {
                    // torn tail from an interrupted run; the pair lacks its
                    // completion marker and will simply be recomputed
                }
            }
        }
        log.open(log_path, std::ios::app);
        if (!log)
            throw std::runtime_error("sweep: cannot open record log in " + plan.out_dir);
        if (tail_unterminated)
            log << '\n';
    }

    std::vector<ResultRecord> results;
    std::vector<std::pair<std::size_t, int>> todo;  // (cell index, instance)
    for (std::size_t ci = 0; ci < plan.cells.size(); ++ci)
        for (int inst = 0; inst < plan.instance_count; ++inst) {
            const SweepCell& cell = plan.cells[ci];
            const std::uint64_t inst_seed = derive_seed(plan.seed, ci, inst);
            const auto it = journal.find({cell.n, cell.k, cell.m, inst});
            bool done = false;
            if (it != journal.end())
                for (const auto& r : it->second)
                    if (r.metric == task_done_metric && r.seed == inst_seed && r.kind == plan.kind)
                        done = true;
            if (done) {
                for (const auto& r : it->second)
                    if (r.metric != task_done_metric)
                        results.push_back(r);
            } else {
                todo.emplace_back(ci, inst);
            }
        }

    std::mutex sink;
    std::atomic<std::size_t> next{0};
    std::atomic<bool> abort{false};
    std::exception_ptr failure;
    const auto worker = [&] {
        while (!abort.load(std::memory_order_relaxed)) {
            const std::size_t idx = next.fetch_add(1, std::memory_order_relaxed);
            if (idx >= todo.size())
                return;
            const auto [ci, inst] = todo[idx];
            const SweepCell& cell = plan.cells[ci];
            const std::uint64_t inst_seed = derive_seed(plan.seed, ci, inst);
            std::vector<ResultRecord> produced;
            const auto started = std::chrono::steady_clock::now();
            try {
                produced = task(cell, ci, inst, inst_seed);
            } catch (...) {
                if (!plan.record_failures) {
                    std::lock_guard<std::mutex> hold(sink);
                    if (!failure)
                        failure = std::current_exception();
                    abort.store(true, std::memory_order_relaxed);
                    return;
                }
                produced = {{plan.kind, cell.n, cell.k, cell.m, inst_seed, inst, "failure", 1.0, 0.0}};
            }
            const double wall_ms =
                std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - started)
                    .count();
            for (auto& r : produced)
                r.wall_ms = wall_ms;
            std::lock_guard<std::mutex> hold(sink);
            if (log.is_open()) {
                for (const auto& r : produced)
                    log << format_record_csv(r) << '\n';
                log << format_record_csv(
                           {plan.kind, cell.n, cell.k, cell.m, inst_seed, inst, task_done_metric, 1.0, 0.0})
                    << '\n';
                log.flush();
            }
            for (auto& r : produced)
                results.push_back(std::move(r));
        }
    };

    int jobs = plan.jobs > 0 ? plan.jobs : static_cast<int>(std::thread::hardware_concurrency());
    jobs = std::max(1, std::min<int>(jobs, static_cast<int>(todo.size()) + (todo.empty() ? 1 : 0)));
    if (jobs == 1 || todo.size() <= 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(jobs);
        for (int i = 0; i < jobs; ++i)
            pool.emplace_back(worker);
        for (auto& t : pool)
            t.join();
    }
    if (failure)
        std::rethrow_exception(failure);

    canonical_sort(results);
    return results;
}

} // namespace detail

struct TableReport {
    std::vector<ResultRecord> records;
    std::string rendered;          // side-by-side diff against the embedded baselines
    bool within_tolerance = false;
    int cells_exact = 0;           // cells whose integer column matched exactly
    int cells_total = 0;
    bool monotone = true;          // threshold steps nondecreasing in n (table2)
};

namespace detail {

inline int baseline_index(int n)
{
    if (n < baselines::n_values.front() || n > baselines::n_values.back())
        throw std::domain_error("baseline comparison covers n in [10, 20] only");
    return n - baselines::n_values.front();
}

} // namespace detail

// Comparison tolerances for the baseline tables. These gate the acceptance
// run, so they are pinned here rather than configurable.
inline constexpr int table1_p_slack = 1;            // |p - ref| allowed everywhere
inline constexpr double table1_exact_fraction = 30.0 / 33.0;  // share of exact p matches required
inline constexpr double table1_prob_tol = 0.02;
inline constexpr int table2_min_slack = 3;          // |T - ref| <= max(3, 2% of ref)
inline constexpr double table2_rel_slack = 0.02;

// First-local-maximum iteration counts and success probabilities for the
// pure match-count objective, k = 1..3, diffed against the baselines.
inline TableReport run_table1(const ExperimentConfig& cfg)
{
    const std::vector<int> n_list =
        cfg.n_list.empty() ? detail::default_n_list(ExperimentKind::table1) : cfg.n_list;
    detail::SweepPlan plan;
    plan.kind = kind_name(ExperimentKind::table1);
    for (int k = 1; k <= 3; ++k)
        for (int n : n_list) {
            detail::baseline_index(n);
            plan.cells.push_back({n, k, 0});
        }
    plan.instance_count = 1;
    plan.seed = cfg.seed;
    plan.jobs = cfg.jobs;

    TableReport report;
    report.records = detail::run_sweep(plan, [&](const detail::SweepCell& cell, std::size_t, int,
                                                 std::uint64_t inst_seed) {
        const DiagonalHamiltonian cost = build_Hk(cell.n, cell.k, 0);
        const IterationResult r = find_first_local_max(cell.n, cell.k, cost, cfg.theta, 0);
        return std::vector<ResultRecord>{
            {plan.kind, cell.n, cell.k, 0, inst_seed, 0, "p", static_cast<double>(r.p), 0.0},
            {plan.kind, cell.n, cell.k, 0, inst_seed, 0, "prob", r.prob, 0.0}};
    });

    std::map<std::pair<int, int>, std::pair<int, double>> got;  // (k, n) → (p, prob)
    for (const auto& r : report.records) {
        auto& cell = got[{r.k, r.n}];
        if (r.metric == "p")
            cell.first = static_cast<int>(r.value);
        else if (r.metric == "prob")
            cell.second = r.value;
    }

    std::ostringstream out;
    out << "first local maximum of the fixed-angle search (theta = " << format_value(cfg.theta)
        << ")\n";
    out << "  k   n    p  p_ref  dp    prob  p_ref.prob  dprob  status\n";
    bool all_within = true;
    for (int k = 1; k <= 3; ++k)
        for (int n : n_list) {
            const auto [p, prob] = got.at({k, n});
            const int idx = detail::baseline_index(n);
            const int p_ref = baselines::first_max_p[k - 1][idx];
            const double prob_ref = baselines::first_max_prob[k - 1][idx];
            const int dp = p - p_ref;
            const double dprob = prob - prob_ref;
            ++report.cells_total;
            if (dp == 0)
                ++report.cells_exact;
            const bool ok = std::abs(dp) <= table1_p_slack && std::abs(dprob) <= table1_prob_tol;
            all_within = all_within && ok;
            char line[160];
            std::snprintf(line, sizeof(line), "  %d  %2d  %3d  %5d  %+d   %.3f  %10.3f  %+.3f  %s\n",
                          k, n, p, p_ref, dp, prob, prob_ref, dprob, ok ? "ok" : "DIFF");
            out << line;
        }
    char tally[120];
    std::snprintf(tally, sizeof(tally), "exact p matches: %d/%d (required fraction %.3f)\n",
                  report.cells_exact, report.cells_total, table1_exact_fraction);
    out << tally;
    report.within_tolerance =
        all_within && report.cells_exact + 1e-9 >= table1_exact_fraction * report.cells_total;
    report.rendered = out.str();
    return report;
}

// Minimal annealing step counts reaching the success threshold at k = 3,
// diffed against the baselines. The full-turn ramp convention is what
// reproduces them; the rendered report says so explicitly.
inline TableReport run_table2(const ExperimentConfig& cfg)
{
    const std::vector<int> n_list =
        cfg.n_list.empty() ? detail::default_n_list(ExperimentKind::table2) : cfg.n_list;
    detail::SweepPlan plan;
    plan.kind = kind_name(ExperimentKind::table2);
    for (int n : n_list) {
        detail::baseline_index(n);
        plan.cells.push_back({n, 3, 0});
    }
    plan.instance_count = 1;
    plan.seed = cfg.seed;
    plan.jobs = cfg.jobs;

    TableReport report;
    report.records = detail::run_sweep(plan, [&](const detail::SweepCell& cell, std::size_t, int,
                                                 std::uint64_t inst_seed) {
        const DiagonalHamiltonian cost = build_Hk(cell.n, cell.k, 0);
        const IterationResult r =
            find_min_threshold_steps(cell.n, cell.k, cost, cfg.threshold, 0);
        return std::vector<ResultRecord>{
            {plan.kind, cell.n, cell.k, 0, inst_seed, 0, "T3", static_cast<double>(r.p), 0.0},
            {plan.kind, cell.n, cell.k, 0, inst_seed, 0, "prob", r.prob, 0.0}};
    });

    std::map<int, std::pair<int, double>> got;  // n → (T, prob)
    for (const auto& r : report.records) {
        auto& cell = got[r.n];
        if (r.metric == "T3")
            cell.first = static_cast<int>(r.value);
        else if (r.metric == "prob")
            cell.second = r.value;
    }

    std::ostringstream out;
    out << "minimal annealing steps for success probability >= " << format_value(cfg.threshold)
        << " (k = 3)\n";
    out << "schedule: full-turn linear ramp — step l of p applies cost angle 2pi*l/(p+1), then "
           "mixing angle 2pi*(p+1-l)/(p+1)\n";
    out << "   n    T  T_ref  dT    prob  status\n";
    bool all_within = true;
    int prev = -1;
    for (int n : n_list) {
        const auto [T, prob] = got.at(n);
        const int T_ref = baselines::threshold_steps_k3[detail::baseline_index(n)];
        const int dT = T - T_ref;
        const double slack =
            std::max(static_cast<double>(table2_min_slack), table2_rel_slack * T_ref);
        ++report.cells_total;
        if (dT == 0)
            ++report.cells_exact;
        const bool ok = std::abs(dT) <= slack && prob >= cfg.threshold;
        all_within = all_within && ok;
        if (prev > T)
            report.monotone = false;
        prev = T;
        char line[160];
        std::snprintf(line, sizeof(line), "  %2d  %3d  %5d  %+d   %.4f  %s\n", n, T, T_ref, dT,
                      prob, ok ? "ok" : "DIFF");
        out << line;
    }
    char tally[80];
    std::snprintf(tally, sizeof(tally), "exact T matches: %d/%d\n", report.cells_exact,
                  report.cells_total);
    out << tally;
    report.within_tolerance = all_within;
    report.rendered = out.str();
    return report;
}

// Clause-density sweep over the satisfiable ensemble. The fixed-angle
// variant uses m = c·n² and the first-local-maximum iteration count of the
// pure objective at each n; the annealing variant uses m = c·n and the
// baseline threshold step counts. Success is the probability mass on the
// instance's surviving assignments ("p_t" records). Generation or
// simulation failures become "failure" records and the sweep continues.
inline std::vector<ResultRecord> run_density_sweep(const ExperimentConfig& cfg)
{
    if (cfg.kind != ExperimentKind::fig_qs_density && cfg.kind != ExperimentKind::fig_aqs_density)
        throw std::invalid_argument("run_density_sweep: config kind is not a density sweep");
    const bool annealing = cfg.kind == ExperimentKind::fig_aqs_density;
    const std::vector<int> n_list = cfg.n_list.empty() ? detail::default_n_list(cfg.kind) : cfg.n_list;
    const std::vector<double> c_list = cfg.c_list.empty() ? detail::default_c_list(cfg.kind) : cfg.c_list;

    // One steps count per n, fixed before the sweep so every instance of a
    // cell runs the same circuit depth.
    std::map<int, int> steps;
    for (int n : n_list) {
        if (annealing) {
            if (cfg.k != 3)
                throw std::invalid_argument("annealing density sweep: baselines pin k = 3");
            steps[n] = baselines::threshold_steps_k3[detail::baseline_index(n)];
        } else {
            const DiagonalHamiltonian pure = build_Hk(n, cfg.k, 0);
            steps[n] = find_first_local_max(n, cfg.k, pure, cfg.theta, 0).p;
        }
    }

    detail::SweepPlan plan;
    plan.kind = kind_name(cfg.kind);
    for (int n : n_list)
        for (double c : c_list) {
            const MSpec spec{c, annealing ? 1 : 2};
            plan.cells.push_back({n, cfg.k, spec.resolve(n)});
        }
    plan.instance_count = cfg.instance_count;
    plan.seed = cfg.seed;
    plan.jobs = cfg.jobs;
    plan.out_dir = cfg.out_dir;
    plan.record_failures = true;

    return detail::run_sweep(plan, [&, steps](const detail::SweepCell& cell, std::size_t, int inst,
                                              std::uint64_t inst_seed) {
        FsStats stats;
        const int m = static_cast<int>(cell.m);
        const Instance instance = generate_Fs(cell.n, m, cell.k, inst_seed, &stats);
        const SurvivorSet survivors = surviving_assignments(instance);
        const DiagonalHamiltonian cost = normalize_HC(build_HC(instance), m, cell.k);
        const int p = steps.at(cell.n);
        const Statevector psi =
            annealing ? run_aqs_state(cell.n, cell.k, cost, {p})
                      : run_qs_state(cell.n, cell.k, cost, {cfg.theta, p});
        const double mass = survivor_mass(psi, survivors);
        return std::vector<ResultRecord>{
            {plan.kind, cell.n, cell.k, cell.m, inst_seed, inst, "p_t", mass, 0.0},
            {plan.kind, cell.n, cell.k, cell.m, inst_seed, inst, "rejected",
             static_cast<double>(stats.rejected), 0.0}};
    });
}

// Concentration study of the normalized cost diagonal around the target
// objective on the planted ensemble, at the configured clause count and at
// four times it (the pair exhibits the m^{-1/2} shrinkage directly).
// Per-instance metrics: coverage of the per-distance normalized deviation
// |H̄[x] − objective| / (per-x standard deviation) within z ∈ {1,2,3}
// ("coverage_z*"), coverage within the distance-independent bound
// c·√((2^k−1)/m) ("coverage_fixed*"), and max/mean absolute deviation.
inline std::vector<ResultRecord> run_concentration(const ExperimentConfig& cfg)
{
    const std::vector<int> n_list =
        cfg.n_list.empty() ? detail::default_n_list(ExperimentKind::concentration) : cfg.n_list;
    detail::SweepPlan plan;
    plan.kind = kind_name(ExperimentKind::concentration);
    for (int n : n_list) {
        const std::int64_t m = cfg.m_spec.resolve(n);
        plan.cells.push_back({n, cfg.k, m});
        plan.cells.push_back({n, cfg.k, 4 * m});
    }
    plan.instance_count = cfg.instance_count;
    plan.seed = cfg.seed;
    plan.jobs = cfg.jobs;
    plan.out_dir = cfg.out_dir;

    return detail::run_sweep(plan, [&](const detail::SweepCell& cell, std::size_t, int inst,
                                       std::uint64_t inst_seed) {
        const int m = static_cast<int>(cell.m);
        const Instance instance = generate_Ff(cell.n, m, cell.k, inst_seed);
        const DiagonalHamiltonian hbar = normalize_HC(build_HC(instance), m, cell.k);
        const std::uint64_t t = *instance.planted;
        const double over = static_cast<double>((1ULL << cell.k) - 1);
        const double fixed_width = std::sqrt(over / static_cast<double>(cell.m));
        const double sqrt_m = std::sqrt(static_cast<double>(cell.m));
        std::size_t z_hits[3] = {0, 0, 0}, fixed_hits[3] = {0, 0, 0};
        std::size_t z_count = 0;
        double max_abs = 0.0, sum_abs = 0.0;
        const std::size_t size = 1ULL << cell.n;
        for (std::size_t x = 0; x < size; ++x) {
            const int d = matches(x, t, cell.n);
            const double dev = std::abs(hbar.values[x] - objective_fk(cell.n, cell.k, d));
            max_abs = std::max(max_abs, dev);
            sum_abs += dev;
            for (int ci = 0; ci < 3; ++ci)
                if (dev <= (ci + 1) * fixed_width)
                    ++fixed_hits[ci];
            const double sigma2 = clause_stats(cell.n, cell.k, d).sigma2;
            if (sigma2 <= 0.0)
                continue;  // deterministic cells (all clauses satisfied) carry no deviation
            const double z = dev * sqrt_m / (over * std::sqrt(sigma2));
            ++z_count;
            for (int ci = 0; ci < 3; ++ci)
                if (z <= ci + 1)
                    ++z_hits[ci];
        }
        std::vector<ResultRecord> out;
        const auto push = [&](const std::string& metric, double value) {
            out.push_back({plan.kind, cell.n, cell.k, cell.m, inst_seed, inst, metric, value, 0.0});
        };
        for (int ci = 0; ci < 3; ++ci) {
            push("coverage_z" + std::to_string(ci + 1),
                 static_cast<double>(z_hits[ci]) / static_cast<double>(z_count));
            push("coverage_fixed" + std::to_string(ci + 1),
                 static_cast<double>(fixed_hits[ci]) / static_cast<double>(size));
        }
        push("max_abs_dev", max_abs);
        push("mean_abs_dev", sum_abs / static_cast<double>(size));
        return out;
    });
}

// End-to-end solver sweep over the satisfiable ensemble.
inline std::vector<ResultRecord> run_solve(const ExperimentConfig& cfg,
                                           const SolveOptions& options = {})
{
    const std::vector<int> n_list =
        cfg.n_list.empty() ? detail::default_n_list(ExperimentKind::solve) : cfg.n_list;
    detail::SweepPlan plan;
    plan.kind = kind_name(ExperimentKind::solve);
    for (int n : n_list)
        plan.cells.push_back({n, cfg.k, cfg.m_spec.resolve(n)});
    plan.instance_count = cfg.instance_count;
    plan.seed = cfg.seed;
    plan.jobs = cfg.jobs;
    plan.out_dir = cfg.out_dir;

    return detail::run_sweep(plan, [&, options](const detail::SweepCell& cell, std::size_t,
                                                int inst, std::uint64_t inst_seed) {
        const Instance instance =
            generate_Fs(cell.n, static_cast<int>(cell.m), cell.k, inst_seed);
        const SolveOutcome outcome = solve_max_kssat(instance, inst_seed, options);
        std::vector<ResultRecord> out;
        const auto push = [&](const std::string& metric, double value) {
            out.push_back({plan.kind, cell.n, cell.k, cell.m, inst_seed, inst, metric, value, 0.0});
        };
        push("satisfied", outcome.satisfied ? 1.0 : 0.0);
        push("used_fallback", outcome.method == SolveMethod::grover ? 1.0 : 0.0);
        push("aqs_rounds", static_cast<double>(outcome.aqs_rounds));
        push("steps_used", static_cast<double>(outcome.steps_used));
        return out;
    });
}

// Gap scan across the interpolation weight, one 21-point grid per n by
// default, on the pure match-count objective.
inline std::vector<ResultRecord> run_gapscan(const ExperimentConfig& cfg, int grid_points = 21)
{
    if (grid_points < 2)
        throw std::invalid_argument("run_gapscan: need at least 2 grid points");
    const std::vector<int> n_list =
        cfg.n_list.empty() ? detail::default_n_list(ExperimentKind::gapscan) : cfg.n_list;
    std::vector<double> grid(grid_points);
    for (int i = 0; i < grid_points; ++i)
        grid[i] = static_cast<double>(i) / (grid_points - 1);

    detail::SweepPlan plan;
    plan.kind = kind_name(ExperimentKind::gapscan);
    for (int n : n_list)
        plan.cells.push_back({n, cfg.k, 0});
    plan.instance_count = 1;
    plan.seed = cfg.seed;
    plan.jobs = cfg.jobs;

    return detail::run_sweep(plan, [&, grid](const detail::SweepCell& cell, std::size_t, int,
                                             std::uint64_t inst_seed) {
        const DiagonalHamiltonian cost = build_Hk(cell.n, cell.k, 0);
        const GapScan scan = gap_scan(cell.n, cell.k, cost, grid);
        std::vector<ResultRecord> out;
        for (std::size_t i = 0; i < scan.points.size(); ++i) {
            const SpectrumResult& r = scan.points[i];
            const auto push = [&](const std::string& metric, double value) {
                out.push_back({plan.kind, cell.n, cell.k, 0, inst_seed,
                               static_cast<std::int64_t>(i), metric, value, 0.0});
            };
            push("s", *r.s);
            push("lambda1", r.lambda1);
            push("lambda2", r.lambda2);
            push("gap", r.gap);
            push("iterations", static_cast<double>(r.iterations));
        }
        out.push_back({plan.kind, cell.n, cell.k, 0, inst_seed, -1, "argmin_s",
                       *scan.points[scan.argmin].s, 0.0});
        return out;
    });
}

// Dedicated flat CSV for gap scans (the spectral results' own interchange
// format, one row per grid point).
inline void write_gap_csv(int n, int k, const GapScan& scan, std::ostream& out)
{
    out << "n,k,s,lambda1,lambda2,gap,iterations\n";
    for (const auto& r : scan.points)
        out << n << ',' << k << ',' << format_value(r.s ? *r.s : -1.0) << ','
            << format_value(r.lambda1) << ',' << format_value(r.lambda2) << ','
            << format_value(r.gap) << ',' << r.iterations << '\n';
    if (!out)
        throw std::runtime_error("write_gap_csv: stream failure");
}

// Writes records.csv / records.json / boxplot.svg (subset selectable) into
// out_dir and returns the paths written. The box plot uses the "p_t" metric
// when present, otherwise the lexicographically first metric.
inline std::vector<std::string> emit_outputs(std::vector<ResultRecord> records,
                                             const std::string& out_dir,
                                             const std::vector<std::string>& formats = {})
{
    namespace fs = std::filesystem;
    if (records.empty())
        throw std::invalid_argument("emit_outputs: no records");
    if (out_dir.empty())
        throw std::invalid_argument("emit_outputs: no output directory");
    canonical_sort(records);
    const auto wants = [&](const char* f) {
        if (formats.empty())
            return true;
        for (const auto& token : formats)
            if (token == f)
                return true;
        return false;
    };
    fs::create_directories(out_dir);
    std::vector<std::string> written;
    if (wants("csv")) {
        const std::string path = (fs::path(out_dir) / "records.csv").string();
        write_csv(records, path);
        written.push_back(path);
    }
    if (wants("json")) {
        const std::string path = (fs::path(out_dir) / "records.json").string();
        write_json(records, path);
        written.push_back(path);
    }
    if (wants("svg")) {
        std::string metric = records.front().metric;
        for (const auto& r : records)
            if (r.metric == "p_t") {
                metric = "p_t";
                break;
            }
        const std::string path = (fs::path(out_dir) / "boxplot.svg").string();
        write_boxplot_svg(records, metric, path);
        written.push_back(path);
    }
    return written;
}

} // namespace klqs
