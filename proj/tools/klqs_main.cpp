// Command-line front end. One subcommand per workflow: instance generation,
// single simulations, spectral scans, the classical baseline, the end-to-end
// solver, and the batch experiment drivers. Exit codes: 0 on success, 2 when
// a baseline comparison or solver verification fails, 1 on runtime errors
// (bad arguments, I/O, simulation limits).

#include <CLI11.hpp>

#include <cstdio>
#include <iostream>
#include <map>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include "klqs/klqs.hpp"

namespace {

using namespace klqs;

// Options shared by the batch drivers; each subcommand registers only the
// subset it honors.
struct CliOptions {
    std::vector<int> n_list;
    int n = 0;
    int k = 3;
    std::string m_text;
    std::vector<double> c_list;
    std::uint64_t seed = 1;
    int trials = 100;
    double theta = std::numbers::pi;
    double threshold = 0.99;
    std::string out;
    std::vector<std::string> formats;
    int jobs = 0;
    int steps = 0;
    int points = 21;
    std::string model = "Fs";
    std::string variant = "qs";
};

ExperimentConfig batch_config(const CliOptions& opt, ExperimentKind kind)
{
    ExperimentConfig cfg;
    cfg.kind = kind;
    cfg.n_list = opt.n_list;
    cfg.k = opt.k;
    if (!opt.m_text.empty())
        cfg.m_spec = parse_m_spec(opt.m_text);
    cfg.c_list = opt.c_list;
    cfg.instance_count = opt.trials;
    cfg.seed = opt.seed;
    cfg.theta = opt.theta;
    cfg.threshold = opt.threshold;
    cfg.out_dir = opt.out;
    cfg.jobs = opt.jobs;
    return cfg;
}

void emit_if_requested(const std::vector<ResultRecord>& records, const CliOptions& opt)
{
    if (opt.out.empty())
        return;
    for (const auto& path : emit_outputs(records, opt.out, opt.formats))
        std::printf("wrote %s\n", path.c_str());
}

int clause_count(const CliOptions& opt)
{
    const std::int64_t m = parse_m_spec(opt.m_text).resolve(opt.n);
    if (m > 1'000'000'000)
        throw std::invalid_argument("clause count too large: " + std::to_string(m));
    return static_cast<int>(m);
}

Instance generate_by_model(const CliOptions& opt)
{
    const int m = clause_count(opt);
    if (opt.model == "F")
        return generate_F(opt.n, m, opt.k, opt.seed);
    if (opt.model == "Ff")
        return generate_Ff(opt.n, m, opt.k, opt.seed);
    return generate_Fs(opt.n, m, opt.k, opt.seed);
}

int cmd_generate(const CliOptions& opt)
{
    const Instance inst = generate_by_model(opt);
    if (opt.out.empty())
        dimacs_write(inst, std::cout);
    else {
        dimacs_write(inst, opt.out);
        std::printf("wrote %s (%d variables, %d clauses, model %s)\n", opt.out.c_str(), inst.n,
                    inst.m(), opt.model.c_str());
    }
    return 0;
}

// Cost diagonal + target for the single-shot simulators: the pure objective
// around t = 0 by default, a planted instance's normalized clause count when
// a clause spec is given.
std::pair<DiagonalHamiltonian, std::uint64_t> single_cost(const CliOptions& opt)
{
    if (opt.m_text.empty())
        return {build_Hk(opt.n, opt.k, 0), 0};
    const int m = clause_count(opt);
    const Instance inst = generate_Ff(opt.n, m, opt.k, opt.seed);
    return {normalize_HC(build_HC(inst), m, opt.k), *inst.planted};
}

int cmd_simulate_qs(const CliOptions& opt)
{
    const auto [cost, t] = single_cost(opt);
    if (opt.steps <= 0) {
        const IterationResult r = find_first_local_max(opt.n, opt.k, cost, opt.theta, t);
        std::printf("first local maximum: p = %d, p_t = %.6f\n", r.p, r.prob);
        return 0;
    }
    const auto traj = run_qs(opt.n, opt.k, cost, {opt.theta, opt.steps}, t);
    std::vector<ResultRecord> records;
    for (std::size_t i = 0; i < traj.size(); ++i)
        records.push_back({"simulate_qs", opt.n, opt.k, opt.m_text.empty() ? 0 : clause_count(opt),
                           opt.seed, static_cast<std::int64_t>(i), "p_t", traj[i], 0.0});
    std::printf("p_t after %d iterations: %.6f (peak %.6f)\n", opt.steps, traj.back(),
                *std::max_element(traj.begin(), traj.end()));
    emit_if_requested(records, opt);
    return 0;
}

int cmd_simulate_aqs(const CliOptions& opt)
{
    const auto [cost, t] = single_cost(opt);
    const AqsSchedule schedule =
        opt.variant == "half" ? AqsSchedule::half_turn : AqsSchedule::full_turn;
    if (opt.steps <= 0) {
        const IterationResult r =
            find_min_threshold_steps(opt.n, opt.k, cost, opt.threshold, t, schedule);
        std::printf("minimal steps for p_t >= %g: p = %d (p_t = %.6f)\n", opt.threshold, r.p,
                    r.prob);
        return 0;
    }
    const double prob = run_aqs(opt.n, opt.k, cost, {opt.steps}, t, schedule);
    std::printf("p_t after %d annealing steps (%s-turn ramp): %.6f\n", opt.steps,
                opt.variant == "half" ? "half" : "full", prob);
    emit_if_requested({{"simulate_aqs", opt.n, opt.k, opt.m_text.empty() ? 0 : clause_count(opt),
                        opt.seed, 0, "p_t", prob, 0.0}},
                      opt);
    return 0;
}

int cmd_gap(const CliOptions& opt)
{
    const int k = opt.k <= 0 ? opt.n : opt.k;
    if (opt.points < 2)
        throw std::invalid_argument("--points must be at least 2");
    std::vector<double> grid(opt.points);
    for (int i = 0; i < opt.points; ++i)
        grid[i] = static_cast<double>(i) / (opt.points - 1);
    const GapScan scan = gap_scan(opt.n, k, build_Hk(opt.n, k, 0), grid);
    if (opt.out.empty()) {
        write_gap_csv(opt.n, k, scan, std::cout);
    } else {
        std::ofstream out(opt.out);
        if (!out)
            throw std::runtime_error("cannot open " + opt.out);
        write_gap_csv(opt.n, k, scan, out);
        const SpectrumResult& best = scan.points[scan.argmin];
        std::printf("wrote %s; minimal gap %.6g at s = %.3f\n", opt.out.c_str(), best.gap,
                    best.s ? *best.s : -1.0);
    }
    return 0;
}

int cmd_classical(const CliOptions& opt)
{
    SplitRng targets(derive_seed(opt.seed, 0x7a26e7));
    const std::uint64_t mask = opt.n >= 64 ? ~0ULL : (1ULL << opt.n) - 1;
    int hits = 0;
    long long restarts = 0, queries = 0;
    for (int trial = 0; trial < opt.trials; ++trial) {
        const std::uint64_t t = targets.next() & mask;
        const LocalSearchResult r =
            classical_local_search(make_fk_oracle(opt.n, opt.k, t), opt.n, opt.k,
                                   derive_seed(opt.seed, 1, trial));
        hits += r.assignment == t ? 1 : 0;
        restarts += r.restarts;
        queries += r.queries;
    }
    std::printf("targets found: %d/%d; mean restarts %.3f; mean oracle queries %.1f\n", hits,
                opt.trials, double(restarts) / opt.trials, double(queries) / opt.trials);
    return hits == opt.trials ? 0 : 2;
}

int cmd_solve(const CliOptions& opt)
{
    CliOptions batch = opt;
    batch.n_list = {opt.n};
    const auto records = run_solve(batch_config(batch, ExperimentKind::solve));
    int verified = 0, fallbacks = 0;
    double rounds = 0;
    for (const auto& r : records) {
        if (r.metric == "satisfied")
            verified += r.value == 1.0 ? 1 : 0;
        if (r.metric == "used_fallback")
            fallbacks += r.value > 0.5 ? 1 : 0;
        if (r.metric == "aqs_rounds")
            rounds += r.value;
    }
    std::printf("verified %d/%d instances; %d used the amplitude-amplification fallback; "
                "mean annealing rounds %.2f\n",
                verified, opt.trials, fallbacks, rounds / opt.trials);
    emit_if_requested(records, opt);
    return verified == opt.trials ? 0 : 2;
}

int cmd_table(const CliOptions& opt, ExperimentKind kind)
{
    const ExperimentConfig cfg = batch_config(opt, kind);
    const TableReport report =
        kind == ExperimentKind::table1 ? run_table1(cfg) : run_table2(cfg);
    std::fputs(report.rendered.c_str(), stdout);
    emit_if_requested(report.records, opt);
    return report.within_tolerance ? 0 : 2;
}

int cmd_density_sweep(const CliOptions& opt)
{
    const ExperimentKind kind = opt.variant == "aqs" ? ExperimentKind::fig_aqs_density
                                                     : ExperimentKind::fig_qs_density;
    const ExperimentConfig cfg = batch_config(opt, kind);
    const auto records = run_density_sweep(cfg);
    std::map<std::pair<int, std::int64_t>, std::vector<double>> cells;
    int failures = 0;
    for (const auto& r : records) {
        if (r.metric == "p_t")
            cells[{r.n, r.m}].push_back(r.value);
        if (r.metric == "failure")
            ++failures;
    }
    std::printf("success-mass medians over %d instances per cell (%s variant)\n",
                cfg.instance_count, opt.variant.c_str());
    for (auto& [key, values] : cells)
        std::printf("  n = %2d, m = %5lld: median p_t = %.4f\n", key.first,
                    static_cast<long long>(key.second), median(values));
    if (failures > 0)
        std::printf("  %d instance generations/simulations failed and were recorded\n", failures);
    emit_if_requested(records, opt);
    return 0;
}

int cmd_concentration(const CliOptions& opt)
{
    CliOptions o = opt;
    if (o.m_text.empty())
        o.m_text = "n2";
    const auto records = run_concentration(batch_config(o, ExperimentKind::concentration));
    std::map<std::int64_t, std::map<std::string, std::pair<double, int>>> sums;
    for (const auto& r : records) {
        auto& [sum, count] = sums[r.m][r.metric];
        sum += r.value;
        ++count;
    }
    for (const auto& [m, metrics] : sums) {
        std::printf("m = %lld:\n", static_cast<long long>(m));
        for (const auto& [metric, agg] : metrics)
            std::printf("  mean %-16s = %.4f\n", metric.c_str(), agg.first / agg.second);
    }
    emit_if_requested(records, opt);
    return 0;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"k-local quantum search and annealing on random k-SAT instances"};
    app.require_subcommand(1);
    app.fallthrough();  // global flags may follow the subcommand name
    app.set_config("--config", "", "flat key=value config file; subcommand options in [sections]");

    CliOptions opt;
    const auto add_common = [&](CLI::App* cmd, bool multi_n) {
        cmd->configurable();  // allow [section] blocks in --config files
        if (multi_n)
            cmd->add_option("--n", opt.n_list, "problem sizes (qubit counts)");
        else
            cmd->add_option("--n", opt.n, "problem size (qubit count)")->required();
        cmd->add_option("--k", opt.k, "locality / clause width")->capture_default_str();
        cmd->add_option("--seed", opt.seed, "root seed")->capture_default_str();
        cmd->add_option("--out", opt.out, "output directory (batch) or file (single)");
        cmd->add_option("--format", opt.formats, "outputs to emit")
            ->check(CLI::IsMember({"csv", "json", "svg"}));
        cmd->add_option("--jobs", opt.jobs, "worker threads (0 = hardware)")->capture_default_str();
    };

    auto* generate = app.add_subcommand("generate", "write a random instance as DIMACS CNF");
    add_common(generate, false);
    generate->add_option("--m", opt.m_text, "clause count (e.g. 196, 2.5n, 4n2)")->required();
    generate->add_option("--model", opt.model, "clause distribution")
        ->check(CLI::IsMember({"F", "Fs", "Ff"}))
        ->capture_default_str();

    auto* sim_qs = app.add_subcommand("simulate-qs", "fixed-angle search simulation");
    add_common(sim_qs, false);
    sim_qs->add_option("--m", opt.m_text, "simulate a planted instance with this clause count");
    sim_qs->add_option("--theta", opt.theta, "phase angle")->capture_default_str();
    sim_qs->add_option("--steps", opt.steps, "iterations (0 = stop at first local maximum)")
        ->capture_default_str();

    auto* sim_aqs = app.add_subcommand("simulate-aqs", "annealing schedule simulation");
    add_common(sim_aqs, false);
    sim_aqs->add_option("--m", opt.m_text, "simulate a planted instance with this clause count");
    sim_aqs->add_option("--steps", opt.steps, "schedule length (0 = search threshold count)")
        ->capture_default_str();
    sim_aqs->add_option("--threshold", opt.threshold, "target success probability")
        ->capture_default_str();
    sim_aqs->add_option("--variant", opt.variant, "ramp convention: full or half turn")
        ->check(CLI::IsMember({"full", "half"}))
        ->default_str("full");

    auto* gap = app.add_subcommand("gap", "spectral-gap scan across the interpolation weight");
    add_common(gap, false);
    gap->add_option("--points", opt.points, "grid points on [0, 1]")->capture_default_str();

    auto* classical = app.add_subcommand("classical", "restart-and-ascend baseline");
    add_common(classical, false);
    classical->add_option("--trials", opt.trials, "number of hidden targets")
        ->capture_default_str();

    auto* solve = app.add_subcommand("solve", "end-to-end solver on satisfiable instances");
    add_common(solve, false);
    solve->add_option("--m", opt.m_text, "clause count spec")->required();
    solve->add_option("--trials", opt.trials, "instances to solve")->capture_default_str();

    auto* table1 = app.add_subcommand("table1", "first-local-maximum table vs baselines");
    add_common(table1, true);
    table1->add_option("--theta", opt.theta, "phase angle")->capture_default_str();

    auto* table2 = app.add_subcommand("table2", "threshold annealing-step table vs baselines");
    add_common(table2, true);
    table2->add_option("--threshold", opt.threshold, "success threshold")->capture_default_str();

    auto* density = app.add_subcommand("density-sweep", "success mass across clause densities");
    add_common(density, true);
    density->add_option("--c", opt.c_list, "density coefficients");
    density->add_option("--trials", opt.trials, "instances per cell")->capture_default_str();
    density->add_option("--theta", opt.theta, "phase angle (qs variant)")->capture_default_str();
    density->add_option("--variant", opt.variant, "qs (m = c n^2) or aqs (m = c n)")
        ->check(CLI::IsMember({"qs", "aqs"}))
        ->capture_default_str();

    auto* concentration = app.add_subcommand("concentration", "cost-diagonal concentration study");
    add_common(concentration, true);
    concentration->add_option("--m", opt.m_text, "clause count spec (also runs 4x)")
        ->capture_default_str();
    concentration->add_option("--trials", opt.trials, "instances per cell")->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;  // help/version exit clean, parse errors are runtime errors
    }

    try {
        if (generate->parsed())
            return cmd_generate(opt);
        if (sim_qs->parsed())
            return cmd_simulate_qs(opt);
        if (sim_aqs->parsed())
            return cmd_simulate_aqs(opt);
        if (gap->parsed())
            return cmd_gap(opt);
        if (classical->parsed())
            return cmd_classical(opt);
        if (solve->parsed())
            return cmd_solve(opt);
        if (table1->parsed())
            return cmd_table(opt, ExperimentKind::table1);
        if (table2->parsed())
            return cmd_table(opt, ExperimentKind::table2);
        if (density->parsed())
            return cmd_density_sweep(opt);
        if (concentration->parsed())
            return cmd_concentration(opt);
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
    return 1;
}
