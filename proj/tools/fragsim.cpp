// fragsim: at-capacity spectrum fragmentation simulator.
//
// Subcommands:
//   run     one experiment, summary to a file
//   sweep   alpha x algorithm grid on a worker pool, per-cell summaries + sweep.csv
//   oracle  analytic maximum-throughput table, optionally compared to a sweep
//   check   randomized invariant sweep with every assertion enabled
//
// Exit codes: 0 success, 1 model/assertion failure, 2 usage error, 3 I/O error.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "fragsim/oracle.hpp"
#include "fragsim/summary_io.hpp"
#include "fragsim/sweep.hpp"

namespace fs = std::filesystem;
using namespace fragsim;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitModel = 1;
constexpr int kExitUsage = 2;
constexpr int kExitIo = 3;

struct IoError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

std::ofstream open_out(const std::string& path) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot open for writing: " + path);
    return out;
}

void write_summary(const SummaryStats& s, const std::string& path, const std::string& format) {
    std::ofstream out = open_out(path);
    if (format == "csv")
        write_summary_flat(out, s);
    else
        out << summary_to_json(s);
    if (!out.good()) throw IoError("write failed: " + path);
}

std::string cell_file_name(const SweepCell& cell) {
    char buf[96];
    std::snprintf(buf, sizeof(buf), "summary_a%.12g_%s_r%d.json", cell.alpha,
                  algorithm_name(cell.algorithm), cell.replication);
    return buf;
}

int cmd_run(const RunConfig& cfg, const std::string& out_path, const std::string& format,
            const std::string& trace_path) {
    SummaryStats stats;
    if (!trace_path.empty()) {
        std::ofstream trace = open_out(trace_path);
        RunConfig traced = cfg;
        traced.record_trace = true;
        stats = run_simulation(traced, &trace);
    } else {
        stats = run_simulation(cfg);
    }
    write_summary(stats, out_path, format);
    return kExitOk;
}

int cmd_sweep(const SweepSpec& spec, const std::string& out_dir, const std::string& format) {
    fs::create_directories(out_dir);
    const auto cells = run_sweep(spec);
    for (const auto& cell : cells)
        write_summary(cell.stats, (fs::path(out_dir) / cell_file_name(cell)).string(), format);
    const auto rows = aggregate_sweep(spec, cells);
    std::ofstream out = open_out((fs::path(out_dir) / "sweep.csv").string());
    write_sweep_csv(out, rows);
    if (!out.good()) throw IoError("write failed: sweep.csv");
    return kExitOk;
}

struct CompareRow {
    double alpha;
    double mean_r;
};

std::vector<CompareRow> read_sweep_mean_r(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot read: " + path);
    std::string line;
    if (!std::getline(in, line)) throw IoError("empty csv: " + path);
    std::vector<CompareRow> rows;
    while (std::getline(in, line)) {
        std::istringstream row(line);
        std::string field;
        std::vector<std::string> fields;
        while (std::getline(row, field, ',')) fields.push_back(field);
        if (fields.size() < 3) continue;
        rows.push_back({std::stod(fields[0]), std::stod(fields[2])});
    }
    return rows;
}

int cmd_oracle(const std::vector<double>& alphas, const std::string& out_path,
               const std::string& compare_csv, double compare_tol, const std::string& method,
               std::uint64_t mc_samples, std::uint64_t seed) {
    OracleOptions opts;
    opts.force_monte_carlo = method == "mc";
    opts.mc_paths = mc_samples;
    opts.seed = seed;

    std::vector<OracleResult> results;
    results.reserve(alphas.size());
    for (double a : alphas) results.push_back(expected_r(a, opts));

    std::ostream* os = &std::cout;
    std::ofstream file;
    if (!out_path.empty()) {
        file = open_out(out_path);
        os = &file;
    }
    *os << "# alpha expected_r method std_error terms_used\n";
    char buf[160];
    for (const auto& r : results) {
        std::snprintf(buf, sizeof(buf), "%.12g %.10g %s %.6g %d\n", r.alpha, r.expected_r,
                      oracle_method_name(r.method), r.std_error, r.terms_used);
        *os << buf;
    }

    if (!compare_csv.empty()) {
        const auto rows = read_sweep_mean_r(compare_csv);
        bool ok = true;
        for (const auto& r : results)
            for (const auto& row : rows) {
                if (std::abs(row.alpha - r.alpha) > 1e-12) continue;
                const double rel = std::abs(row.mean_r - r.expected_r) / r.expected_r;
                std::fprintf(stderr, "compare alpha=%.6g sim=%.6f oracle=%.6f rel=%.4f%%\n",
                             r.alpha, row.mean_r, r.expected_r, 100 * rel);
                if (rel > compare_tol) ok = false;
            }
        if (!ok) {
            std::fprintf(stderr, "simulation/oracle mismatch beyond %.2f%%\n", 100 * compare_tol);
            return kExitModel;
        }
    }
    return kExitOk;
}

int cmd_check(std::uint64_t events, std::uint64_t seed, const std::vector<double>& alphas,
              std::uint64_t corrupt_after) {
    const std::vector<Algorithm> algs{Algorithm::LinearScan, Algorithm::CircularScan,
                                      Algorithm::LargestFirstScan};
    for (double alpha : alphas)
        for (Algorithm alg : algs) {
            RunConfig cfg;
            cfg.alpha = alpha;
            cfg.algorithm = alg;
            cfg.seed = seed;
            cfg.deep_checks = true;
            cfg.deep_check_interval = 10'000;
            Engine eng(cfg);
            DepartureRecord rec;
            try {
                for (std::uint64_t k = 1; k <= events; ++k) {
                    if (corrupt_after != 0 && k == corrupt_after)
                        eng.inject_corruption_for_tests();
                    rec = eng.step();
                }
            } catch (const SimError& e) {
                std::fprintf(stderr, "violation (alpha=%.6g alg=%s): %s\n", alpha,
                             algorithm_name(alg), e.what());
                std::ostringstream line;
                write_trace_line(line, rec);
                std::fputs(line.str().c_str(), stderr);
                return kExitModel;
            }
        }
    std::printf("check passed: %llu events x %zu cells, 0 violations\n",
                static_cast<unsigned long long>(events), alphas.size() * algs.size());
    return kExitOk;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"at-capacity spectrum fragmentation simulator"};
    app.require_subcommand(1);
    app.set_config("--config");

    // run
    auto* run = app.add_subcommand("run", "run one experiment");
    RunConfig cfg;
    std::string alg_name = "ls";
    std::string out_path, format = "json", trace_path;
    run->add_option("--alpha", cfg.alpha, "max request size in (0,1]")->capture_default_str();
    run->add_option("--alg", alg_name, "ls|cs|lfs")->capture_default_str();
    run->add_option("--events", cfg.total_events, "departures to simulate")
        ->capture_default_str();
    run->add_option("--warmup", cfg.warmup_events, "events excluded from statistics")
        ->capture_default_str();
    run->add_option("--seed", cfg.seed, "rng seed")->capture_default_str();
    run->add_option("--out", out_path, "output file")->required();
    run->add_option("--format", format, "csv|json")->check(CLI::IsMember({"csv", "json"}));
    run->add_option("--trace", trace_path, "write a per-departure event trace");
    run->add_flag("--deep-checks", cfg.deep_checks, "revalidate the full state periodically");

    // sweep
    auto* sweep = app.add_subcommand("sweep", "run an alpha x algorithm grid");
    SweepSpec spec;
    std::vector<std::string> sweep_algs{"ls", "cs", "lfs"};
    std::string out_dir = "sweep_out", sweep_format = "json";
    sweep->add_option("--alpha", spec.alphas, "alpha grid")->required()->expected(-1);
    sweep->add_option("--alg", sweep_algs, "algorithms (ls cs lfs)")->expected(-1);
    sweep->add_option("--reps", spec.replications, "replications per cell")
        ->capture_default_str();
    sweep->add_option("--events", spec.events, "departures per cell")->capture_default_str();
    sweep->add_option("--warmup", spec.warmup, "warm-up events per cell")->capture_default_str();
    sweep->add_option("--seed", spec.base_seed, "base seed for cell derivation")
        ->capture_default_str();
    sweep->add_option("--workers", spec.workers, "parallel cells")->capture_default_str();
    sweep->add_option("--out", out_dir, "output directory")->capture_default_str();
    sweep->add_option("--format", sweep_format, "per-cell summary format")
        ->check(CLI::IsMember({"csv", "json"}));

    // oracle
    auto* oracle = app.add_subcommand("oracle", "analytic maximum-throughput table");
    std::vector<double> oracle_alphas;
    std::string oracle_out, compare_csv, oracle_method = "auto";
    double compare_tol = 0.01;
    std::uint64_t mc_samples = 10'000'000, oracle_seed = 1;
    oracle->add_option("--alpha", oracle_alphas, "alpha values")->required()->expected(-1);
    oracle->add_option("--out", oracle_out, "output file (default stdout)");
    oracle->add_option("--compare", compare_csv, "sweep.csv to compare against");
    oracle->add_option("--tol", compare_tol, "relative tolerance for --compare")
        ->capture_default_str();
    oracle->add_option("--method", oracle_method, "auto|mc")
        ->check(CLI::IsMember({"auto", "mc"}));
    oracle->add_option("--mc-samples", mc_samples, "monte-carlo paths")->capture_default_str();
    oracle->add_option("--seed", oracle_seed, "monte-carlo seed")->capture_default_str();

    // check
    auto* check = app.add_subcommand("check", "invariant suite with assertions enabled");
    std::uint64_t check_events = 100'000, check_seed = 1, corrupt_after = 0;
    std::vector<double> check_alphas{0.05, 0.3, 0.8};
    check->add_option("--events", check_events, "events per cell")->capture_default_str();
    check->add_option("--seed", check_seed, "rng seed")->capture_default_str();
    check->add_option("--alpha", check_alphas, "alpha values")->expected(-1);
    check->add_option("--inject-corruption", corrupt_after,
                      "corrupt the state after N events (detector test hook)")
        ->group("");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e); // --help
        app.exit(e);
        return kExitUsage;
    }

    try {
        if (*run) {
            cfg.algorithm = parse_algorithm(alg_name);
            cfg.validate();
            return cmd_run(cfg, out_path, format, trace_path);
        }
        if (*sweep) {
            spec.algorithms.clear();
            for (const auto& name : sweep_algs) spec.algorithms.push_back(parse_algorithm(name));
            return cmd_sweep(spec, out_dir, sweep_format);
        }
        if (*oracle)
            return cmd_oracle(oracle_alphas, oracle_out, compare_csv, compare_tol, oracle_method,
                              mc_samples, oracle_seed);
        if (*check) return cmd_check(check_events, check_seed, check_alphas, corrupt_after);
    } catch (const IoError& e) {
        std::fprintf(stderr, "io error: %s\n", e.what());
        return kExitIo;
    } catch (const std::invalid_argument& e) {
        std::fprintf(stderr, "usage error: %s\n", e.what());
        return kExitUsage;
    } catch (const SimError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitModel;
    }
    return kExitUsage;
}
