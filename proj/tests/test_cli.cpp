// End-to-end checks of the fragsim binary: formats, determinism, exit codes.
// The binary path arrives in FRAGSIM_BIN and a scratch directory in FRAGSIM_TMP.

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

namespace fs = std::filesystem;

namespace {

int failures = 0;

#define EXPECT(cond, msg)                                                      \
    do {                                                                       \
        if (!(cond)) {                                                         \
            std::cerr << "[FAIL] " << __FILE__ << ":" << __LINE__ << " " << msg << "\n"; \
            ++failures;                                                        \
        }                                                                      \
    } while (0)

std::string bin;
fs::path tmp;

int run_cmd(const std::string& args) {
    const std::string cmd = bin + " " + args + " >/dev/null 2>&1";
    const int rc = std::system(cmd.c_str());
    return WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

} // namespace

int main() {
    const char* env_bin = std::getenv("FRAGSIM_BIN");
    const char* env_tmp = std::getenv("FRAGSIM_TMP");
    if (!env_bin || !env_tmp) {
        std::cerr << "FRAGSIM_BIN / FRAGSIM_TMP not set\n";
        return 1;
    }
    bin = env_bin;
    tmp = env_tmp;
    fs::remove_all(tmp);
    fs::create_directories(tmp);

    const std::string base = " --alpha 0.2 --alg ls --events 30000 --warmup 10000 --seed 42";

    // run: byte-identical repeated output, json parses loosely
    EXPECT(run_cmd("run" + base + " --out " + (tmp / "a.json").string()) == 0, "run exit 0");
    EXPECT(run_cmd("run" + base + " --out " + (tmp / "b.json").string()) == 0, "run exit 0");
    const std::string a = slurp(tmp / "a.json");
    EXPECT(!a.empty(), "summary written");
    EXPECT(a == slurp(tmp / "b.json"), "identical config gives byte-identical output");
    EXPECT(a.find("\"mean_r\"") != std::string::npos, "summary carries mean_r");
    EXPECT(a.find("xoshiro256++") != std::string::npos, "summary records the generator");

    // flat format
    EXPECT(run_cmd("run" + base + " --format csv --out " + (tmp / "a.kv").string()) == 0,
           "flat format exit 0");
    const std::string kv = slurp(tmp / "a.kv");
    EXPECT(kv.find("mean_r,") != std::string::npos, "flat format has mean_r");
    EXPECT(kv.find("pmf.gap_post_departure,") != std::string::npos, "flat format has pmfs");

    // trace
    EXPECT(run_cmd("run --alpha 0.3 --alg cs --events 500 --warmup 100 --seed 7 --out " +
                   (tmp / "t.json").string() + " --trace " + (tmp / "t.tsv").string()) == 0,
           "trace exit 0");
    {
        std::ifstream in(tmp / "t.tsv");
        std::string header;
        std::getline(in, header);
        EXPECT(header == "# k t_k a d0 d1 d2 j g_minus r g f sigma", "trace header");
        int lines = 0;
        std::string line;
        while (std::getline(in, line)) ++lines;
        EXPECT(lines == 500, "one trace line per departure");
    }

    // sweep: rows, schema, determinism across worker counts
    const std::string sweep_base = "sweep --alpha 0.2 0.4 --alg ls lfs --reps 2 --events 8000 "
                                   "--warmup 2000 --seed 11";
    EXPECT(run_cmd(sweep_base + " --workers 1 --out " + (tmp / "s1").string()) == 0, "sweep w1");
    EXPECT(run_cmd(sweep_base + " --workers 4 --out " + (tmp / "s4").string()) == 0, "sweep w4");
    const std::string csv1 = slurp(tmp / "s1" / "sweep.csv");
    EXPECT(csv1 == slurp(tmp / "s4" / "sweep.csv"), "sweep.csv independent of worker count");
    EXPECT(csv1.rfind("alpha,alg,mean_r,", 0) == 0, "sweep.csv schema");
    EXPECT(fs::exists(tmp / "s1" / "summary_a0.2_ls_r0.json"), "per-cell summary files");
    {
        int rows = 0;
        std::istringstream in(csv1);
        std::string line;
        while (std::getline(in, line)) ++rows;
        EXPECT(rows == 1 + 4, "one row per (alpha, alg)");
    }

    // oracle: format and comparison path
    EXPECT(run_cmd("oracle --alpha 1.0 0.5 --out " + (tmp / "o.txt").string()) == 0, "oracle");
    {
        const std::string o = slurp(tmp / "o.txt");
        EXPECT(o.rfind("# alpha expected_r method std_error terms_used", 0) == 0,
               "oracle header");
        EXPECT(o.find("1.392211") != std::string::npos, "closed-form value at alpha 1");
        EXPECT(o.find("exact") != std::string::npos, "exact method tag");
    }
    // comparison against a real sweep at alpha 0.2 (2/alpha scale, 1.5% slack at this size)
    EXPECT(run_cmd("sweep --alpha 0.25 --alg ls --reps 1 --events 120000 --warmup 40000 "
                   "--seed 5 --out " + (tmp / "sc").string()) == 0, "sweep for compare");
    EXPECT(run_cmd("oracle --alpha 0.25 --compare " + (tmp / "sc" / "sweep.csv").string() +
                   " --tol 0.015 --out " + (tmp / "oc.txt").string()) == 0, "oracle compare ok");
    EXPECT(run_cmd("oracle --alpha 0.25 --compare " + (tmp / "sc" / "sweep.csv").string() +
                   " --tol 0.00001 --out " + (tmp / "oc2.txt").string()) == 1,
           "oracle compare breach exits 1");

    // check: clean pass, corruption detector, exit codes
    EXPECT(run_cmd("check --events 20000 --seed 3") == 0, "check exit 0");
    EXPECT(run_cmd("check --events 5000 --seed 3 --inject-corruption 1000") == 1,
           "corrupted state detected");
    EXPECT(run_cmd("walk") == 2, "unknown subcommand is a usage error");
    EXPECT(run_cmd("run --alpha 2.0 --out " + (tmp / "x.json").string()) == 2,
           "invalid alpha is a usage error");
    EXPECT(run_cmd("run" + base + " --out /nonexistent-dir/x.json") == 3,
           "unwritable path is an io error");

    if (failures == 0) std::puts("cli: all checks passed");
    return failures == 0 ? 0 : 1;
}
