// Acceptance suite. Prints one PASS/FAIL line per criterion.
//
//   alc_acceptance            run all criteria
//   alc_acceptance 4 5        run only criteria 4 and 5
//
// Exit status is 0 only when every selected criterion passes.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iomanip>
#include <iostream>
#include <limits>
#include <map>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <sys/wait.h>
#include <vector>

#include "alc/alc.hpp"
#include "../oracles.hpp"

using namespace alc;

namespace {

struct Outcome {
    bool pass = false;
    std::string detail;
};

std::string fixed(double v, int digits = 4) {
    std::ostringstream ss;
    ss << std::fixed << std::setprecision(digits) << v;
    return ss.str();
}

// 1 ------------------------------------------------------------------------

Outcome likelihood_values() {
    const double pair = cluster_likelihood({2, 3.0}).value;
    std::mt19937_64 rng(1);
    const auto corr = oracle::random_corr(25, 40, rng);
    const double singletons = total_likelihood(Partition::singletons(25), corr).value;
    const bool ok = std::abs(pair - 0.143841) <= 1e-6 && singletons == 0.0;
    return {ok, "L(2,3)=" + fixed(pair, 9) + " (want 0.143841 +/- 1e-6), all-singleton total=" + format_double(singletons) + " (want exactly 0)"};
}

// 2 ------------------------------------------------------------------------

Outcome delta_consistency() {
    std::mt19937_64 rng(2);
    int cases = 0;
    int skipped = 0;
    double worst = 0;
    while (cases < 1000) {
        const auto corr = oracle::random_corr(20, 30, rng);
        auto state = EngineState::init(corr);

        // Random partition built through the incremental store.
        const std::size_t merges = std::uniform_int_distribution<std::size_t>(0, 17)(rng);
        for (std::size_t m = 0; m < merges; ++m) {
            const auto labels = state.labels();
            std::uniform_int_distribution<std::size_t> pick(0, labels.size() - 1);
            const auto a = pick(rng);
            auto b = pick(rng);
            if (a == b) {
                b = (a + 1) % labels.size();
            }
            state.apply_merge(labels[a], labels[b]);
        }

        const auto labels = state.labels();
        std::uniform_int_distribution<std::size_t> pick(0, labels.size() - 1);
        const auto ia = pick(rng);
        auto ib = pick(rng);
        if (ia == ib) {
            ib = (ia + 1) % labels.size();
        }
        const Label a = labels[ia];
        const Label b = labels[ib];

        oracle::Clusters before;
        for (auto l : labels) {
            before.push_back(state.members(l));
        }
        auto after = before;
        after[ia].insert(after[ia].end(), before[ib].begin(), before[ib].end());
        after.erase(after.begin() + static_cast<std::ptrdiff_t>(ib));

        double scratch = 0;
        double incremental = 0;
        try {
            scratch = total_likelihood(after, corr).value - total_likelihood(before, corr).value;
            incremental = delta_merge_case2(state.stats(a), state.stats(b), state.aggregated(a, b)).value;
        } catch (const ConstraintViolation&) {
            ++skipped;
            continue;
        }
        worst = std::max(worst, std::abs(scratch - incremental));
        ++cases;
    }
    return {worst <= 1e-9, std::to_string(cases) + " cases (" + std::to_string(skipped) + " outside the likelihood domain redrawn), max |incremental - scratch| = " + format_double(worst) + " (want <= 1e-9)"};
}

// 3 ------------------------------------------------------------------------

Outcome oracle_equivalence() {
    std::mt19937_64 rng(3);
    int agree = 0;
    int exceed = 0;
    const int instances = 200;
    for (int t = 0; t < instances; ++t) {
        const std::size_t n = std::uniform_int_distribution<std::size_t>(6, 8)(rng);
        const std::size_t first = std::uniform_int_distribution<std::size_t>(2, n - 2)(rng);
        std::vector<std::size_t> block_of(n);
        for (std::size_t i = 0; i < n; ++i) {
            block_of[i] = i < first ? 0 : 1;
        }
        std::shuffle(block_of.begin(), block_of.end(), rng);
        const auto corr = oracle::block_corr(block_of, 0.9);

        EngineConfig cfg;
        cfg.seed = rng();
        const auto greedy = run(corr, cfg);
        const auto best = exhaustive_oracle(corr);
        agree += greedy.partition.same_as(best.partition);
        exceed += greedy.likelihood > best.likelihood + 1e-12;
    }
    const double rate = static_cast<double>(agree) / instances;
    return {rate >= 0.95 && exceed == 0, "greedy equals exhaustive maximiser on " + std::to_string(agree) + "/" + std::to_string(instances) + " (want >= 95%), greedy above oracle " + std::to_string(exceed) + " times (want 0)"};
}

// 4 and 5 ------------------------------------------------------------------

const std::vector<double> grid_g{0.05, 0.1, 0.3, 1.0};
const std::vector<std::size_t> grid_d{20, 60, 250};
constexpr int grid_seeds = 10;

double mean_ari(double g, std::size_t length) {
    double total = 0;
    for (int s = 0; s < grid_seeds; ++s) {
        GeneratorSpec spec{std::vector<std::size_t>(10, 50), {g}, length, std::nullopt, static_cast<std::uint64_t>(1000 + s)};
        const auto generated = gen_correlated(spec);
        EngineConfig cfg;
        cfg.seed = static_cast<std::uint64_t>(s);
        total += adjusted_rand_index(run(estimate_correlation(generated.data), cfg).partition, generated.truth).ari;
    }
    return total / grid_seeds;
}

std::map<std::pair<double, std::size_t>, double>& grid() {
    static std::map<std::pair<double, std::size_t>, double> cells;
    return cells;
}

double cell(double g, std::size_t length) {
    auto& cells = grid();
    const auto key = std::make_pair(g, length);
    if (!cells.count(key)) {
        cells[key] = mean_ari(g, length);
    }
    return cells[key];
}

Outcome table_corners() {
    const double a = cell(1.0, 250);
    const double b = cell(1.0, 20);
    const double c = cell(0.05, 20);
    const double d = cell(0.3, 250);
    const bool ok = a >= 0.95 && std::abs(b - 0.61) <= 0.15 && c <= 0.15 && std::abs(d - 0.90) <= 0.10;
    return {ok, "N=500, mean ARI over 10 seeds: (a) g=1 D=250 " + fixed(a, 3) + " (want >= 0.95); (b) g=1 D=20 " + fixed(b, 3) + " (want 0.61 +/- 0.15); (c) g=0.05 D=20 " + fixed(c, 3) + " (want <= 0.15); (d) g=0.3 D=250 " + fixed(d, 3) + " (want 0.90 +/- 0.10)"};
}

// Non-decreasing with at most one adjacent drop, and that drop no larger than 0.03.
bool nearly_monotone(const std::vector<double>& v) {
    int drops = 0;
    for (std::size_t i = 1; i < v.size(); ++i) {
        if (v[i] < v[i - 1]) {
            ++drops;
            if (v[i - 1] - v[i] > 0.03) {
                return false;
            }
        }
    }
    return drops <= 1;
}

Outcome grid_ordering() {
    bool ok = true;
    std::string detail;
    for (auto length : grid_d) {
        std::vector<double> row;
        for (auto g : grid_g) {
            row.push_back(cell(g, length));
        }
        const bool mono = nearly_monotone(row);
        ok = ok && mono;
        detail += "D=" + std::to_string(length) + " over g {";
        for (std::size_t i = 0; i < row.size(); ++i) {
            detail += (i ? " " : "") + fixed(row[i], 3);
        }
        detail += mono ? "} ok; " : "} NOT monotone; ";
    }
    for (auto g : grid_g) {
        std::vector<double> col;
        for (auto length : grid_d) {
            col.push_back(cell(g, length));
        }
        const bool mono = nearly_monotone(col);
        ok = ok && mono;
        detail += "g=" + format_double(g) + " over D {";
        for (std::size_t i = 0; i < col.size(); ++i) {
            detail += (i ? " " : "") + fixed(col[i], 3);
        }
        detail += mono ? "} ok; " : "} NOT monotone; ";
    }
    detail.resize(detail.size() - 2);
    return {ok, detail};
}

// 6 ------------------------------------------------------------------------

Outcome white_noise() {
    std::vector<double> sizes, mean_kn;
    std::vector<Partition> pooled;
    for (std::size_t n = 100; n <= 1000; n += 100) {
        double kn = 0;
        for (int s = 0; s < 10; ++s) {
            const auto data = gen_white_noise(n, 100, 3.0, 100 * n + static_cast<std::uint64_t>(s));
            EngineConfig cfg;
            cfg.seed = static_cast<std::uint64_t>(s);
            const auto part = run(estimate_correlation(data), cfg).partition;
            kn += static_cast<double>(part.cluster_count()) / static_cast<double>(n);
            pooled.push_back(part);
        }
        sizes.push_back(static_cast<double>(n));
        mean_kn.push_back(kn / 10);
    }
    const double rho = spearman_correlation(sizes, mean_kn);
    const auto stats = noise_statistics(pooled);
    const bool ok = rho <= -0.9 && stats.mode >= 3 && stats.mode <= 7;
    return {ok, "mean K/N from " + fixed(mean_kn.front(), 3) + " (N=100) to " + fixed(mean_kn.back(), 3) + " (N=1000), Spearman " + fixed(rho, 3) + " (want <= -0.9), pooled size mode " + std::to_string(stats.mode) + " (want 3..7)"};
}

// 7 ------------------------------------------------------------------------

Outcome bootstrap_threshold() {
    GeneratorSpec spec{std::vector<std::size_t>(10, 200), {1.0}, 20, std::nullopt, 7};
    const auto generated = gen_correlated(spec);
    const auto corr = estimate_correlation(generated.data);

    auto trajectory = [&](double omega) {
        BootstrapConfig cfg;
        cfg.q = 0.1;
        cfg.omega = omega;
        cfg.max_iterations = 1000;
        cfg.seed = 3;
        cfg.ground_truth = generated.truth;
        cfg.ari_stop = std::numeric_limits<double>::infinity();
        cfg.record_every = 10;
        return run_bootstrap(corr, cfg, generated.data.cols());
    };
    const auto high = trajectory(0.75);
    const auto low = trajectory(0.5);

    double best = -1;
    std::size_t reached_at = 0;
    for (const auto& p : high.trajectory) {
        if (p.ari > best) {
            best = p.ari;
        }
        if (!reached_at && p.ari >= 0.8) {
            reached_at = p.iteration;
        }
    }
    int checkpoints = 0;
    int dominated = 0;
    for (std::size_t k = 0; k < high.trajectory.size() && k < low.trajectory.size(); ++k) {
        if (high.trajectory[k].iteration >= 500) {
            ++checkpoints;
            dominated += high.trajectory[k].ari > low.trajectory[k].ari;
        }
    }
    const auto& last_high = high.trajectory.back();
    const auto& last_low = low.trajectory.back();
    const bool ok = reached_at > 0 && dominated == checkpoints && checkpoints > 0;
    return {ok, "N=2000, D=20, n=" + std::to_string(high.sample_size) + ": omega=0.75 best ARI " + fixed(best, 3) + (reached_at ? " reached 0.8 at iteration " + std::to_string(reached_at) : " never reached 0.8") + " (want >= 0.8 by 1000); omega=0.75 > omega=0.5 at " + std::to_string(dominated) + "/" + std::to_string(checkpoints) + " checkpoints >= 500; at 1000: omega=0.75 ARI " + fixed(last_high.ari, 3) + " with " + std::to_string(last_high.cluster_count) + " components, omega=0.5 ARI " + fixed(last_low.ari, 3) + " with " + std::to_string(last_low.cluster_count) + " components"};
}

// 8 ------------------------------------------------------------------------

Outcome runtime_scaling() {
    ScalingConfig cfg;
    cfg.sizes = {100, 200, 400, 800, 1600, 3200};
    cfg.clusters = 10;
    cfg.length = 250;
    cfg.coupling = 1.0;
    cfg.repetitions = 3;
    cfg.seed = 8;
    const auto report = benchmark_scaling(cfg);

    const auto start = std::chrono::steady_clock::now();
    GeneratorSpec spec{equal_cluster_sizes(5000, 10), {1.0}, 250, std::nullopt, 5000};
    const auto generated = gen_correlated(spec);
    const auto result = run(estimate_correlation(generated.data));
    const double full = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

    const bool ok = report.fitted_exponent >= 1.7 && report.fitted_exponent <= 2.5 && full < 600 && report.repetitions_consistent;
    std::string times;
    for (std::size_t i = 0; i < report.sizes.size(); ++i) {
        times += (i ? ", " : "") + std::to_string(report.sizes[i]) + ":" + fixed(report.runtimes[i], 4) + "s";
    }
    return {ok, "exponent " + fixed(report.fitted_exponent, 3) + " (want 1.7..2.5) over {" + times + "}; repetitions consistent: " + (report.repetitions_consistent ? "yes" : "no") + "; N=5000 generate+estimate+cluster " + fixed(full, 2) + "s (want < 600s), " + std::to_string(result.partition.cluster_count()) + " clusters"};
}

// 9 ------------------------------------------------------------------------

std::string slurp(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

int shell(const std::string& cmd) {
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

Outcome determinism() {
    namespace fs = std::filesystem;
    const fs::path dir = fs::temp_directory_path() / "alc_acceptance_determinism";
    fs::remove_all(dir);
    fs::create_directories(dir);
    const std::string cli = ALC_CLI_PATH;
    auto alc = [&](const std::string& args) { return shell("cd '" + dir.string() + "' && '" + cli + "' " + args + " > /dev/null 2>&1"); };

    struct Step {
        std::string args;
        std::string manifest;
        std::vector<std::string> compared;
    };
    const std::vector<Step> steps{
        {"generate --sizes 40x5 --g 1 --length 60 --seed 11 --out d.csv --labels t.csv", "d.csv.manifest.json", {"d.csv", "t.csv"}},
        {"generate --white-noise --n 60 --length 50 --df 3 --seed 12 --out w.csv", "w.csv.manifest.json", {"w.csv"}},
        {"cluster --series d.csv --out c.json --labels c.csv", "c.json.manifest.json", {"c.csv"}},
        {"cluster --series w.csv --deterministic --out cw.json --labels cw.csv", "cw.json.manifest.json", {"cw.csv"}},
        {"bootstrap --series d.csv --n 40 --omega 0.75 --max-iter 60 --threads 2 --truth t.csv --out b.json --trajectory b.traj.csv --labels b.csv", "b.json.manifest.json", {"b.csv", "b.traj.csv"}},
        {"evaluate t.csv c.csv --out e.json", "e.json.manifest.json", {"e.json"}},
        {"mst --series d.csv --out m.csv", "m.csv.manifest.json", {"m.csv"}},
        {"noise --sizes 40,80 --seeds 2 --out n.csv --histogram h.csv", "n.csv.manifest.json", {"n.csv", "h.csv"}},
        {"bench --sizes 50,100 --clusters 5 --length 60 --reps 1 --out s.csv", "s.csv.manifest.json", {}},
    };

    int identical = 0;
    int total = 0;
    std::string failures;
    for (const auto& step : steps) {
        if (alc(step.args) != 0) {
            failures += " [" + step.args.substr(0, step.args.find(' ')) + " failed to run]";
            continue;
        }
        std::map<std::string, std::string> first;
        for (const auto& f : step.compared) {
            first[f] = slurp(dir / f);
            fs::remove(dir / f);
        }
        if (alc("rerun " + step.manifest) != 0) {
            failures += " [rerun " + step.manifest + " failed]";
            continue;
        }
        for (const auto& f : step.compared) {
            ++total;
            if (fs::exists(dir / f) && slurp(dir / f) == first[f]) {
                ++identical;
            } else {
                failures += " [" + f + " differs]";
            }
        }
    }
    fs::remove_all(dir);

    const int unit = shell(std::string("'") + ALC_UNIT_TESTS_PATH + "' --gtest_brief=1 > /dev/null 2>&1");
    const bool ok = identical == total && failures.empty() && unit == 0;
    return {ok, std::to_string(identical) + "/" + std::to_string(total) + " outputs byte-identical after rerun from manifest" + failures + "; unit/property suite exit status " + std::to_string(unit) + " (want 0)"};
}

struct Criterion {
    int id;
    std::string name;
    std::function<Outcome()> check;
};

}

int main(int argc, char** argv) {
    const std::vector<Criterion> criteria{
        {1, "likelihood unit values", likelihood_values},
        {2, "delta consistency", delta_consistency},
        {3, "oracle equivalence at small N", oracle_equivalence},
        {4, "planted-cluster ARI corners", table_corners},
        {5, "monotone ARI across the grid", grid_ordering},
        {6, "white-noise cluster statistics", white_noise},
        {7, "bootstrap threshold study", bootstrap_threshold},
        {8, "runtime scaling", runtime_scaling},
        {9, "determinism", determinism},
    };

    std::set<int> selected;
    for (int i = 1; i < argc; ++i) {
        const int id = std::atoi(argv[i]);
        if (id < 1 || id > static_cast<int>(criteria.size())) {
            std::cerr << "unknown criterion '" << argv[i] << "'; expected 1.." << criteria.size() << '\n';
            return 2;
        }
        selected.insert(id);
    }

    bool all = true;
    for (const auto& c : criteria) {
        if (!selected.empty() && !selected.count(c.id)) {
            continue;
        }
        const auto start = std::chrono::steady_clock::now();
        Outcome outcome;
        try {
            outcome = c.check();
        } catch (const std::exception& e) {
            outcome = {false, std::string("threw: ") + e.what()};
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        std::cout << (outcome.pass ? "PASS" : "FAIL") << " criterion " << c.id << " (" << c.name << "): " << outcome.detail << " [" << fixed(secs, 1) << "s]" << std::endl;
        all = all && outcome.pass;
    }
    return all ? 0 : 1;
}
