// Command-line front end: generate, cluster, bootstrap, evaluate, bench, noise, mst, rerun.

#include <chrono>
#include <cmath>
#include <cstdint>
#include <exception>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "alc/alc.hpp"
#include "manifest.hpp"

namespace alc::cli {

enum ExitCode : int {
    ok = 0,
    input_error = 2,
    constraint_violation = 3,
    internal_failure = 4,
};

namespace {

std::vector<std::string> split(const std::string& text, char sep) {
    std::vector<std::string> out;
    std::stringstream stream(text);
    std::string item;
    while (std::getline(stream, item, sep)) {
        out.push_back(item);
    }
    return out;
}

std::size_t parse_count(const std::string& text, const std::string& what) {
    const auto value = internal::parse_index(internal::trim(text));
    if (!value) {
        throw InputError(what + ": '" + text + "' is not a non-negative integer");
    }
    return *value;
}

double parse_real(const std::string& text, const std::string& what) {
    const auto value = internal::parse_double(internal::trim(text));
    if (!value || !std::isfinite(*value)) {
        throw InputError(what + ": '" + text + "' is not a finite number");
    }
    return *value;
}

/*
 * "300x10" means ten clusters of 300; otherwise a comma-separated list of sizes.
 */
std::vector<std::size_t> parse_cluster_sizes(const std::string& text) {
    const auto x = text.find('x');
    if (x != std::string::npos) {
        const auto size = parse_count(text.substr(0, x), "--sizes");
        const auto count = parse_count(text.substr(x + 1), "--sizes");
        if (size == 0 || count == 0) {
            throw InputError("--sizes: cluster size and count must be positive");
        }
        return std::vector<std::size_t>(count, size);
    }
    std::vector<std::size_t> out;
    for (const auto& item : split(text, ',')) {
        out.push_back(parse_count(item, "--sizes"));
    }
    if (out.empty()) {
        throw InputError("--sizes: no sizes given");
    }
    return out;
}

std::vector<std::size_t> parse_size_list(const std::string& text, const std::string& what) {
    std::vector<std::size_t> out;
    for (const auto& item : split(text, ',')) {
        out.push_back(parse_count(item, what));
    }
    if (out.empty()) {
        throw InputError(what + ": empty list");
    }
    return out;
}

std::vector<double> parse_real_list(const std::string& text, const std::string& what) {
    std::vector<double> out;
    for (const auto& item : split(text, ',')) {
        out.push_back(parse_real(item, what));
    }
    if (out.empty()) {
        throw InputError(what + ": empty list");
    }
    return out;
}

template<class T_>
std::string join(const std::vector<T_>& values) {
    std::string out;
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (i) {
            out += ',';
        }
        if constexpr (std::is_floating_point_v<T_>) {
            out += format_double(values[i]);
        } else {
            out += std::to_string(values[i]);
        }
    }
    return out;
}

Json clusters_json(const Partition& partition) {
    Json clusters = Json::object();
    const auto members = partition.clusters();
    for (std::size_t c = 0; c < members.size(); ++c) {
        clusters[std::to_string(c)] = members[c];
    }
    return clusters;
}

void write_json(const std::string& path, const Json& j) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw InputError("cannot open '" + path + "' for writing");
    }
    out << j.dump(2) << '\n';
}

/*
 * Input of the cluster/bootstrap/mst commands: either raw series or a correlation matrix.
 */
struct MatrixInput {
    std::string series;
    std::string corr;
    bool log_returns = false;

    void add_to(CLI::App* cmd) {
        auto* s = cmd->add_option("--series", series, "CSV of series, one object per row");
        auto* c = cmd->add_option("--corr", corr, "CSV of a precomputed correlation matrix");
        s->excludes(c);
        cmd->add_flag("--log-returns", log_returns, "Convert --series price levels to log returns first");
    }

    void validate() const {
        if (series.empty() == corr.empty()) {
            throw InputError("exactly one of --series or --corr is required");
        }
        if (log_returns && series.empty()) {
            throw InputError("--log-returns applies only to --series input");
        }
    }

    void append_args(std::vector<std::string>& args) const {
        if (!series.empty()) {
            args.insert(args.end(), {"--series", series});
            if (log_returns) {
                args.push_back("--log-returns");
            }
        } else {
            args.insert(args.end(), {"--corr", corr});
        }
    }

    std::string path() const { return series.empty() ? corr : series; }

    /*
     * Correlation matrix plus the series length when known.
     */
    std::pair<CorrelationMatrix, std::optional<std::size_t> > load() const {
        validate();
        if (!corr.empty()) {
            return {read_correlation_csv(corr), std::nullopt};
        }
        auto data = read_data_csv(series);
        if (log_returns) {
            data = log_returns_of(data);
        }
        return {estimate_correlation(data), data.cols()};
    }

private:
    static DataMatrix log_returns_of(const DataMatrix& data) { return alc::log_returns(data); }
};

double seconds_since(std::chrono::steady_clock::time_point start) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

}

class Cli {
public:
    Cli() : app_("Agglomerative likelihood clustering of correlated time series", "alc") {
        app_.require_subcommand(1);
        app_.set_version_flag("--version", alc::version);
        setup_generate();
        setup_cluster();
        setup_bootstrap();
        setup_evaluate();
        setup_bench();
        setup_noise();
        setup_mst();
        setup_rerun();
    }

    int main(int argc, const char* const* argv) {
        try {
            app_.parse(argc, argv);
        } catch (const CLI::CallForHelp& e) {
            return app_.exit(e);
        } catch (const CLI::CallForVersion& e) {
            return app_.exit(e);
        } catch (const CLI::ParseError& e) {
            app_.exit(e);
            return input_error;
        }

        try {
            return dispatch();
        } catch (const ConstraintViolation& e) {
            std::cerr << "error: " << e.what() << '\n';
            return constraint_violation;
        } catch (const InputError& e) {
            std::cerr << "error: " << e.what() << '\n';
            return input_error;
        } catch (const InternalError& e) {
            std::cerr << "internal error: " << e.what() << '\n';
            return internal_failure;
        } catch (const std::exception& e) {
            std::cerr << "internal error: " << e.what() << '\n';
            return internal_failure;
        }
    }

private:
    int dispatch() {
        if (generate_->parsed()) {
            return run_generate();
        }
        if (cluster_->parsed()) {
            return run_cluster();
        }
        if (bootstrap_->parsed()) {
            return run_bootstrap_cmd();
        }
        if (evaluate_->parsed()) {
            return run_evaluate();
        }
        if (bench_->parsed()) {
            return run_bench();
        }
        if (noise_->parsed()) {
            return run_noise();
        }
        if (mst_->parsed()) {
            return run_mst();
        }
        if (rerun_->parsed()) {
            return run_rerun();
        }
        throw InternalError("no subcommand dispatched");
    }

    std::uint64_t resolve_seed(const CLI::Option* opt, std::uint64_t value) const {
        return opt->count() ? value : default_seed();
    }

    // generate -------------------------------------------------------------

    struct {
        std::string sizes;
        std::string couplings;
        std::size_t length = 250;
        double df = 3;
        std::uint64_t seed = 0;
        bool white_noise = false;
        std::size_t n = 0;
        std::string out;
        std::string labels;
        CLI::Option* df_opt = nullptr;
        CLI::Option* seed_opt = nullptr;
        CLI::Option* n_opt = nullptr;
        CLI::Option* sizes_opt = nullptr;
        CLI::Option* g_opt = nullptr;
    } gen_;

    void setup_generate() {
        generate_ = app_.add_subcommand("generate", "Write a synthetic data set (and ground-truth labels)");
        gen_.sizes_opt = generate_->add_option("--sizes", gen_.sizes, "Cluster sizes: 'SIZExCOUNT' or a comma list");
        gen_.g_opt = generate_->add_option("--g", gen_.couplings, "Intra-cluster coupling, scalar or one per cluster");
        generate_->add_option("--length", gen_.length, "Series length D")->capture_default_str();
        gen_.df_opt = generate_->add_option("--df", gen_.df, "Student-t degrees of freedom (default: Gaussian; 3 for --white-noise)");
        gen_.seed_opt = generate_->add_option("--seed", gen_.seed, "Random seed (default $ALC_SEED or 42)");
        generate_->add_flag("--white-noise", gen_.white_noise, "Uncorrelated Student-t noise instead of planted clusters");
        gen_.n_opt = generate_->add_option("--n", gen_.n, "Number of series for --white-noise");
        generate_->add_option("--out", gen_.out, "Output data CSV")->required();
        generate_->add_option("--labels", gen_.labels, "Output ground-truth labels CSV");
    }

    int run_generate() {
        const auto start = std::chrono::steady_clock::now();
        RunManifest manifest;
        manifest.command = "generate";
        manifest.seed = resolve_seed(gen_.seed_opt, gen_.seed);

        if (gen_.white_noise) {
            if (gen_.sizes_opt->count() || gen_.g_opt->count()) {
                throw InputError("--white-noise conflicts with --sizes/--g");
            }
            if (!gen_.labels.empty()) {
                throw InputError("--white-noise data has no ground truth; drop --labels");
            }
            if (!gen_.n_opt->count()) {
                throw InputError("--white-noise needs --n");
            }
            const double df = gen_.df_opt->count() ? gen_.df : 3.0;
            const auto data = gen_white_noise(gen_.n, gen_.length, df, manifest.seed);
            write_data_csv(gen_.out, data);

            manifest.args = {"--white-noise", "--n", std::to_string(gen_.n), "--length", std::to_string(gen_.length), "--df", format_double(df), "--seed", std::to_string(manifest.seed), "--out", gen_.out};
            manifest.config = {{"mode", "white_noise"}, {"n", gen_.n}, {"length", gen_.length}, {"df", df}};
            manifest.outputs = {gen_.out};
        } else {
            if (gen_.n_opt->count()) {
                throw InputError("--n applies only to --white-noise; use --sizes");
            }
            if (!gen_.sizes_opt->count() || !gen_.g_opt->count()) {
                throw InputError("generate needs --sizes and --g (or --white-noise)");
            }
            if (gen_.labels.empty()) {
                throw InputError("generate needs --labels for the ground truth");
            }
            GeneratorSpec spec;
            spec.cluster_sizes = parse_cluster_sizes(gen_.sizes);
            spec.couplings = parse_real_list(gen_.couplings, "--g");
            spec.length = gen_.length;
            spec.seed = manifest.seed;
            if (gen_.df_opt->count()) {
                spec.df = gen_.df;
            }
            const auto generated = gen_correlated(spec);
            write_data_csv(gen_.out, generated.data);
            write_labels_csv(gen_.labels, generated.truth);

            manifest.args = {"--sizes", join(spec.cluster_sizes), "--g", join(spec.couplings), "--length", std::to_string(spec.length)};
            if (spec.df) {
                manifest.args.insert(manifest.args.end(), {"--df", format_double(*spec.df)});
            }
            manifest.args.insert(manifest.args.end(), {"--seed", std::to_string(manifest.seed), "--out", gen_.out, "--labels", gen_.labels});
            manifest.config = {{"mode", "correlated"}, {"cluster_sizes", spec.cluster_sizes}, {"couplings", spec.couplings}, {"length", spec.length},
                               {"innovations", spec.df ? "student_t" : "gaussian"}, {"df", spec.df ? Json(*spec.df) : Json(nullptr)}};
            manifest.outputs = {gen_.out, gen_.labels};
        }

        manifest.wall_time = seconds_since(start);
        manifest.write(manifest_path(gen_.out));
        return ok;
    }

    // cluster --------------------------------------------------------------

    struct {
        MatrixInput input;
        std::uint64_t seed = 0;
        bool deterministic = false;
        double epsilon = default_epsilon_merge;
        std::string out;
        std::string labels;
        CLI::Option* seed_opt = nullptr;
    } clu_;

    void setup_cluster() {
        cluster_ = app_.add_subcommand("cluster", "Cluster series or a correlation matrix");
        clu_.input.add_to(cluster_);
        clu_.seed_opt = cluster_->add_option("--seed", clu_.seed, "Seed for initiator order (default $ALC_SEED or 42)");
        cluster_->add_flag("--deterministic", clu_.deterministic, "Take initiators in ascending label order");
        cluster_->add_option("--epsilon", clu_.epsilon, "Minimum likelihood gain for a merge")->capture_default_str();
        cluster_->add_option("--out", clu_.out, "Result JSON")->required();
        cluster_->add_option("--labels", clu_.labels, "Also write labels CSV");
    }

    int run_cluster() {
        const auto start = std::chrono::steady_clock::now();
        RunManifest manifest;
        manifest.command = "cluster";
        manifest.seed = resolve_seed(clu_.seed_opt, clu_.seed);

        const auto [corr, length] = clu_.input.load();
        EngineConfig cfg;
        cfg.seed = manifest.seed;
        cfg.deterministic_order = clu_.deterministic;
        cfg.epsilon_merge = clu_.epsilon;
        const auto result = run(corr, cfg);

        Json j;
        j["schema_version"] = 1;
        j["n_objects"] = result.partition.size();
        j["n_clusters"] = result.partition.cluster_count();
        j["labels"] = result.partition.labels;
        j["clusters"] = clusters_json(result.partition);
        j["likelihood"] = result.likelihood;
        j["merges"] = result.merges;
        j["warnings"] = result.warnings;
        j["elapsed_seconds"] = result.elapsed;
        j["seed"] = manifest.seed;
        write_json(clu_.out, j);
        manifest.outputs = {clu_.out};
        if (!clu_.labels.empty()) {
            write_labels_csv(clu_.labels, result.partition);
            manifest.outputs.push_back(clu_.labels);
        }

        clu_.input.append_args(manifest.args);
        manifest.args.insert(manifest.args.end(), {"--seed", std::to_string(manifest.seed), "--epsilon", format_double(clu_.epsilon), "--out", clu_.out});
        if (clu_.deterministic) {
            manifest.args.push_back("--deterministic");
        }
        if (!clu_.labels.empty()) {
            manifest.args.insert(manifest.args.end(), {"--labels", clu_.labels});
        }
        manifest.config = {{"deterministic_order", clu_.deterministic}, {"epsilon_merge", clu_.epsilon}, {"log_returns", clu_.input.log_returns},
                           {"series_length", length ? Json(*length) : Json(nullptr)}};
        manifest.inputs = {clu_.input.path()};
        manifest.wall_time = seconds_since(start);
        manifest.write(manifest_path(clu_.out));
        return ok;
    }

    // bootstrap ------------------------------------------------------------

    struct {
        MatrixInput input;
        double q = 0.1;
        std::size_t n = 0;
        double omega = 0.75;
        std::size_t max_iter = 2200;
        std::string truth;
        double ari_stop = 0.9;
        std::size_t record_every = 10;
        bool plateau = false;
        std::size_t threads = 1;
        std::uint64_t seed = 0;
        std::string out;
        std::string trajectory;
        std::string labels;
        CLI::Option* q_opt = nullptr;
        CLI::Option* n_opt = nullptr;
        CLI::Option* seed_opt = nullptr;
    } boot_;

    void setup_bootstrap() {
        bootstrap_ = app_.add_subcommand("bootstrap", "Consensus clustering over random subsamples");
        boot_.input.add_to(bootstrap_);
        boot_.q_opt = bootstrap_->add_option("--q", boot_.q, "Target signal-to-noise ratio; sample size n = round(D / q)");
        boot_.n_opt = bootstrap_->add_option("--n", boot_.n, "Sample size (instead of --q)");
        boot_.q_opt->excludes(boot_.n_opt);
        bootstrap_->add_option("--omega", boot_.omega, "Threshold on the co-clustering probability")->capture_default_str();
        bootstrap_->add_option("--max-iter", boot_.max_iter, "Maximum resampling iterations")->capture_default_str();
        bootstrap_->add_option("--truth", boot_.truth, "Ground-truth labels CSV; enables ARI tracking and early stop");
        bootstrap_->add_option("--ari-stop", boot_.ari_stop, "Stop once ARI reaches this value (with --truth)")->capture_default_str();
        bootstrap_->add_option("--record-every", boot_.record_every, "Checkpoint stride in iterations")->capture_default_str();
        bootstrap_->add_flag("--plateau", boot_.plateau, "Stop when the thresholded edge count stabilises");
        bootstrap_->add_option("--threads", boot_.threads, "Worker threads")->capture_default_str();
        boot_.seed_opt = bootstrap_->add_option("--seed", boot_.seed, "Random seed (default $ALC_SEED or 42)");
        bootstrap_->add_option("--out", boot_.out, "Result JSON")->required();
        bootstrap_->add_option("--trajectory", boot_.trajectory, "Trajectory CSV");
        bootstrap_->add_option("--labels", boot_.labels, "Also write labels CSV");
    }

    int run_bootstrap_cmd() {
        const auto start = std::chrono::steady_clock::now();
        RunManifest manifest;
        manifest.command = "bootstrap";
        manifest.seed = resolve_seed(boot_.seed_opt, boot_.seed);

        if (!(boot_.omega >= 0 && boot_.omega <= 1)) {
            throw InputError("--omega must lie in [0, 1]");
        }
        if (!boot_.q_opt->count() && !boot_.n_opt->count()) {
            throw InputError("bootstrap needs --q or --n");
        }

        const auto [corr, length] = boot_.input.load();
        BootstrapConfig cfg;
        if (boot_.n_opt->count()) {
            cfg.sample_size = boot_.n;
        } else {
            cfg.q = boot_.q;
        }
        cfg.omega = boot_.omega;
        cfg.max_iterations = boot_.max_iter;
        cfg.seed = manifest.seed;
        cfg.record_every = boot_.record_every;
        cfg.plateau_stop = boot_.plateau;
        cfg.threads = boot_.threads;
        if (!boot_.truth.empty()) {
            cfg.ground_truth = read_labels_csv(boot_.truth, corr.size());
            cfg.ari_stop = boot_.ari_stop;
        }
        const auto result = run_bootstrap(corr, cfg, length);

        std::size_t sampled = 0;
        std::size_t above = 0;
        double p_sum = 0;
        const std::size_t n = corr.size();
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = i + 1; j < n; ++j) {
                if (result.state.f[i * n + j] > 0) {
                    ++sampled;
                    p_sum += result.probabilities(i, j);
                    above += result.adjacency(i, j);
                }
            }
        }
        const std::size_t total_pairs = n * (n - 1) / 2;

        Json j;
        j["schema_version"] = 1;
        j["n_objects"] = n;
        j["sample_size"] = result.sample_size;
        j["omega"] = cfg.omega;
        j["iterations"] = result.state.iterations_done;
        j["stop_reason"] = result.stop_reason;
        j["n_clusters"] = result.partition.cluster_count();
        j["labels"] = result.partition.labels;
        j["clusters"] = clusters_json(result.partition);
        j["probability_summary"] = {
            {"sampled_pairs", sampled},
            {"unsampled_pairs", total_pairs - sampled},
            {"mean_p_sampled", sampled ? p_sum / static_cast<double>(sampled) : 0.0},
            {"edges", result.adjacency.edge_count()},
            {"fraction_above_omega", sampled ? static_cast<double>(above) / static_cast<double>(sampled) : 0.0},
        };
        if (cfg.ground_truth) {
            j["final_ari"] = result.trajectory.empty() ? Json(nullptr) : Json(result.trajectory.back().ari);
        }
        j["seed"] = manifest.seed;
        write_json(boot_.out, j);
        manifest.outputs = {boot_.out};

        if (!boot_.trajectory.empty()) {
            std::ofstream traj(boot_.trajectory, std::ios::binary);
            if (!traj) {
                throw InputError("cannot open '" + boot_.trajectory + "' for writing");
            }
            traj << "iteration,ari,edge_count,cluster_count\n";
            for (const auto& p : result.trajectory) {
                traj << p.iteration << ',' << (std::isnan(p.ari) ? std::string() : format_double(p.ari)) << ',' << p.edge_count << ',' << p.cluster_count << '\n';
            }
            manifest.outputs.push_back(boot_.trajectory);
        }
        if (!boot_.labels.empty()) {
            write_labels_csv(boot_.labels, result.partition);
            manifest.outputs.push_back(boot_.labels);
        }

        boot_.input.append_args(manifest.args);
        if (cfg.sample_size) {
            manifest.args.insert(manifest.args.end(), {"--n", std::to_string(*cfg.sample_size)});
        } else {
            manifest.args.insert(manifest.args.end(), {"--q", format_double(*cfg.q)});
        }
        manifest.args.insert(manifest.args.end(), {"--omega", format_double(cfg.omega), "--max-iter", std::to_string(cfg.max_iterations),
                                                   "--record-every", std::to_string(cfg.record_every), "--threads", std::to_string(cfg.threads),
                                                   "--seed", std::to_string(manifest.seed), "--out", boot_.out});
        if (!boot_.truth.empty()) {
            manifest.args.insert(manifest.args.end(), {"--truth", boot_.truth, "--ari-stop", format_double(boot_.ari_stop)});
            manifest.inputs.push_back(boot_.truth);
        }
        if (boot_.plateau) {
            manifest.args.push_back("--plateau");
        }
        if (!boot_.trajectory.empty()) {
            manifest.args.insert(manifest.args.end(), {"--trajectory", boot_.trajectory});
        }
        if (!boot_.labels.empty()) {
            manifest.args.insert(manifest.args.end(), {"--labels", boot_.labels});
        }
        manifest.inputs.insert(manifest.inputs.begin(), boot_.input.path());
        manifest.config = {{"sample_size", result.sample_size}, {"q", cfg.q ? Json(*cfg.q) : Json(nullptr)}, {"omega", cfg.omega},
                           {"max_iterations", cfg.max_iterations}, {"record_every", cfg.record_every}, {"plateau_stop", cfg.plateau_stop},
                           {"ari_stop", cfg.ground_truth ? Json(boot_.ari_stop) : Json(nullptr)}, {"threads", cfg.threads}};
        manifest.wall_time = seconds_since(start);
        manifest.write(manifest_path(boot_.out));
        return ok;
    }

    // evaluate -------------------------------------------------------------

    struct {
        std::string a;
        std::string b;
        std::string out;
    } eval_;

    void setup_evaluate() {
        evaluate_ = app_.add_subcommand("evaluate", "Adjusted Rand Index between two label files");
        evaluate_->add_option("a", eval_.a, "First labels CSV")->required();
        evaluate_->add_option("b", eval_.b, "Second labels CSV")->required();
        evaluate_->add_option("--out", eval_.out, "Write the report JSON here as well as to stdout");
    }

    int run_evaluate() {
        const auto start = std::chrono::steady_clock::now();
        const auto a = read_labels_csv(eval_.a);
        const auto b = read_labels_csv(eval_.b, a.size());
        const auto report = adjusted_rand_index(a, b);

        Json j;
        j["schema_version"] = 1;
        j["n_objects"] = a.size();
        j["ari"] = report.ari;
        j["pair_counts"] = {
            {"together_together", report.together_together},
            {"together_apart", report.together_apart},
            {"apart_together", report.apart_together},
            {"apart_apart", report.apart_apart},
        };
        std::cout << j.dump(2) << '\n';

        if (!eval_.out.empty()) {
            write_json(eval_.out, j);
            RunManifest manifest;
            manifest.command = "evaluate";
            manifest.args = {eval_.a, eval_.b, "--out", eval_.out};
            manifest.inputs = {eval_.a, eval_.b};
            manifest.outputs = {eval_.out};
            manifest.wall_time = seconds_since(start);
            manifest.write(manifest_path(eval_.out));
        }
        return ok;
    }

    // bench ----------------------------------------------------------------

    struct {
        std::string sizes = "100,200,400,800,1600,3200";
        std::size_t clusters = 10;
        std::size_t length = 250;
        double g = 1.0;
        std::size_t reps = 3;
        std::uint64_t seed = 0;
        std::string out;
        CLI::Option* seed_opt = nullptr;
    } bench_opts_;

    void setup_bench() {
        bench_ = app_.add_subcommand("bench", "Engine runtime against N on planted-cluster data");
        bench_->add_option("--sizes", bench_opts_.sizes, "Comma list of N")->capture_default_str();
        bench_->add_option("--clusters", bench_opts_.clusters, "Planted clusters per data set")->capture_default_str();
        bench_->add_option("--length", bench_opts_.length, "Series length D")->capture_default_str();
        bench_->add_option("--g", bench_opts_.g, "Intra-cluster coupling")->capture_default_str();
        bench_->add_option("--reps", bench_opts_.reps, "Repetitions per size (median reported)")->capture_default_str();
        bench_opts_.seed_opt = bench_->add_option("--seed", bench_opts_.seed, "Random seed (default $ALC_SEED or 42)");
        bench_->add_option("--out", bench_opts_.out, "Scaling CSV (a .summary.json with the exponent is written beside it)")->required();
    }

    int run_bench() {
        const auto start = std::chrono::steady_clock::now();
        ScalingConfig cfg;
        cfg.sizes = parse_size_list(bench_opts_.sizes, "--sizes");
        cfg.clusters = bench_opts_.clusters;
        cfg.length = bench_opts_.length;
        cfg.coupling = bench_opts_.g;
        cfg.repetitions = bench_opts_.reps;
        cfg.seed = resolve_seed(bench_opts_.seed_opt, bench_opts_.seed);
        const auto report = benchmark_scaling(cfg);

        {
            std::ofstream out(bench_opts_.out, std::ios::binary);
            if (!out) {
                throw InputError("cannot open '" + bench_opts_.out + "' for writing");
            }
            out << "n,median_seconds,clusters_found,ari\n";
            for (std::size_t i = 0; i < report.sizes.size(); ++i) {
                out << report.sizes[i] << ',' << format_double(report.runtimes[i]) << ',' << report.clusters_found[i] << ',' << format_double(report.ari[i]) << '\n';
            }
        }
        const std::string summary = bench_opts_.out + ".summary.json";
        write_json(summary, Json{{"schema_version", 1}, {"fitted_exponent", report.fitted_exponent}, {"repetitions_consistent", report.repetitions_consistent}});
        std::cout << "fitted exponent: " << format_double(report.fitted_exponent) << '\n';

        RunManifest manifest;
        manifest.command = "bench";
        manifest.seed = cfg.seed;
        manifest.args = {"--sizes", join(cfg.sizes), "--clusters", std::to_string(cfg.clusters), "--length", std::to_string(cfg.length),
                         "--g", format_double(cfg.coupling), "--reps", std::to_string(cfg.repetitions), "--seed", std::to_string(cfg.seed), "--out", bench_opts_.out};
        manifest.config = {{"sizes", cfg.sizes}, {"clusters", cfg.clusters}, {"length", cfg.length}, {"coupling", cfg.coupling}, {"repetitions", cfg.repetitions}};
        manifest.outputs = {bench_opts_.out, summary};
        manifest.wall_time = seconds_since(start);
        manifest.write(manifest_path(bench_opts_.out));
        return ok;
    }

    // noise ----------------------------------------------------------------

    struct {
        std::string sizes = "100,200,300,400,500,600,700,800,900,1000";
        std::size_t length = 100;
        double df = 3;
        std::size_t seeds = 10;
        std::uint64_t seed = 0;
        std::string out;
        std::string histogram;
        CLI::Option* seed_opt = nullptr;
    } noise_opts_;

    void setup_noise() {
        noise_ = app_.add_subcommand("noise", "Spurious cluster statistics on uncorrelated data");
        noise_->add_option("--sizes", noise_opts_.sizes, "Comma list of N")->capture_default_str();
        noise_->add_option("--length", noise_opts_.length, "Series length D")->capture_default_str();
        noise_->add_option("--df", noise_opts_.df, "Student-t degrees of freedom")->capture_default_str();
        noise_->add_option("--seeds", noise_opts_.seeds, "Data sets per size")->capture_default_str();
        noise_opts_.seed_opt = noise_->add_option("--seed", noise_opts_.seed, "Base seed (default $ALC_SEED or 42)");
        noise_->add_option("--out", noise_opts_.out, "Per-size CSV (a .summary.json is written beside it)")->required();
        noise_->add_option("--histogram", noise_opts_.histogram, "Pooled cluster-size histogram CSV");
    }

    int run_noise() {
        const auto start = std::chrono::steady_clock::now();
        const auto sizes = parse_size_list(noise_opts_.sizes, "--sizes");
        const std::uint64_t seed = resolve_seed(noise_opts_.seed_opt, noise_opts_.seed);
        if (noise_opts_.seeds == 0) {
            throw InputError("--seeds must be positive");
        }

        std::vector<Partition> pooled;
        std::vector<double> ns, mean_k, mean_kn;
        for (std::size_t idx = 0; idx < sizes.size(); ++idx) {
            std::vector<Partition> batch;
            for (std::size_t r = 0; r < noise_opts_.seeds; ++r) {
                const std::uint64_t data_seed = seed + 1000003ull * idx + r;
                const auto corr = estimate_correlation(gen_white_noise(sizes[idx], noise_opts_.length, noise_opts_.df, data_seed));
                EngineConfig cfg;
                cfg.seed = data_seed;
                batch.push_back(run(corr, cfg).partition);
            }
            const auto stats = noise_statistics(batch);
            double k = 0, kn = 0;
            for (std::size_t r = 0; r < batch.size(); ++r) {
                k += static_cast<double>(stats.cluster_counts[r]);
                kn += stats.normalized_counts[r];
            }
            ns.push_back(static_cast<double>(sizes[idx]));
            mean_k.push_back(k / static_cast<double>(batch.size()));
            mean_kn.push_back(kn / static_cast<double>(batch.size()));
            pooled.insert(pooled.end(), batch.begin(), batch.end());
        }
        const auto pooled_stats = noise_statistics(pooled);

        {
            std::ofstream out(noise_opts_.out, std::ios::binary);
            if (!out) {
                throw InputError("cannot open '" + noise_opts_.out + "' for writing");
            }
            out << "n,mean_clusters,mean_clusters_over_n\n";
            for (std::size_t i = 0; i < sizes.size(); ++i) {
                out << sizes[i] << ',' << format_double(mean_k[i]) << ',' << format_double(mean_kn[i]) << '\n';
            }
        }
        RunManifest manifest;
        manifest.outputs = {noise_opts_.out};
        if (!noise_opts_.histogram.empty()) {
            std::ofstream out(noise_opts_.histogram, std::ios::binary);
            if (!out) {
                throw InputError("cannot open '" + noise_opts_.histogram + "' for writing");
            }
            out << "cluster_size,count\n";
            for (const auto& [size, count] : pooled_stats.size_histogram) {
                out << size << ',' << count << '\n';
            }
            manifest.outputs.push_back(noise_opts_.histogram);
        }

        bool strictly_decreasing = true;
        for (std::size_t i = 1; i < mean_kn.size(); ++i) {
            strictly_decreasing = strictly_decreasing && mean_kn[i] < mean_kn[i - 1];
        }
        const double rho = sizes.size() >= 2 ? spearman_correlation(ns, mean_kn) : 0.0;
        const std::string summary = noise_opts_.out + ".summary.json";
        write_json(summary, Json{{"schema_version", 1}, {"spearman_k_over_n_vs_n", rho}, {"decreasing_trend", rho <= -0.9},
                                 {"strictly_decreasing", strictly_decreasing}, {"histogram_mode", pooled_stats.mode}});
        std::cout << "Spearman(K/N, N) = " << format_double(rho) << ", histogram mode = " << pooled_stats.mode << '\n';
        manifest.outputs.push_back(summary);

        manifest.command = "noise";
        manifest.seed = seed;
        manifest.args = {"--sizes", join(sizes), "--length", std::to_string(noise_opts_.length), "--df", format_double(noise_opts_.df),
                         "--seeds", std::to_string(noise_opts_.seeds), "--seed", std::to_string(seed), "--out", noise_opts_.out};
        if (!noise_opts_.histogram.empty()) {
            manifest.args.insert(manifest.args.end(), {"--histogram", noise_opts_.histogram});
        }
        manifest.config = {{"sizes", sizes}, {"length", noise_opts_.length}, {"df", noise_opts_.df}, {"seeds", noise_opts_.seeds}};
        manifest.wall_time = seconds_since(start);
        manifest.write(manifest_path(noise_opts_.out));
        return ok;
    }

    // mst ------------------------------------------------------------------

    struct {
        MatrixInput input;
        std::string out;
    } mst_opts_;

    void setup_mst() {
        mst_ = app_.add_subcommand("mst", "Minimum spanning tree under the distance 1 - rho");
        mst_opts_.input.add_to(mst_);
        mst_->add_option("--out", mst_opts_.out, "Edge-list CSV (i,j,distance)")->required();
    }

    int run_mst() {
        const auto start = std::chrono::steady_clock::now();
        const auto [corr, length] = mst_opts_.input.load();
        const auto edges = mst_edges(corr);
        {
            std::ofstream out(mst_opts_.out, std::ios::binary);
            if (!out) {
                throw InputError("cannot open '" + mst_opts_.out + "' for writing");
            }
            out << "i,j,distance\n";
            for (const auto& e : edges) {
                out << e.i << ',' << e.j << ',' << format_double(e.distance) << '\n';
            }
        }
        RunManifest manifest;
        manifest.command = "mst";
        mst_opts_.input.append_args(manifest.args);
        manifest.args.insert(manifest.args.end(), {"--out", mst_opts_.out});
        manifest.inputs = {mst_opts_.input.path()};
        manifest.outputs = {mst_opts_.out};
        manifest.config = {{"series_length", length ? Json(*length) : Json(nullptr)}};
        manifest.wall_time = seconds_since(start);
        manifest.write(manifest_path(mst_opts_.out));
        return ok;
    }

    // rerun ----------------------------------------------------------------

    std::string rerun_manifest_;

    void setup_rerun() {
        rerun_ = app_.add_subcommand("rerun", "Replay a command from its manifest");
        rerun_->add_option("manifest", rerun_manifest_, "Manifest JSON written by an earlier run")->required();
    }

    int run_rerun() {
        auto args = load_manifest_args(rerun_manifest_);
        if (args.front() == "rerun") {
            throw InputError("a manifest cannot replay another rerun");
        }
        args.insert(args.begin(), "alc");
        std::vector<const char*> argv;
        for (const auto& a : args) {
            argv.push_back(a.c_str());
        }
        Cli fresh;
        return fresh.main(static_cast<int>(argv.size()), argv.data());
    }

    CLI::App app_;
    CLI::App* generate_ = nullptr;
    CLI::App* cluster_ = nullptr;
    CLI::App* bootstrap_ = nullptr;
    CLI::App* evaluate_ = nullptr;
    CLI::App* bench_ = nullptr;
    CLI::App* noise_ = nullptr;
    CLI::App* mst_ = nullptr;
    CLI::App* rerun_ = nullptr;
};

}

int main(int argc, char** argv) {
    alc::cli::Cli cli;
    return cli.main(argc, argv);
}
