#include "cli.hpp"

#include <CLI11.hpp>

#include <charconv>
#include <chrono>
#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <sstream>

#include "eam/csv.hpp"
#include "eam/ensemble.hpp"
#include "eam/evaluation.hpp"
#include "eam/stats.hpp"

namespace eam::cli {

namespace fs = std::filesystem;

namespace {

constexpr std::uint64_t kStabilityTrial = 0x57AB;

std::string fmt(double v) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

std::string to_string(AlgorithmChoice a) {
    switch (a) {
        case AlgorithmChoice::single:
            return "single";
        case AlgorithmChoice::ensemble:
            return "ensemble";
        case AlgorithmChoice::both:
            return "both";
    }
    return "?";
}

std::string to_string(ProtocolChoice p) {
    switch (p) {
        case ProtocolChoice::paper:
            return "paper";
        case ProtocolChoice::cv:
            return "cv";
        case ProtocolChoice::holdout:
            return "holdout";
    }
    return "?";
}

std::size_t parse_count(const std::string& key, const std::string& value) {
    std::size_t out = 0;
    const auto res = std::from_chars(value.data(), value.data() + value.size(), out);
    if (res.ec != std::errc{} || res.ptr != value.data() + value.size() || value.empty()) {
        throw std::invalid_argument(key + ": expected a non-negative integer, got '" + value + "'");
    }
    return out;
}

double parse_real(const std::string& key, const std::string& value) {
    double out = 0.0;
    const auto res = std::from_chars(value.data(), value.data() + value.size(), out);
    if (res.ec != std::errc{} || res.ptr != value.data() + value.size() || value.empty()) {
        throw std::invalid_argument(key + ": expected a number, got '" + value + "'");
    }
    return out;
}

std::string trim(std::string s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string::npos) {
        return {};
    }
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

struct Timer {
    std::chrono::steady_clock::time_point start = std::chrono::steady_clock::now();
    double seconds() const {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    }
};

std::string sanitize(std::string s) {
    for (char& c : s) {
        if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '-' || c == '_' || c == '.')) {
            c = '_';
        }
    }
    return s;
}

struct Failure {
    std::string dataset;
    std::string algorithm;
    std::string message;
};

void write_failures(const fs::path& out_dir, const ExperimentConfig& config, const std::vector<Failure>& failures) {
    const fs::path path = out_dir / "failures.txt";
    if (failures.empty()) {
        fs::remove(path);
        return;
    }
    std::ostringstream text;
    text << "# seed " << config.seed << "\n# config " << config.describe() << '\n';
    for (const auto& f : failures) {
        text << f.dataset << '\t' << f.algorithm << '\t' << f.message << '\n';
    }
    write_file_atomic(path, text.str());
}

std::vector<fs::path> resolve_all(const std::vector<std::string>& names) {
    std::vector<fs::path> paths;
    for (const auto& name : names) {
        paths.push_back(resolve_dataset(name));
    }
    return paths;
}

void log_header(std::ostream& log, const char* command, const ExperimentConfig& config,
                const std::vector<fs::path>& paths) {
    log << "command: " << command << '\n';
    log << "seed: " << config.seed << '\n';
    log << "config: " << config.describe() << '\n';
    log << "out: " << config.out_dir.string() << '\n';
    for (const auto& p : paths) {
        log << "dataset: " << p.string() << '\n';
    }
}

}  // namespace

void ExperimentConfig::validate() const {
    ant.validate();
    if (replicas == 0) {
        throw std::invalid_argument("replicas must be positive");
    }
    if (folds < 2) {
        throw std::invalid_argument("folds must be at least 2");
    }
    if (iterations == 0) {
        throw std::invalid_argument("iterations must be positive");
    }
    if (workers == 0) {
        throw std::invalid_argument("workers must be positive");
    }
}

std::vector<std::pair<std::string, std::string>> ExperimentConfig::entries() const {
    return {
        {"profile", profile},
        {"algo", to_string(algorithm)},
        {"protocol", to_string(protocol)},
        {"seed", std::to_string(seed)},
        {"ants", std::to_string(ant.num_ants)},
        {"min_covered", std::to_string(ant.min_covered_per_rule)},
        {"max_uncovered", std::to_string(ant.max_uncovered)},
        {"convergence", std::to_string(ant.convergence_rules)},
        {"alpha", fmt(ant.pheromone_exponent)},
        {"beta", fmt(ant.heuristic_exponent)},
        {"evaporation", fmt(ant.evaporation_factor)},
        {"replicas", std::to_string(replicas)},
        {"folds", std::to_string(folds)},
        {"iterations", std::to_string(iterations)},
    };
}

std::string ExperimentConfig::describe() const {
    std::string out;
    for (const auto& [k, v] : entries()) {
        if (!out.empty()) {
            out += ' ';
        }
        out += k + "=" + v;
    }
    return out;
}

void apply_profile(ExperimentConfig& config, std::string_view profile) {
    if (profile == "desk") {
        config.ant = AntMinerParams{};
        config.ant.num_ants = 200;
        config.iterations = 3;
    } else if (profile == "paper") {
        config.ant = AntMinerParams{};
        config.iterations = 10;
    } else {
        throw std::invalid_argument("unknown profile '" + std::string(profile) + "' (expected desk or paper)");
    }
    config.replicas = 10;
    config.folds = 10;
    config.profile = std::string(profile);
}

void apply_setting(ExperimentConfig& config, const std::string& key, const std::string& value) {
    if (key == "profile") {
        config.profile = value;
    } else if (key == "seed") {
        config.seed = parse_count(key, value);
    } else if (key == "algo") {
        if (value == "single") {
            config.algorithm = AlgorithmChoice::single;
        } else if (value == "ensemble") {
            config.algorithm = AlgorithmChoice::ensemble;
        } else if (value == "both") {
            config.algorithm = AlgorithmChoice::both;
        } else {
            throw std::invalid_argument("algo: expected single, ensemble or both, got '" + value + "'");
        }
    } else if (key == "protocol") {
        if (value == "paper") {
            config.protocol = ProtocolChoice::paper;
        } else if (value == "cv") {
            config.protocol = ProtocolChoice::cv;
        } else if (value == "holdout") {
            config.protocol = ProtocolChoice::holdout;
        } else {
            throw std::invalid_argument("protocol: expected paper, cv or holdout, got '" + value + "'");
        }
    } else if (key == "ants") {
        config.ant.num_ants = parse_count(key, value);
    } else if (key == "min_covered") {
        config.ant.min_covered_per_rule = parse_count(key, value);
    } else if (key == "max_uncovered") {
        config.ant.max_uncovered = parse_count(key, value);
    } else if (key == "convergence") {
        config.ant.convergence_rules = parse_count(key, value);
    } else if (key == "alpha") {
        config.ant.pheromone_exponent = parse_real(key, value);
    } else if (key == "beta") {
        config.ant.heuristic_exponent = parse_real(key, value);
    } else if (key == "evaporation") {
        config.ant.evaporation_factor = parse_real(key, value);
    } else if (key == "replicas") {
        config.replicas = parse_count(key, value);
    } else if (key == "folds") {
        config.folds = parse_count(key, value);
    } else if (key == "iterations") {
        config.iterations = parse_count(key, value);
    } else if (key == "workers") {
        config.workers = parse_count(key, value);
    } else if (key == "out") {
        config.out_dir = value;
    } else if (key == "datasets") {
        config.datasets.clear();
        std::istringstream in(value);
        for (std::string item; std::getline(in, item, ',');) {
            item = trim(item);
            if (!item.empty()) {
                config.datasets.push_back(item);
            }
        }
    } else {
        throw std::invalid_argument("unknown setting '" + key + "'");
    }
}

std::map<std::string, std::string> read_config_file(const fs::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw MissingPath("config file '" + path.string() + "' does not exist");
    }
    std::map<std::string, std::string> settings;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (const auto hash = line.find('#'); hash != std::string::npos) {
            line.erase(hash);
        }
        line = trim(line);
        if (line.empty()) {
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            throw ParseError(path.string(), line_no, 0, "expected 'key = value'");
        }
        settings[trim(line.substr(0, eq))] = trim(line.substr(eq + 1));
    }
    return settings;
}

ExperimentConfig resolve_config(const std::map<std::string, std::string>& file_settings,
                                const std::map<std::string, std::string>& flag_settings,
                                const std::vector<std::string>& datasets) {
    std::string profile = "desk";
    if (const auto it = file_settings.find("profile"); it != file_settings.end()) {
        profile = it->second;
    }
    if (const auto it = flag_settings.find("profile"); it != flag_settings.end()) {
        profile = it->second;
    }
    ExperimentConfig config;
    apply_profile(config, profile);
    for (const auto& [k, v] : file_settings) {
        if (k != "profile") {
            apply_setting(config, k, v);
        }
    }
    for (const auto& [k, v] : flag_settings) {
        if (k != "profile") {
            apply_setting(config, k, v);
        }
    }
    if (!datasets.empty()) {
        config.datasets = datasets;
    }
    config.validate();
    return config;
}

fs::path resolve_dataset(const std::string& name) {
    if (fs::exists(name)) {
        return name;
    }
    if (const char* dir = std::getenv(kDataDirEnv); dir != nullptr && *dir != '\0') {
        for (const char* ext : {"", ".csv", ".arff"}) {
            const fs::path candidate = fs::path(dir) / (name + ext);
            if (fs::exists(candidate)) {
                return candidate;
            }
        }
    }
    throw MissingPath("dataset path '" + name + "' not found");
}

std::string dataset_summary(const DatasetTable& data) {
    const Schema& s = data.schema();
    std::ostringstream out;
    out << s.continuous_count() << " continuous, " << s.nominal_count() << " nominal, " << s.class_count()
        << " classes, " << data.size() << " examples";
    return out.str();
}

void write_file_atomic(const fs::path& path, const std::string& content) {
    if (path.has_parent_path()) {
        fs::create_directories(path.parent_path());
    }
    fs::path tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) {
            throw std::runtime_error("cannot write '" + tmp.string() + "'");
        }
        out << content;
        out.flush();
        if (!out) {
            throw std::runtime_error("write failed for '" + tmp.string() + "'");
        }
    }
    fs::rename(tmp, path);
}

int cmd_bench(const ExperimentConfig& config, std::ostream& out, std::ostream& err) {
    std::vector<fs::path> paths;
    try {
        config.validate();
        paths = resolve_all(config.datasets);
    } catch (const MissingPath& e) {
        err << "error: " << e.what() << '\n';
        return 2;
    }
    if (paths.empty()) {
        err << "error: no datasets given\n";
        return 2;
    }
    fs::create_directories(config.out_dir);

    std::ostringstream log;
    log_header(log, "bench run", config, paths);

    const auto base = std::make_shared<AntMinerLearner>(config.ant);
    const BaggedLearner bagged(base, config.replicas, config.workers);
    const std::string cfg = config.describe();
    const std::string seed = std::to_string(config.seed);
    const std::vector<std::pair<std::string, std::string>> stamp{{"seed", seed}, {"config", cfg}};

    std::vector<EvaluationResult> all;
    std::vector<Failure> failures;
    for (const auto& path : paths) {
        std::string name = path.stem().string();
        std::optional<DatasetTable> data;
        try {
            data.emplace(load_dataset(path));
            name = data->name();
        } catch (const std::exception& e) {
            failures.push_back({name, "-", e.what()});
            log << "FAILED " << path.string() << ": " << e.what() << '\n';
            err << "error: " << path.string() << ": " << e.what() << '\n';
            continue;
        }
        std::vector<EvaluationResult> results;
        auto attempt = [&](const std::string& algorithm, auto&& body) {
            Timer timer;
            try {
                results.push_back(body());
                log << name << ' ' << algorithm << ' ' << results.back().protocol << " ok " << std::fixed
                    << std::setprecision(3) << timer.seconds() << "s\n";
                log.unsetf(std::ios::floatfield);
            } catch (const std::exception& e) {
                failures.push_back({name, algorithm, e.what()});
                log << "FAILED " << name << ' ' << algorithm << ": " << e.what() << '\n';
                err << "error: " << name << " / " << algorithm << ": " << e.what() << '\n';
            }
        };
        if (config.algorithm != AlgorithmChoice::ensemble) {
            attempt(base->name(), [&] {
                return config.protocol == ProtocolChoice::holdout
                           ? evaluate_holdout(*data, *base, config.iterations, config.seed)
                           : cross_validate(*data, *base, config.folds, config.iterations, config.seed);
            });
        }
        if (config.algorithm != AlgorithmChoice::single) {
            attempt(bagged.name(), [&] {
                return config.protocol == ProtocolChoice::cv
                           ? cross_validate(*data, bagged, config.folds, config.iterations, config.seed)
                           : evaluate_ensemble(*data, *base, config.replicas, config.iterations, config.seed);
            });
        }
        if (!results.empty()) {
            std::ostringstream runs;
            write_runs_csv(runs, results, stamp);
            write_file_atomic(config.out_dir / "runs" / (sanitize(name) + ".csv"), runs.str());
            for (const auto& r : results) {
                out << name << ' ' << r.errors.algorithm << ": error " << format_percent(r.errors.mean_error())
                    << "%, terms " << std::fixed << std::setprecision(2) << r.sizes.mean_terms() << '\n';
                out.unsetf(std::ios::floatfield);
            }
            all.insert(all.end(), results.begin(), results.end());
        }
    }

    std::ostringstream runs;
    write_runs_csv(runs, all, stamp);
    write_file_atomic(config.out_dir / "runs.csv", runs.str());

    std::ostringstream summary;
    csv::write_record(summary, {"dataset", "algorithm", "protocol", "runs", "mean_error", "mean_error_pct",
                                "mean_terms", "terms_std_error", "mean_total_terms", "seed", "config"});
    std::vector<std::string> datasets;
    std::vector<std::string> algorithms;
    for (const auto& r : all) {
        csv::write_record(summary, {r.errors.dataset, r.errors.algorithm, r.protocol,
                                    std::to_string(r.errors.run_count()), fmt(r.errors.mean_error()),
                                    format_percent(r.errors.mean_error()), fmt(r.sizes.mean_terms()),
                                    fmt(r.sizes.std_error()), fmt(r.sizes.mean_total_terms()), seed, cfg});
        if (std::find(datasets.begin(), datasets.end(), r.errors.dataset) == datasets.end()) {
            datasets.push_back(r.errors.dataset);
        }
        if (std::find(algorithms.begin(), algorithms.end(), r.errors.algorithm) == algorithms.end()) {
            algorithms.push_back(r.errors.algorithm);
        }
    }
    write_file_atomic(config.out_dir / "summary.csv", summary.str());

    std::ostringstream table;
    csv::Record header{"dataset"};
    header.insert(header.end(), algorithms.begin(), algorithms.end());
    header.push_back("seed");
    header.push_back("config");
    csv::write_record(table, header);
    for (const auto& ds : datasets) {
        csv::Record rec{ds};
        for (const auto& alg : algorithms) {
            const auto it = std::find_if(all.begin(), all.end(), [&](const EvaluationResult& r) {
                return r.errors.dataset == ds && r.errors.algorithm == alg;
            });
            rec.push_back(it == all.end() ? "" : format_percent(it->errors.mean_error()));
        }
        rec.push_back(seed);
        rec.push_back(cfg);
        csv::write_record(table, rec);
    }
    write_file_atomic(config.out_dir / "error_table.csv", table.str());

    write_failures(config.out_dir, config, failures);
    log << (failures.empty() ? "status: ok" : "status: " + std::to_string(failures.size()) + " failure(s)") << '\n';
    write_file_atomic(config.out_dir / "run.log", log.str());
    return failures.empty() ? 0 : 1;
}

int cmd_stability(const ExperimentConfig& config, std::ostream& out, std::ostream& err) {
    std::vector<fs::path> paths;
    try {
        config.validate();
        paths = resolve_all(config.datasets);
    } catch (const MissingPath& e) {
        err << "error: " << e.what() << '\n';
        return 2;
    }
    if (paths.empty()) {
        err << "error: no datasets given\n";
        return 2;
    }
    fs::create_directories(config.out_dir);

    std::ostringstream log;
    log_header(log, "bench stability", config, paths);

    const auto base = std::make_shared<AntMinerLearner>(config.ant);
    const auto bagged = std::make_shared<BaggedLearner>(base, config.replicas, config.workers);
    std::vector<LearnerPtr> learners;
    if (config.algorithm != AlgorithmChoice::ensemble) {
        learners.push_back(base);
    }
    if (config.algorithm != AlgorithmChoice::single) {
        learners.push_back(bagged);
    }
    const std::string cfg = config.describe();
    const std::string seed = std::to_string(config.seed);

    std::ostringstream folds_csv;
    csv::write_record(folds_csv, {"dataset", "algorithm", "trial", "fold", "error", "seed", "config"});
    std::ostringstream summary;
    csv::write_record(summary, {"dataset", "algorithm", "trial", "trial_seed", "mean_error", "variance", "seed",
                                "config"});
    std::vector<Failure> failures;
    for (const auto& path : paths) {
        std::string name = path.stem().string();
        try {
            const DatasetTable data = load_dataset(path);
            name = data.name();
            for (std::size_t trial = 0; trial < config.iterations; ++trial) {
                const Seed trial_seed = derive_seed(config.seed, {kStabilityTrial, trial});
                for (const auto& learner : learners) {
                    Timer timer;
                    const StabilityCurve curve = stability_curve(data, *learner, trial_seed, config.folds);
                    const std::vector<std::string> comments{
                        "seed " + seed + " trial " + std::to_string(trial) + " trial_seed " +
                            std::to_string(trial_seed),
                        "config " + cfg};
                    std::ostringstream dat;
                    write_curve_data(dat, curve, comments);
                    write_file_atomic(config.out_dir / "stability" /
                                          (sanitize(name) + "_" + sanitize(curve.algorithm) + "_trial" +
                                           std::to_string(trial) + ".dat"),
                                      dat.str());
                    for (std::size_t f = 0; f < curve.per_fold_errors.size(); ++f) {
                        csv::write_record(folds_csv, {name, curve.algorithm, std::to_string(trial),
                                                      std::to_string(f + 1), fmt(curve.per_fold_errors[f]), seed,
                                                      cfg});
                    }
                    csv::write_record(summary, {name, curve.algorithm, std::to_string(trial),
                                                std::to_string(trial_seed), fmt(mean(curve.per_fold_errors)),
                                                fmt(curve.variance()), seed, cfg});
                    out << name << ' ' << curve.algorithm << " trial " << trial << ": variance "
                        << fmt(curve.variance()) << '\n';
                    log << name << ' ' << curve.algorithm << " trial " << trial << " ok " << std::fixed
                        << std::setprecision(3) << timer.seconds() << "s\n";
                    log.unsetf(std::ios::floatfield);
                }
            }
        } catch (const std::exception& e) {
            failures.push_back({name, "-", e.what()});
            log << "FAILED " << name << ": " << e.what() << '\n';
            err << "error: " << name << ": " << e.what() << '\n';
        }
    }
    write_file_atomic(config.out_dir / "stability_folds.csv", folds_csv.str());
    write_file_atomic(config.out_dir / "stability_summary.csv", summary.str());
    write_failures(config.out_dir, config, failures);
    log << (failures.empty() ? "status: ok" : "status: " + std::to_string(failures.size()) + " failure(s)") << '\n';
    write_file_atomic(config.out_dir / "run.log", log.str());
    return failures.empty() ? 0 : 1;
}

int cmd_stats(const StatsConfig& config, std::ostream& out, std::ostream& err) {
    if (!fs::exists(config.matrix)) {
        err << "error: matrix file '" << config.matrix.string() << "' not found\n";
        return 2;
    }
    const bool all = config.mode == "all";
    if (!all && config.mode != "control" && config.mode != "hommel" && config.mode != "shaffer") {
        err << "error: unknown mode '" << config.mode << "' (expected all, control, hommel or shaffer)\n";
        return 2;
    }
    if (!(config.alpha >= 0.0 && config.alpha <= 1.0)) {
        err << "error: alpha must lie in [0, 1]\n";
        return 2;
    }
    try {
        const ResultMatrix matrix = load_result_matrix(config.matrix.string());
        const RankTable ranks = average_ranks(matrix);
        const FriedmanResult friedman = friedman_test(ranks);

        std::size_t control = 0;
        if (config.control) {
            const auto& algs = ranks.algorithms;
            const auto it = std::find(algs.begin(), algs.end(), *config.control);
            if (it == algs.end()) {
                err << "error: control algorithm '" << *config.control << "' is not a matrix column\n";
                return 1;
            }
            control = static_cast<std::size_t>(it - algs.begin());
        }

        std::ostringstream text;
        write_rank_table(text, ranks);
        write_file_atomic(config.out_dir / "ranks.csv", text.str());
        text.str("");
        write_friedman(text, friedman);
        write_file_atomic(config.out_dir / "friedman.csv", text.str());

        out << "datasets " << ranks.datasets.size() << ", algorithms " << ranks.algorithms.size() << '\n';
        out << "average ranks:";
        for (std::size_t j = 0; j < ranks.algorithms.size(); ++j) {
            out << ' ' << ranks.algorithms[j] << '=' << fmt(ranks.average[j]);
        }
        out << '\n';
        out << "friedman chi2 " << fmt(friedman.statistic) << " df " << friedman.df << " p " << fmt(friedman.p_value)
            << '\n';

        auto emit = [&](const std::string& title, const std::string& file, const std::vector<Comparison>& rows) {
            text.str("");
            write_comparisons(text, rows);
            write_file_atomic(config.out_dir / file, text.str());
            out << title << '\n';
            for (const auto& c : rows) {
                out << "  " << c.label << " z=" << fmt(c.z) << " p=" << fmt(c.p_value) << " threshold=" << fmt(c.threshold)
                    << (c.significant ? " significant" : "") << '\n';
            }
        };
        if (all || config.mode == "control") {
            emit("control " + ranks.algorithms[control] + " vs. all (step-down):", "control.csv",
                 compare_with_control(ranks, control, config.alpha, StepdownMode::control_vs_all));
        }
        if (all || config.mode == "hommel") {
            emit("control " + ranks.algorithms[control] + " vs. all (hommel):", "hommel.csv",
                 compare_with_control(ranks, control, config.alpha, StepdownMode::hommel));
        }
        if (all || config.mode == "shaffer") {
            emit("pairwise (shaffer):", "pairwise.csv", compare_all_pairs(ranks, config.alpha));
        }
        return 0;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return 1;
    }
}

int cmd_dataset_info(std::span<const std::string> paths, std::ostream& out, std::ostream& err) {
    int status = 0;
    for (const auto& name : paths) {
        try {
            const DatasetTable data = load_dataset(resolve_dataset(name));
            out << data.name() << ": " << dataset_summary(data) << '\n';
        } catch (const MissingPath& e) {
            err << "error: " << e.what() << '\n';
            status = 2;
        } catch (const std::exception& e) {
            err << "error: " << e.what() << '\n';
            status = std::max(status, 1);
        }
    }
    return status;
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Ant-Miner rule induction and bagged ensembles: benchmarks and statistics", "eantminer"};
    app.require_subcommand(1);

    std::vector<std::string> datasets;
    std::string config_file;
    std::map<std::string, std::string> flag_values;
    std::vector<std::pair<std::string, CLI::Option*>> flag_options;

    auto add_experiment_flags = [&](CLI::App* sub) {
        sub->add_option("datasets", datasets, "Dataset files or names found under $EANTMINER_DATA_DIR");
        sub->add_option("--config", config_file, "key = value file (flags override it)");
        auto flag = [&](const std::string& key, const std::string& name, const std::string& help) {
            flag_options.emplace_back(key, sub->add_option(name, flag_values[key], help));
        };
        flag("seed", "--seed", "Master seed");
        flag("profile", "--profile", "desk (200 ants, 3 iterations) or paper");
        flag("algo", "--algo", "single, ensemble or both");
        flag("protocol", "--protocol", "paper (CV single, hold-out ensemble), cv or holdout");
        flag("replicas", "--replicas", "Ensemble size T");
        flag("folds", "--folds", "Cross-validation folds");
        flag("iterations", "--iterations", "Repetitions (trials for stability)");
        flag("workers", "--workers", "Concurrent ensemble members");
        flag("out", "--out", "Output directory");
        flag("ants", "--ants", "Ants per colony");
        flag("min_covered", "--min-covered", "Minimum cases covered per rule");
        flag("max_uncovered", "--max-uncovered", "Uncovered cases that stop training");
        flag("convergence", "--convergence", "Identical rules that stop a colony");
        flag("alpha", "--pheromone-exponent", "Pheromone exponent");
        flag("beta", "--heuristic-exponent", "Heuristic exponent");
        flag("evaporation", "--evaporation", "Pheromone evaporation factor");
    };

    CLI::App* bench = app.add_subcommand("bench", "Run experiments");
    bench->require_subcommand(1);
    CLI::App* bench_run = bench->add_subcommand("run", "Error and model size per dataset");
    add_experiment_flags(bench_run);
    CLI::App* bench_stab = bench->add_subcommand("stability", "Per-fold error curves");
    add_experiment_flags(bench_stab);

    StatsConfig stats;
    std::string matrix;
    std::string control;
    std::string stats_out = "stats";
    CLI::App* stats_cmd = app.add_subcommand("stats", "Statistical comparison");
    stats_cmd->require_subcommand(1);
    CLI::App* compare = stats_cmd->add_subcommand("compare", "Friedman test and post-hoc comparisons");
    compare->add_option("matrix", matrix, "Summary CSV or datasets x algorithms matrix")->required();
    compare->add_option("--alpha", stats.alpha, "Significance level");
    compare->add_option("--mode", stats.mode, "all, control, hommel or shaffer");
    CLI::Option* control_opt = compare->add_option("--control", control, "Control algorithm (default: first column)");
    compare->add_option("--out", stats_out, "Output directory");

    std::vector<std::string> info_paths;
    CLI::App* dataset = app.add_subcommand("dataset", "Dataset utilities");
    dataset->require_subcommand(1);
    CLI::App* info = dataset->add_subcommand("info", "Attribute and example counts");
    info->add_option("paths", info_paths, "Dataset files")->required();

    std::vector<std::string> argv_store{"eantminer"};
    argv_store.insert(argv_store.end(), args.begin(), args.end());
    std::vector<char*> argv;
    for (auto& a : argv_store) {
        argv.push_back(a.data());
    }
    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? 0 : 2;
    }

    if (bench_run->parsed() || bench_stab->parsed()) {
        ExperimentConfig config;
        try {
            std::map<std::string, std::string> file_settings;
            if (!config_file.empty()) {
                file_settings = read_config_file(config_file);
            }
            std::map<std::string, std::string> flags;
            for (const auto& [key, opt] : flag_options) {
                if (opt->count() > 0) {
                    flags[key] = flag_values[key];
                }
            }
            config = resolve_config(file_settings, flags, datasets);
        } catch (const MissingPath& e) {
            err << "error: " << e.what() << '\n';
            return 2;
        } catch (const std::exception& e) {
            err << "error: invalid configuration: " << e.what() << '\n';
            return 2;
        }
        return bench_run->parsed() ? cmd_bench(config, out, err) : cmd_stability(config, out, err);
    }
    if (compare->parsed()) {
        stats.matrix = matrix;
        stats.out_dir = stats_out;
        if (control_opt->count() > 0) {
            stats.control = control;
        }
        return cmd_stats(stats, out, err);
    }
    if (info->parsed()) {
        return cmd_dataset_info(info_paths, out, err);
    }
    return 2;
}

}  // namespace eam::cli
