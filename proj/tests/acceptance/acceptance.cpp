// One PASS/FAIL line per acceptance criterion; exit status 1 if any fails.

#include <charconv>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "cli.hpp"
#include "eam/antminer.hpp"
#include "eam/ensemble.hpp"
#include "eam/evaluation.hpp"
#include "eam/rng.hpp"
#include "eam/stats.hpp"
#include "helpers.hpp"
#include "oracles.hpp"

using namespace eam;
namespace fs = std::filesystem;

namespace {

struct Outcome {
    bool pass;
    std::string detail;
};

std::string num(double v, int precision = 4) {
    std::ostringstream s;
    s.precision(precision);
    s << v;
    return s.str();
}

AntMinerParams desk_params() {
    AntMinerParams p;
    p.num_ants = 200;
    return p;
}

Outcome majority_vote_oracle() {
    const std::vector<double> priors{0.5, 0.5};
    std::size_t agree = 0;
    for (unsigned mask = 0; mask < 32; ++mask) {
        std::vector<std::size_t> votes;
        std::size_t counts[2] = {0, 0};
        for (int b = 0; b < 5; ++b) {
            votes.push_back((mask >> b) & 1U);
            ++counts[votes.back()];
        }
        const std::size_t expected = counts[1] > counts[0] ? 1 : 0;
        agree += majority_vote(votes, priors) == expected;
    }
    // yes = 0, no = 1
    const bool example = majority_vote(std::vector<std::size_t>{0, 1, 0, 1, 0}, priors) == 0;
    return {agree == 32 && example, std::to_string(agree) + "/32 vectors agree, [yes,no,yes,no,yes] -> " +
                                        (example ? "yes" : "no")};
}

Outcome bootstrap_law() {
    const std::size_t n = 100;
    double total = 0;
    bool sizes_ok = true;
    for (std::uint64_t s = 0; s < 1000; ++s) {
        const auto idx = bootstrap_indices(n, derive_seed(2024, {s}));
        sizes_ok = sizes_ok && idx.size() == n;
        total += static_cast<double>(std::set<std::size_t>(idx.begin(), idx.end()).size()) / static_cast<double>(n);
    }
    const double mean = total / 1000.0;
    return {sizes_ok && std::abs(mean - 0.632) <= 0.02,
            "mean distinct fraction " + num(mean) + ", sizes " + (sizes_ok ? "all 100" : "wrong")};
}

std::vector<std::vector<std::size_t>> per_class_fold_counts(const DatasetTable& data, const FoldPlan& plan) {
    std::vector<std::vector<std::size_t>> counts(plan.k, std::vector<std::size_t>(data.schema().class_count(), 0));
    for (std::size_t i = 0; i < data.size(); ++i) {
        ++counts[plan.assignments[i]][data.rows()[i].label];
    }
    return counts;
}

Outcome stratification() {
    const DatasetTable iris = test::load_fixture("iris");
    bool iris_ok = true;
    for (Seed seed = 0; seed < 20; ++seed) {
        for (const auto& fold : per_class_fold_counts(iris, stratified_folds(iris, 10, seed))) {
            iris_ok = iris_ok && fold == std::vector<std::size_t>{5, 5, 5};
        }
    }
    const std::vector<DatasetTable> imbalanced{test::load_fixture("glass"), test::load_fixture("breast-l"),
                                               test::load_fixture("breast-w"), test::load_fixture("wine")};
    bool spread_ok = true;
    for (const auto& data : imbalanced) {
        for (Seed seed = 0; seed < 20; ++seed) {
            const auto counts = per_class_fold_counts(data, stratified_folds(data, 10, seed));
            for (std::size_t c = 0; c < data.schema().class_count(); ++c) {
                std::size_t lo = data.size(), hi = 0;
                for (const auto& fold : counts) {
                    lo = std::min(lo, fold[c]);
                    hi = std::max(hi, fold[c]);
                }
                spread_ok = spread_ok && hi - lo <= 1;
            }
        }
    }
    return {iris_ok && spread_ok, std::string("iris 5/5/5 ") + (iris_ok ? "yes" : "no") +
                                      ", imbalanced per-class spread <= 1 " + (spread_ok ? "yes" : "no")};
}

Outcome discretization_oracle() {
    std::mt19937_64 gen(99);
    std::size_t agree = 0;
    for (int trial = 0; trial < 200; ++trial) {
        const std::size_t n = std::uniform_int_distribution<std::size_t>(2, 12)(gen);
        const std::size_t classes = std::uniform_int_distribution<std::size_t>(2, 3)(gen);
        std::vector<double> v(n);
        std::vector<std::size_t> l(n);
        for (std::size_t i = 0; i < n; ++i) {
            v[i] = static_cast<double>(std::uniform_int_distribution<int>(0, 8)(gen)) * 0.25;
            l[i] = std::uniform_int_distribution<std::size_t>(0, classes - 1)(gen);
        }
        const auto oracle = test::exhaustive_split(v, l, classes);
        const DatasetTable t = test::continuous_table(v, l, classes);
        if (!oracle) {
            try {
                discretize_threshold(0, t);
            } catch (const NoSplitAvailable&) {
                ++agree;
            }
            continue;
        }
        const auto split = discretize_threshold(0, t);
        agree += split.threshold == oracle->threshold && split.op == oracle->op;
    }
    return {agree == 200, std::to_string(agree) + "/200 columns agree"};
}

Outcome pruning_monotonicity() {
    std::mt19937_64 gen(5150);
    std::size_t ok = 0;
    for (int i = 0; i < 100; ++i) {
        const std::size_t classes = 2 + gen() % 2;
        const DatasetTable t = test::random_nominal_table(gen, 30 + gen() % 30, 3 + gen() % 3, classes);
        Rule r;
        r.predicted_class = gen() % classes;
        for (std::size_t a = 0; a < t.schema().attribute_count(); ++a) {
            if (gen() % 2 == 0) {
                r.terms.push_back(Term::equals(a, gen() % t.schema().attribute(a).domain_size()));
            }
        }
        ok += rule_quality(prune_rule(r, t), t) >= rule_quality(r, t);
    }
    return {ok == 100, std::to_string(ok) + "/100 rules"};
}

std::string slurp(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

Outcome determinism() {
    const fs::path root = fs::temp_directory_path() / "eam_acceptance_determinism";
    fs::remove_all(root);
    std::vector<std::string> summaries;
    for (const char* run : {"a", "b"}) {
        std::ostringstream out, err;
        const int rc = cli::run({"bench", "run", "--seed", "42", "--out", (root / run).string(),
                                 test::fixture("iris.csv")},
                                out, err);
        if (rc != 0) {
            return {false, "bench run exited " + std::to_string(rc) + ": " + err.str()};
        }
        summaries.push_back(slurp(root / run / "summary.csv"));
    }
    const bool same = !summaries[0].empty() && summaries[0] == summaries[1];
    return {same, same ? "summary.csv identical (" + std::to_string(summaries[0].size()) + " bytes)"
                       : "summary.csv differs"};
}

Outcome trend() {
    const AntMinerLearner learner(desk_params());
    std::size_t wins = 0;
    std::ostringstream detail;
    for (const char* name : {"iris", "wine", "glass", "breast-w"}) {
        const DatasetTable data = test::load_fixture(name);
        double single = 0, ensemble = 0;
        for (Seed seed = 1; seed <= 10; ++seed) {
            single += cross_validate(data, learner, 10, 3, seed).errors.mean_error();
            ensemble += evaluate_ensemble(data, learner, 10, 3, seed).errors.mean_error();
        }
        single /= 10;
        ensemble /= 10;
        wins += ensemble <= single;
        detail << name << ' ' << num(single) << " vs " << num(ensemble) << "; ";
    }
    const double iris_cv =
        cross_validate(test::load_fixture("iris"), learner, 10, 10, 1).errors.mean_error();
    detail << "ensemble <= single on " << wins << "/4; iris 10x10 CV " << num(iris_cv);
    return {wins >= 3 && iris_cv <= 0.20, detail.str()};
}

Outcome stability() {
    const auto base = std::make_shared<AntMinerLearner>(desk_params());
    const BaggedLearner bagged(base, 10);
    std::ostringstream detail;
    bool pass = true;
    for (const char* name : {"iris", "wine"}) {
        const DatasetTable data = test::load_fixture(name);
        std::size_t wins = 0;
        for (std::uint64_t t = 0; t < 10; ++t) {
            const Seed trial = derive_seed(1, {0x57AB, t});
            const double single = stability_curve(data, *base, trial).variance();
            const double ensemble = stability_curve(data, bagged, trial).variance();
            wins += ensemble <= single;
        }
        pass = pass && wins >= 7;
        detail << name << ' ' << wins << "/10 trials; ";
    }
    std::string text = detail.str();
    text.resize(text.size() - 2);
    return {pass, text};
}

Outcome friedman_oracle() {
    std::mt19937_64 gen(4);
    double worst = 0;
    for (int i = 0; i < 50; ++i) {
        std::vector<std::vector<double>> x(5, std::vector<double>(4));
        for (auto& row : x) {
            for (auto& v : row) {
                v = i % 2 ? std::uniform_real_distribution<double>(0, 1)(gen) : static_cast<double>(gen() % 4);
            }
        }
        const ResultMatrix m({"d0", "d1", "d2", "d3", "d4"}, {"a", "b", "c", "d"}, x);
        const auto f = friedman_test(m);
        const double expected = f.tie_correction <= 0 ? 0.0 : test::oracle_friedman(x);
        worst = std::max(worst, std::abs(f.statistic - expected));
    }
    const ResultMatrix flat({"x", "y", "z"}, {"a", "b", "c", "d"},
                            {{0.2, 0.2, 0.2, 0.2}, {0.4, 0.4, 0.4, 0.4}, {0.1, 0.1, 0.1, 0.1}});
    const auto zero = friedman_test(flat);
    const bool flat_ok = zero.statistic == 0.0 && zero.p_value == 1.0;
    return {worst <= 1e-9 && flat_ok, "max |diff| " + num(worst, 3) + ", identical columns statistic " +
                                          num(zero.statistic) + " p " + num(zero.p_value)};
}

// Printed values are digit prefixes of the exact value.
bool matches_printed(double value, const std::string& printed) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, value);
    return std::string(buf, res.ptr).rfind(printed, 0) == 0;
}

Outcome threshold_sequences() {
    const auto control = stepdown_thresholds(7, 0.05, StepdownMode::control_vs_all);
    const std::vector<std::string> printed{"0.0071428571", "0.0083333", "0.01", "0.0125", "0.016666", "0.025", "0.05"};
    bool ok = control.size() == 7;
    for (std::size_t i = 0; ok && i < 7; ++i) {
        ok = matches_printed(control[i], printed[i]);
    }
    const auto pairwise = stepdown_thresholds(28, 0.05, StepdownMode::shaffer_pairwise);
    const bool first_ok = pairwise.front() == 0.05 / 28 && matches_printed(pairwise.front(), "0.00178571");
    return {ok && first_ok, "control sequence " + std::string(ok ? "matches" : "differs") + ", first pairwise " +
                                num(pairwise.front(), 9)};
}

Outcome z_statistic() {
    RankTable ranks;
    ranks.algorithms = {"a", "b", "c", "d", "e", "f", "g", "h"};
    ranks.datasets = std::vector<std::string>(17, "d");
    ranks.average = {4.5, 3.5, 4.5, 4.5, 4.5, 4.5, 4.5, 5.5};
    const double z = pairwise_z(ranks, 0, 1);
    return {std::abs(z - 1.190238071) <= 1e-6, "z = " + num(z, 10) + " for a rank difference of 1"};
}

}  // namespace

int main() {
    const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
        {"majority-vote oracle", majority_vote_oracle},
        {"bootstrap law", bootstrap_law},
        {"stratification", stratification},
        {"discretization oracle", discretization_oracle},
        {"pruning monotonicity", pruning_monotonicity},
        {"determinism", determinism},
        {"trend check", trend},
        {"stability trend", stability},
        {"friedman oracle", friedman_oracle},
        {"threshold sequences", threshold_sequences},
        {"z-statistic cross-check", z_statistic},
    };
    int failures = 0;
    for (const auto& [name, check] : criteria) {
        const auto start = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = check();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        std::cout << (o.pass ? "PASS " : "FAIL ") << name << ": " << o.detail << " [" << num(secs, 3) << "s]"
                  << std::endl;
        failures += !o.pass;
    }
    std::cout << (failures == 0 ? "all criteria passed" : std::to_string(failures) + " criteria failed") << '\n';
    return failures == 0 ? 0 : 1;
}
