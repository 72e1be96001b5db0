#include "eam/evaluation.hpp"

#include <charconv>
#include <cmath>
#include <iomanip>
#include <numeric>
#include <ostream>
#include <sstream>

#include "eam/csv.hpp"
#include "eam/ensemble.hpp"

namespace eam {

namespace {

constexpr std::uint64_t kCvFolds = 0xCF;
constexpr std::uint64_t kCvLearner = 0xC1;
constexpr std::uint64_t kHoldoutSplit = 0x5B;
constexpr std::uint64_t kHoldoutLearner = 0x51;

std::vector<double> flatten(const std::vector<std::vector<double>>& m) {
    std::vector<double> out;
    for (const auto& row : m) {
        out.insert(out.end(), row.begin(), row.end());
    }
    return out;
}

std::string shortest(double v) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

}  // namespace

double test_error(const Classifier& model, const DatasetTable& test) {
    if (test.empty()) {
        throw std::invalid_argument("test_error: empty test table");
    }
    std::size_t wrong = 0;
    for (const auto& row : test.rows()) {
        if (model.predict(row) != row.label) {
            ++wrong;
        }
    }
    return static_cast<double>(wrong) / static_cast<double>(test.size());
}

double reported_terms(const Classifier& model) {
    if (const auto* ensemble = dynamic_cast<const EnsembleModel*>(&model)) {
        return ensemble->mean_member_terms();
    }
    return static_cast<double>(model.term_count());
}

double mean(std::span<const double> xs) {
    if (xs.empty()) {
        return 0.0;
    }
    return std::accumulate(xs.begin(), xs.end(), 0.0) / static_cast<double>(xs.size());
}

double sample_variance(std::span<const double> xs) {
    if (xs.size() < 2) {
        return 0.0;
    }
    const double m = mean(xs);
    double ss = 0.0;
    for (double x : xs) {
        ss += (x - m) * (x - m);
    }
    return ss / static_cast<double>(xs.size() - 1);
}

double ErrorReport::mean_error() const { return mean(flatten(per_run_errors)); }

std::size_t ErrorReport::run_count() const { return flatten(per_run_errors).size(); }

double ModelSizeReport::mean_terms() const { return mean(flatten(per_run_terms)); }

double ModelSizeReport::std_error() const {
    const auto all = flatten(per_run_terms);
    if (all.size() < 2) {
        return 0.0;
    }
    return std::sqrt(sample_variance(all) / static_cast<double>(all.size()));
}

double ModelSizeReport::mean_total_terms() const { return mean(flatten(per_run_total_terms)); }

Seed cv_fold_seed(Seed master, std::size_t iteration) { return derive_seed(master, {kCvFolds, iteration}); }
Seed cv_learner_seed(Seed master, std::size_t iteration, std::size_t fold) {
    return derive_seed(master, {kCvLearner, iteration, fold});
}
Seed holdout_split_seed(Seed master, std::size_t iteration) { return derive_seed(master, {kHoldoutSplit, iteration}); }
Seed holdout_learner_seed(Seed master, std::size_t iteration) {
    return derive_seed(master, {kHoldoutLearner, iteration});
}

EvaluationResult cross_validate(const DatasetTable& data, const Learner& learner, std::size_t k,
                                std::size_t iterations, Seed seed) {
    if (k < 2) {
        throw std::invalid_argument("cross_validate: k must be at least 2");
    }
    if (iterations == 0) {
        throw std::invalid_argument("cross_validate: iterations must be positive");
    }
    EvaluationResult result;
    result.protocol = "cv";
    result.errors.dataset = data.name();
    result.errors.algorithm = learner.name();
    for (std::size_t it = 0; it < iterations; ++it) {
        const FoldPlan plan = stratified_folds(data, k, cv_fold_seed(seed, it));
        std::vector<double> errors;
        std::vector<double> terms;
        std::vector<double> totals;
        for (std::size_t fold = 0; fold < k; ++fold) {
            const auto train_idx = plan.train_indices(fold);
            const auto test_idx = plan.test_indices(fold);
            const DatasetTable train = data.subset(train_idx);
            const DatasetTable test = data.subset(test_idx);
            const ClassifierPtr model = learner.fit(train, cv_learner_seed(seed, it, fold));
            errors.push_back(test_error(*model, test));
            terms.push_back(reported_terms(*model));
            totals.push_back(static_cast<double>(model->term_count()));
        }
        result.errors.per_run_errors.push_back(std::move(errors));
        result.sizes.per_run_terms.push_back(std::move(terms));
        result.sizes.per_run_total_terms.push_back(std::move(totals));
    }
    return result;
}

EvaluationResult evaluate_holdout(const DatasetTable& data, const Learner& learner, std::size_t iterations,
                                  Seed seed, double train_fraction) {
    if (iterations == 0) {
        throw std::invalid_argument("evaluate_holdout: iterations must be positive");
    }
    EvaluationResult result;
    result.protocol = "holdout";
    result.errors.dataset = data.name();
    result.errors.algorithm = learner.name();
    for (std::size_t it = 0; it < iterations; ++it) {
        const auto [train, test] = holdout_split(data, train_fraction, holdout_split_seed(seed, it));
        const ClassifierPtr model = learner.fit(train, holdout_learner_seed(seed, it));
        result.errors.per_run_errors.push_back({test_error(*model, test)});
        result.sizes.per_run_terms.push_back({reported_terms(*model)});
        result.sizes.per_run_total_terms.push_back({static_cast<double>(model->term_count())});
    }
    return result;
}

EvaluationResult evaluate_ensemble(const DatasetTable& data, const Learner& base_learner, std::size_t replicas,
                                   std::size_t iterations, Seed seed, double train_fraction) {
    if (iterations == 0) {
        throw std::invalid_argument("evaluate_ensemble: iterations must be positive");
    }
    EvaluationResult result;
    result.protocol = "holdout";
    result.errors.dataset = data.name();
    result.errors.algorithm = "e" + base_learner.name();
    for (std::size_t it = 0; it < iterations; ++it) {
        const auto [train, test] = holdout_split(data, train_fraction, holdout_split_seed(seed, it));
        const EnsembleModel model =
            train_ensemble(train, base_learner, EnsembleParams{replicas, holdout_learner_seed(seed, it)});
        result.errors.per_run_errors.push_back({test_error(model, test)});
        result.sizes.per_run_terms.push_back({model.mean_member_terms()});
        result.sizes.per_run_total_terms.push_back({static_cast<double>(model.term_count())});
    }
    return result;
}

StabilityCurve stability_curve(const DatasetTable& data, const Learner& learner, Seed seed, std::size_t k) {
    const EvaluationResult cv = cross_validate(data, learner, k, 1, seed);
    return StabilityCurve{data.name(), learner.name(), cv.errors.per_run_errors.front()};
}

std::string format_percent(double fraction) {
    std::ostringstream out;
    out << std::fixed << std::setprecision(2) << fraction * 100.0;
    return out.str();
}

void write_runs_csv(std::ostream& out, std::span<const EvaluationResult> results,
                    std::span<const std::pair<std::string, std::string>> extra) {
    csv::Record header{"dataset", "algorithm", "iteration", "run", "error", "terms"};
    for (const auto& [name, value] : extra) {
        header.push_back(name);
    }
    csv::write_record(out, header);
    for (const auto& r : results) {
        for (std::size_t it = 0; it < r.errors.per_run_errors.size(); ++it) {
            const auto& errs = r.errors.per_run_errors[it];
            for (std::size_t run = 0; run < errs.size(); ++run) {
                csv::Record rec{r.errors.dataset, r.errors.algorithm, std::to_string(it), std::to_string(run),
                                shortest(errs[run]), shortest(r.sizes.per_run_terms[it][run])};
                for (const auto& [name, value] : extra) {
                    rec.push_back(value);
                }
                csv::write_record(out, rec);
            }
        }
    }
}

void write_curve_data(std::ostream& out, const StabilityCurve& curve, std::span<const std::string> comments) {
    for (const auto& c : comments) {
        out << "# " << c << "\n";
    }
    out << "# fold error (" << curve.dataset << ", " << curve.algorithm << ")\n";
    for (std::size_t f = 0; f < curve.per_fold_errors.size(); ++f) {
        out << f + 1 << ' ' << shortest(curve.per_fold_errors[f]) << "\n";
    }
}

}  // namespace eam
