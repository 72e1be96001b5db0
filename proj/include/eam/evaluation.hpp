#pragma once

// Experimental protocols: repeated stratified cross-validation for single
// models, repeated 70/30 hold-out for bagged ensembles, and per-fold
// stability curves.

#include <cstddef>
#include <iosfwd>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "eam/classifier.hpp"
#include "eam/dataset.hpp"

namespace eam {

/// Misclassified fraction of `test`.
double test_error(const Classifier& model, const DatasetTable& test);

/// Terms attributed to one trained model: per-member mean for ensembles,
/// term_count() otherwise.
double reported_terms(const Classifier& model);

double mean(std::span<const double> xs);
/// Unbiased sample variance (0 for fewer than two values).
double sample_variance(std::span<const double> xs);

/// Errors per (iteration, run); a run is a fold in CV and the single split in hold-out.
struct ErrorReport {
    std::string dataset;
    std::string algorithm;
    std::vector<std::vector<double>> per_run_errors;

    double mean_error() const;
    std::size_t run_count() const;
};

struct ModelSizeReport {
    std::vector<std::vector<double>> per_run_terms;        // reported_terms per run
    std::vector<std::vector<double>> per_run_total_terms;  // term_count per run

    double mean_terms() const;
    /// Standard error of the mean of per-run terms.
    double std_error() const;
    double mean_total_terms() const;
};

struct EvaluationResult {
    std::string protocol;  // "cv" or "holdout"
    ErrorReport errors;
    ModelSizeReport sizes;
};

/// `iterations` rounds of stratified k-fold CV, each with a fresh seed-derived fold plan.
EvaluationResult cross_validate(const DatasetTable& data, const Learner& learner, std::size_t k,
                                std::size_t iterations, Seed seed);

/// `iterations` rounds of a fresh stratified split; `learner` trains on the
/// training part and is scored on the rest.
EvaluationResult evaluate_holdout(const DatasetTable& data, const Learner& learner, std::size_t iterations,
                                  Seed seed, double train_fraction = 0.7);

/// Hold-out protocol for bagged ensembles of `base_learner`, on the same
/// split seeds as evaluate_holdout.
EvaluationResult evaluate_ensemble(const DatasetTable& data, const Learner& base_learner, std::size_t replicas,
                                   std::size_t iterations, Seed seed, double train_fraction = 0.7);

/// Seeds used by the protocols, exposed so callers can reproduce a run.
Seed cv_fold_seed(Seed master, std::size_t iteration);
Seed cv_learner_seed(Seed master, std::size_t iteration, std::size_t fold);
Seed holdout_split_seed(Seed master, std::size_t iteration);
Seed holdout_learner_seed(Seed master, std::size_t iteration);

struct StabilityCurve {
    std::string dataset;
    std::string algorithm;
    std::vector<double> per_fold_errors;

    double variance() const { return sample_variance(per_fold_errors); }
};

/// Per-fold errors of one k-fold CV (fold plan and learner seeds as in the
/// first cross_validate iteration).
StabilityCurve stability_curve(const DatasetTable& data, const Learner& learner, Seed seed, std::size_t k = 10);

/// Fraction rendered as a percentage with two decimals, e.g. 0.10667 -> "10.67".
std::string format_percent(double fraction);

/// Header `dataset,algorithm,iteration,run,error,terms`, one line per run.
/// Each `extra` (name, value) pair adds a trailing constant column.
void write_runs_csv(std::ostream& out, std::span<const EvaluationResult> results,
                    std::span<const std::pair<std::string, std::string>> extra = {});

/// Two whitespace-separated columns (fold index, error) after `#` comment lines.
void write_curve_data(std::ostream& out, const StabilityCurve& curve, std::span<const std::string> comments);

}  // namespace eam
