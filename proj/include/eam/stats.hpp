#pragma once

// Non-parametric comparison of several algorithms over several datasets:
// average ranks, the Friedman test, rank-based z statistics and step-down
// multiple-comparison procedures.

#include <cstddef>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace eam {

/// Datasets x algorithms matrix of error rates (lower is better).
class ResultMatrix {
public:
    ResultMatrix(std::vector<std::string> datasets, std::vector<std::string> algorithms,
                 std::vector<std::vector<double>> values);

    std::size_t dataset_count() const noexcept { return datasets_.size(); }
    std::size_t algorithm_count() const noexcept { return algorithms_.size(); }
    const std::vector<std::string>& datasets() const noexcept { return datasets_; }
    const std::vector<std::string>& algorithms() const noexcept { return algorithms_; }
    double at(std::size_t dataset, std::size_t algorithm) const { return values_.at(dataset).at(algorithm); }
    const std::vector<double>& row(std::size_t dataset) const { return values_.at(dataset); }

private:
    std::vector<std::string> datasets_;
    std::vector<std::string> algorithms_;
    std::vector<std::vector<double>> values_;
};

/// Reads either a wide table (`dataset,<alg>,<alg>...`) or a long summary with
/// `dataset`, `algorithm` and `mean_error` columns. Columns named `seed` or
/// `config` in a wide table are ignored.
ResultMatrix parse_result_matrix(std::string_view csv_text, const std::string& source = "matrix");
ResultMatrix load_result_matrix(const std::string& path);

/// Ranks within one row, 1 = smallest value, tied values share the mean rank.
std::vector<double> rank_row(std::span<const double> values);

struct RankTable {
    std::vector<std::string> algorithms;
    std::vector<std::string> datasets;
    std::vector<std::vector<double>> ranks;  // per dataset
    std::vector<double> average;             // per algorithm
};

RankTable average_ranks(const ResultMatrix& matrix);

struct FriedmanResult {
    double statistic = 0.0;
    std::size_t df = 0;
    double p_value = 1.0;
    /// Divisor applied for tied ranks (1 when there are no ties).
    double tie_correction = 1.0;
};

/// Friedman chi-square with correction for ties, referred to chi-square(m-1).
FriedmanResult friedman_test(const ResultMatrix& matrix);
FriedmanResult friedman_test(const RankTable& ranks);

/// Regularized upper incomplete gamma Q(a, x).
double regularized_gamma_q(double a, double x);
double chi_square_survival(double x, double df);
/// Two-sided normal tail, 2 * (1 - Phi(|z|)).
double normal_two_sided_p(double z);

/// Standard error of an average-rank difference for m algorithms over n datasets.
double rank_difference_se(std::size_t algorithms, std::size_t datasets);
/// (R_a - R_b) / SE.
double pairwise_z(const RankTable& ranks, std::size_t a, std::size_t b);

enum class StepdownMode {
    control_vs_all,     // alpha / (k - i + 1)
    hommel,             // Hommel's procedure
    shaffer_pairwise,   // alpha / t_i with Shaffer's attainable true-hypothesis counts
};

StepdownMode parse_stepdown_mode(std::string_view name);

struct Hypothesis {
    std::string label;
    double z = 0.0;
    double p_value = 1.0;
};

struct Comparison {
    std::string label;
    double z = 0.0;
    double p_value = 1.0;
    double threshold = 0.0;
    double adjusted_p = 1.0;
    bool significant = false;
};

/// Hypotheses sorted by ascending p (stable), each with its threshold,
/// adjusted p-value and rejection flag. shaffer_pairwise requires
/// m(m-1)/2 hypotheses for some m.
std::vector<Comparison> stepdown(std::span<const Hypothesis> hypotheses, double alpha, StepdownMode mode);

/// Thresholds alone, for p-values already in ascending order.
std::vector<double> stepdown_thresholds(std::size_t count, double alpha, StepdownMode mode);

/// Sorted set of attainable numbers of simultaneously true pairwise
/// hypotheses among m algorithms.
std::vector<std::size_t> shaffer_true_counts(std::size_t m);
/// t_i for i = 1..m(m-1)/2.
std::vector<std::size_t> shaffer_limits(std::size_t m);

/// Index of the algorithm with the lowest average rank (first on ties).
std::size_t best_algorithm(const RankTable& ranks);

std::vector<Comparison> compare_with_control(const RankTable& ranks, std::size_t control, double alpha,
                                             StepdownMode mode = StepdownMode::control_vs_all);
std::vector<Comparison> compare_all_pairs(const RankTable& ranks, double alpha);

void write_rank_table(std::ostream& out, const RankTable& ranks);
void write_friedman(std::ostream& out, const FriedmanResult& result);
void write_comparisons(std::ostream& out, std::span<const Comparison> comparisons);

}  // namespace eam
