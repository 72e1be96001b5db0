#include "eam/stats.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <map>
#include <numeric>
#include <ostream>
#include <set>
#include <sstream>
#include <stdexcept>

#include "eam/csv.hpp"
#include "eam/dataset.hpp"

namespace eam {

namespace {

std::string fmt(double v) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

bool parse_number(const std::string& text, double& out) {
    const char* first = text.data();
    const char* last = text.data() + text.size();
    while (first != last && *first == ' ') {
        ++first;
    }
    while (last != first && last[-1] == ' ') {
        --last;
    }
    if (first != last && *first == '+') {
        ++first;
    }
    const auto res = std::from_chars(first, last, out);
    return res.ec == std::errc{} && res.ptr == last && first != last;
}

}  // namespace

ResultMatrix::ResultMatrix(std::vector<std::string> datasets, std::vector<std::string> algorithms,
                           std::vector<std::vector<double>> values)
    : datasets_(std::move(datasets)), algorithms_(std::move(algorithms)), values_(std::move(values)) {
    if (datasets_.size() < 2 || algorithms_.size() < 2) {
        throw std::invalid_argument("result matrix needs at least 2 datasets and 2 algorithms");
    }
    if (values_.size() != datasets_.size()) {
        throw std::invalid_argument("result matrix row count does not match the dataset labels");
    }
    for (std::size_t i = 0; i < values_.size(); ++i) {
        if (values_[i].size() != algorithms_.size()) {
            throw std::invalid_argument("result matrix row '" + datasets_[i] + "' has " +
                                        std::to_string(values_[i].size()) + " cells, expected " +
                                        std::to_string(algorithms_.size()));
        }
        for (double v : values_[i]) {
            if (!std::isfinite(v)) {
                throw std::invalid_argument("result matrix row '" + datasets_[i] + "' has a non-finite cell");
            }
        }
    }
}

ResultMatrix parse_result_matrix(std::string_view csv_text, const std::string& source) {
    const auto records = csv::parse(csv_text);
    if (records.empty()) {
        throw ParseError(source, 0, 0, "empty matrix");
    }
    const auto& header = records.front().fields;
    auto column = [&](const std::string& name) -> std::ptrdiff_t {
        const auto it = std::find(header.begin(), header.end(), name);
        return it == header.end() ? -1 : it - header.begin();
    };

    const std::ptrdiff_t alg_col = column("algorithm");
    const std::ptrdiff_t err_col = column("mean_error");
    const std::ptrdiff_t ds_col = column("dataset");
    if (alg_col >= 0 && err_col >= 0 && ds_col >= 0) {
        std::vector<std::string> datasets;
        std::vector<std::string> algorithms;
        std::map<std::pair<std::string, std::string>, double> cells;
        for (std::size_t r = 1; r < records.size(); ++r) {
            const auto& rec = records[r];
            if (rec.fields.size() != header.size()) {
                throw ParseError(source, rec.line, 0,
                                 "expected " + std::to_string(header.size()) + " fields, found " +
                                     std::to_string(rec.fields.size()));
            }
            const std::string& ds = rec.fields[ds_col];
            const std::string& alg = rec.fields[alg_col];
            double v = 0.0;
            if (!parse_number(rec.fields[err_col], v)) {
                throw ParseError(source, rec.line, static_cast<std::size_t>(err_col) + 1,
                                 "non-numeric value '" + rec.fields[err_col] + "'");
            }
            if (std::find(datasets.begin(), datasets.end(), ds) == datasets.end()) {
                datasets.push_back(ds);
            }
            if (std::find(algorithms.begin(), algorithms.end(), alg) == algorithms.end()) {
                algorithms.push_back(alg);
            }
            if (!cells.emplace(std::make_pair(ds, alg), v).second) {
                throw ParseError(source, rec.line, 0, "duplicate entry for " + ds + "/" + alg);
            }
        }
        std::vector<std::vector<double>> values;
        for (const auto& ds : datasets) {
            std::vector<double> row;
            for (const auto& alg : algorithms) {
                const auto it = cells.find({ds, alg});
                if (it == cells.end()) {
                    throw ParseError(source, 0, 0, "missing entry for " + ds + "/" + alg);
                }
                row.push_back(it->second);
            }
            values.push_back(std::move(row));
        }
        try {
            return ResultMatrix(std::move(datasets), std::move(algorithms), std::move(values));
        } catch (const std::invalid_argument& e) {
            throw ParseError(source, 0, 0, e.what());
        }
    }

    std::vector<std::size_t> value_cols;
    std::vector<std::string> algorithms;
    for (std::size_t c = 1; c < header.size(); ++c) {
        if (header[c] == "seed" || header[c] == "config") {
            continue;
        }
        value_cols.push_back(c);
        algorithms.push_back(header[c]);
    }
    std::vector<std::string> datasets;
    std::vector<std::vector<double>> values;
    for (std::size_t r = 1; r < records.size(); ++r) {
        const auto& rec = records[r];
        if (rec.fields.size() != header.size()) {
            throw ParseError(source, rec.line, 0,
                             "ragged row: expected " + std::to_string(header.size()) + " fields, found " +
                                 std::to_string(rec.fields.size()));
        }
        datasets.push_back(rec.fields[0]);
        std::vector<double> row;
        for (std::size_t c : value_cols) {
            double v = 0.0;
            if (!parse_number(rec.fields[c], v)) {
                throw ParseError(source, rec.line, c + 1, "non-numeric value '" + rec.fields[c] + "'");
            }
            row.push_back(v);
        }
        values.push_back(std::move(row));
    }
    try {
        return ResultMatrix(std::move(datasets), std::move(algorithms), std::move(values));
    } catch (const std::invalid_argument& e) {
        throw ParseError(source, 0, 0, e.what());
    }
}

ResultMatrix load_result_matrix(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw std::runtime_error("cannot open matrix file '" + path + "'");
    }
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_result_matrix(buf.str(), path);
}

std::vector<double> rank_row(std::span<const double> values) {
    std::vector<std::size_t> order(values.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
    std::vector<double> ranks(values.size());
    for (std::size_t i = 0; i < order.size();) {
        std::size_t j = i;
        while (j + 1 < order.size() && values[order[j + 1]] == values[order[i]]) {
            ++j;
        }
        const double r = (static_cast<double>(i + 1) + static_cast<double>(j + 1)) / 2.0;
        for (std::size_t k = i; k <= j; ++k) {
            ranks[order[k]] = r;
        }
        i = j + 1;
    }
    return ranks;
}

RankTable average_ranks(const ResultMatrix& matrix) {
    RankTable t;
    t.algorithms = matrix.algorithms();
    t.datasets = matrix.datasets();
    t.average.assign(matrix.algorithm_count(), 0.0);
    for (std::size_t i = 0; i < matrix.dataset_count(); ++i) {
        t.ranks.push_back(rank_row(matrix.row(i)));
        for (std::size_t j = 0; j < t.average.size(); ++j) {
            t.average[j] += t.ranks.back()[j];
        }
    }
    for (double& r : t.average) {
        r /= static_cast<double>(matrix.dataset_count());
    }
    return t;
}

FriedmanResult friedman_test(const RankTable& ranks) {
    const double n = static_cast<double>(ranks.datasets.size());
    const double m = static_cast<double>(ranks.algorithms.size());
    FriedmanResult res;
    res.df = ranks.algorithms.size() - 1;

    double sum_sq = 0.0;
    for (double r : ranks.average) {
        sum_sq += r * r;
    }
    const double raw = 12.0 * n / (m * (m + 1.0)) * (sum_sq - m * (m + 1.0) * (m + 1.0) / 4.0);

    double ties = 0.0;
    for (const auto& row : ranks.ranks) {
        std::map<double, double> groups;
        for (double r : row) {
            groups[r] += 1.0;
        }
        for (const auto& [rank, count] : groups) {
            ties += count * count * count - count;
        }
    }
    res.tie_correction = 1.0 - ties / (n * (m * m * m - m));
    if (res.tie_correction <= 0.0) {
        res.statistic = 0.0;
        res.p_value = 1.0;
        return res;
    }
    res.statistic = std::max(0.0, raw / res.tie_correction);
    res.p_value = chi_square_survival(res.statistic, static_cast<double>(res.df));
    return res;
}

FriedmanResult friedman_test(const ResultMatrix& matrix) { return friedman_test(average_ranks(matrix)); }

double regularized_gamma_q(double a, double x) {
    if (!(a > 0.0) || x < 0.0 || std::isnan(x)) {
        throw std::domain_error("regularized_gamma_q: need a > 0 and x >= 0");
    }
    if (x == 0.0) {
        return 1.0;
    }
    if (std::isinf(x)) {
        return 0.0;
    }
    constexpr double eps = 1e-16;
    constexpr int max_iter = 100000;
    const double log_prefix = a * std::log(x) - x - std::lgamma(a);
    if (x < a + 1.0) {
        double term = 1.0 / a;
        double sum = term;
        for (int n = 1; n < max_iter; ++n) {
            term *= x / (a + n);
            sum += term;
            if (std::fabs(term) < std::fabs(sum) * eps) {
                break;
            }
        }
        return std::clamp(1.0 - sum * std::exp(log_prefix), 0.0, 1.0);
    }
    // Lentz continued fraction
    constexpr double tiny = 1e-300;
    double b = x + 1.0 - a;
    double c = 1.0 / tiny;
    double d = 1.0 / b;
    double h = d;
    for (int i = 1; i < max_iter; ++i) {
        const double an = -i * (i - a);
        b += 2.0;
        d = an * d + b;
        if (std::fabs(d) < tiny) {
            d = tiny;
        }
        c = b + an / c;
        if (std::fabs(c) < tiny) {
            c = tiny;
        }
        d = 1.0 / d;
        const double delta = d * c;
        h *= delta;
        if (std::fabs(delta - 1.0) < eps) {
            break;
        }
    }
    return std::clamp(std::exp(log_prefix) * h, 0.0, 1.0);
}

double chi_square_survival(double x, double df) {
    if (x <= 0.0) {
        return 1.0;
    }
    return regularized_gamma_q(df / 2.0, x / 2.0);
}

double normal_two_sided_p(double z) { return std::min(1.0, std::erfc(std::fabs(z) / std::sqrt(2.0))); }

double rank_difference_se(std::size_t algorithms, std::size_t datasets) {
    const double m = static_cast<double>(algorithms);
    return std::sqrt(m * (m + 1.0) / (6.0 * static_cast<double>(datasets)));
}

double pairwise_z(const RankTable& ranks, std::size_t a, std::size_t b) {
    if (a >= ranks.average.size() || b >= ranks.average.size()) {
        throw std::out_of_range("pairwise_z: algorithm index out of range");
    }
    return (ranks.average[a] - ranks.average[b]) / rank_difference_se(ranks.algorithms.size(), ranks.datasets.size());
}

StepdownMode parse_stepdown_mode(std::string_view name) {
    if (name == "control" || name == "control-vs-all" || name == "holm") {
        return StepdownMode::control_vs_all;
    }
    if (name == "hommel") {
        return StepdownMode::hommel;
    }
    if (name == "shaffer" || name == "shaffer-pairwise") {
        return StepdownMode::shaffer_pairwise;
    }
    throw std::invalid_argument("unknown step-down mode '" + std::string(name) + "'");
}

std::vector<std::size_t> shaffer_true_counts(std::size_t m) {
    std::vector<std::set<std::size_t>> s(m + 1);
    s[0] = {0};
    if (m >= 1) {
        s[1] = {0};
    }
    for (std::size_t k = 2; k <= m; ++k) {
        for (std::size_t j = 1; j <= k; ++j) {
            const std::size_t pairs = j * (j - 1) / 2;
            for (std::size_t x : s[k - j]) {
                s[k].insert(pairs + x);
            }
        }
    }
    return {s[m].begin(), s[m].end()};
}

std::vector<std::size_t> shaffer_limits(std::size_t m) {
    const auto counts = shaffer_true_counts(m);
    const std::size_t total = m * (m - 1) / 2;
    std::vector<std::size_t> t;
    for (std::size_t i = 1; i <= total; ++i) {
        const std::size_t cap = total - i + 1;
        const auto it = std::upper_bound(counts.begin(), counts.end(), cap);
        t.push_back(*std::prev(it));
    }
    return t;
}

namespace {

std::size_t algorithms_for_pairs(std::size_t pairs) {
    std::size_t m = 2;
    while (m * (m - 1) / 2 < pairs) {
        ++m;
    }
    if (m * (m - 1) / 2 != pairs) {
        throw std::invalid_argument("shaffer mode needs m(m-1)/2 hypotheses, got " + std::to_string(pairs));
    }
    return m;
}

std::vector<double> hommel_adjusted(const std::vector<double>& p) {
    const std::size_t n = p.size();
    double init = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < n; ++i) {
        init = std::min(init, static_cast<double>(n) * p[i] / static_cast<double>(i + 1));
    }
    std::vector<double> q(n, init);
    std::vector<double> pa(n, init);
    for (std::size_t m = n - 1; m >= 2; --m) {
        const double md = static_cast<double>(m);
        double q1 = std::numeric_limits<double>::infinity();
        for (std::size_t k = 2; k <= m; ++k) {
            q1 = std::min(q1, md * p[n - m + k - 1] / static_cast<double>(k));
        }
        for (std::size_t i = 0; i + m <= n; ++i) {
            q[i] = std::min(md * p[i], q1);
        }
        for (std::size_t i = n - m + 1; i < n; ++i) {
            q[i] = q[n - m];
        }
        for (std::size_t i = 0; i < n; ++i) {
            pa[i] = std::max(pa[i], q[i]);
        }
    }
    for (std::size_t i = 0; i < n; ++i) {
        pa[i] = std::min(1.0, std::max(pa[i], p[i]));
    }
    return pa;
}

double hommel_threshold(const std::vector<double>& p, double alpha) {
    const std::size_t n = p.size();
    for (std::size_t j = n; j >= 1; --j) {
        bool all_above = true;
        for (std::size_t k = 1; k <= j; ++k) {
            if (!(p[n - j + k - 1] > static_cast<double>(k) * alpha / static_cast<double>(j))) {
                all_above = false;
                break;
            }
        }
        if (all_above) {
            return alpha / static_cast<double>(j);
        }
    }
    return alpha;
}

}  // namespace

std::vector<double> stepdown_thresholds(std::size_t count, double alpha, StepdownMode mode) {
    std::vector<double> thr;
    switch (mode) {
        case StepdownMode::control_vs_all:
            for (std::size_t i = 1; i <= count; ++i) {
                thr.push_back(alpha / static_cast<double>(count - i + 1));
            }
            break;
        case StepdownMode::shaffer_pairwise:
            for (std::size_t t : shaffer_limits(algorithms_for_pairs(count))) {
                thr.push_back(alpha / static_cast<double>(t));
            }
            break;
        case StepdownMode::hommel:
            throw std::invalid_argument("hommel thresholds depend on the p-values; use stepdown()");
    }
    return thr;
}

std::vector<Comparison> stepdown(std::span<const Hypothesis> hypotheses, double alpha, StepdownMode mode) {
    for (const auto& h : hypotheses) {
        if (!(h.p_value >= 0.0 && h.p_value <= 1.0)) {
            throw std::invalid_argument("p-value outside [0, 1] for '" + h.label + "'");
        }
    }
    std::vector<std::size_t> order(hypotheses.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return hypotheses[a].p_value < hypotheses[b].p_value; });
    std::vector<double> p;
    for (std::size_t i : order) {
        p.push_back(hypotheses[i].p_value);
    }

    std::vector<Comparison> out;
    if (p.empty()) {
        return out;
    }
    for (std::size_t i : order) {
        out.push_back(Comparison{hypotheses[i].label, hypotheses[i].z, hypotheses[i].p_value, 0.0, 1.0, false});
    }

    if (mode == StepdownMode::hommel) {
        const double thr = hommel_threshold(p, alpha);
        const auto adj = hommel_adjusted(p);
        for (std::size_t i = 0; i < out.size(); ++i) {
            out[i].threshold = thr;
            out[i].adjusted_p = adj[i];
            out[i].significant = out[i].p_value < thr;
        }
        return out;
    }

    const auto thr = stepdown_thresholds(p.size(), alpha, mode);
    bool rejecting = true;
    double running = 0.0;
    for (std::size_t i = 0; i < out.size(); ++i) {
        out[i].threshold = thr[i];
        running = std::max(running, std::min(1.0, alpha / thr[i] * p[i]));
        out[i].adjusted_p = running;
        rejecting = rejecting && p[i] < thr[i];
        out[i].significant = rejecting;
    }
    return out;
}

std::size_t best_algorithm(const RankTable& ranks) {
    return static_cast<std::size_t>(std::min_element(ranks.average.begin(), ranks.average.end()) -
                                    ranks.average.begin());
}

std::vector<Comparison> compare_with_control(const RankTable& ranks, std::size_t control, double alpha,
                                             StepdownMode mode) {
    if (control >= ranks.algorithms.size()) {
        throw std::out_of_range("control algorithm index out of range");
    }
    if (mode == StepdownMode::shaffer_pairwise) {
        throw std::invalid_argument("control comparisons use control-vs-all or hommel mode");
    }
    std::vector<Hypothesis> hs;
    for (std::size_t j = 0; j < ranks.algorithms.size(); ++j) {
        if (j == control) {
            continue;
        }
        const double z = std::fabs(pairwise_z(ranks, control, j));
        hs.push_back({ranks.algorithms[j], z, normal_two_sided_p(z)});
    }
    return stepdown(hs, alpha, mode);
}

std::vector<Comparison> compare_all_pairs(const RankTable& ranks, double alpha) {
    std::vector<Hypothesis> hs;
    for (std::size_t a = 0; a < ranks.algorithms.size(); ++a) {
        for (std::size_t b = a + 1; b < ranks.algorithms.size(); ++b) {
            const double z = std::fabs(pairwise_z(ranks, a, b));
            hs.push_back({ranks.algorithms[a] + " vs. " + ranks.algorithms[b], z, normal_two_sided_p(z)});
        }
    }
    return stepdown(hs, alpha, StepdownMode::shaffer_pairwise);
}

void write_rank_table(std::ostream& out, const RankTable& ranks) {
    csv::Record header{"dataset"};
    header.insert(header.end(), ranks.algorithms.begin(), ranks.algorithms.end());
    csv::write_record(out, header);
    for (std::size_t i = 0; i < ranks.datasets.size(); ++i) {
        csv::Record rec{ranks.datasets[i]};
        for (double r : ranks.ranks[i]) {
            rec.push_back(fmt(r));
        }
        csv::write_record(out, rec);
    }
    csv::Record avg{"average"};
    for (double r : ranks.average) {
        avg.push_back(fmt(r));
    }
    csv::write_record(out, avg);
}

void write_friedman(std::ostream& out, const FriedmanResult& result) {
    csv::write_record(out, {"statistic", "df", "p_value", "tie_correction"});
    csv::write_record(out, {fmt(result.statistic), std::to_string(result.df), fmt(result.p_value),
                            fmt(result.tie_correction)});
}

void write_comparisons(std::ostream& out, std::span<const Comparison> comparisons) {
    csv::write_record(out, {"comparison", "z", "p_value", "threshold", "adjusted_p", "significant"});
    for (const auto& c : comparisons) {
        csv::write_record(out, {c.label, fmt(c.z), fmt(c.p_value), fmt(c.threshold), fmt(c.adjusted_p),
                                c.significant ? "true" : "false"});
    }
}

}  // namespace eam
