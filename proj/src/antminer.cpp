#include "eam/antminer.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <numeric>
#include <sstream>
#include <unordered_map>

namespace eam {

namespace {

constexpr double kWeightFloor = 1e-12;
constexpr double kTieTolerance = 1e-12;
constexpr double kTauFloor = 1e-250;
constexpr std::size_t kMemoLimit = 200000;

std::size_t argmax_first(std::span<const std::size_t> counts) {
    return static_cast<std::size_t>(std::max_element(counts.begin(), counts.end()) - counts.begin());
}

double information_gain(std::span<const std::size_t> counts, std::size_t class_count) {
    const std::size_t n = std::accumulate(counts.begin(), counts.end(), std::size_t{0});
    if (n == 0 || class_count == 0) {
        return 0.0;
    }
    return std::max(0.0, std::log2(static_cast<double>(class_count)) - entropy(counts));
}

double quality_from_counts(std::size_t tp, std::size_t fp, std::size_t fn, std::size_t tn) {
    const double sens = tp + fn == 0 ? 0.0 : static_cast<double>(tp) / static_cast<double>(tp + fn);
    const double spec = tn + fp == 0 ? 0.0 : static_cast<double>(tn) / static_cast<double>(tn + fp);
    return sens * spec;
}

double selection_weight(double tau, double eta, double alpha, double beta) {
    const double t = alpha == 1.0 ? tau : std::pow(tau, alpha);
    const double e = beta == 1.0 ? eta : std::pow(eta, beta);
    return std::max(t * e, kWeightFloor);
}

struct SplitScan {
    ThresholdSplit split;
    std::vector<std::size_t> chosen_counts;  // class counts on the selected side
};

/// Scans ascending (value, label) pairs for the best midpoint.
std::optional<SplitScan> best_split_sorted(std::span<const std::pair<double, std::size_t>> sorted,
                                           std::size_t class_count) {
    const std::size_t n = sorted.size();
    std::vector<std::size_t> total(class_count, 0);
    for (const auto& [v, c] : sorted) {
        ++total[c];
    }
    std::vector<std::size_t> left(class_count, 0);
    std::vector<std::size_t> right = total;
    std::optional<SplitScan> best;
    for (std::size_t i = 0; i + 1 < n; ++i) {
        ++left[sorted[i].second];
        --right[sorted[i].second];
        if (!(sorted[i].first < sorted[i + 1].first)) {
            continue;
        }
        const double nl = static_cast<double>(i + 1);
        const double nr = static_cast<double>(n - i - 1);
        const double hl = entropy(left);
        const double hr = entropy(right);
        const double weighted = (nl * hl + nr * hr) / static_cast<double>(n);
        if (!best || weighted < best->split.weighted_entropy - kTieTolerance) {
            SplitScan scan;
            scan.split.threshold = sorted[i].first + (sorted[i + 1].first - sorted[i].first) / 2.0;
            scan.split.weighted_entropy = weighted;
            const bool left_purer = hl <= hr + kTieTolerance;
            scan.split.op = left_purer ? TermOp::less : TermOp::greater_equal;
            scan.chosen_counts = left_purer ? left : right;
            best = std::move(scan);
        }
    }
    return best;
}

/// Training state for one colony: the rows still uncovered, column copies,
/// per-attribute sort orders and memo tables keyed by the canonical term set.
class Colony {
public:
    Colony(const DatasetTable& data, std::vector<std::size_t> active, const ConstructionGraph& graph,
           const AntMinerParams& params)
        : graph_(graph), params_(params), class_count_(data.schema().class_count()) {
        const Schema& schema = data.schema();
        n_ = active.size();
        labels_.resize(n_);
        columns_.assign(schema.attribute_count(), std::vector<double>(n_));
        total_counts_.assign(class_count_, 0);
        for (std::size_t i = 0; i < n_; ++i) {
            const InstanceRow& row = data.rows()[active[i]];
            labels_[i] = row.label;
            ++total_counts_[row.label];
            for (std::size_t a = 0; a < schema.attribute_count(); ++a) {
                columns_[a][i] = row.values[a];
            }
        }
        kinds_.reserve(schema.attribute_count());
        sorted_.resize(schema.attribute_count());
        for (std::size_t a = 0; a < schema.attribute_count(); ++a) {
            kinds_.push_back(schema.attribute(a).kind());
            domain_sizes_.push_back(schema.attribute(a).domain_size());
            if (schema.attribute(a).is_continuous()) {
                auto& order = sorted_[a];
                order.resize(n_);
                std::iota(order.begin(), order.end(), std::uint32_t{0});
                const auto& col = columns_[a];
                std::stable_sort(order.begin(), order.end(),
                                 [&](std::uint32_t x, std::uint32_t y) { return col[x] < col[y]; });
            }
        }
    }

    std::size_t size() const noexcept { return n_; }

    Rule construct(const PheromoneState& pheromone, Rng& rng) {
        std::vector<Term> terms;
        std::vector<double> weights;
        while (true) {
            const Step& step = step_for(terms);
            if (step.legal.empty()) {
                break;
            }
            weights.clear();
            double total = 0.0;
            for (const auto& c : step.legal) {
                weights.push_back(selection_weight(pheromone.tau()[c.vertex], c.eta, params_.pheromone_exponent,
                                                   params_.heuristic_exponent));
                total += weights.back();
            }
            std::uniform_real_distribution<double> u(0.0, total);
            const double pick = u(rng);
            std::size_t chosen = step.legal.size() - 1;
            double acc = 0.0;
            for (std::size_t i = 0; i < weights.size(); ++i) {
                acc += weights[i];
                if (pick < acc) {
                    chosen = i;
                    break;
                }
            }
            terms.push_back(step.legal[chosen].term);
        }
        return score(std::move(terms));
    }

    /// Rule over `terms` with the majority class of its coverage.
    Rule score(std::vector<Term> terms) {
        const Coverage& cov = coverage_for(terms);
        Rule rule;
        rule.predicted_class = cov.rows.empty() ? argmax_first(total_counts_) : argmax_first(cov.class_counts);
        rule.quality = quality_of(cov, rule.predicted_class);
        rule.terms = std::move(terms);
        return rule;
    }

    double quality(const Rule& rule) { return quality_of(coverage_for(rule.terms), rule.predicted_class); }

    Rule prune(const Rule& input) {
        const std::string k = ordered_key(input.terms, input.predicted_class);
        if (auto it = prune_memo_.find(k); it != prune_memo_.end()) {
            return it->second;
        }
        Rule best = input;
        best.quality = quality(input);
        while (!best.terms.empty()) {
            std::optional<Rule> candidate;
            for (std::size_t i = 0; i < best.terms.size(); ++i) {
                std::vector<Term> trial = best.terms;
                trial.erase(trial.begin() + static_cast<std::ptrdiff_t>(i));
                Rule r = score(std::move(trial));
                if (!candidate || r.quality > candidate->quality) {
                    candidate = std::move(r);
                }
            }
            if (candidate->quality >= best.quality) {
                best = std::move(*candidate);
            } else {
                break;
            }
        }
        remember(prune_memo_, k, best);
        return best;
    }

private:
    struct Coverage {
        std::vector<std::uint32_t> rows;
        std::vector<std::size_t> class_counts;
    };
    struct Candidate {
        std::size_t vertex;
        Term term;
        double eta;
    };
    struct Step {
        std::vector<Candidate> legal;
    };

    template <class Map, class Value>
    static void remember(Map& memo, const std::string& k, Value v) {
        if (memo.size() >= kMemoLimit) {
            memo.clear();
        }
        memo.emplace(k, std::move(v));
    }

    static std::string key(const std::vector<Term>& terms) {
        std::vector<const Term*> order;
        order.reserve(terms.size());
        for (const auto& t : terms) {
            order.push_back(&t);
        }
        std::sort(order.begin(), order.end(), [](const Term* a, const Term* b) {
            return a->attribute != b->attribute ? a->attribute < b->attribute : a->op < b->op;
        });
        std::string out;
        out.reserve(terms.size() * 17);
        for (const Term* t : order) {
            char buf[17];
            const std::uint64_t a = t->attribute;
            std::memcpy(buf, &a, 8);
            buf[8] = static_cast<char>(t->op);
            std::memcpy(buf + 9, &t->value, 8);
            out.append(buf, 17);
        }
        return out;
    }

    /// Order-sensitive: pruning breaks ties by term position.
    static std::string ordered_key(const std::vector<Term>& terms, std::size_t cls) {
        std::string out;
        for (const auto& t : terms) {
            out += key({t});
        }
        const std::uint64_t c = cls;
        out.append(reinterpret_cast<const char*>(&c), 8);
        return out;
    }

    bool satisfies(const Term& t, std::uint32_t row) const noexcept {
        const double v = columns_[t.attribute][row];
        switch (t.op) {
            case TermOp::equal:
                return v == t.value;
            case TermOp::less:
                return v < t.value;
            case TermOp::greater_equal:
                return v >= t.value;
        }
        return false;
    }

    double quality_of(const Coverage& cov, std::size_t cls) const {
        const std::size_t tp = cov.class_counts[cls];
        const std::size_t fp = cov.rows.size() - tp;
        const std::size_t fn = total_counts_[cls] - tp;
        const std::size_t tn = n_ - cov.rows.size() - fn;
        return quality_from_counts(tp, fp, fn, tn);
    }

    const Coverage& coverage_for(const std::vector<Term>& terms) {
        const std::string k = key(terms);
        if (auto it = coverage_memo_.find(k); it != coverage_memo_.end()) {
            return it->second;
        }
        Coverage cov;
        cov.class_counts.assign(class_count_, 0);
        for (std::uint32_t r = 0; r < n_; ++r) {
            bool ok = true;
            for (const auto& t : terms) {
                if (!satisfies(t, r)) {
                    ok = false;
                    break;
                }
            }
            if (ok) {
                cov.rows.push_back(r);
                ++cov.class_counts[labels_[r]];
            }
        }
        if (coverage_memo_.size() >= kMemoLimit) {
            coverage_memo_.clear();
        }
        return coverage_memo_.emplace(k, std::move(cov)).first->second;
    }

    const Step& step_for(const std::vector<Term>& terms) {
        const std::string k = key(terms);
        if (auto it = step_memo_.find(k); it != step_memo_.end()) {
            return it->second;
        }
        const std::vector<std::uint32_t> rows = coverage_for(terms).rows;
        std::vector<bool> used(columns_.size(), false);
        for (const auto& t : terms) {
            used[t.attribute] = true;
        }
        std::vector<char> mask;
        Step step;
        const std::size_t min_cov = params_.min_covered_per_rule;
        for (std::size_t a = 0; a < columns_.size(); ++a) {
            if (used[a]) {
                continue;
            }
            const std::size_t first = graph_.vertex_of(kinds_[a] == AttributeKind::nominal
                                                           ? Term::equals(a, 0)
                                                           : Term::less(a, 0.0));
            if (kinds_[a] == AttributeKind::nominal) {
                std::vector<std::size_t> counts(domain_sizes_[a] * class_count_, 0);
                std::vector<std::size_t> per_cat(domain_sizes_[a], 0);
                for (std::uint32_t r : rows) {
                    const auto cat = static_cast<std::size_t>(columns_[a][r]);
                    ++counts[cat * class_count_ + labels_[r]];
                    ++per_cat[cat];
                }
                for (std::size_t cat = 0; cat < domain_sizes_[a]; ++cat) {
                    if (per_cat[cat] < min_cov || per_cat[cat] == 0) {
                        continue;
                    }
                    const std::span<const std::size_t> cc(counts.data() + cat * class_count_, class_count_);
                    step.legal.push_back({first + cat, Term::equals(a, cat), information_gain(cc, class_count_)});
                }
            } else {
                if (mask.empty()) {
                    mask.assign(n_, 0);
                    for (std::uint32_t r : rows) {
                        mask[r] = 1;
                    }
                }
                std::vector<std::pair<double, std::size_t>> pairs;
                pairs.reserve(rows.size());
                for (std::uint32_t r : sorted_[a]) {
                    if (mask[r]) {
                        pairs.emplace_back(columns_[a][r], labels_[r]);
                    }
                }
                const auto scan = best_split_sorted(pairs, class_count_);
                if (!scan) {
                    continue;
                }
                const std::size_t side =
                    std::accumulate(scan->chosen_counts.begin(), scan->chosen_counts.end(), std::size_t{0});
                if (side < min_cov || side == 0) {
                    continue;
                }
                const Term term = scan->split.op == TermOp::less ? Term::less(a, scan->split.threshold)
                                                                 : Term::greater_equal(a, scan->split.threshold);
                step.legal.push_back({first, term, information_gain(scan->chosen_counts, class_count_)});
            }
        }
        if (step_memo_.size() >= kMemoLimit) {
            step_memo_.clear();
        }
        return step_memo_.emplace(k, std::move(step)).first->second;
    }

    const ConstructionGraph& graph_;
    const AntMinerParams& params_;
    std::size_t class_count_;
    std::size_t n_ = 0;
    std::vector<std::size_t> labels_;
    std::vector<std::vector<double>> columns_;
    std::vector<std::vector<std::uint32_t>> sorted_;
    std::vector<AttributeKind> kinds_;
    std::vector<std::size_t> domain_sizes_;
    std::vector<std::size_t> total_counts_;
    std::unordered_map<std::string, Coverage> coverage_memo_;
    std::unordered_map<std::string, Step> step_memo_;
    std::unordered_map<std::string, Rule> prune_memo_;
};

std::vector<std::size_t> all_rows(const DatasetTable& data) {
    std::vector<std::size_t> rows(data.size());
    std::iota(rows.begin(), rows.end(), std::size_t{0});
    return rows;
}

std::string format_double(double v) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

std::string quote_token(const std::string& s) {
    if (!s.empty() && s.find_first_of(" \t\r\n\"\\") == std::string::npos) {
        return s;
    }
    std::string out = "\"";
    for (char c : s) {
        if (c == '"' || c == '\\') {
            out.push_back('\\');
        }
        out.push_back(c);
    }
    out.push_back('"');
    return out;
}

std::vector<std::string> tokenize(std::string_view line, std::size_t line_no) {
    std::vector<std::string> out;
    std::size_t i = 0;
    while (i < line.size()) {
        if (std::isspace(static_cast<unsigned char>(line[i]))) {
            ++i;
            continue;
        }
        std::string tok;
        if (line[i] == '"') {
            ++i;
            bool closed = false;
            while (i < line.size()) {
                if (line[i] == '\\' && i + 1 < line.size()) {
                    tok.push_back(line[i + 1]);
                    i += 2;
                } else if (line[i] == '"') {
                    ++i;
                    closed = true;
                    break;
                } else {
                    tok.push_back(line[i++]);
                }
            }
            if (!closed) {
                throw ParseError("rule list", line_no, i, "unterminated quoted token");
            }
        } else {
            while (i < line.size() && !std::isspace(static_cast<unsigned char>(line[i]))) {
                tok.push_back(line[i++]);
            }
        }
        out.push_back(std::move(tok));
    }
    return out;
}

double parse_number(const std::string& s, std::size_t line_no) {
    double v = 0.0;
    const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (res.ec != std::errc{} || res.ptr != s.data() + s.size() || !std::isfinite(v)) {
        throw ParseError("rule list", line_no, 0, "bad number '" + s + "'");
    }
    return v;
}

}  // namespace

// --- terms, rules, models -----------------------------------------------------

std::string_view to_string(TermOp op) noexcept {
    switch (op) {
        case TermOp::equal:
            return "=";
        case TermOp::less:
            return "<";
        case TermOp::greater_equal:
            return ">=";
    }
    return "?";
}

Term Term::equals(std::size_t attribute, std::size_t category) {
    return {attribute, TermOp::equal, static_cast<double>(category)};
}
Term Term::less(std::size_t attribute, double threshold) { return {attribute, TermOp::less, threshold}; }
Term Term::greater_equal(std::size_t attribute, double threshold) {
    return {attribute, TermOp::greater_equal, threshold};
}

bool Term::satisfied_by(const InstanceRow& row) const noexcept {
    const double v = row.values[attribute];
    switch (op) {
        case TermOp::equal:
            return v == value;
        case TermOp::less:
            return v < value;
        case TermOp::greater_equal:
            return v >= value;
    }
    return false;
}

void check_term(const Schema& schema, const Term& term) {
    if (term.attribute >= schema.attribute_count()) {
        throw std::invalid_argument("term attribute index out of range");
    }
    const auto& spec = schema.attribute(term.attribute);
    if (!std::isfinite(term.value)) {
        throw std::invalid_argument("term value for '" + spec.name() + "' is not finite");
    }
    if (term.op == TermOp::equal) {
        if (!spec.is_nominal()) {
            throw std::invalid_argument("'=' term on continuous attribute '" + spec.name() + "'");
        }
        if (term.value < 0 || term.value >= static_cast<double>(spec.domain_size()) ||
            term.value != std::floor(term.value)) {
            throw std::invalid_argument("term category out of range for '" + spec.name() + "'");
        }
    } else if (!spec.is_continuous()) {
        throw std::invalid_argument("threshold term on nominal attribute '" + spec.name() + "'");
    }
}

bool Rule::covers(const InstanceRow& row) const noexcept {
    return std::all_of(terms.begin(), terms.end(), [&](const Term& t) { return t.satisfied_by(row); });
}

bool Rule::same_as(const Rule& other) const {
    if (predicted_class != other.predicted_class || terms.size() != other.terms.size()) {
        return false;
    }
    return std::all_of(terms.begin(), terms.end(), [&](const Term& t) {
        return std::find(other.terms.begin(), other.terms.end(), t) != other.terms.end();
    });
}

RuleListModel::RuleListModel(SchemaPtr schema, std::vector<Rule> rules, std::size_t default_class)
    : schema_(std::move(schema)), rules_(std::move(rules)), default_class_(default_class) {
    if (!schema_) {
        throw std::invalid_argument("rule list requires a schema");
    }
    if (default_class_ >= schema_->class_count()) {
        throw std::invalid_argument("default class out of range");
    }
    for (const auto& rule : rules_) {
        if (rule.predicted_class >= schema_->class_count()) {
            throw std::invalid_argument("rule class out of range");
        }
        std::vector<bool> seen(schema_->attribute_count(), false);
        for (const auto& t : rule.terms) {
            check_term(*schema_, t);
            if (seen[t.attribute]) {
                throw std::invalid_argument("rule repeats attribute '" + schema_->attribute(t.attribute).name() + "'");
            }
            seen[t.attribute] = true;
        }
    }
}

std::size_t RuleListModel::predict(const InstanceRow& instance) const {
    check_row(*schema_, instance);
    for (const auto& rule : rules_) {
        if (rule.covers(instance)) {
            return rule.predicted_class;
        }
    }
    return default_class_;
}

std::size_t RuleListModel::term_count() const {
    std::size_t n = 0;
    for (const auto& r : rules_) {
        n += r.terms.size();
    }
    return n;
}

std::size_t classify(const RuleListModel& model, const InstanceRow& instance) { return model.predict(instance); }

void AntMinerParams::validate() const {
    if (num_ants == 0 || min_covered_per_rule == 0 || max_uncovered == 0 || convergence_rules == 0) {
        throw std::invalid_argument("ant-miner counts must be positive");
    }
    if (!(heuristic_exponent >= 0.0) || !(pheromone_exponent >= 0.0)) {
        throw std::invalid_argument("selection exponents must be non-negative");
    }
    if (!(evaporation_factor > 0.0 && evaporation_factor < 1.0)) {
        throw std::invalid_argument("evaporation factor must lie in (0, 1)");
    }
}

// --- graph and pheromone --------------------------------------------------------

ConstructionGraph::ConstructionGraph(const Schema& schema) {
    for (std::size_t a = 0; a < schema.attribute_count(); ++a) {
        const auto& spec = schema.attribute(a);
        first_vertex_.push_back(vertices_.size());
        kinds_.push_back(spec.kind());
        if (spec.is_nominal()) {
            for (std::size_t c = 0; c < spec.domain_size(); ++c) {
                vertices_.push_back({a, c});
            }
        } else {
            vertices_.push_back({a, std::nullopt});
        }
    }
}

std::size_t ConstructionGraph::vertex_of(const Term& term) const {
    if (term.attribute >= first_vertex_.size()) {
        throw std::invalid_argument("term attribute outside the construction graph");
    }
    const bool nominal = kinds_[term.attribute] == AttributeKind::nominal;
    if (nominal != (term.op == TermOp::equal)) {
        throw std::invalid_argument("term operator does not match attribute kind");
    }
    return nominal ? first_vertex_[term.attribute] + static_cast<std::size_t>(term.value)
                   : first_vertex_[term.attribute];
}

PheromoneState::PheromoneState(std::size_t vertex_count, double evaporation_factor)
    : PheromoneState(std::vector<double>(vertex_count, 1.0), evaporation_factor) {}

PheromoneState::PheromoneState(std::vector<double> tau, double evaporation_factor)
    : tau_(std::move(tau)), evaporation_factor_(evaporation_factor) {
    if (!(evaporation_factor_ > 0.0 && evaporation_factor_ < 1.0)) {
        throw std::invalid_argument("evaporation factor must lie in (0, 1)");
    }
    if (!tau_.empty()) {
        double sum = 0.0;
        for (double t : tau_) {
            if (!(t > 0.0) || !std::isfinite(t)) {
                throw std::invalid_argument("pheromone values must be positive and finite");
            }
            sum += t;
        }
        const double scale = static_cast<double>(tau_.size()) / sum;
        for (double& t : tau_) {
            t *= scale;
        }
    }
}

PheromoneState update_pheromone(const PheromoneState& state, const ConstructionGraph& graph, const Rule& best_rule) {
    if (!(best_rule.quality >= 0.0 && best_rule.quality <= 1.0)) {
        throw std::invalid_argument("rule quality must lie in [0, 1]");
    }
    if (state.tau_.size() != graph.size()) {
        throw std::invalid_argument("pheromone state does not match the construction graph");
    }
    std::vector<bool> in_rule(graph.size(), false);
    for (const auto& t : best_rule.terms) {
        in_rule[graph.vertex_of(t)] = true;
    }
    PheromoneState next = state;
    double sum = 0.0;
    for (std::size_t v = 0; v < next.tau_.size(); ++v) {
        double& t = next.tau_[v];
        t *= in_rule[v] ? 1.0 + best_rule.quality : state.evaporation_factor_;
        t = std::max(t, kTauFloor);
        sum += t;
    }
    const double scale = static_cast<double>(next.tau_.size()) / sum;
    for (double& t : next.tau_) {
        t *= scale;
    }
    return next;
}

// --- scoring ------------------------------------------------------------------

double entropy(std::span<const std::size_t> counts) {
    const double n = static_cast<double>(std::accumulate(counts.begin(), counts.end(), std::size_t{0}));
    if (n == 0.0) {
        return 0.0;
    }
    double h = 0.0;
    for (std::size_t c : counts) {
        if (c > 0) {
            const double p = static_cast<double>(c) / n;
            h -= p * std::log2(p);
        }
    }
    return h;
}

double heuristic(const Term& term, const DatasetTable& data) {
    check_term(data.schema(), term);
    std::vector<std::size_t> counts(data.schema().class_count(), 0);
    for (const auto& row : data.rows()) {
        if (term.satisfied_by(row)) {
            ++counts[row.label];
        }
    }
    return information_gain(counts, data.schema().class_count());
}

ThresholdSplit discretize_threshold(std::size_t attribute, const DatasetTable& data) {
    if (attribute >= data.schema().attribute_count() || !data.schema().attribute(attribute).is_continuous()) {
        throw std::invalid_argument("discretize_threshold needs a continuous attribute");
    }
    std::vector<std::pair<double, std::size_t>> pairs;
    pairs.reserve(data.size());
    for (const auto& row : data.rows()) {
        pairs.emplace_back(row.values[attribute], row.label);
    }
    std::stable_sort(pairs.begin(), pairs.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
    const auto scan = best_split_sorted(pairs, data.schema().class_count());
    if (!scan) {
        throw NoSplitAvailable("no split available: attribute '" + data.schema().attribute(attribute).name() +
                               "' has a single distinct value");
    }
    return scan->split;
}

double rule_quality(const Rule& rule, const DatasetTable& data) {
    std::size_t tp = 0, fp = 0, fn = 0, tn = 0;
    for (const auto& row : data.rows()) {
        const bool covered = rule.covers(row);
        const bool positive = row.label == rule.predicted_class;
        if (covered) {
            (positive ? tp : fp)++;
        } else {
            (positive ? fn : tn)++;
        }
    }
    return quality_from_counts(tp, fp, fn, tn);
}

Rule prune_rule(const Rule& rule, const DatasetTable& data) {
    if (data.empty()) {
        throw std::invalid_argument("prune_rule: empty data");
    }
    const ConstructionGraph graph(data.schema());
    const AntMinerParams params;
    Colony colony(data, all_rows(data), graph, params);
    return colony.prune(rule);
}

std::vector<double> selection_probabilities(std::span<const double> tau, std::span<const double> eta, double alpha,
                                            double beta) {
    if (tau.size() != eta.size()) {
        throw std::invalid_argument("selection_probabilities: size mismatch");
    }
    std::vector<double> w(tau.size());
    double total = 0.0;
    for (std::size_t i = 0; i < w.size(); ++i) {
        w[i] = selection_weight(tau[i], eta[i], alpha, beta);
        total += w[i];
    }
    for (double& x : w) {
        x /= total;
    }
    return w;
}

Rule construct_rule(const ConstructionGraph& graph, const PheromoneState& pheromone, const DatasetTable& data,
                    const AntMinerParams& params, Rng& rng) {
    if (data.empty()) {
        throw std::invalid_argument("construct_rule: empty data");
    }
    if (pheromone.tau().size() != graph.size()) {
        throw std::invalid_argument("pheromone state does not match the construction graph");
    }
    Colony colony(data, all_rows(data), graph, params);
    return colony.construct(pheromone, rng);
}

RuleListModel train(const DatasetTable& data, const AntMinerParams& params, Seed seed) {
    params.validate();
    if (data.empty()) {
        throw std::invalid_argument("train: empty training table");
    }
    const auto counts = data.class_counts();
    if (std::count_if(counts.begin(), counts.end(), [](std::size_t c) { return c > 0; }) == 1) {
        return RuleListModel(data.schema_ptr(), {}, argmax_first(counts));
    }
    if (data.size() < params.min_covered_per_rule) {
        throw std::invalid_argument("train: fewer rows than min_covered_per_rule");
    }

    const ConstructionGraph graph(data.schema());
    Rng rng = make_rng(seed);
    std::vector<std::size_t> remaining = all_rows(data);
    std::vector<Rule> rules;

    while (remaining.size() > params.max_uncovered) {
        std::vector<std::size_t> remaining_counts(data.schema().class_count(), 0);
        for (std::size_t r : remaining) {
            ++remaining_counts[data.rows()[r].label];
        }
        if (*std::max_element(remaining_counts.begin(), remaining_counts.end()) == remaining.size()) {
            break;
        }

        Colony colony(data, remaining, graph, params);
        PheromoneState pheromone(graph.size(), params.evaporation_factor);
        std::optional<Rule> best;
        std::optional<Rule> previous;
        std::size_t streak = 0;
        for (std::size_t ant = 0; ant < params.num_ants; ++ant) {
            Rule rule = colony.prune(colony.construct(pheromone, rng));
            streak = previous && rule.same_as(*previous) ? streak + 1 : 1;
            if (!best || rule.quality > best->quality) {
                best = rule;
            }
            previous = std::move(rule);
            pheromone = update_pheromone(pheromone, graph, *best);
            if (streak >= params.convergence_rules) {
                break;
            }
        }
        if (!best || best->terms.empty()) {
            break;
        }
        std::vector<std::size_t> uncovered;
        for (std::size_t r : remaining) {
            if (!best->covers(data.rows()[r])) {
                uncovered.push_back(r);
            }
        }
        if (remaining.size() - uncovered.size() < params.min_covered_per_rule) {
            break;
        }
        rules.push_back(std::move(*best));
        remaining = std::move(uncovered);
    }

    std::size_t default_class = data.majority_class();
    if (!remaining.empty()) {
        std::vector<std::size_t> left(data.schema().class_count(), 0);
        for (std::size_t r : remaining) {
            ++left[data.rows()[r].label];
        }
        default_class = argmax_first(left);
    }
    return RuleListModel(data.schema_ptr(), std::move(rules), default_class);
}

// --- text format ----------------------------------------------------------------

std::string to_text(const RuleListModel& model) {
    const Schema& schema = model.schema();
    std::ostringstream out;
    for (const auto& rule : model.rules()) {
        out << "IF ";
        if (rule.terms.empty()) {
            out << "TRUE";
        }
        for (std::size_t i = 0; i < rule.terms.size(); ++i) {
            const Term& t = rule.terms[i];
            const auto& spec = schema.attribute(t.attribute);
            if (i > 0) {
                out << " AND ";
            }
            out << quote_token(spec.name()) << ' ' << to_string(t.op) << ' ';
            out << (t.op == TermOp::equal ? quote_token(spec.category(static_cast<std::size_t>(t.value)))
                                          : format_double(t.value));
        }
        out << " THEN " << quote_token(schema.class_attribute().category(rule.predicted_class)) << " (q="
            << format_double(rule.quality) << ")\n";
    }
    out << "DEFAULT " << quote_token(schema.class_attribute().category(model.default_class())) << "\n";
    return out.str();
}

RuleListModel parse_rule_list(std::string_view text, SchemaPtr schema) {
    if (!schema) {
        throw std::invalid_argument("parse_rule_list requires a schema");
    }
    const auto& cls = schema->class_attribute();
    auto class_index = [&](const std::string& label, std::size_t line_no) {
        const auto idx = cls.category_index(label);
        if (!idx) {
            throw ParseError("rule list", line_no, 0, "unknown class '" + label + "'");
        }
        return *idx;
    };

    std::vector<Rule> rules;
    std::optional<std::size_t> default_class;
    std::istringstream in{std::string(text)};
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const auto tokens = tokenize(line, line_no);
        if (tokens.empty()) {
            continue;
        }
        if (default_class) {
            throw ParseError("rule list", line_no, 0, "content after DEFAULT line");
        }
        if (tokens[0] == "DEFAULT") {
            if (tokens.size() != 2) {
                throw ParseError("rule list", line_no, 0, "expected 'DEFAULT <class>'");
            }
            default_class = class_index(tokens[1], line_no);
            continue;
        }
        if (tokens[0] != "IF") {
            throw ParseError("rule list", line_no, 0, "expected IF or DEFAULT");
        }
        Rule rule;
        std::size_t i = 1;
        if (i + 1 < tokens.size() && tokens[i] == "TRUE" && tokens[i + 1] == "THEN") {
            ++i;
        } else {
            while (true) {
                if (i + 3 > tokens.size()) {
                    throw ParseError("rule list", line_no, 0, "truncated term");
                }
                const auto attr = schema->attribute_index(tokens[i]);
                if (!attr) {
                    throw ParseError("rule list", line_no, 0, "unknown attribute '" + tokens[i] + "'");
                }
                const auto& spec = schema->attribute(*attr);
                const std::string& op = tokens[i + 1];
                const std::string& value = tokens[i + 2];
                if (op == "=") {
                    const auto cat = spec.category_index(value);
                    if (!spec.is_nominal() || !cat) {
                        throw ParseError("rule list", line_no, 0, "bad category '" + value + "' for '" + spec.name() + "'");
                    }
                    rule.terms.push_back(Term::equals(*attr, *cat));
                } else if (op == "<") {
                    rule.terms.push_back(Term::less(*attr, parse_number(value, line_no)));
                } else if (op == ">=") {
                    rule.terms.push_back(Term::greater_equal(*attr, parse_number(value, line_no)));
                } else {
                    throw ParseError("rule list", line_no, 0, "unknown operator '" + op + "'");
                }
                i += 3;
                if (i < tokens.size() && tokens[i] == "AND") {
                    ++i;
                    continue;
                }
                break;
            }
        }
        if (i + 3 != tokens.size() || tokens[i] != "THEN") {
            throw ParseError("rule list", line_no, 0, "expected 'THEN <class> (q=<quality>)'");
        }
        rule.predicted_class = class_index(tokens[i + 1], line_no);
        const std::string& q = tokens[i + 2];
        if (q.size() < 5 || q.rfind("(q=", 0) != 0 || q.back() != ')') {
            throw ParseError("rule list", line_no, 0, "expected '(q=<quality>)'");
        }
        rule.quality = parse_number(q.substr(3, q.size() - 4), line_no);
        rules.push_back(std::move(rule));
    }
    if (!default_class) {
        throw ParseError("rule list", line_no, 0, "missing DEFAULT line");
    }
    try {
        return RuleListModel(std::move(schema), std::move(rules), *default_class);
    } catch (const std::invalid_argument& e) {
        throw ParseError("rule list", 0, 0, e.what());
    }
}

AntMinerLearner::AntMinerLearner(AntMinerParams params) : params_(params) { params_.validate(); }

ClassifierPtr AntMinerLearner::fit(const DatasetTable& data, Seed seed) const {
    return std::make_shared<RuleListModel>(train(data, params_, seed));
}

}  // namespace eam
