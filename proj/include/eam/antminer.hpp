#pragma once

// Ant-Miner style rule induction: ants walk a graph of attribute-value terms,
// guided by pheromone and an information-gain heuristic, and a
// separate-and-conquer loop turns the best rule of each colony into the next
// entry of an ordered rule list.

#include <cstddef>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "eam/classifier.hpp"
#include "eam/dataset.hpp"
#include "eam/rng.hpp"

namespace eam {

enum class TermOp { equal, less, greater_equal };

std::string_view to_string(TermOp op) noexcept;

/// `attribute = category` for nominal attributes, `attribute < t` or
/// `attribute >= t` for continuous ones.
struct Term {
    std::size_t attribute = 0;
    TermOp op = TermOp::equal;
    double value = 0.0;  // category index for `=`, threshold otherwise

    static Term equals(std::size_t attribute, std::size_t category);
    static Term less(std::size_t attribute, double threshold);
    static Term greater_equal(std::size_t attribute, double threshold);

    bool satisfied_by(const InstanceRow& row) const noexcept;
    friend bool operator==(const Term&, const Term&) = default;
};

/// Throws std::invalid_argument if the term's operator does not fit the attribute kind.
void check_term(const Schema& schema, const Term& term);

struct Rule {
    std::vector<Term> terms;  // conjunction, in construction order
    std::size_t predicted_class = 0;
    double quality = 0.0;

    bool covers(const InstanceRow& row) const noexcept;
    /// Same antecedent (irrespective of term order) and consequent.
    bool same_as(const Rule& other) const;
};

/// Ordered rule list with a default class; classification is first match.
class RuleListModel final : public Classifier {
public:
    RuleListModel(SchemaPtr schema, std::vector<Rule> rules, std::size_t default_class);

    const Schema& schema() const noexcept { return *schema_; }
    const SchemaPtr& schema_ptr() const noexcept { return schema_; }
    const std::vector<Rule>& rules() const noexcept { return rules_; }
    std::size_t default_class() const noexcept { return default_class_; }

    std::size_t predict(const InstanceRow& instance) const override;
    std::size_t term_count() const override;

private:
    SchemaPtr schema_;
    std::vector<Rule> rules_;
    std::size_t default_class_;
};

/// Label index of the first rule covering `instance`, else the default class.
std::size_t classify(const RuleListModel& model, const InstanceRow& instance);

struct AntMinerParams {
    std::size_t num_ants = 3000;
    std::size_t min_covered_per_rule = 5;
    std::size_t max_uncovered = 10;
    std::size_t convergence_rules = 10;
    double heuristic_exponent = 1.0;   // beta
    double pheromone_exponent = 1.0;   // alpha
    double evaporation_factor = 0.9;

    void validate() const;
};

/// One vertex per nominal (attribute, category) pair and one per continuous
/// attribute; continuous thresholds are chosen when the vertex is visited.
class ConstructionGraph {
public:
    struct Vertex {
        std::size_t attribute = 0;
        std::optional<std::size_t> category;  // nullopt for continuous vertices
    };

    explicit ConstructionGraph(const Schema& schema);

    std::span<const Vertex> vertices() const noexcept { return vertices_; }
    std::size_t size() const noexcept { return vertices_.size(); }
    std::size_t vertex_of(const Term& term) const;

private:
    std::vector<Vertex> vertices_;
    std::vector<std::size_t> first_vertex_;  // per attribute
    std::vector<AttributeKind> kinds_;
};

/// Per-vertex trails. Always positive and normalized to sum to the vertex count.
class PheromoneState {
public:
    PheromoneState(std::size_t vertex_count, double evaporation_factor);
    PheromoneState(std::vector<double> tau, double evaporation_factor);

    std::span<const double> tau() const noexcept { return tau_; }
    double evaporation_factor() const noexcept { return evaporation_factor_; }

private:
    friend PheromoneState update_pheromone(const PheromoneState&, const ConstructionGraph&, const Rule&);
    std::vector<double> tau_;
    double evaporation_factor_;
};

/// Vertices of `best_rule` are multiplied by (1 + quality), all others by the
/// evaporation factor, then trails are renormalized.
PheromoneState update_pheromone(const PheromoneState& state, const ConstructionGraph& graph,
                                const Rule& best_rule);

/// Shannon entropy (bits) of a count vector.
double entropy(std::span<const std::size_t> counts);

/// log2(C) minus the class entropy of the rows satisfying `term`; 0 when no row does.
double heuristic(const Term& term, const DatasetTable& data);

struct ThresholdSplit {
    double threshold = 0.0;
    TermOp op = TermOp::less;
    double weighted_entropy = 0.0;
};

class NoSplitAvailable : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// Entropy-minimizing midpoint split of a continuous attribute. Threshold ties
/// resolve to the smallest threshold; the returned op selects the lower-entropy
/// side (`<` on ties). Throws NoSplitAvailable when all values coincide.
ThresholdSplit discretize_threshold(std::size_t attribute, const DatasetTable& data);

/// Sensitivity times specificity of the rule against its predicted class.
double rule_quality(const Rule& rule, const DatasetTable& data);

/// Greedy backward elimination of terms; quality never drops.
Rule prune_rule(const Rule& rule, const DatasetTable& data);

/// Weights tau^alpha * eta^beta (floored at 1e-12) normalized to sum to 1.
std::vector<double> selection_probabilities(std::span<const double> tau, std::span<const double> eta,
                                            double alpha, double beta);

/// One ant walk over `data`. Every added term keeps at least
/// params.min_covered_per_rule rows covered.
Rule construct_rule(const ConstructionGraph& graph, const PheromoneState& pheromone, const DatasetTable& data,
                    const AntMinerParams& params, Rng& rng);

/// Sequential covering: one colony per rule until few rows remain uncovered.
RuleListModel train(const DatasetTable& data, const AntMinerParams& params, Seed seed);

// Plain-text model format: one `IF <attr> <op> <value> AND ... THEN <class> (q=<quality>)`
// line per rule and a final `DEFAULT <class>` line. Tokens containing
// whitespace or quotes are double-quoted.
std::string to_text(const RuleListModel& model);
RuleListModel parse_rule_list(std::string_view text, SchemaPtr schema);

class AntMinerLearner final : public Learner {
public:
    explicit AntMinerLearner(AntMinerParams params = {});

    std::string name() const override { return "cAM"; }
    ClassifierPtr fit(const DatasetTable& data, Seed seed) const override;
    const AntMinerParams& params() const noexcept { return params_; }

private:
    AntMinerParams params_;
};

}  // namespace eam
