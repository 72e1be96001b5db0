#pragma once

// Bagged ensembles: T base models trained on bootstrap resamples of the
// training table, combined by majority vote.

#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "eam/classifier.hpp"
#include "eam/dataset.hpp"

namespace eam {

struct EnsembleParams {
    std::size_t replicas = 10;
    Seed seed = 0;
    /// Members trained concurrently; the result is identical for any value.
    std::size_t workers = 1;

    void validate() const;
};

/// Per-member predicted class indices for one instance.
using PredictionVector = std::vector<std::size_t>;

/// Class with the most votes. Ties go to the larger training prior, then to
/// the class earliest in the domain.
std::size_t majority_vote(std::span<const std::size_t> votes, std::span<const double> training_priors);

/// Seeds for replica t: one for its bootstrap draw, one for its learner.
Seed replica_bootstrap_seed(Seed master, std::size_t replica);
Seed replica_learner_seed(Seed master, std::size_t replica);

class EnsembleModel final : public Classifier {
public:
    EnsembleModel(SchemaPtr schema, std::vector<ClassifierPtr> members, std::vector<double> training_priors,
                  Seed master_seed);

    const Schema& schema() const noexcept { return *schema_; }
    const std::vector<ClassifierPtr>& members() const noexcept { return members_; }
    const std::vector<std::string>& class_domain() const noexcept { return schema_->class_attribute().domain(); }
    const std::vector<double>& training_priors() const noexcept { return priors_; }
    Seed master_seed() const noexcept { return master_seed_; }
    std::size_t size() const noexcept { return members_.size(); }

    PredictionVector votes(const InstanceRow& instance) const;
    std::size_t predict(const InstanceRow& instance) const override;

    /// Total terms over all members.
    std::size_t term_count() const override;
    double mean_member_terms() const;

private:
    SchemaPtr schema_;
    std::vector<ClassifierPtr> members_;
    std::vector<double> priors_;
    Seed master_seed_;
};

/// Raised when the base learner fails on one replica.
class ReplicaFailure : public std::runtime_error {
public:
    ReplicaFailure(std::size_t replica, const std::string& cause);
    std::size_t replica() const noexcept { return replica_; }

private:
    std::size_t replica_;
};

EnsembleModel train_ensemble(const DatasetTable& train, const Learner& base_learner, const EnsembleParams& params);

/// Learner adapter so bagged ensembles plug into the evaluation protocols.
class BaggedLearner final : public Learner {
public:
    BaggedLearner(LearnerPtr base, std::size_t replicas, std::size_t workers = 1);

    std::string name() const override { return "e" + base_->name(); }
    ClassifierPtr fit(const DatasetTable& data, Seed seed) const override;
    const Learner& base() const noexcept { return *base_; }
    std::size_t replicas() const noexcept { return replicas_; }

private:
    LearnerPtr base_;
    std::size_t replicas_;
    std::size_t workers_;
};

// Manifest: `ENSEMBLE`, `REPLICAS <T>`, `SEED <seed>`, `PRIORS <p...>`, then for
// each member a `MEMBER <t>` line, the member's rule list text and `END MEMBER`.
// Members must be rule lists.
std::string to_text(const EnsembleModel& model);
EnsembleModel parse_ensemble(std::string_view text, SchemaPtr schema);

}  // namespace eam
