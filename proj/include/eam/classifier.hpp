#pragma once

#include <cstddef>
#include <memory>
#include <string>

#include "eam/dataset.hpp"

namespace eam {

/// A trained model that maps an instance to a class index.
class Classifier {
public:
    virtual ~Classifier() = default;

    /// Throws std::invalid_argument if the instance does not fit the training schema.
    virtual std::size_t predict(const InstanceRow& instance) const = 0;

    /// Model size in rule terms (0 for models without terms).
    virtual std::size_t term_count() const = 0;
};

using ClassifierPtr = std::shared_ptr<const Classifier>;

/// Something that turns a table and a seed into a Classifier. Implementations
/// must be deterministic in (data, seed) and free of shared mutable state.
class Learner {
public:
    virtual ~Learner() = default;
    virtual std::string name() const = 0;
    virtual ClassifierPtr fit(const DatasetTable& data, Seed seed) const = 0;
};

using LearnerPtr = std::shared_ptr<const Learner>;

/// Always predicts one class.
class ConstantClassifier final : public Classifier {
public:
    ConstantClassifier(SchemaPtr schema, std::size_t label);

    std::size_t predict(const InstanceRow& instance) const override;
    std::size_t term_count() const override { return 0; }
    std::size_t label() const noexcept { return label_; }

private:
    SchemaPtr schema_;
    std::size_t label_;
};

/// Predicts the training majority class (ties: earliest in the class domain).
class MajorityClassLearner final : public Learner {
public:
    std::string name() const override { return "majority"; }
    ClassifierPtr fit(const DatasetTable& data, Seed seed) const override;
};

}  // namespace eam
