#include "eam/classifier.hpp"

namespace eam {

ConstantClassifier::ConstantClassifier(SchemaPtr schema, std::size_t label)
    : schema_(std::move(schema)), label_(label) {
    if (!schema_ || label_ >= schema_->class_count()) {
        throw std::invalid_argument("constant classifier label out of range");
    }
}

std::size_t ConstantClassifier::predict(const InstanceRow& instance) const {
    if (instance.values.size() != schema_->attribute_count()) {
        throw std::invalid_argument("instance does not match the training schema");
    }
    return label_;
}

ClassifierPtr MajorityClassLearner::fit(const DatasetTable& data, Seed) const {
    if (data.empty()) {
        throw std::invalid_argument("majority learner: empty training table");
    }
    return std::make_shared<ConstantClassifier>(data.schema_ptr(), data.majority_class());
}

}  // namespace eam
