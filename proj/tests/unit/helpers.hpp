#pragma once

#include <memory>
#include <string>
#include <vector>

#include "eam/dataset.hpp"

namespace eam::test {

inline std::string fixture(const std::string& name) { return std::string(EAM_DATA_DIR) + "/" + name; }
inline std::string test_file(const std::string& name) { return std::string(EAM_TEST_DATA_DIR) + "/" + name; }

inline DatasetTable load_fixture(const std::string& name) { return load_dataset(fixture(name + ".csv")); }

inline AttributeSpec class_attribute(std::size_t classes) {
    std::vector<std::string> domain;
    for (std::size_t c = 0; c < classes; ++c) {
        domain.push_back("c" + std::to_string(c));
    }
    return AttributeSpec::nominal("class", domain);
}

/// One continuous attribute `x`.
inline DatasetTable continuous_table(const std::vector<double>& values, const std::vector<std::size_t>& labels,
                                     std::size_t classes) {
    auto schema = std::make_shared<const Schema>(std::vector<AttributeSpec>{AttributeSpec::continuous("x")},
                                                 class_attribute(classes));
    std::vector<InstanceRow> rows;
    for (std::size_t i = 0; i < values.size(); ++i) {
        rows.push_back({{values[i]}, labels[i]});
    }
    return DatasetTable("toy", schema, rows);
}

/// Nominal attributes a0, a1, ... with the given domain sizes (categories v0, v1, ...).
inline DatasetTable nominal_table(const std::vector<std::size_t>& domain_sizes,
                                  const std::vector<std::vector<std::size_t>>& values,
                                  const std::vector<std::size_t>& labels, std::size_t classes) {
    std::vector<AttributeSpec> attrs;
    for (std::size_t a = 0; a < domain_sizes.size(); ++a) {
        std::vector<std::string> domain;
        for (std::size_t v = 0; v < domain_sizes[a]; ++v) {
            domain.push_back("v" + std::to_string(v));
        }
        attrs.push_back(AttributeSpec::nominal("a" + std::to_string(a), domain));
    }
    auto schema = std::make_shared<const Schema>(attrs, class_attribute(classes));
    std::vector<InstanceRow> rows;
    for (std::size_t i = 0; i < values.size(); ++i) {
        std::vector<double> v(values[i].begin(), values[i].end());
        rows.push_back({v, labels[i]});
    }
    return DatasetTable("toy", schema, rows);
}

/// A table whose rows all have label `cls` (one continuous attribute holding the row index).
inline DatasetTable labelled_rows(const std::vector<std::size_t>& labels, std::size_t classes) {
    std::vector<double> values;
    for (std::size_t i = 0; i < labels.size(); ++i) {
        values.push_back(static_cast<double>(i));
    }
    return continuous_table(values, labels, classes);
}

}  // namespace eam::test
