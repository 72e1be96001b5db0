#pragma once

#include <cstddef>
#include <filesystem>
#include <memory>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "eam/rng.hpp"

namespace eam {

enum class AttributeKind { nominal, continuous };

/// One column of a schema. Nominal attributes carry their ordered domain;
/// row values store the category index.
class AttributeSpec {
public:
    static AttributeSpec nominal(std::string name, std::vector<std::string> domain);
    static AttributeSpec continuous(std::string name);

    const std::string& name() const noexcept { return name_; }
    AttributeKind kind() const noexcept { return kind_; }
    bool is_nominal() const noexcept { return kind_ == AttributeKind::nominal; }
    bool is_continuous() const noexcept { return kind_ == AttributeKind::continuous; }
    const std::vector<std::string>& domain() const noexcept { return domain_; }
    std::size_t domain_size() const noexcept { return domain_.size(); }

    /// Index of `label` in the domain, or nullopt.
    std::optional<std::size_t> category_index(std::string_view label) const;
    const std::string& category(std::size_t index) const { return domain_.at(index); }

    friend bool operator==(const AttributeSpec&, const AttributeSpec&) = default;

private:
    AttributeSpec(std::string name, AttributeKind kind, std::vector<std::string> domain);

    std::string name_;
    AttributeKind kind_;
    std::vector<std::string> domain_;
};

/// Predictor attributes plus the (nominal) class attribute.
class Schema {
public:
    Schema(std::vector<AttributeSpec> attributes, AttributeSpec class_attribute);

    const std::vector<AttributeSpec>& attributes() const noexcept { return attributes_; }
    const AttributeSpec& attribute(std::size_t i) const { return attributes_.at(i); }
    std::size_t attribute_count() const noexcept { return attributes_.size(); }
    const AttributeSpec& class_attribute() const noexcept { return class_attribute_; }
    std::size_t class_count() const noexcept { return class_attribute_.domain_size(); }
    std::optional<std::size_t> attribute_index(std::string_view name) const;

    std::size_t nominal_count() const noexcept;
    std::size_t continuous_count() const noexcept;

    friend bool operator==(const Schema&, const Schema&) = default;

private:
    std::vector<AttributeSpec> attributes_;
    AttributeSpec class_attribute_;
};

using SchemaPtr = std::shared_ptr<const Schema>;

/// One instance. values[i] is a real number for continuous attributes and the
/// category index (stored exactly) for nominal ones.
struct InstanceRow {
    std::vector<double> values;
    std::size_t label = 0;

    std::size_t category(std::size_t attribute) const {
        return static_cast<std::size_t>(values[attribute]);
    }
    friend bool operator==(const InstanceRow&, const InstanceRow&) = default;
};

/// Throws std::invalid_argument when `row` does not conform to `schema`.
void check_row(const Schema& schema, const InstanceRow& row);

/// Immutable table of rows over a shared schema.
class DatasetTable {
public:
    DatasetTable(std::string name, SchemaPtr schema, std::vector<InstanceRow> rows);

    const std::string& name() const noexcept { return name_; }
    const Schema& schema() const noexcept { return *schema_; }
    const SchemaPtr& schema_ptr() const noexcept { return schema_; }
    std::span<const InstanceRow> rows() const noexcept { return rows_; }
    const InstanceRow& row(std::size_t i) const { return rows_.at(i); }
    std::size_t size() const noexcept { return rows_.size(); }
    bool empty() const noexcept { return rows_.empty(); }

    /// Per-class row counts, indexed like the class domain.
    std::vector<std::size_t> class_counts() const;
    /// Majority class; ties go to the class earliest in the domain.
    std::size_t majority_class() const;

    /// New table holding rows[indices[0]], rows[indices[1]], ... (repeats allowed).
    DatasetTable subset(std::span<const std::size_t> indices) const;

private:
    std::string name_;
    SchemaPtr schema_;
    std::vector<InstanceRow> rows_;
};

/// Load errors carry the 1-based line and column (0 when not applicable).
class ParseError : public std::runtime_error {
public:
    ParseError(const std::string& file, std::size_t line, std::size_t column, const std::string& what);

    std::size_t line() const noexcept { return line_; }
    std::size_t column() const noexcept { return column_; }

private:
    std::size_t line_;
    std::size_t column_;
};

enum class DataFormat { csv_with_schema, attribute_header };

/// Sidecar schema location for a CSV file: same stem, `.schema` extension.
std::filesystem::path sidecar_schema_path(const std::filesystem::path& csv_path);

/// Loads either a header-bearing CSV plus sidecar schema, or a file with an
/// inline `@attribute` header block. Without a hint, the format is detected
/// from the extension (.arff) or a leading `@` directive.
DatasetTable load_dataset(const std::filesystem::path& path,
                          std::optional<DataFormat> format_hint = std::nullopt);

DatasetTable parse_attribute_header_text(std::string_view text, const std::string& source_name);
DatasetTable parse_csv_text(std::string_view csv_text, std::string_view schema_text,
                            const std::string& source_name);

/// Row-to-fold assignment.
struct FoldPlan {
    std::size_t k = 1;
    std::vector<std::size_t> assignments;

    std::vector<std::size_t> test_indices(std::size_t fold) const;
    std::vector<std::size_t> train_indices(std::size_t fold) const;
};

/// Shuffles each class by seed and deals round-robin into k folds, continuing
/// the deal position from one class to the next.
FoldPlan stratified_folds(const DatasetTable& data, std::size_t k, Seed seed);

/// Stratified split with |train| = round(train_fraction * n).
std::pair<DatasetTable, DatasetTable> holdout_split(const DatasetTable& data, double train_fraction,
                                                    Seed seed);

/// Row indices of a uniform with-replacement resample of size n.
std::vector<std::size_t> bootstrap_indices(std::size_t n, Seed seed);
DatasetTable bootstrap_sample(const DatasetTable& train, Seed seed);

}  // namespace eam
