#include "eam/dataset.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <numeric>
#include <set>
#include <sstream>

#include "eam/csv.hpp"

namespace eam {

namespace {

std::string trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string_view::npos) {
        return {};
    }
    const auto e = s.find_last_not_of(" \t\r\n");
    return std::string(s.substr(b, e - b + 1));
}

std::string lower(std::string s) {
    std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::tolower(c); });
    return s;
}

std::vector<std::string> split_domain(std::string_view text) {
    std::vector<std::string> out;
    std::size_t start = 0;
    while (start <= text.size()) {
        const auto comma = text.find(',', start);
        const auto end = comma == std::string_view::npos ? text.size() : comma;
        out.push_back(trim(text.substr(start, end - start)));
        if (comma == std::string_view::npos) {
            break;
        }
        start = comma + 1;
    }
    return out;
}

std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw std::runtime_error("cannot open '" + path.string() + "'");
    }
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

/// Column layout shared by both input formats.
struct ColumnLayout {
    std::vector<AttributeSpec> columns;  // in file column order, class included
    std::size_t class_column = 0;
};

DatasetTable build_table(std::string name, const ColumnLayout& layout,
                         const std::vector<csv::NumberedRecord>& records, const std::string& file) {
    std::vector<AttributeSpec> predictors;
    std::vector<std::size_t> position(layout.columns.size(), 0);
    for (std::size_t c = 0; c < layout.columns.size(); ++c) {
        if (c != layout.class_column) {
            position[c] = predictors.size();
            predictors.push_back(layout.columns[c]);
        }
    }
    auto schema = std::make_shared<const Schema>(std::move(predictors), layout.columns[layout.class_column]);

    if (records.empty()) {
        throw ParseError(file, 0, 0, "no data rows");
    }
    std::vector<InstanceRow> rows;
    rows.reserve(records.size());
    for (const auto& rec : records) {
        if (rec.fields.size() != layout.columns.size()) {
            throw ParseError(file, rec.line, std::min(rec.fields.size(), layout.columns.size()) + 1,
                             "expected " + std::to_string(layout.columns.size()) + " fields, found " +
                                 std::to_string(rec.fields.size()));
        }
        InstanceRow row;
        row.values.resize(schema->attribute_count());
        for (std::size_t c = 0; c < layout.columns.size(); ++c) {
            const std::string cell = trim(rec.fields[c]);
            const AttributeSpec& spec = layout.columns[c];
            if (cell.empty() || cell == "?") {
                throw ParseError(file, rec.line, c + 1, "missing value for '" + spec.name() + "'");
            }
            double value = 0.0;
            if (spec.is_nominal()) {
                const auto idx = spec.category_index(cell);
                if (!idx) {
                    throw ParseError(file, rec.line, c + 1,
                                     "unknown category '" + cell + "' for '" + spec.name() + "'");
                }
                value = static_cast<double>(*idx);
            } else {
                const char* first = cell.data();
                const char* last = cell.data() + cell.size();
                auto [ptr, ec] = std::from_chars(first, last, value);
                if (ec != std::errc{} || ptr != last || !std::isfinite(value)) {
                    throw ParseError(file, rec.line, c + 1,
                                     "non-numeric value '" + cell + "' for continuous '" + spec.name() + "'");
                }
            }
            if (c == layout.class_column) {
                row.label = static_cast<std::size_t>(value);
            } else {
                row.values[position[c]] = value;
            }
        }
        rows.push_back(std::move(row));
    }
    return DatasetTable(std::move(name), std::move(schema), std::move(rows));
}

struct SchemaFile {
    std::string name;
    std::string class_name;
    std::map<std::string, AttributeSpec> attributes;
    std::map<std::string, std::size_t> lines;
};

SchemaFile parse_schema_text(std::string_view text, const std::string& file) {
    SchemaFile out;
    std::istringstream in{std::string(text)};
    std::string raw;
    std::size_t line = 0;
    while (std::getline(in, raw)) {
        ++line;
        const std::string l = trim(raw);
        if (l.empty() || l[0] == '#') {
            continue;
        }
        const auto eq = l.find('=');
        if (eq == std::string::npos) {
            throw ParseError(file, line, 1, "expected 'key = value'");
        }
        const std::string key = trim(std::string_view(l).substr(0, eq));
        const std::string value = trim(std::string_view(l).substr(eq + 1));
        if (key == "dataset.name") {
            out.name = value;
        } else if (key == "dataset.class") {
            out.class_name = value;
        } else if (key.rfind("attr.", 0) == 0) {
            const std::string attr = key.substr(5);
            if (attr.empty()) {
                throw ParseError(file, line, 1, "empty attribute name");
            }
            if (out.attributes.count(attr) != 0) {
                throw ParseError(file, line, 1, "attribute '" + attr + "' declared twice");
            }
            try {
                if (value == "continuous") {
                    out.attributes.emplace(attr, AttributeSpec::continuous(attr));
                } else if (value.rfind("nominal:", 0) == 0) {
                    out.attributes.emplace(attr, AttributeSpec::nominal(attr, split_domain(value.substr(8))));
                } else {
                    throw ParseError(file, line, eq + 2,
                                     "attribute kind must be 'continuous' or 'nominal:<domain>'");
                }
            } catch (const std::invalid_argument& e) {
                throw ParseError(file, line, eq + 2, e.what());
            }
            out.lines[attr] = line;
        } else {
            throw ParseError(file, line, 1, "unknown key '" + key + "'");
        }
    }
    if (out.class_name.empty()) {
        throw ParseError(file, 0, 0, "schema does not name the class attribute (dataset.class)");
    }
    return out;
}

std::string unquote(std::string s) {
    if (s.size() >= 2 && (s.front() == '\'' || s.front() == '"') && s.back() == s.front()) {
        return s.substr(1, s.size() - 2);
    }
    return s;
}

}  // namespace

// --- AttributeSpec / Schema -------------------------------------------------

AttributeSpec::AttributeSpec(std::string name, AttributeKind kind, std::vector<std::string> domain)
    : name_(std::move(name)), kind_(kind), domain_(std::move(domain)) {
    if (name_.empty()) {
        throw std::invalid_argument("attribute name must not be empty");
    }
}

AttributeSpec AttributeSpec::nominal(std::string name, std::vector<std::string> domain) {
    if (domain.empty()) {
        throw std::invalid_argument("nominal attribute '" + name + "' has an empty domain");
    }
    std::set<std::string> seen;
    for (const auto& label : domain) {
        if (label.empty()) {
            throw std::invalid_argument("nominal attribute '" + name + "' has an empty label");
        }
        if (!seen.insert(label).second) {
            throw std::invalid_argument("nominal attribute '" + name + "' repeats label '" + label + "'");
        }
    }
    return AttributeSpec(std::move(name), AttributeKind::nominal, std::move(domain));
}

AttributeSpec AttributeSpec::continuous(std::string name) {
    return AttributeSpec(std::move(name), AttributeKind::continuous, {});
}

std::optional<std::size_t> AttributeSpec::category_index(std::string_view label) const {
    const auto it = std::find(domain_.begin(), domain_.end(), label);
    if (it == domain_.end()) {
        return std::nullopt;
    }
    return static_cast<std::size_t>(it - domain_.begin());
}

Schema::Schema(std::vector<AttributeSpec> attributes, AttributeSpec class_attribute)
    : attributes_(std::move(attributes)), class_attribute_(std::move(class_attribute)) {
    if (!class_attribute_.is_nominal()) {
        throw std::invalid_argument("class attribute '" + class_attribute_.name() + "' must be nominal");
    }
    std::set<std::string> names{class_attribute_.name()};
    for (const auto& a : attributes_) {
        if (!names.insert(a.name()).second) {
            throw std::invalid_argument("duplicate attribute name '" + a.name() + "'");
        }
    }
}

std::optional<std::size_t> Schema::attribute_index(std::string_view name) const {
    for (std::size_t i = 0; i < attributes_.size(); ++i) {
        if (attributes_[i].name() == name) {
            return i;
        }
    }
    return std::nullopt;
}

std::size_t Schema::nominal_count() const noexcept {
    return static_cast<std::size_t>(
        std::count_if(attributes_.begin(), attributes_.end(), [](const auto& a) { return a.is_nominal(); }));
}

std::size_t Schema::continuous_count() const noexcept { return attributes_.size() - nominal_count(); }

void check_row(const Schema& schema, const InstanceRow& row) {
    if (row.values.size() != schema.attribute_count()) {
        throw std::invalid_argument("instance has " + std::to_string(row.values.size()) +
                                    " values, schema has " + std::to_string(schema.attribute_count()) +
                                    " attributes");
    }
    if (row.label >= schema.class_count()) {
        throw std::invalid_argument("class label index out of range");
    }
    for (std::size_t i = 0; i < row.values.size(); ++i) {
        const double v = row.values[i];
        const auto& spec = schema.attribute(i);
        if (!std::isfinite(v)) {
            throw std::invalid_argument("non-finite value for '" + spec.name() + "'");
        }
        if (spec.is_nominal() &&
            (v < 0.0 || v != std::floor(v) || v >= static_cast<double>(spec.domain_size()))) {
            throw std::invalid_argument("value for nominal '" + spec.name() + "' is not a category index");
        }
    }
}

// --- DatasetTable -------------------------------------------------------------

DatasetTable::DatasetTable(std::string name, SchemaPtr schema, std::vector<InstanceRow> rows)
    : name_(std::move(name)), schema_(std::move(schema)), rows_(std::move(rows)) {
    if (!schema_) {
        throw std::invalid_argument("dataset requires a schema");
    }
    for (const auto& r : rows_) {
        check_row(*schema_, r);
    }
}

std::vector<std::size_t> DatasetTable::class_counts() const {
    std::vector<std::size_t> counts(schema_->class_count(), 0);
    for (const auto& r : rows_) {
        ++counts[r.label];
    }
    return counts;
}

std::size_t DatasetTable::majority_class() const {
    const auto counts = class_counts();
    return static_cast<std::size_t>(std::max_element(counts.begin(), counts.end()) - counts.begin());
}

DatasetTable DatasetTable::subset(std::span<const std::size_t> indices) const {
    std::vector<InstanceRow> rows;
    rows.reserve(indices.size());
    for (std::size_t i : indices) {
        rows.push_back(rows_.at(i));
    }
    DatasetTable out(name_, schema_, {});
    out.rows_ = std::move(rows);
    return out;
}

// --- loading ------------------------------------------------------------------

ParseError::ParseError(const std::string& file, std::size_t line, std::size_t column, const std::string& what)
    : std::runtime_error(file + (line > 0 ? ":" + std::to_string(line) : std::string()) +
                         (column > 0 ? ":" + std::to_string(column) : std::string()) + ": " + what),
      line_(line),
      column_(column) {}

std::filesystem::path sidecar_schema_path(const std::filesystem::path& csv_path) {
    auto p = csv_path;
    p.replace_extension(".schema");
    return p;
}

DatasetTable parse_csv_text(std::string_view csv_text, std::string_view schema_text,
                            const std::string& source_name) {
    const std::string schema_file = source_name + " (schema)";
    SchemaFile schema = parse_schema_text(schema_text, schema_file);

    std::vector<csv::NumberedRecord> records;
    try {
        records = csv::parse(csv_text);
    } catch (const std::runtime_error& e) {
        throw ParseError(source_name, 0, 0, e.what());
    }
    if (records.empty()) {
        throw ParseError(source_name, 1, 0, "empty file");
    }
    const auto header = records.front();
    records.erase(records.begin());

    ColumnLayout layout;
    bool class_found = false;
    std::set<std::string> seen;
    for (std::size_t c = 0; c < header.fields.size(); ++c) {
        const std::string col = trim(header.fields[c]);
        if (!seen.insert(col).second) {
            throw ParseError(source_name, header.line, c + 1, "duplicate column '" + col + "'");
        }
        const auto it = schema.attributes.find(col);
        if (it == schema.attributes.end()) {
            throw ParseError(source_name, header.line, c + 1, "column '" + col + "' is not declared in the schema");
        }
        if (col == schema.class_name) {
            if (!it->second.is_nominal()) {
                throw ParseError(schema_file, schema.lines[col], 0, "class attribute '" + col + "' must be nominal");
            }
            layout.class_column = c;
            class_found = true;
        }
        layout.columns.push_back(it->second);
    }
    for (const auto& [name, spec] : schema.attributes) {
        if (seen.count(name) == 0) {
            throw ParseError(schema_file, schema.lines[name], 0, "attribute '" + name + "' has no CSV column");
        }
    }
    if (!class_found) {
        throw ParseError(source_name, header.line, 0, "class attribute '" + schema.class_name + "' not in header");
    }
    std::string name = schema.name.empty() ? std::filesystem::path(source_name).stem().string() : schema.name;
    return build_table(std::move(name), layout, records, source_name);
}

DatasetTable parse_attribute_header_text(std::string_view text, const std::string& source_name) {
    std::istringstream in{std::string(text)};
    std::string raw;
    std::size_t line = 0;
    std::string relation;
    std::string class_name;
    ColumnLayout layout;
    bool in_data = false;
    std::string data_block;
    std::size_t data_start_line = 0;

    while (std::getline(in, raw)) {
        ++line;
        if (in_data) {
            data_block += raw;
            data_block += '\n';
            continue;
        }
        const std::string l = trim(raw);
        if (l.empty() || l[0] == '%') {
            continue;
        }
        if (l[0] != '@') {
            throw ParseError(source_name, line, 1, "expected an '@' directive before @data");
        }
        const auto sp = l.find_first_of(" \t");
        const std::string directive = lower(l.substr(0, sp));
        const std::string rest = sp == std::string::npos ? std::string() : trim(l.substr(sp));
        if (directive == "@relation") {
            relation = unquote(rest);
        } else if (directive == "@class") {
            class_name = unquote(rest);
        } else if (directive == "@data") {
            in_data = true;
            data_start_line = line + 1;
        } else if (directive == "@attribute") {
            std::string name;
            std::string type;
            if (!rest.empty() && (rest[0] == '\'' || rest[0] == '"')) {
                const auto close = rest.find(rest[0], 1);
                if (close == std::string::npos) {
                    throw ParseError(source_name, line, sp + 2, "unterminated attribute name");
                }
                name = rest.substr(1, close - 1);
                type = trim(rest.substr(close + 1));
            } else {
                const auto ws = rest.find_first_of(" \t");
                if (ws == std::string::npos) {
                    throw ParseError(source_name, line, sp + 2, "attribute type missing");
                }
                name = rest.substr(0, ws);
                type = trim(rest.substr(ws));
            }
            try {
                if (!type.empty() && type.front() == '{') {
                    if (type.back() != '}') {
                        throw ParseError(source_name, line, l.find('{') + 1, "unterminated nominal domain");
                    }
                    auto domain = split_domain(std::string_view(type).substr(1, type.size() - 2));
                    for (auto& d : domain) {
                        d = unquote(d);
                    }
                    layout.columns.push_back(AttributeSpec::nominal(name, std::move(domain)));
                } else {
                    const std::string t = lower(type);
                    if (t != "numeric" && t != "real" && t != "integer" && t != "continuous") {
                        throw ParseError(source_name, line, l.find(type) + 1, "unsupported attribute type '" + type + "'");
                    }
                    layout.columns.push_back(AttributeSpec::continuous(name));
                }
            } catch (const std::invalid_argument& e) {
                throw ParseError(source_name, line, 1, e.what());
            }
        } else {
            throw ParseError(source_name, line, 1, "unknown directive '" + directive + "'");
        }
    }
    if (layout.columns.empty()) {
        throw ParseError(source_name, line == 0 ? 1 : line, 0, text.empty() ? "empty file" : "no @attribute declarations");
    }
    if (!in_data) {
        throw ParseError(source_name, line, 0, "missing @data section");
    }
    if (class_name.empty()) {
        layout.class_column = layout.columns.size() - 1;
    } else {
        const auto it = std::find_if(layout.columns.begin(), layout.columns.end(),
                                     [&](const auto& a) { return a.name() == class_name; });
        if (it == layout.columns.end()) {
            throw ParseError(source_name, 0, 0, "@class names unknown attribute '" + class_name + "'");
        }
        layout.class_column = static_cast<std::size_t>(it - layout.columns.begin());
    }
    if (!layout.columns[layout.class_column].is_nominal()) {
        throw ParseError(source_name, 0, 0, "class attribute must be nominal");
    }
    {
        std::set<std::string> names;
        for (const auto& c : layout.columns) {
            if (!names.insert(c.name()).second) {
                throw ParseError(source_name, 0, 0, "duplicate attribute '" + c.name() + "'");
            }
        }
    }
    std::vector<csv::NumberedRecord> records;
    try {
        records = csv::parse(data_block);
    } catch (const std::runtime_error& e) {
        throw ParseError(source_name, data_start_line, 0, e.what());
    }
    std::vector<csv::NumberedRecord> kept;
    for (auto& r : records) {
        r.line += data_start_line - 1;
        if (!r.fields.empty() && trim(r.fields[0]).rfind('%', 0) == 0) {
            continue;
        }
        kept.push_back(std::move(r));
    }
    std::string name = relation.empty() ? std::filesystem::path(source_name).stem().string() : relation;
    return build_table(std::move(name), layout, kept, source_name);
}

DatasetTable load_dataset(const std::filesystem::path& path, std::optional<DataFormat> format_hint) {
    if (!std::filesystem::exists(path)) {
        throw std::runtime_error("dataset file '" + path.string() + "' does not exist");
    }
    const std::string text = read_file(path);
    DataFormat format = DataFormat::csv_with_schema;
    if (format_hint) {
        format = *format_hint;
    } else {
        const std::string ext = lower(path.extension().string());
        const auto first = text.find_first_not_of(" \t\r\n");
        if (ext == ".arff" || (first != std::string::npos && (text[first] == '@' || text[first] == '%'))) {
            format = DataFormat::attribute_header;
        }
    }
    if (format == DataFormat::attribute_header) {
        return parse_attribute_header_text(text, path.string());
    }
    const auto schema_path = sidecar_schema_path(path);
    if (!std::filesystem::exists(schema_path)) {
        throw std::runtime_error("missing sidecar schema '" + schema_path.string() + "' for '" + path.string() + "'");
    }
    return parse_csv_text(text, read_file(schema_path), path.string());
}

// --- sampling -----------------------------------------------------------------

std::vector<std::size_t> FoldPlan::test_indices(std::size_t fold) const {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < assignments.size(); ++i) {
        if (assignments[i] == fold) {
            out.push_back(i);
        }
    }
    return out;
}

std::vector<std::size_t> FoldPlan::train_indices(std::size_t fold) const {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < assignments.size(); ++i) {
        if (assignments[i] != fold) {
            out.push_back(i);
        }
    }
    return out;
}

namespace {

std::vector<std::vector<std::size_t>> rows_by_class(const DatasetTable& data) {
    std::vector<std::vector<std::size_t>> by_class(data.schema().class_count());
    for (std::size_t i = 0; i < data.size(); ++i) {
        by_class[data.rows()[i].label].push_back(i);
    }
    return by_class;
}

}  // namespace

FoldPlan stratified_folds(const DatasetTable& data, std::size_t k, Seed seed) {
    if (k == 0) {
        throw std::invalid_argument("stratified_folds: k must be positive");
    }
    if (k > data.size()) {
        throw std::invalid_argument("stratified_folds: k=" + std::to_string(k) + " exceeds row count " +
                                    std::to_string(data.size()));
    }
    Rng rng = make_rng(seed);
    FoldPlan plan;
    plan.k = k;
    plan.assignments.assign(data.size(), 0);
    std::size_t next_fold = 0;
    for (auto& members : rows_by_class(data)) {
        std::shuffle(members.begin(), members.end(), rng);
        for (std::size_t row : members) {
            plan.assignments[row] = next_fold;
            next_fold = (next_fold + 1) % k;
        }
    }
    return plan;
}

std::pair<DatasetTable, DatasetTable> holdout_split(const DatasetTable& data, double train_fraction, Seed seed) {
    if (!(train_fraction > 0.0 && train_fraction < 1.0)) {
        throw std::invalid_argument("holdout_split: train fraction must lie in (0, 1)");
    }
    const std::size_t n = data.size();
    const auto n_train = static_cast<std::size_t>(std::llround(train_fraction * static_cast<double>(n)));
    if (n_train == 0 || n_train >= n) {
        throw std::invalid_argument("holdout_split: fraction " + std::to_string(train_fraction) + " on " +
                                    std::to_string(n) + " rows leaves one side empty");
    }
    auto by_class = rows_by_class(data);

    // Largest-remainder apportionment keeps each class within one row of its share.
    std::vector<std::size_t> quota(by_class.size());
    std::vector<std::pair<double, std::size_t>> remainders;
    std::size_t assigned = 0;
    for (std::size_t c = 0; c < by_class.size(); ++c) {
        const double exact = train_fraction * static_cast<double>(by_class[c].size());
        quota[c] = static_cast<std::size_t>(std::floor(exact));
        assigned += quota[c];
        remainders.emplace_back(exact - std::floor(exact), c);
    }
    std::stable_sort(remainders.begin(), remainders.end(),
                     [](const auto& a, const auto& b) { return a.first > b.first; });
    for (std::size_t i = 0; assigned < n_train && i < remainders.size(); ++i) {
        const std::size_t c = remainders[i].second;
        if (quota[c] < by_class[c].size()) {
            ++quota[c];
            ++assigned;
        }
    }

    Rng rng = make_rng(seed);
    std::vector<bool> in_train(n, false);
    for (std::size_t c = 0; c < by_class.size(); ++c) {
        std::shuffle(by_class[c].begin(), by_class[c].end(), rng);
        for (std::size_t i = 0; i < quota[c]; ++i) {
            in_train[by_class[c][i]] = true;
        }
    }
    std::vector<std::size_t> train_idx;
    std::vector<std::size_t> test_idx;
    for (std::size_t i = 0; i < n; ++i) {
        (in_train[i] ? train_idx : test_idx).push_back(i);
    }
    return {data.subset(train_idx), data.subset(test_idx)};
}

std::vector<std::size_t> bootstrap_indices(std::size_t n, Seed seed) {
    if (n == 0) {
        throw std::invalid_argument("bootstrap_sample: input is empty");
    }
    Rng rng = make_rng(seed);
    std::uniform_int_distribution<std::size_t> pick(0, n - 1);
    std::vector<std::size_t> out(n);
    for (auto& i : out) {
        i = pick(rng);
    }
    return out;
}

DatasetTable bootstrap_sample(const DatasetTable& train, Seed seed) {
    const auto idx = bootstrap_indices(train.size(), seed);
    return train.subset(idx);
}

}  // namespace eam
