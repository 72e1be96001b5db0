#pragma once

// Batch front end: `bench run`, `bench stability`, `stats compare`, `dataset info`.

#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "eam/antminer.hpp"
#include "eam/dataset.hpp"

namespace eam::cli {

/// Environment variable naming the directory searched for bare dataset names.
inline constexpr const char* kDataDirEnv = "EANTMINER_DATA_DIR";

enum class AlgorithmChoice { single, ensemble, both };
/// `paper`: CV for the single learner, hold-out for the ensemble.
enum class ProtocolChoice { paper, cv, holdout };

struct ExperimentConfig {
    std::vector<std::string> datasets;
    std::string profile = "desk";
    AlgorithmChoice algorithm = AlgorithmChoice::both;
    ProtocolChoice protocol = ProtocolChoice::paper;
    AntMinerParams ant;
    std::size_t replicas = 10;
    std::size_t folds = 10;
    std::size_t iterations = 10;
    std::size_t workers = 1;
    Seed seed = 1;
    std::filesystem::path out_dir = "results";

    void validate() const;
    /// Effective parameters as `key=value` pairs, in a fixed order. Paths are
    /// left out so identical experiments produce identical text.
    std::vector<std::pair<std::string, std::string>> entries() const;
    std::string describe() const;
};

/// Thrown when a dataset or input file does not exist.
class MissingPath : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// `desk` (200 ants, 3 iterations) or `paper` (full-size defaults: 3000 ants, 10 iterations).
void apply_profile(ExperimentConfig& config, std::string_view profile);

/// Sets one key (same names as the config file). Throws std::invalid_argument.
void apply_setting(ExperimentConfig& config, const std::string& key, const std::string& value);

/// `key = value` lines; `#` starts a comment.
std::map<std::string, std::string> read_config_file(const std::filesystem::path& path);

/// Layered configuration: profile, then config file, then flags.
ExperimentConfig resolve_config(const std::map<std::string, std::string>& file_settings,
                                const std::map<std::string, std::string>& flag_settings,
                                const std::vector<std::string>& datasets);

/// Existing path, or `<data dir>/<name>[.csv|.arff]` when the data directory
/// variable is set. Throws MissingPath.
std::filesystem::path resolve_dataset(const std::string& name);

/// "4 continuous, 0 nominal, 3 classes, 150 examples"
std::string dataset_summary(const DatasetTable& data);

/// Writes `content` to a temporary sibling and renames it into place.
void write_file_atomic(const std::filesystem::path& path, const std::string& content);

int cmd_bench(const ExperimentConfig& config, std::ostream& out, std::ostream& err);
int cmd_stability(const ExperimentConfig& config, std::ostream& out, std::ostream& err);

struct StatsConfig {
    std::filesystem::path matrix;
    double alpha = 0.05;
    std::string mode = "all";  // all, control, hommel, shaffer
    std::optional<std::string> control;
    std::filesystem::path out_dir = "stats";
};

int cmd_stats(const StatsConfig& config, std::ostream& out, std::ostream& err);
int cmd_dataset_info(std::span<const std::string> paths, std::ostream& out, std::ostream& err);

/// Parses `args` (without the program name) and dispatches.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace eam::cli
