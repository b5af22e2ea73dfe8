// config.hpp
// Batch-run configuration: flat key=value files, overridable from the
// command line.

#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string_view>

#include "evstudy/inference.hpp"

namespace evstudy {

class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

enum class ReportFormat { csv, json };

std::string_view to_string(ReportFormat format) noexcept;

struct RunConfig {
    std::filesystem::path price_dir;
    std::filesystem::path market_file;
    std::filesystem::path events_file;
    std::filesystem::path output;
    std::uint64_t n_scenarios = kDefaultScenarios;
    std::uint64_t seed = 1;
    DrawMode mode = DrawMode::iid;
    DecisionThresholds thresholds{};
    std::size_t estimation_days = kStandardEstimationDays;
    ReportFormat format = ReportFormat::csv;
    PriceCsvFormat price_format{};
    unsigned workers = 0;
    std::optional<kernels::Isa> isa;

    // Throws ConfigError naming the first violated constraint.
    void validate() const;

    StudyConfig study_config() const;
};

// Recognised keys (with aliases):
//   price_dir, market_file, events_file, output|out,
//   n_scenarios|scenarios, seed, mode, lo, hi, thresholds (= "lo,hi"),
//   estimation_T|estimation_days, format, date_column, price_column,
//   workers, kernel
// Relative paths are resolved against base_dir.
void apply_setting(RunConfig& config, std::string_view key, std::string_view value,
                   const std::filesystem::path& base_dir);

// Lines are "key = value"; blank lines and lines starting with '#' are
// skipped. Unknown keys are an error.
RunConfig parse_run_config(std::string_view text, const std::filesystem::path& base_dir,
                           std::string_view source_name = "<memory>");
RunConfig load_run_config(const std::filesystem::path& file);

}  // namespace evstudy
