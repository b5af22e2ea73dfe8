// report.hpp
// Report rows, batch runs, histogram export and the decision-rule golden
// check against the published results table.

#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "evstudy/config.hpp"
#include "evstudy/inference.hpp"

namespace evstudy {

inline constexpr int kExitSuccess = 0;
inline constexpr int kExitPartial = 1;
inline constexpr int kExitConfig = 2;

// One row per (event, window). Column order is fixed: the published table's
// five columns first, then provenance.
struct ReportRow {
    std::string company;
    std::string window;
    double car = 0.0;
    double percentile = 0.0;
    Impact impact = Impact::none;
    std::string instrument_id;
    std::string announcement_date;
    std::string event_day;
    double additive_car = 0.0;
    std::uint32_t draws_k = 0;
    std::uint64_t n_scenarios = 0;
    DrawMode mode = DrawMode::iid;
    std::uint64_t seed = 0;
    std::uint64_t window_seed = 0;
    std::size_t estimation_days = 0;
    std::string generator;
    double ln_alpha_hat = 0.0;
    double alpha_hat = 0.0;
    double beta_hat = 0.0;
    std::string flags;
};

std::vector<ReportRow> report_rows(const EventStudy& study);

// 9 decimals for CARs, 5 for percentiles.
std::string format_car(double car);
// Falls back to round-trip precision in the rare case where 5 decimals would
// move the value across a decision threshold.
std::string format_percentile(double pct, double car, const DecisionThresholds& thresholds);

void write_report_csv(std::ostream& out, std::span<const ReportRow> rows, const DecisionThresholds& thresholds);
void write_report_json(std::ostream& out, std::span<const ReportRow> rows, std::span<const std::string> errors,
                       const DecisionThresholds& thresholds);

struct RunOutcome {
    int exit_code = kExitSuccess;
    std::filesystem::path report_path;
    std::size_t rows = 0;
    std::vector<std::string> errors;
    double seconds = 0.0;
    std::uint64_t scenarios = 0;  // total generated across events and windows
};

// Runs every event in the registry. Per-event failures are collected; if any
// occur the successful rows go to "<output>.partial" and the exit code is
// kExitPartial. A "<report>.run.json" sidecar records wall time and
// throughput so the report itself stays byte-reproducible. Throws
// ConfigError for problems that prevent any analysis.
RunOutcome run(const RunConfig& config, std::ostream& log);

// CSV with columns bin_low, bin_high, count.
void write_histogram_csv(std::ostream& out, const ScenarioDistribution& dist);
void emit_histogram(const ScenarioDistribution& dist, const std::filesystem::path& path);

// Finds an event by "<instrument_id>@<date>", 1-based registry row number,
// or a bare instrument_id when it is unique.
const EventRecord& find_event(const std::vector<EventRecord>& events, std::string_view selector);

// Runs one event with histogram binning enabled and writes the histogram of
// the requested window. Returns that window's result.
EventResult run_histogram(const RunConfig& config, std::string_view event_selector, EventWindow window,
                          std::uint32_t bins, const std::filesystem::path& out);

struct PublishedRow {
    std::string company;
    std::string window;
    double car = 0.0;
    double percentile = 0.0;
    Impact impact = Impact::none;
};

// Columns company, car, percentile, impact, window.
std::vector<PublishedRow> load_published_rows(const std::filesystem::path& path);

struct GoldenCheck {
    std::size_t rows = 0;
    std::vector<std::string> mismatches;
};

GoldenCheck verify_published_rows(std::span<const PublishedRow> rows, const DecisionThresholds& thresholds = {});

}  // namespace evstudy
