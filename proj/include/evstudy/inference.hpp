// inference.hpp
// Per-event orchestration: five event windows, empirical-percentile
// decision rule and the additive comparison baseline.

#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "evstudy/bootstrap.hpp"
#include "evstudy/ingest.hpp"
#include "evstudy/model.hpp"

namespace evstudy {

// Trading-day interval [start_offset, end_offset] around the event day.
struct EventWindow {
    int start_offset = -1;
    int end_offset = 0;

    constexpr std::uint32_t draws_k() const noexcept {
        return static_cast<std::uint32_t>(end_offset - start_offset + 1);
    }
    std::string label() const;  // "[-1,0]"

    bool operator==(const EventWindow&) const = default;
};

inline constexpr std::array<EventWindow, 5> kStandardWindows{{{-1, 0}, {-1, 1}, {-1, 3}, {-1, 5}, {-1, 10}}};

// Accepts "[-1,5]", "-1,5" or just the end offset "5"; the window must be
// one of the standard five.
EventWindow parse_window(std::string_view text);

enum class Impact { negative, none, positive };

std::string_view to_string(Impact impact) noexcept;
Impact parse_impact(std::string_view text);

struct DecisionThresholds {
    double lo = 10.0;
    double hi = 90.0;
};

// Negative iff car < 0 and pct < lo; Positive iff car > 0 and pct > hi.
Impact classify_impact(double car, double pct, double lo = 10.0, double hi = 90.0);

double actual_window_car(const AlignedReturns& aligned, const ModelFit& fit, std::size_t event_index,
                         EventWindow window);

double additive_baseline(const AlignedReturns& aligned, const AdditiveFit& fit, std::size_t event_index,
                         EventWindow window);

struct StudyConfig {
    std::uint64_t n_scenarios = kDefaultScenarios;
    std::uint64_t seed = 1;
    DrawMode mode = DrawMode::iid;
    DecisionThresholds thresholds{};
    std::size_t estimation_days = kStandardEstimationDays;
    std::uint32_t histogram_bins = 0;
    ExecutionPolicy execution{};
};

struct Provenance {
    std::uint64_t seed = 0;         // configured seed
    std::uint64_t window_seed = 0;  // derived seed actually used
    DrawMode mode = DrawMode::iid;
    std::uint64_t n_scenarios = 0;
    std::size_t estimation_days = 0;
    std::string_view generator = kGeneratorName;
};

struct EventResult {
    EventRecord event;
    EventWindow window;
    double car_actual = 0.0;
    double percentile = 0.0;
    Impact impact = Impact::none;
    double baseline_car_additive = 0.0;
    Provenance provenance;
    ScenarioDistribution distribution;
};

struct EventStudy {
    EventRecord event;
    std::size_t event_index = 0;
    Date event_day{};
    ModelFit fit;
    AdditiveFit additive;
    std::vector<EventResult> results;  // one per standard window, in order
};

// "<instrument_id>@<YYYY-MM-DD>", unique per announcement.
std::string event_id(const EventRecord& event);

std::uint64_t derive_window_seed(std::uint64_t seed, std::string_view event_id, EventWindow window) noexcept;

EventStudy run_event_study(const EventRecord& event, const PriceSeries& stock, const PriceSeries& market,
                           const StudyConfig& config);

}  // namespace evstudy
