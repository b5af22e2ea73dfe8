#include "evstudy/inference.hpp"

#include <charconv>
#include <stdexcept>

#include <fmt/format.h>

#include "evstudy/philox.hpp"

namespace evstudy {
namespace {

void check_window_bounds(const AlignedReturns& aligned, std::size_t event_index, EventWindow window) {
    const auto first = static_cast<long long>(event_index) + window.start_offset;
    const auto last = static_cast<long long>(event_index) + window.end_offset;
    if (first < 0 || window.end_offset < window.start_offset)
        throw DataError(fmt::format("window {} starts before the series", window.label()));
    if (last >= static_cast<long long>(aligned.size()))
        throw DataError(fmt::format("insufficient event history for window {}", window.label()));
}

std::uint64_t fnv1a(std::string_view text) noexcept {
    std::uint64_t h = 0xCBF29CE484222325ull;
    for (const unsigned char c : text) {
        h ^= c;
        h *= 0x100000001B3ull;
    }
    return h;
}

}  // namespace

std::string EventWindow::label() const { return fmt::format("[{},{}]", start_offset, end_offset); }

EventWindow parse_window(std::string_view text) {
    std::string s;
    for (const char c : text)
        if (c != '[' && c != ']' && c != ' ') s.push_back(c);
    std::string_view end_part = s;
    if (const auto comma = s.find(','); comma != std::string::npos) {
        if (s.substr(0, comma) != "-1") throw std::invalid_argument(fmt::format("invalid window '{}'", text));
        end_part = std::string_view(s).substr(comma + 1);
    }
    int end = 0;
    const auto [ptr, ec] = std::from_chars(end_part.data(), end_part.data() + end_part.size(), end);
    if (ec != std::errc{} || ptr != end_part.data() + end_part.size())
        throw std::invalid_argument(fmt::format("invalid window '{}'", text));
    for (const auto& w : kStandardWindows)
        if (w.end_offset == end) return w;
    throw std::invalid_argument(fmt::format("'{}' is not a standard event window", text));
}

std::string_view to_string(Impact impact) noexcept {
    switch (impact) {
        case Impact::negative:
            return "Negative";
        case Impact::positive:
            return "Positive";
        case Impact::none:
            break;
    }
    return "None";
}

Impact parse_impact(std::string_view text) {
    if (text == "Negative") return Impact::negative;
    if (text == "Positive") return Impact::positive;
    if (text == "None") return Impact::none;
    throw std::invalid_argument(fmt::format("unknown impact label '{}'", text));
}

Impact classify_impact(double car, double pct, double lo, double hi) {
    if (!(pct >= 0.0 && pct <= 100.0)) throw std::invalid_argument(fmt::format("percentile {} outside [0,100]", pct));
    if (!(0.0 < lo && lo < hi && hi < 100.0))
        throw std::invalid_argument(fmt::format("thresholds must satisfy 0 < lo < hi < 100 (got {}, {})", lo, hi));
    if (car < 0.0 && pct < lo) return Impact::negative;
    if (car > 0.0 && pct > hi) return Impact::positive;
    return Impact::none;
}

double actual_window_car(const AlignedReturns& aligned, const ModelFit& fit, std::size_t event_index,
                         EventWindow window) {
    check_window_bounds(aligned, event_index, window);
    std::vector<double> ars;
    for (int off = window.start_offset; off <= window.end_offset; ++off) {
        const auto i = static_cast<std::size_t>(static_cast<long long>(event_index) + off);
        ars.push_back(abnormal_return(aligned.stock_returns[i], aligned.market_returns[i], fit));
    }
    return cumulative_abnormal_return(ars);
}

double additive_baseline(const AlignedReturns& aligned, const AdditiveFit& fit, std::size_t event_index,
                         EventWindow window) {
    check_window_bounds(aligned, event_index, window);
    std::vector<double> ars;
    for (int off = window.start_offset; off <= window.end_offset; ++off) {
        const auto i = static_cast<std::size_t>(static_cast<long long>(event_index) + off);
        ars.push_back(additive_abnormal_return(aligned.stock_returns[i], aligned.market_returns[i], fit));
    }
    return additive_cumulative_return(ars);
}

std::string event_id(const EventRecord& event) {
    return event.instrument_id + "@" + format_iso_date(event.announcement_date);
}

std::uint64_t derive_window_seed(std::uint64_t seed, std::string_view id, EventWindow window) noexcept {
    std::uint64_t h = mix64(seed);
    h = mix64(h ^ fnv1a(id));
    h = mix64(h ^ static_cast<std::uint64_t>(static_cast<std::int64_t>(window.start_offset) * 1000 +
                                             window.end_offset));
    return h;
}

EventStudy run_event_study(const EventRecord& event, const PriceSeries& stock, const PriceSeries& market,
                           const StudyConfig& config) {
    const auto& th = config.thresholds;
    if (!(0.0 < th.lo && th.lo < th.hi && th.hi < 100.0))
        throw std::invalid_argument("thresholds must satisfy 0 < lo < hi < 100");
    if (config.estimation_days < 3) throw std::invalid_argument("estimation window must have at least 3 days");

    const auto aligned = align(stock, market);
    const auto max_end = static_cast<std::size_t>(kStandardWindows.back().end_offset);
    const auto t = resolve_event_day(event, aligned.dates, {config.estimation_days, max_end});

    EventStudy study;
    study.event = event;
    study.event_index = t;
    study.event_day = aligned.dates[t];
    const auto window = estimation_window(aligned, t, config.estimation_days);
    study.fit = fit_market_model(window);
    study.additive = fit_additive_model(window);

    const auto id = event_id(event);
    study.results.reserve(kStandardWindows.size());
    for (const auto& w : kStandardWindows) {
        EventResult r;
        r.event = event;
        r.window = w;
        r.car_actual = actual_window_car(aligned, study.fit, t, w);
        r.baseline_car_additive = additive_baseline(aligned, study.additive, t, w);

        ScenarioSpec spec;
        spec.draws_k = w.draws_k();
        spec.n_scenarios = config.n_scenarios;
        spec.seed = derive_window_seed(config.seed, id, w);
        spec.mode = config.mode;
        spec.histogram_bins = config.histogram_bins;
        const double query[] = {r.car_actual};
        r.distribution = generate_distribution(study.fit.residual_ars, spec, query, config.execution);
        r.percentile = percentile_of(r.distribution, r.car_actual);
        r.impact = classify_impact(r.car_actual, r.percentile, th.lo, th.hi);
        r.provenance = {config.seed, spec.seed, config.mode, config.n_scenarios, config.estimation_days,
                        kGeneratorName};
        study.results.push_back(std::move(r));
    }
    return study;
}

}  // namespace evstudy
