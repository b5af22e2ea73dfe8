// ingest.hpp
// Price series and event registry loading, calendar alignment and
// announcement-day resolution.

#pragma once

#include <chrono>
#include <cstddef>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace evstudy {

using Date = std::chrono::year_month_day;

// Raised for malformed or insufficient input data. Messages carry the
// offending row or the short reason ("insufficient overlap", ...).
class DataError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Strict ISO-8601 calendar date (YYYY-MM-DD). Throws DataError.
Date parse_iso_date(std::string_view text);
std::string format_iso_date(Date d);

struct PriceObservation {
    Date date;
    double price;
};

// Dated close prices for one instrument. Invariants (enforced by the
// constructor): dates strictly increasing, every price > 0, length >= 2.
class PriceSeries {
public:
    PriceSeries(std::string instrument_id, std::vector<PriceObservation> observations);

    const std::string& instrument_id() const noexcept { return instrument_id_; }
    const std::vector<PriceObservation>& observations() const noexcept { return observations_; }
    std::size_t size() const noexcept { return observations_.size(); }

private:
    std::string instrument_id_;
    std::vector<PriceObservation> observations_;
};

// Which header columns carry the date and the price. Matching is
// case-insensitive; other columns are ignored.
struct PriceCsvFormat {
    std::string date_column = "date";
    std::string price_column = "close";
};

PriceSeries load_price_series(const std::filesystem::path& source,
                              const PriceCsvFormat& format = {},
                              std::string instrument_id = {});

// Same contract as load_price_series, reading from an in-memory CSV text.
PriceSeries parse_price_csv(std::string_view text, const PriceCsvFormat& format,
                            std::string instrument_id, std::string_view source_name = "<memory>");

struct EventRecord {
    std::string instrument_id;
    Date announcement_date;
    std::string label;
};

// Registry CSV with columns instrument_id, date, label (any order).
std::vector<EventRecord> load_event_registry(const std::filesystem::path& source);
std::vector<EventRecord> parse_event_csv(std::string_view text, std::string_view source_name = "<memory>");

// Paired daily simple returns on the intersected trading calendar. Entry i
// is the return from dates[i-1] (implicit base) to dates[i].
struct AlignedReturns {
    std::vector<Date> dates;
    std::vector<double> stock_returns;
    std::vector<double> market_returns;
    // Prices on the first intersected date, kept so returns can be chained
    // back to price levels.
    double stock_base_price = 0.0;
    double market_base_price = 0.0;
    Date base_date{};

    std::size_t size() const noexcept { return dates.size(); }
};

AlignedReturns align(const PriceSeries& stock, const PriceSeries& market);

// Announcement day resolution. Non-trading dates roll forward to the next
// trading day. Requires estimation_days + 1 trading days strictly before
// the resolved index and min_days_after trading days after it.
struct ResolutionRequirements {
    std::size_t estimation_days = 200;
    std::size_t min_days_after = 10;
};

std::size_t resolve_event_day(const EventRecord& event, const std::vector<Date>& calendar,
                              const ResolutionRequirements& req = {});

}  // namespace evstudy
