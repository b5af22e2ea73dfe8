#include "evstudy/ingest.hpp"

#include "csv.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <optional>
#include <sstream>

#include <fmt/format.h>

namespace evstudy {
namespace {

using detail::column_index;
using detail::parse_double;
using detail::read_csv;


std::string read_file(const std::filesystem::path& source) {
    std::ifstream in(source, std::ios::binary);
    if (!in) throw DataError(fmt::format("cannot open '{}'", source.string()));
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace

Date parse_iso_date(std::string_view text) {
    const auto bad = [&] { return DataError(fmt::format("invalid date '{}' (expected YYYY-MM-DD)", text)); };
    if (text.size() != 10 || text[4] != '-' || text[7] != '-') throw bad();
    int y = 0;
    unsigned m = 0, d = 0;
    const auto parse_part = [&](std::string_view part, auto& out) {
        const auto [ptr, ec] = std::from_chars(part.data(), part.data() + part.size(), out);
        if (ec != std::errc{} || ptr != part.data() + part.size()) throw bad();
    };
    parse_part(text.substr(0, 4), y);
    parse_part(text.substr(5, 2), m);
    parse_part(text.substr(8, 2), d);
    const Date date{std::chrono::year{y}, std::chrono::month{m}, std::chrono::day{d}};
    if (!date.ok()) throw bad();
    return date;
}

std::string format_iso_date(Date d) {
    return fmt::format("{:04d}-{:02d}-{:02d}", static_cast<int>(d.year()),
                       static_cast<unsigned>(d.month()), static_cast<unsigned>(d.day()));
}

PriceSeries::PriceSeries(std::string instrument_id, std::vector<PriceObservation> observations)
    : instrument_id_(std::move(instrument_id)), observations_(std::move(observations)) {
    if (observations_.size() < 2)
        throw DataError(fmt::format("price series '{}' needs at least 2 observations, got {}",
                                    instrument_id_, observations_.size()));
    for (std::size_t i = 0; i < observations_.size(); ++i) {
        const auto& obs = observations_[i];
        if (!(obs.price > 0.0) || !std::isfinite(obs.price))
            throw DataError(fmt::format("price series '{}': non-positive price {} on {}", instrument_id_,
                                        obs.price, format_iso_date(obs.date)));
        if (i > 0 && !(observations_[i - 1].date < obs.date))
            throw DataError(fmt::format("price series '{}': dates not strictly increasing at {}",
                                        instrument_id_, format_iso_date(obs.date)));
    }
}

PriceSeries parse_price_csv(std::string_view text, const PriceCsvFormat& format, std::string instrument_id,
                            std::string_view source_name) {
    const auto table = read_csv(text, source_name);
    const auto date_col = column_index(table, format.date_column, source_name);
    const auto price_col = column_index(table, format.price_column, source_name);

    std::vector<PriceObservation> obs;
    std::vector<std::size_t> lines;
    obs.reserve(table.rows.size());
    for (const auto& row : table.rows) {
        const auto need = std::max(date_col, price_col) + 1;
        if (row.fields.size() < need)
            throw DataError(fmt::format("{}: row {}: expected at least {} fields, got {}", source_name,
                                        row.line_number, need, row.fields.size()));
        Date date;
        try {
            date = parse_iso_date(row.fields[date_col]);
        } catch (const DataError& e) {
            throw DataError(fmt::format("{}: row {}: {}", source_name, row.line_number, e.what()));
        }
        const auto price = parse_double(row.fields[price_col]);
        if (!price || !std::isfinite(*price))
            throw DataError(fmt::format("{}: row {}: unparsable price '{}'", source_name, row.line_number,
                                        row.fields[price_col]));
        if (!(*price > 0.0))
            throw DataError(fmt::format("{}: row {}: non-positive price {}", source_name, row.line_number,
                                        row.fields[price_col]));
        obs.push_back({date, *price});
        lines.push_back(row.line_number);
    }

    std::vector<std::size_t> order(obs.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return obs[a].date < obs[b].date; });
    std::vector<PriceObservation> sorted;
    sorted.reserve(obs.size());
    for (std::size_t i = 0; i < order.size(); ++i) {
        if (i > 0 && obs[order[i]].date == obs[order[i - 1]].date)
            throw DataError(fmt::format("{}: row {}: duplicate date {}", source_name, lines[order[i]],
                                        format_iso_date(obs[order[i]].date)));
        sorted.push_back(obs[order[i]]);
    }
    if (instrument_id.empty()) instrument_id = std::string(source_name);
    return PriceSeries(std::move(instrument_id), std::move(sorted));
}

PriceSeries load_price_series(const std::filesystem::path& source, const PriceCsvFormat& format,
                              std::string instrument_id) {
    if (instrument_id.empty()) instrument_id = source.stem().string();
    return parse_price_csv(read_file(source), format, std::move(instrument_id), source.string());
}

std::vector<EventRecord> parse_event_csv(std::string_view text, std::string_view source_name) {
    const auto table = read_csv(text, source_name);
    const auto id_col = column_index(table, "instrument_id", source_name);
    const auto date_col = column_index(table, "date", source_name);
    const auto label_col = column_index(table, "label", source_name);

    std::vector<EventRecord> events;
    events.reserve(table.rows.size());
    for (const auto& row : table.rows) {
        const auto need = std::max({id_col, date_col, label_col}) + 1;
        if (row.fields.size() < need)
            throw DataError(fmt::format("{}: row {}: expected at least {} fields, got {}", source_name,
                                        row.line_number, need, row.fields.size()));
        if (row.fields[id_col].empty())
            throw DataError(fmt::format("{}: row {}: empty instrument_id", source_name, row.line_number));
        EventRecord ev;
        ev.instrument_id = row.fields[id_col];
        try {
            ev.announcement_date = parse_iso_date(row.fields[date_col]);
        } catch (const DataError& e) {
            throw DataError(fmt::format("{}: row {}: {}", source_name, row.line_number, e.what()));
        }
        ev.label = row.fields[label_col];
        events.push_back(std::move(ev));
    }
    return events;
}

std::vector<EventRecord> load_event_registry(const std::filesystem::path& source) {
    return parse_event_csv(read_file(source), source.string());
}

AlignedReturns align(const PriceSeries& stock, const PriceSeries& market) {
    const auto& s = stock.observations();
    const auto& m = market.observations();

    std::vector<Date> dates;
    std::vector<double> sp, mp;
    std::size_t i = 0, j = 0;
    while (i < s.size() && j < m.size()) {
        if (s[i].date < m[j].date) {
            ++i;
        } else if (m[j].date < s[i].date) {
            ++j;
        } else {
            dates.push_back(s[i].date);
            sp.push_back(s[i].price);
            mp.push_back(m[j].price);
            ++i;
            ++j;
        }
    }
    if (dates.size() < 2)
        throw DataError(fmt::format("insufficient overlap between '{}' and '{}' ({} common dates)",
                                    stock.instrument_id(), market.instrument_id(), dates.size()));

    AlignedReturns out;
    out.base_date = dates.front();
    out.stock_base_price = sp.front();
    out.market_base_price = mp.front();
    const auto n = dates.size() - 1;
    out.dates.assign(dates.begin() + 1, dates.end());
    out.stock_returns.resize(n);
    out.market_returns.resize(n);
    for (std::size_t k = 0; k < n; ++k) {
        out.stock_returns[k] = (sp[k + 1] - sp[k]) / sp[k];
        out.market_returns[k] = (mp[k + 1] - mp[k]) / mp[k];
    }
    return out;
}

std::size_t resolve_event_day(const EventRecord& event, const std::vector<Date>& calendar,
                              const ResolutionRequirements& req) {
    if (calendar.empty()) throw DataError("empty trading calendar");
    const auto it = std::lower_bound(calendar.begin(), calendar.end(), event.announcement_date);
    if (it == calendar.end())
        throw DataError(fmt::format("announcement {} is after the last trading day {}",
                                    format_iso_date(event.announcement_date), format_iso_date(calendar.back())));
    const auto index = static_cast<std::size_t>(it - calendar.begin());
    if (index < req.estimation_days + 1)
        throw DataError(fmt::format("insufficient estimation history: {} trading days before {}, need {}", index,
                                    format_iso_date(*it), req.estimation_days + 1));
    const auto after = calendar.size() - 1 - index;
    if (after < req.min_days_after)
        throw DataError(fmt::format("insufficient event history: {} trading days after {}, need {}", after,
                                    format_iso_date(*it), req.min_days_after));
    return index;
}

}  // namespace evstudy
