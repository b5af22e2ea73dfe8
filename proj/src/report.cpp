#include "evstudy/report.hpp"

#include <chrono>
#include <fstream>
#include <map>
#include <memory>
#include <optional>
#include <ostream>
#include <sstream>
#include <thread>

#include <fmt/format.h>
#include <json.hpp>

#include "csv.hpp"

namespace evstudy {
namespace {

using json = nlohmann::ordered_json;

constexpr const char* kCsvHeader =
    "company,car,car_percentile,impact,event_period,instrument_id,announcement_date,event_day,additive_car,"
    "draws_k,n_scenarios,mode,seed,window_seed,estimation_T,generator,ln_alpha_hat,alpha_hat,beta_hat,flags";

std::string csv_field(std::string_view s) {
    if (s.find_first_of(",\"\n") == std::string_view::npos) return std::string(s);
    std::string out = "\"";
    for (const char c : s) {
        if (c == '"') out.push_back('"');
        out.push_back(c);
    }
    out.push_back('"');
    return out;
}

std::string format_param(double v) { return fmt::format("{:.12g}", v); }

void write_text_file(const std::filesystem::path& path, const std::string& text) {
    if (path.has_parent_path()) {
        std::error_code ec;
        std::filesystem::create_directories(path.parent_path(), ec);
    }
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error(fmt::format("cannot write '{}'", path.string()));
    out << text;
    if (!out) throw std::runtime_error(fmt::format("error writing '{}'", path.string()));
}

std::filesystem::path with_suffix(const std::filesystem::path& p, std::string_view suffix) {
    return std::filesystem::path(p.string() + std::string(suffix));
}

std::string company_name(const EventRecord& ev) { return ev.label.empty() ? ev.instrument_id : ev.label; }

}  // namespace

std::vector<ReportRow> report_rows(const EventStudy& study) {
    std::vector<ReportRow> rows;
    rows.reserve(study.results.size());
    for (const auto& r : study.results) {
        ReportRow row;
        row.company = company_name(study.event);
        row.window = r.window.label();
        row.car = r.car_actual;
        row.percentile = r.percentile;
        row.impact = r.impact;
        row.instrument_id = study.event.instrument_id;
        row.announcement_date = format_iso_date(study.event.announcement_date);
        row.event_day = format_iso_date(study.event_day);
        row.additive_car = r.baseline_car_additive;
        row.draws_k = r.window.draws_k();
        row.n_scenarios = r.provenance.n_scenarios;
        row.mode = r.provenance.mode;
        row.seed = r.provenance.seed;
        row.window_seed = r.provenance.window_seed;
        row.estimation_days = r.provenance.estimation_days;
        row.generator = std::string(r.provenance.generator);
        row.ln_alpha_hat = study.fit.ln_alpha_hat;
        row.alpha_hat = study.fit.alpha_hat;
        row.beta_hat = study.fit.beta_hat;
        std::vector<std::string> flags;
        if (row.estimation_days != kStandardEstimationDays) flags.push_back("nonstandard_T");
        if (!is_standard_draw_count(row.draws_k)) flags.push_back("nonstandard_k");
        for (std::size_t i = 0; i < flags.size(); ++i) row.flags += (i ? ";" : "") + flags[i];
        rows.push_back(std::move(row));
    }
    return rows;
}

std::string format_car(double car) { return fmt::format("{:.9f}", car); }

std::string format_percentile(double pct, double car, const DecisionThresholds& thresholds) {
    auto text = fmt::format("{:.5f}", pct);
    const auto exact = classify_impact(car, pct, thresholds.lo, thresholds.hi);
    const auto printed = classify_impact(std::stod(format_car(car)), std::stod(text), thresholds.lo, thresholds.hi);
    if (printed != exact) text = fmt::format("{:.17g}", pct);
    return text;
}

void write_report_csv(std::ostream& out, std::span<const ReportRow> rows, const DecisionThresholds& thresholds) {
    out << kCsvHeader << '\n';
    for (const auto& r : rows) {
        out << fmt::format("{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{}\n", csv_field(r.company),
                           format_car(r.car), format_percentile(r.percentile, r.car, thresholds),
                           to_string(r.impact), csv_field(r.window), csv_field(r.instrument_id),
                           r.announcement_date, r.event_day, format_car(r.additive_car), r.draws_k,
                           r.n_scenarios, to_string(r.mode), r.seed, r.window_seed, r.estimation_days,
                           r.generator, format_param(r.ln_alpha_hat), format_param(r.alpha_hat),
                           format_param(r.beta_hat), r.flags);
    }
}

void write_report_json(std::ostream& out, std::span<const ReportRow> rows, std::span<const std::string> errors,
                       const DecisionThresholds& thresholds) {
    json doc;
    doc["rows"] = json::array();
    for (const auto& r : rows) {
        json j;
        j["company"] = r.company;
        j["car"] = format_car(r.car);
        j["car_percentile"] = format_percentile(r.percentile, r.car, thresholds);
        j["impact"] = to_string(r.impact);
        j["event_period"] = r.window;
        j["instrument_id"] = r.instrument_id;
        j["announcement_date"] = r.announcement_date;
        j["event_day"] = r.event_day;
        j["additive_car"] = format_car(r.additive_car);
        j["draws_k"] = r.draws_k;
        j["n_scenarios"] = r.n_scenarios;
        j["mode"] = to_string(r.mode);
        j["seed"] = r.seed;
        j["window_seed"] = r.window_seed;
        j["estimation_T"] = r.estimation_days;
        j["generator"] = r.generator;
        j["ln_alpha_hat"] = r.ln_alpha_hat;
        j["alpha_hat"] = r.alpha_hat;
        j["beta_hat"] = r.beta_hat;
        j["flags"] = r.flags;
        doc["rows"].push_back(std::move(j));
    }
    doc["errors"] = json(std::vector<std::string>(errors.begin(), errors.end()));
    out << doc.dump(2) << '\n';
}

RunOutcome run(const RunConfig& config, std::ostream& log) {
    config.validate();
    const auto started = std::chrono::steady_clock::now();

    std::vector<EventRecord> events;
    try {
        events = load_event_registry(config.events_file);
    } catch (const DataError& e) {
        throw ConfigError(e.what());
    }
    std::optional<PriceSeries> market;
    try {
        market.emplace(load_price_series(config.market_file, config.price_format));
    } catch (const DataError& e) {
        throw ConfigError(fmt::format("market series: {}", e.what()));
    }

    RunOutcome outcome;
    if (events.empty()) log << "warning: events file '" << config.events_file.string() << "' has no events\n";

    const auto study = config.study_config();
    std::map<std::string, std::shared_ptr<const PriceSeries>> cache;
    std::map<std::string, std::string> load_errors;
    std::vector<ReportRow> rows;

    for (const auto& ev : events) {
        const auto id = event_id(ev);
        try {
            if (auto err = load_errors.find(ev.instrument_id); err != load_errors.end())
                throw DataError(err->second);
            auto it = cache.find(ev.instrument_id);
            if (it == cache.end()) {
                const auto file = config.price_dir / (ev.instrument_id + ".csv");
                try {
                    it = cache.emplace(ev.instrument_id, std::make_shared<const PriceSeries>(load_price_series(
                                                             file, config.price_format, ev.instrument_id)))
                             .first;
                } catch (const DataError& e) {
                    load_errors.emplace(ev.instrument_id, e.what());
                    throw;
                }
            }
            const auto result = run_event_study(ev, *it->second, *market, study);
            auto event_rows = report_rows(result);
            rows.insert(rows.end(), event_rows.begin(), event_rows.end());
            outcome.scenarios += config.n_scenarios * result.results.size();
        } catch (const std::exception& e) {
            outcome.errors.push_back(fmt::format("{}: {}", id, e.what()));
            log << "error: " << outcome.errors.back() << '\n';
        }
    }

    std::ostringstream report;
    if (config.format == ReportFormat::csv)
        write_report_csv(report, rows, config.thresholds);
    else
        write_report_json(report, rows, outcome.errors, config.thresholds);

    outcome.rows = rows.size();
    outcome.exit_code = outcome.errors.empty() ? kExitSuccess : kExitPartial;
    outcome.report_path = outcome.errors.empty() ? config.output : with_suffix(config.output, ".partial");
    write_text_file(outcome.report_path, report.str());

    outcome.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
    const double throughput = outcome.seconds > 0 ? static_cast<double>(outcome.scenarios) / outcome.seconds : 0.0;
    json timing;
    timing["report"] = outcome.report_path.filename().string();
    timing["wall_seconds"] = outcome.seconds;
    timing["scenarios"] = outcome.scenarios;
    timing["scenarios_per_second"] = throughput;
    timing["kernel"] = kernels::isa_name(config.isa.value_or(kernels::best_isa()));
    timing["workers"] = config.workers != 0 ? config.workers : std::max(1u, std::thread::hardware_concurrency());
    timing["events"] = events.size();
    timing["failed_events"] = outcome.errors.size();
    write_text_file(with_suffix(outcome.report_path, ".run.json"), timing.dump(2) + "\n");

    log << fmt::format("{} rows written to {} ({:.2f} s, {:.3g} scenarios/s)\n", outcome.rows,
                       outcome.report_path.string(), outcome.seconds, throughput);
    return outcome;
}

void write_histogram_csv(std::ostream& out, const ScenarioDistribution& dist) {
    if (dist.n() == 0) throw std::invalid_argument("histogram of an empty distribution");
    if (!dist.histogram()) throw std::invalid_argument("distribution was generated without a histogram");
    const auto& h = *dist.histogram();
    out << "bin_low,bin_high,count\n";
    for (std::size_t i = 0; i < h.bins(); ++i)
        out << fmt::format("{:.12g},{:.12g},{}\n", h.bin_low(i), h.bin_high(i), h.counts[i]);
}

void emit_histogram(const ScenarioDistribution& dist, const std::filesystem::path& path) {
    std::ostringstream ss;
    write_histogram_csv(ss, dist);
    write_text_file(path, ss.str());
}

const EventRecord& find_event(const std::vector<EventRecord>& events, std::string_view selector) {
    for (const auto& ev : events)
        if (event_id(ev) == selector) return ev;
    if (!selector.empty() && selector.find_first_not_of("0123456789") == std::string_view::npos) {
        const auto row = std::stoull(std::string(selector));
        if (row >= 1 && row <= events.size()) return events[row - 1];
    }
    const EventRecord* match = nullptr;
    for (const auto& ev : events) {
        if (ev.instrument_id != selector) continue;
        if (match) throw ConfigError(fmt::format("event '{}' is ambiguous; use <instrument_id>@<date>", selector));
        match = &ev;
    }
    if (!match) throw ConfigError(fmt::format("no event matches '{}'", selector));
    return *match;
}

EventResult run_histogram(const RunConfig& config, std::string_view event_selector, EventWindow window,
                          std::uint32_t bins, const std::filesystem::path& out) {
    if (bins == 0) throw ConfigError("histogram needs at least one bin");
    std::vector<EventRecord> events;
    try {
        events = load_event_registry(config.events_file);
    } catch (const DataError& e) {
        throw ConfigError(e.what());
    }
    const auto& ev = find_event(events, event_selector);
    const auto market = load_price_series(config.market_file, config.price_format);
    const auto stock =
        load_price_series(config.price_dir / (ev.instrument_id + ".csv"), config.price_format, ev.instrument_id);
    auto study = config.study_config();
    study.histogram_bins = bins;
    auto result = run_event_study(ev, stock, market, study);
    for (auto& r : result.results) {
        if (r.window == window) {
            emit_histogram(r.distribution, out);
            return std::move(r);
        }
    }
    throw ConfigError(fmt::format("window {} not produced", window.label()));
}

std::vector<PublishedRow> load_published_rows(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError(fmt::format("cannot open '{}'", path.string()));
    std::ostringstream ss;
    ss << in.rdbuf();
    const auto text = ss.str();
    const auto source = path.string();
    const auto table = detail::read_csv(text, source);
    const auto c_company = detail::column_index(table, "company", source);
    const auto c_car = detail::column_index(table, "car", source);
    const auto c_pct = detail::column_index(table, "percentile", source);
    const auto c_impact = detail::column_index(table, "impact", source);
    const auto c_window = detail::column_index(table, "window", source);

    std::vector<PublishedRow> rows;
    for (const auto& row : table.rows) {
        if (row.fields.size() < table.header.size())
            throw DataError(fmt::format("{}: row {}: missing fields", source, row.line_number));
        const auto car = detail::parse_double(row.fields[c_car]);
        const auto pct = detail::parse_double(row.fields[c_pct]);
        if (!car || !pct) throw DataError(fmt::format("{}: row {}: unparsable number", source, row.line_number));
        PublishedRow r;
        r.company = row.fields[c_company];
        r.window = row.fields[c_window];
        r.car = *car;
        r.percentile = *pct;
        try {
            r.impact = parse_impact(row.fields[c_impact]);
        } catch (const std::invalid_argument& e) {
            throw DataError(fmt::format("{}: row {}: {}", source, row.line_number, e.what()));
        }
        rows.push_back(std::move(r));
    }
    return rows;
}

GoldenCheck verify_published_rows(std::span<const PublishedRow> rows, const DecisionThresholds& thresholds) {
    GoldenCheck check;
    for (const auto& r : rows) {
        ++check.rows;
        const auto got = classify_impact(r.car, r.percentile, thresholds.lo, thresholds.hi);
        if (got != r.impact)
            check.mismatches.push_back(fmt::format("{} {}: CAR {} pct {} expected {} got {}", r.company, r.window,
                                                   r.car, r.percentile, to_string(r.impact), to_string(got)));
    }
    return check;
}

}  // namespace evstudy
