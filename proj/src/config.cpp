#include "evstudy/config.hpp"

#include <charconv>
#include <fstream>
#include <sstream>
#include <string>

#include <fmt/format.h>

namespace evstudy {
namespace {

std::string_view trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

template <typename T>
T parse_number(std::string_view key, std::string_view value) {
    T out{};
    const auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), out);
    if (ec != std::errc{} || ptr != value.data() + value.size() || value.empty())
        throw ConfigError(fmt::format("{}: invalid number '{}'", key, value));
    return out;
}

std::filesystem::path resolve(std::string_view value, const std::filesystem::path& base_dir) {
    std::filesystem::path p{std::string(value)};
    if (p.is_relative() && !base_dir.empty()) p = base_dir / p;
    return p.lexically_normal();
}

}  // namespace

std::string_view to_string(ReportFormat format) noexcept { return format == ReportFormat::csv ? "csv" : "json"; }

void RunConfig::validate() const {
    if (price_dir.empty()) throw ConfigError("price_dir is not set");
    if (market_file.empty()) throw ConfigError("market_file is not set");
    if (events_file.empty()) throw ConfigError("events_file is not set");
    if (output.empty()) throw ConfigError("output is not set");
    if (!(0.0 < thresholds.lo && thresholds.lo < thresholds.hi && thresholds.hi < 100.0))
        throw ConfigError(fmt::format("thresholds must satisfy 0 < lo < hi < 100 (got {}, {})", thresholds.lo,
                                      thresholds.hi));
    if (n_scenarios < 1) throw ConfigError("n_scenarios must be >= 1");
    if (estimation_days < 3) throw ConfigError("estimation_T must be >= 3");
    if (isa && !kernels::isa_available(*isa))
        throw ConfigError(fmt::format("kernel '{}' is not available on this machine", kernels::isa_name(*isa)));
}

StudyConfig RunConfig::study_config() const {
    StudyConfig sc;
    sc.n_scenarios = n_scenarios;
    sc.seed = seed;
    sc.mode = mode;
    sc.thresholds = thresholds;
    sc.estimation_days = estimation_days;
    sc.execution.workers = workers;
    sc.execution.isa = isa;
    return sc;
}

void apply_setting(RunConfig& config, std::string_view key, std::string_view value,
                   const std::filesystem::path& base_dir) {
    value = trim(value);
    try {
        if (key == "price_dir") {
            config.price_dir = resolve(value, base_dir);
        } else if (key == "market_file") {
            config.market_file = resolve(value, base_dir);
        } else if (key == "events_file") {
            config.events_file = resolve(value, base_dir);
        } else if (key == "output" || key == "out") {
            config.output = resolve(value, base_dir);
        } else if (key == "n_scenarios" || key == "scenarios") {
            config.n_scenarios = parse_number<std::uint64_t>(key, value);
        } else if (key == "seed") {
            config.seed = parse_number<std::uint64_t>(key, value);
        } else if (key == "mode") {
            config.mode = parse_draw_mode(value);
        } else if (key == "lo") {
            config.thresholds.lo = parse_number<double>(key, value);
        } else if (key == "hi") {
            config.thresholds.hi = parse_number<double>(key, value);
        } else if (key == "thresholds") {
            const auto comma = value.find(',');
            if (comma == std::string_view::npos) throw ConfigError("thresholds: expected 'lo,hi'");
            config.thresholds.lo = parse_number<double>(key, trim(value.substr(0, comma)));
            config.thresholds.hi = parse_number<double>(key, trim(value.substr(comma + 1)));
        } else if (key == "estimation_T" || key == "estimation_days") {
            config.estimation_days = parse_number<std::size_t>(key, value);
        } else if (key == "format") {
            if (value == "csv")
                config.format = ReportFormat::csv;
            else if (value == "json")
                config.format = ReportFormat::json;
            else
                throw ConfigError(fmt::format("format: expected csv or json, got '{}'", value));
        } else if (key == "date_column") {
            config.price_format.date_column = std::string(value);
        } else if (key == "price_column") {
            config.price_format.price_column = std::string(value);
        } else if (key == "workers") {
            config.workers = parse_number<unsigned>(key, value);
        } else if (key == "kernel") {
            if (value == "auto")
                config.isa.reset();
            else
                config.isa = kernels::parse_isa(value);
        } else {
            throw ConfigError(fmt::format("unknown setting '{}'", key));
        }
    } catch (const std::invalid_argument& e) {
        throw ConfigError(fmt::format("{}: {}", key, e.what()));
    }
}

RunConfig parse_run_config(std::string_view text, const std::filesystem::path& base_dir,
                           std::string_view source_name) {
    RunConfig config;
    std::size_t line_number = 0;
    std::size_t pos = 0;
    while (pos < text.size()) {
        auto end = text.find('\n', pos);
        if (end == std::string_view::npos) end = text.size();
        const auto line = trim(text.substr(pos, end - pos));
        pos = end + 1;
        ++line_number;
        if (line.empty() || line.front() == '#') continue;
        const auto eq = line.find('=');
        if (eq == std::string_view::npos)
            throw ConfigError(fmt::format("{}:{}: expected key=value", source_name, line_number));
        try {
            apply_setting(config, trim(line.substr(0, eq)), line.substr(eq + 1), base_dir);
        } catch (const ConfigError& e) {
            throw ConfigError(fmt::format("{}:{}: {}", source_name, line_number, e.what()));
        }
    }
    return config;
}

RunConfig load_run_config(const std::filesystem::path& file) {
    std::ifstream in(file, std::ios::binary);
    if (!in) throw ConfigError(fmt::format("cannot open config file '{}'", file.string()));
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_run_config(ss.str(), file.parent_path(), file.string());
}

}  // namespace evstudy
