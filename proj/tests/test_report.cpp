#include <catch_amalgamated.hpp>

#include <algorithm>
#include <fstream>
#include <sstream>

#include <json.hpp>
#include <unistd.h>

#include "evstudy/report.hpp"
#include "support/synthetic.hpp"

using namespace evstudy;
using evstudy::testing::make_synthetic;
using evstudy::testing::SyntheticSpec;
using evstudy::testing::write_price_csv;
using Catch::Matchers::ContainsSubstring;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void spit(const fs::path& p, std::string_view text) {
    std::ofstream out(p, std::ios::binary);
    out << text;
}

struct Workspace {
    fs::path root;

    explicit Workspace(std::string_view name) {
        root = fs::temp_directory_path() / fmt::format("evstudy_{}_{}", name, ::getpid());
        fs::remove_all(root);
        fs::create_directories(root / "prices");
    }
    ~Workspace() {
        std::error_code ec;
        fs::remove_all(root, ec);
    }

    // Writes the market file, one synthetic stock per id and an events file.
    void populate(std::initializer_list<std::string> ids, std::initializer_list<std::string> missing = {}) {
        std::string events = "instrument_id,date,label\n";
        int i = 0;
        for (const auto& id : ids) {
            // same seed keeps one market path; stocks differ in alpha and beta
            SyntheticSpec spec;
            spec.instrument_id = id;
            spec.beta = 0.8 + 0.3 * i;
            spec.alpha = 1.0 + 0.0002 * i++;
            const auto data = make_synthetic(spec);
            write_price_csv(root / "market.csv", data.market);
            write_price_csv(root / "prices" / (id + ".csv"), data.stock);
            events += fmt::format("{},{},Company {}\n", id, format_iso_date(data.event.announcement_date), id);
        }
        for (const auto& id : missing) events += id + ",2013-11-01,Missing\n";
        spit(root / "events.csv", events);
    }

    RunConfig config(std::uint64_t scenarios = 20'000) const {
        auto text = fmt::format(
            "# test run\nprice_dir = prices\nmarket_file = market.csv\nevents_file = events.csv\n"
            "output = out/report.csv\nn_scenarios = {}\n",
            scenarios);
        return parse_run_config(text, root);
    }
};

}  // namespace

TEST_CASE("config parsing", "[config]") {
    const auto c = parse_run_config(
        "price_dir = p\nmarket_file=/abs/m.csv\n\n# comment\nevents_file = e.csv\nout = r.csv\nseed = 9\n"
        "mode = block\nthresholds = 5, 95\nestimation_T = 120\nformat = json\nprice_column = adj_close\n"
        "workers = 3\nkernel = scalar\nscenarios = 1000\n",
        "/base");
    CHECK(c.price_dir == fs::path("/base/p"));
    CHECK(c.market_file == fs::path("/abs/m.csv"));
    CHECK(c.output == fs::path("/base/r.csv"));
    CHECK(c.seed == 9);
    CHECK(c.mode == DrawMode::block);
    CHECK(c.thresholds.lo == 5.0);
    CHECK(c.thresholds.hi == 95.0);
    CHECK(c.estimation_days == 120);
    CHECK(c.format == ReportFormat::json);
    CHECK(c.price_format.price_column == "adj_close");
    CHECK(c.workers == 3);
    CHECK(c.isa == kernels::Isa::scalar);
    CHECK(c.n_scenarios == 1000);
    CHECK_NOTHROW(c.validate());

    const auto defaults = parse_run_config("price_dir=p\nmarket_file=m\nevents_file=e\noutput=o\n", "");
    CHECK(defaults.n_scenarios == 5'000'000);
    CHECK(defaults.mode == DrawMode::iid);
    CHECK(defaults.thresholds.lo == 10.0);
    CHECK(defaults.thresholds.hi == 90.0);
    CHECK(defaults.estimation_days == 200);
}

TEST_CASE("config errors", "[config]") {
    CHECK_THROWS_AS(parse_run_config("colour = blue\n", ""), ConfigError);
    CHECK_THROWS_AS(parse_run_config("seed = x\n", ""), ConfigError);
    CHECK_THROWS_AS(parse_run_config("mode = bootstrap\n", ""), ConfigError);
    CHECK_THROWS_AS(parse_run_config("no equals sign\n", ""), ConfigError);
    CHECK_THROWS_WITH(parse_run_config("market_file=m\nevents_file=e\noutput=o\n", "").validate(),
                      ContainsSubstring("price_dir"));
    CHECK_THROWS_AS(parse_run_config("price_dir=p\nmarket_file=m\nevents_file=e\noutput=o\nlo=95\nhi=90\n", "").validate(),
                    ConfigError);
    CHECK_THROWS_AS(load_run_config("/nonexistent/run.cfg"), ConfigError);
}

TEST_CASE("run writes one row per window", "[report]") {
    Workspace ws("one");
    ws.populate({"AAA"});
    std::ostringstream log;
    const auto outcome = run(ws.config(), log);
    CHECK(outcome.exit_code == kExitSuccess);
    CHECK(outcome.rows == 5);
    CHECK(outcome.scenarios == 5 * 20'000);
    CHECK(outcome.report_path == ws.root / "out/report.csv");

    const auto text = slurp(outcome.report_path);
    std::istringstream lines(text);
    std::string header, line;
    std::getline(lines, header);
    CHECK(header.rfind("company,car,car_percentile,impact,event_period,", 0) == 0);
    int n = 0;
    while (std::getline(lines, line)) {
        CHECK(line.rfind("Company AAA,", 0) == 0);
        CHECK_THAT(line, ContainsSubstring(",philox4x32-10,"));
        ++n;
    }
    CHECK(n == 5);

    const auto timing = nlohmann::json::parse(slurp(ws.root / "out/report.csv.run.json"));
    CHECK(timing["scenarios"] == 100'000);
    CHECK(timing["scenarios_per_second"].get<double>() > 0);
}

TEST_CASE("report rows are self-consistent with the decision rule", "[report]") {
    Workspace ws("consistent");
    ws.populate({"AAA", "BBB", "CCC"});
    std::ostringstream log;
    const auto outcome = run(ws.config(), log);
    REQUIRE(outcome.exit_code == kExitSuccess);

    std::istringstream lines(slurp(outcome.report_path));
    std::string line;
    std::getline(lines, line);
    int rows = 0;
    while (std::getline(lines, line)) {
        std::vector<std::string> f;
        std::stringstream ss(line);
        for (std::string cell; std::getline(ss, cell, ',');) f.push_back(cell);
        REQUIRE(f.size() >= 4);
        CHECK(classify_impact(std::stod(f[1]), std::stod(f[2])) == parse_impact(f[3]));
        ++rows;
    }
    CHECK(rows == 15);
}

TEST_CASE("identical config gives a byte-identical report", "[report][determinism]") {
    Workspace ws("bytes");
    ws.populate({"AAA", "BBB"});
    std::ostringstream log;
    auto cfg = ws.config();
    run(cfg, log);
    const auto first = slurp(cfg.output);
    run(cfg, log);
    CHECK(slurp(cfg.output) == first);

    cfg.workers = 3;
    run(cfg, log);
    CHECK(slurp(cfg.output) == first);

    cfg.workers = 1;
    cfg.isa = kernels::Isa::scalar;
    run(cfg, log);
    CHECK(slurp(cfg.output) == first);

    cfg.seed = 2;
    run(cfg, log);
    CHECK(slurp(cfg.output) != first);
}

TEST_CASE("empty registry warns and succeeds", "[report]") {
    Workspace ws("empty");
    ws.populate({"AAA"});
    spit(ws.root / "events.csv", "instrument_id,date,label\n");
    std::ostringstream log;
    const auto outcome = run(ws.config(), log);
    CHECK(outcome.exit_code == kExitSuccess);
    CHECK(outcome.rows == 0);
    CHECK_THAT(log.str(), ContainsSubstring("warning"));
}

TEST_CASE("failed events produce a partial report", "[report]") {
    Workspace ws("partial");
    ws.populate({"AAA"}, {"ZZZ"});
    std::ostringstream log;
    const auto outcome = run(ws.config(), log);
    CHECK(outcome.exit_code == kExitPartial);
    CHECK(outcome.rows == 5);
    REQUIRE(outcome.errors.size() == 1);
    CHECK_THAT(outcome.errors[0], ContainsSubstring("ZZZ@2013-11-01"));
    CHECK(outcome.report_path == ws.root / "out/report.csv.partial");
    CHECK(fs::exists(outcome.report_path));
    CHECK_FALSE(fs::exists(ws.root / "out/report.csv"));
    CHECK_THAT(log.str(), ContainsSubstring("error: ZZZ"));
}

TEST_CASE("missing market or events file is a configuration error", "[report]") {
    Workspace ws("config");
    ws.populate({"AAA"});
    std::ostringstream log;
    auto cfg = ws.config();
    cfg.market_file = ws.root / "nope.csv";
    CHECK_THROWS_AS(run(cfg, log), ConfigError);
    cfg = ws.config();
    cfg.events_file = ws.root / "nope.csv";
    CHECK_THROWS_AS(run(cfg, log), ConfigError);
}

TEST_CASE("JSON report", "[report]") {
    Workspace ws("json");
    ws.populate({"AAA"}, {"ZZZ"});
    auto cfg = ws.config();
    cfg.format = ReportFormat::json;
    std::ostringstream log;
    const auto outcome = run(cfg, log);
    const auto doc = nlohmann::json::parse(slurp(outcome.report_path));
    CHECK(doc["rows"].size() == 5);
    CHECK(doc["errors"].size() == 1);
    CHECK(doc["rows"][0]["event_period"] == "[-1,0]");
    CHECK(doc["rows"][4]["draws_k"] == 12);
}

TEST_CASE("percentile formatting keeps the printed row consistent", "[report]") {
    const DecisionThresholds th{};
    CHECK(format_percentile(2.95846, -0.05, th) == "2.95846");
    CHECK(format_percentile(0.0002, -0.05, th) == "0.00020");
    const double just_below = std::nextafter(10.0, 0.0);
    const auto text = format_percentile(just_below, -0.05, th);
    CHECK(std::stod(text) < 10.0);
    CHECK(format_car(-0.0539612914) == "-0.053961291");
}

TEST_CASE("histogram export", "[report][histogram]") {
    SECTION("constant distribution collapses to one bin") {
        const std::vector<double> pool(50, 0.01);
        ScenarioSpec spec;
        spec.n_scenarios = 1000;
        spec.histogram_bins = 20;
        const auto dist = generate_distribution(pool, spec);
        std::ostringstream out;
        write_histogram_csv(out, dist);
        const auto text = out.str();
        CHECK(text.rfind("bin_low,bin_high,count\n", 0) == 0);
        CHECK(std::count(text.begin(), text.end(), '\n') == 2);
        CHECK_THAT(text, ContainsSubstring(",1000\n"));
    }
    SECTION("two-point pool clusters at three values") {
        const std::vector<double> pool = {0.1, -0.1};
        ScenarioSpec spec;
        spec.n_scenarios = 100'000;
        spec.histogram_bins = 40;
        const auto dist = generate_distribution(pool, spec);
        REQUIRE(dist.histogram());
        const auto& h = *dist.histogram();
        std::uint64_t total = 0;
        int occupied = 0;
        for (const auto c : h.counts) {
            total += c;
            occupied += c > 0;
        }
        CHECK(total == 100'000);
        CHECK(occupied == 3);
        CHECK(h.counts.front() > 0);
        CHECK(h.counts.back() > 0);
    }
    SECTION("run_histogram writes the requested window") {
        Workspace ws("hist");
        ws.populate({"AAA", "BBB"});
        const auto out = ws.root / "h.csv";
        const auto result = run_histogram(ws.config(10'000), "BBB", EventWindow{-1, 3}, 25, out);
        CHECK(result.window == EventWindow{-1, 3});
        std::istringstream lines(slurp(out));
        std::string line;
        std::getline(lines, line);
        std::uint64_t total = 0;
        int bins = 0;
        while (std::getline(lines, line)) {
            total += std::stoull(line.substr(line.rfind(',') + 1));
            ++bins;
        }
        CHECK(bins == 25);
        CHECK(total == 10'000);
        CHECK_THROWS_AS(run_histogram(ws.config(), "QQQ", EventWindow{-1, 0}, 10, out), ConfigError);
        CHECK(event_id(find_event(load_event_registry(ws.root / "events.csv"), "2")).rfind("BBB@", 0) == 0);
    }
}
