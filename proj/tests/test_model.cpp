#include <catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "evstudy/model.hpp"

using namespace evstudy;
using Catch::Matchers::ContainsSubstring;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

EstimationWindow window_of(std::vector<double> stock, std::vector<double> market) {
    EstimationWindow w;
    w.stock_returns = std::move(stock);
    w.market_returns = std::move(market);
    return w;
}

// Market returns with log-normal-ish spread and the stock forward-generated
// from (1 + r_i) = alpha (1 + r_m)^beta * exp(noise).
EstimationWindow generated(double alpha, double beta, std::size_t T, double noise_sigma, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> market(0.0004, 0.012);
    std::normal_distribution<double> noise(0.0, noise_sigma > 0 ? noise_sigma : 1.0);
    std::vector<double> rs(T), rm(T);
    for (std::size_t t = 0; t < T; ++t) {
        rm[t] = std::exp(market(rng)) - 1.0;
        const double e = noise_sigma > 0 ? noise(rng) : 0.0;
        rs[t] = alpha * std::pow(1.0 + rm[t], beta) * std::exp(e) - 1.0;
    }
    return window_of(rs, rm);
}

}  // namespace

TEST_CASE("identical stock and market returns give the identity fit", "[model]") {
    const std::vector<double> r = {0.01, -0.02, 0.005, 0.03, -0.011};
    const auto fit = fit_market_model(window_of(r, r));
    CHECK(fit.beta_hat == 1.0);
    CHECK(fit.ln_alpha_hat == 0.0);
    CHECK(fit.alpha_hat == 1.0);
    for (const double ar : fit.residual_ars) CHECK(ar == 0.0);
}

TEST_CASE("noiseless data is recovered", "[model]") {
    const auto w = generated(1.001, 1.3, 200, 0.0, 3);
    const auto fit = fit_market_model(w);
    CHECK_THAT(fit.beta_hat, WithinAbs(1.3, 1e-10));
    CHECK_THAT(fit.alpha_hat, WithinAbs(1.001, 1e-10));
    CHECK_THAT(fit.ln_alpha_hat, WithinAbs(std::log(1.001), 1e-10));
    CHECK(fit.residual_ars.size() == 200);
}

TEST_CASE("fit errors", "[model]") {
    CHECK_THROWS_WITH(fit_market_model(window_of({0.01, 0.02, 0.03}, {0.0, 0.0, 0.0})),
                      ContainsSubstring("degenerate regressor"));
    CHECK_THROWS_WITH(fit_market_model(window_of({0.01, -1.0, 0.03}, {0.01, 0.02, 0.0})),
                      ContainsSubstring("invalid return"));
    CHECK_THROWS_WITH(fit_market_model(window_of({0.01, 0.02, 0.03}, {0.01, -1.5, 0.0})),
                      ContainsSubstring("invalid return"));
    CHECK_THROWS_AS(fit_market_model(window_of({0.01, 0.02}, {0.01, 0.02})), DataError);
    CHECK_THROWS_WITH(fit_additive_model(window_of({0.01, 0.02, 0.03}, {0.1, 0.1, 0.1})),
                      ContainsSubstring("degenerate regressor"));
}

TEST_CASE("abnormal_return examples", "[model]") {
    ModelFit unit;
    unit.alpha_hat = 1.0;
    unit.beta_hat = 1.0;
    CHECK(abnormal_return(0.02, 0.02, unit) == 0.0);
    CHECK_THAT(abnormal_return(0.05, 0.0, unit), WithinAbs(0.05, 1e-15));

    ModelFit f;
    f.alpha_hat = 1.01;
    f.beta_hat = 2.0;
    // 1.03 / (1.01 * 1.01^2) - 1, evaluated at 40 digits
    CHECK_THAT(abnormal_return(0.03, 0.01, f), WithinAbs(-0.0002921476345262209781, 1e-15));
}

TEST_CASE("model invariants over random windows", "[model][property]") {
    for (std::uint64_t seed = 1; seed <= 40; ++seed) {
        std::mt19937_64 rng(seed);
        std::uniform_real_distribution<double> beta_dist(-0.5, 2.5);
        std::uniform_real_distribution<double> alpha_dist(0.995, 1.005);
        std::uniform_int_distribution<std::size_t> len(3, 250);
        const auto w = generated(alpha_dist(rng), beta_dist(rng), len(rng), 0.02, seed * 7919);
        const auto fit = fit_market_model(w);
        const auto T = w.length();

        // OLS normal equations.
        double sum_e = 0.0, sum_ex = 0.0;
        for (std::size_t t = 0; t < T; ++t) {
            const double x = std::log1p(w.market_returns[t]);
            const double e = std::log1p(w.stock_returns[t]) - fit.ln_alpha_hat - fit.beta_hat * x;
            sum_e += e;
            sum_ex += e * x;
        }
        CHECK(std::abs(sum_e) < 1e-10);
        CHECK(std::abs(sum_ex) < 1e-10);

        // Ratio-of-sums identity for alpha_hat.
        double lhs = 0.0, rhs = 0.0;
        for (std::size_t t = 0; t < T; ++t) {
            lhs += 1.0 + w.stock_returns[t];
            rhs += std::pow(1.0 + w.market_returns[t], fit.beta_hat);
        }
        CHECK_THAT(fit.alpha_hat * rhs, WithinRel(lhs, 1e-12));
        CHECK(fit.alpha_hat > 0.0);
        for (const double ar : fit.residual_ars) CHECK(ar > -1.0);

        // Scaling every (1 + r_i) by c scales alpha_hat by c, beta unchanged.
        const double c = 0.9 + 0.01 * static_cast<double>(seed);
        auto scaled = w;
        for (auto& r : scaled.stock_returns) r = c * (1.0 + r) - 1.0;
        const auto sf = fit_market_model(scaled);
        CHECK_THAT(sf.beta_hat, WithinAbs(fit.beta_hat, 1e-10));
        CHECK_THAT(sf.alpha_hat, WithinAbs(c * fit.alpha_hat, 1e-10));
    }
}

TEST_CASE("abnormal_return monotonicity", "[model][property]") {
    ModelFit f;
    f.alpha_hat = 1.0003;
    f.beta_hat = 1.4;
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> r(-0.3, 0.3);
    for (int i = 0; i < 1000; ++i) {
        const double a = r(rng), b = r(rng), m = r(rng);
        if (a == b) continue;
        const double lo = std::min(a, b), hi = std::max(a, b);
        CHECK(abnormal_return(lo, m, f) < abnormal_return(hi, m, f));
        CHECK(abnormal_return(m, lo, f) > abnormal_return(m, hi, f));
        CHECK(abnormal_return(lo, m, f) > -1.0);
    }
}

TEST_CASE("additive model fit and abnormal return", "[model]") {
    // r_i = 0.001 + 0.8 r_m exactly
    std::vector<double> rm = {0.01, -0.02, 0.015, 0.0, 0.03, -0.01};
    std::vector<double> rs;
    for (const double m : rm) rs.push_back(0.001 + 0.8 * m);
    const auto fit = fit_additive_model(window_of(rs, rm));
    CHECK_THAT(fit.alpha_hat, WithinAbs(0.001, 1e-15));
    CHECK_THAT(fit.beta_hat, WithinAbs(0.8, 1e-13));

    CHECK_THAT(additive_abnormal_return(0.05, 0.03, AdditiveFit{0.0, 1.0}), WithinAbs(0.02, 1e-16));
}

TEST_CASE("estimation_window slices offsets [-(T+1), -2]", "[model]") {
    AlignedReturns a;
    for (int i = 0; i < 300; ++i) {
        a.dates.push_back(Date{std::chrono::sys_days{std::chrono::days{i}}});
        a.stock_returns.push_back(i * 1e-4);
        a.market_returns.push_back(-i * 1e-4);
    }
    const auto w = estimation_window(a, 250);
    REQUIRE(w.length() == 200);
    CHECK(w.first_index == 49);
    CHECK(w.stock_returns.front() == a.stock_returns[49]);
    CHECK(w.stock_returns.back() == a.stock_returns[248]);
    CHECK_THROWS_AS(estimation_window(a, 200), DataError);
    CHECK(estimation_window(a, 201).first_index == 0);
    CHECK(estimation_window(a, 20, 10).length() == 10);
}
