#include "evstudy/model.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

namespace evstudy {
namespace {

struct LineFit {
    double intercept;
    double slope;
    double sxx;
};

// Simple-regression OLS: y = intercept + slope * x. Centred sums keep the
// normal equations tight even when x has a sizeable mean.
LineFit ordinary_least_squares(const std::vector<double>& x, const std::vector<double>& y) {
    const auto n = static_cast<double>(x.size());
    const auto [xmin, xmax] = std::minmax_element(x.begin(), x.end());
    if (*xmin == *xmax) throw DataError("degenerate regressor: market returns have zero variance");

    double xbar = 0.0, ybar = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        xbar += x[i];
        ybar += y[i];
    }
    xbar /= n;
    ybar /= n;
    double sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double dx = x[i] - xbar;
        sxx += dx * dx;
        sxy += dx * (y[i] - ybar);
    }
    if (!(sxx > 0.0)) throw DataError("degenerate regressor: market returns have zero variance");
    const double slope = sxy / sxx;
    return {ybar - slope * xbar, slope, sxx};
}

void require_length(const EstimationWindow& window) {
    if (window.stock_returns.size() != window.market_returns.size())
        throw DataError("estimation window: stock and market lengths differ");
    if (window.length() < 3)
        throw DataError(fmt::format("estimation window too short: {} days, need at least 3", window.length()));
}

}  // namespace

EstimationWindow estimation_window(const AlignedReturns& aligned, std::size_t event_index, std::size_t days) {
    if (event_index < days + 1)
        throw DataError(fmt::format("insufficient estimation history: event index {} < {}", event_index, days + 1));
    if (event_index >= aligned.size()) throw DataError("event index outside the aligned calendar");
    EstimationWindow w;
    w.first_index = event_index - days - 1;
    const auto first = aligned.stock_returns.begin() + static_cast<std::ptrdiff_t>(w.first_index);
    const auto mfirst = aligned.market_returns.begin() + static_cast<std::ptrdiff_t>(w.first_index);
    w.stock_returns.assign(first, first + static_cast<std::ptrdiff_t>(days));
    w.market_returns.assign(mfirst, mfirst + static_cast<std::ptrdiff_t>(days));
    return w;
}

ModelFit fit_market_model(const EstimationWindow& window) {
    require_length(window);
    const auto T = window.length();

    std::vector<double> log_stock(T), log_market(T);
    for (std::size_t t = 0; t < T; ++t) {
        const double gi = 1.0 + window.stock_returns[t];
        const double gm = 1.0 + window.market_returns[t];
        if (!(gi > 0.0) || !(gm > 0.0) || !std::isfinite(gi) || !std::isfinite(gm))
            throw DataError(fmt::format("invalid return at estimation day {}: 1 + r must be positive", t));
        log_stock[t] = std::log(gi);
        log_market[t] = std::log(gm);
    }

    const auto line = ordinary_least_squares(log_market, log_stock);

    ModelFit fit;
    fit.ln_alpha_hat = line.intercept;
    fit.beta_hat = line.slope;

    double stock_sum = 0.0, market_sum = 0.0;
    for (std::size_t t = 0; t < T; ++t) {
        stock_sum += 1.0 + window.stock_returns[t];
        market_sum += std::pow(1.0 + window.market_returns[t], fit.beta_hat);
    }
    fit.alpha_hat = stock_sum / market_sum;

    double rss = 0.0;
    for (std::size_t t = 0; t < T; ++t) {
        const double e = log_stock[t] - fit.ln_alpha_hat - fit.beta_hat * log_market[t];
        rss += e * e;
    }
    fit.beta_std_error = std::sqrt(rss / static_cast<double>(T - 2) / line.sxx);

    fit.residual_ars.resize(T);
    for (std::size_t t = 0; t < T; ++t)
        fit.residual_ars[t] = abnormal_return(window.stock_returns[t], window.market_returns[t], fit);
    return fit;
}

double abnormal_return(double stock_return, double market_return, const ModelFit& fit) {
    return (1.0 + stock_return) / (fit.alpha_hat * std::pow(1.0 + market_return, fit.beta_hat)) - 1.0;
}

AdditiveFit fit_additive_model(const EstimationWindow& window) {
    require_length(window);
    const auto line = ordinary_least_squares(window.market_returns, window.stock_returns);
    return {line.intercept, line.slope};
}

double additive_abnormal_return(double stock_return, double market_return, const AdditiveFit& fit) {
    return stock_return - (fit.alpha_hat + fit.beta_hat * market_return);
}

}  // namespace evstudy
