// model.hpp
// Multiplicative market model (1 + r_i) = alpha * (1 + r_m)^beta, fitted by
// closed-form OLS on the log-linearised form, plus the one-factor additive
// model used as a comparison baseline.

#pragma once

#include <cstddef>
#include <vector>

#include "evstudy/ingest.hpp"

namespace evstudy {

inline constexpr std::size_t kStandardEstimationDays = 200;

// Contiguous estimation-period returns, trading-day offsets
// [-(T+1), -2] relative to the event index.
struct EstimationWindow {
    std::vector<double> stock_returns;
    std::vector<double> market_returns;
    std::size_t first_index = 0;

    std::size_t length() const noexcept { return stock_returns.size(); }
};

EstimationWindow estimation_window(const AlignedReturns& aligned, std::size_t event_index,
                                   std::size_t days = kStandardEstimationDays);

struct ModelFit {
    double ln_alpha_hat = 0.0;  // OLS intercept in log space
    double beta_hat = 1.0;      // OLS slope
    double alpha_hat = 1.0;     // ratio-of-sums estimator, not exp(ln_alpha_hat)
    double beta_std_error = 0.0;
    std::vector<double> residual_ars;  // estimation-period abnormal returns (bootstrap pool)
};

// Throws DataError("degenerate regressor") when the market log-returns have
// no variance and DataError("invalid return") when some 1 + r <= 0.
ModelFit fit_market_model(const EstimationWindow& window);

// AR = (1 + r_i) / (alpha_hat * (1 + r_m)^beta_hat) - 1
double abnormal_return(double stock_return, double market_return, const ModelFit& fit);

// r_i = alpha + beta * r_m + e, plain returns.
struct AdditiveFit {
    double alpha_hat = 0.0;
    double beta_hat = 1.0;
};

AdditiveFit fit_additive_model(const EstimationWindow& window);
double additive_abnormal_return(double stock_return, double market_return, const AdditiveFit& fit);

}  // namespace evstudy
