#include "garchqr/series.hpp"

#include <cmath>

#include "garchqr/errors.hpp"

namespace garchqr {

double signed_square(double x) {
    if (x > 0.0) return x * x;
    if (x < 0.0) return -(x * x);
    return 0.0;
}

double signed_sqrt(double x) {
    if (x > 0.0) return std::sqrt(x);
    if (x < 0.0) return -std::sqrt(-x);
    return 0.0;
}

ReturnSeries ReturnSeries::from_returns(std::vector<double> values) {
    if (values.empty()) throw IngestionError("return series must not be empty");
    for (std::size_t t = 0; t < values.size(); ++t) {
        if (!std::isfinite(values[t]))
            throw IngestionError("non-finite return at row " + std::to_string(t + 1));
    }
    return ReturnSeries(std::move(values));
}

std::vector<double> ReturnSeries::transformed() const {
    std::vector<double> y(values_.size());
    for (std::size_t t = 0; t < values_.size(); ++t) y[t] = signed_square(values_[t]);
    return y;
}

double ReturnSeries::mean_square() const {
    double s = 0.0;
    for (double x : values_) s += x * x;
    return s / static_cast<double>(values_.size());
}

ReturnSeries ReturnSeries::prefix(std::size_t count) const {
    if (count == 0 || count > values_.size())
        throw IngestionError("prefix length out of range");
    return ReturnSeries(std::vector<double>(values_.begin(), values_.begin() + count));
}

ReturnSeries log_returns(const PricesInput& input) {
    const std::size_t n = input.prices.size();
    if (n < 2) throw IngestionError("need at least two prices to form returns");
    if (!input.timestamps.empty() && input.timestamps.size() != n)
        throw IngestionError("timestamp column length does not match prices");
    for (std::size_t i = 0; i < n; ++i) {
        if (!(input.prices[i] > 0.0) || !std::isfinite(input.prices[i]))
            throw IngestionError("non-positive price at row " + std::to_string(i + 1) +
                                 (input.timestamps.empty() ? "" : " (" + input.timestamps[i] + ")"));
        if (i > 0 && !input.timestamps.empty() && !(input.timestamps[i - 1] < input.timestamps[i]))
            throw IngestionError("timestamps not strictly increasing at row " + std::to_string(i + 1));
    }
    std::vector<double> x(n - 1);
    for (std::size_t i = 1; i < n; ++i) x[i - 1] = std::log(input.prices[i]) - std::log(input.prices[i - 1]);
    return ReturnSeries::from_returns(std::move(x));
}

} // namespace garchqr
