#pragma once

#include <cstddef>
#include <string>
#include <vector>

namespace garchqr {

/// Signed square T(x) = x^2 sgn(x): a strictly increasing odd bijection on
/// the reals whose magnitude is exactly x^2.
double signed_square(double x);

/// Inverse of signed_square: sqrt(|x|) sgn(x).
double signed_sqrt(double x);

/// Observed return series x_1..x_n. Values are immutable after construction
/// and validated to be finite and non-empty.
class ReturnSeries {
public:
    static ReturnSeries from_returns(std::vector<double> values);

    std::size_t size() const { return values_.size(); }
    double operator[](std::size_t t) const { return values_[t]; }
    const std::vector<double>& values() const { return values_; }

    /// y_t = T(x_t).
    std::vector<double> transformed() const;
    /// n^{-1} sum x_t^2, the pre-sample initialization constant.
    double mean_square() const;

    /// First `count` observations as a new series.
    ReturnSeries prefix(std::size_t count) const;

private:
    explicit ReturnSeries(std::vector<double> values) : values_(std::move(values)) {}
    std::vector<double> values_;
};

struct PricesInput {
    std::vector<std::string> timestamps;
    std::vector<double> prices;
};

/// x_t = ln(p_t) - ln(p_{t-1}). Rejects non-positive prices and
/// non-increasing timestamps, naming the offending row.
ReturnSeries log_returns(const PricesInput& input);

} // namespace garchqr
