#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "garchqr/baselines.hpp"
#include "garchqr/bootstrap.hpp"
#include "garchqr/garch.hpp"
#include "garchqr/series.hpp"

namespace garchqr {

enum class WindowKind { expanding, fixed };

struct BacktestSpec {
    WindowKind window = WindowKind::expanding;
    /// First forecast origin: the fit at origin o uses observations
    /// x_1..x_o (expanding) or the trailing start_index of them (fixed),
    /// and forecasts x_{o+1}. Origins are 0-based indices of the forecast
    /// target, so the first target is x[start_index].
    std::size_t start_index = 0;
    double tau = 0.05;
    Method method = Method::hybrid;
    std::size_t p = 1;
    std::size_t q = 1;
    /// Bootstrap size for per-origin CI bands; 0 disables bands
    /// (hybrid method only).
    std::size_t B = 0;
    double ci_level = 0.95;
    std::size_t K = 6;
    WeightLaw wlaw;
    std::uint64_t seed = 1;
    int workers = 0;
    std::size_t caviar_screen = 2000;
    /// Inclusive date ranges (from, to) matched against the date labels.
    std::vector<std::pair<std::string, std::string>> subperiods;
};

struct OriginForecast {
    std::size_t target = 0; // index of the forecast observation
    double forecast = 0.0;
    std::optional<CiInterval> ci;
    bool ok = false;
    std::string error;
};

struct SubperiodEcr {
    std::string label;
    std::size_t evaluated = 0;
    std::size_t violations = 0;
    double ecr = 0.0;
};

struct BacktestReport {
    std::vector<OriginForecast> forecasts;   // ordered by target index
    std::vector<std::size_t> violations;     // targets where x fell below the forecast
    std::size_t evaluated = 0;               // successful origins
    double ecr = 0.0;                        // violations / evaluated
    std::vector<SubperiodEcr> subperiods;
};

/// Rolling one-step VaR backtest; failed origins are skipped with a note
/// and excluded from the ECR denominator.
BacktestReport backtest(const ReturnSeries& series, const BacktestSpec& spec,
                        const std::vector<std::string>& dates = {});

} // namespace garchqr
