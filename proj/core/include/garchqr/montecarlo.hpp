#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "garchqr/baselines.hpp"
#include "garchqr/bootstrap.hpp"
#include "garchqr/garch.hpp"

namespace garchqr {

struct ExperimentSpec {
    GarchParams dgp;
    InnovationLaw law = InnovationLaw::normal();
    /// Extra coefficient on x^2_{t-4} in the data-generating process
    /// (estimation still assumes the fitted orders below).
    double departure_d = 0.0;
    std::size_t n = 1000;
    std::size_t reps = 200;
    double tau = 0.05;
    std::vector<Method> methods; // comparison study only
    std::size_t B = 300;
    WeightLaw wlaw;
    std::size_t K = 6;
    std::uint64_t seed = 1;
    int workers = 0;
    std::size_t fit_p = 1;
    std::size_t fit_q = 1;
    std::size_t burn_in = kDefaultBurnIn;
    std::size_t caviar_screen = 10000;
};

struct ComparisonCell {
    Method method;
    double bias_in = 0.0, mse_in = 0.0, var_in = 0.0;
    double bias_out = 0.0, mse_out = 0.0, var_out = 0.0;
    std::size_t reps_used = 0;
};

struct InferenceComponent {
    std::string label;
    double truth = 0.0;
    double bias = 0.0;
    double esd = 0.0;
    double asd = 0.0;
};

struct SizePowerCell {
    double rejection_rate = 0.0;
    std::size_t reps_used = 0;
};

struct ExperimentResult {
    std::vector<ComparisonCell> comparison;
    std::vector<InferenceComponent> params;    // quantile coefficients
    std::vector<InferenceComponent> qacf_lags; // residual QACF at selected lags
    std::optional<SizePowerCell> size_power;
    std::vector<std::pair<std::size_t, std::string>> failures; // (replicate, what)
    double wall_seconds = 0.0;
    std::size_t reps = 0;
};

/// Per-replicate sub-seed, shared by every method inside a replicate.
std::uint64_t replicate_seed(std::uint64_t seed, std::size_t replicate);

/// DGP with the lag-4 departure folded into the ARCH coefficients.
GarchParams departure_dgp(const ExperimentSpec& spec);

/// Estimator comparison: in/out-of-sample bias and MSE of the fitted
/// conditional quantiles against the exact simulated ones.
ExperimentResult run_comparison(const ExperimentSpec& spec);

/// Bias / empirical SD / bootstrap SD of the quantile coefficients and of
/// the residual QACF (lags 2, 4, ..., up to K).
ExperimentResult run_inference_study(const ExperimentSpec& spec);

/// Rejection rate of the portmanteau test at the 5% level, fitting the
/// spec's (fit_p, fit_q) model whatever the departure.
ExperimentResult run_size_power(const ExperimentSpec& spec);

struct EfficiencyComponent {
    std::string label;
    double iqr_weighted = 0.0;
    double iqr_unweighted = 0.0;
};

struct EfficiencyResult {
    std::vector<EfficiencyComponent> components;
    std::vector<std::pair<std::size_t, std::string>> failures;
    double wall_seconds = 0.0;
    std::size_t reps = 0;
};

/// Weighted vs unweighted quantile-coefficient dispersion on the same
/// simulated replicates (interquartile ranges per component).
EfficiencyResult run_efficiency_study(const ExperimentSpec& spec);

} // namespace garchqr
