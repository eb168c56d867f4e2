// garchqr: conditional-quantile (VaR) estimation for GARCH(p,q) series.
//
// Subcommands: simulate, fit, forecast, diagnose, bootstrap, backtest,
// montecarlo. Every subcommand accepts --config FILE with plain key=value
// lines (same names as the long flags); command-line flags override the
// file. Exit codes: 0 success, 1 usage error, 2 numerical failure.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "garchqr/backtest.hpp"
#include "garchqr/csv.hpp"
#include "garchqr/diagnostics.hpp"
#include "garchqr/errors.hpp"
#include "garchqr/hybrid.hpp"
#include "garchqr/montecarlo.hpp"
#include "garchqr/results.hpp"
#include "garchqr/stats.hpp"

namespace {

using namespace garchqr;

struct CommonOptions {
    std::string input;
    std::size_t p = 1;
    std::size_t q = 1;
    double tau = 0.05;
    std::size_t B = 0;
    std::size_t K = 6;
    std::string weights = "exponential";
    double w_lo = 1e-8;
    double w_hi = 10.0;
    double rho0 = 0.999;
    std::uint64_t seed = 1;
    int workers = 0;
    char delimiter = ',';
};

void add_common(CLI::App* cmd, CommonOptions& opt, bool needs_input = true) {
    auto* in = cmd->add_option("--input", opt.input, "input CSV: (date,price) or single return column");
    if (needs_input) in->required();
    cmd->add_option("--p", opt.p, "GARCH order p");
    cmd->add_option("--q", opt.q, "ARCH order q");
    cmd->add_option_function<std::vector<std::size_t>>(
           "--orders",
           [&opt](const std::vector<std::size_t>& po) {
               if (po.size() != 2) throw CLI::ValidationError("--orders takes p,q");
               opt.p = po[0];
               opt.q = po[1];
           },
           "model orders as p,q (same as --p/--q)")
        ->delimiter(',');
    cmd->add_option("--tau", opt.tau, "quantile level in (0,1)")->check(CLI::Range(1e-6, 1.0 - 1e-6));
    cmd->add_option("--B", opt.B, "bootstrap replicates");
    cmd->add_option("--lags,--K", opt.K, "QACF lag count K");
    cmd->add_option("--weights", opt.weights, "random weight law: exponential|rademacher|mammen");
    cmd->add_option("--w-lo", opt.w_lo, "parameter box lower bound");
    cmd->add_option("--w-hi", opt.w_hi, "parameter box upper bound");
    cmd->add_option("--rho0", opt.rho0, "beta-sum cap");
    cmd->add_option("--seed", opt.seed, "RNG seed");
    cmd->add_option("--workers", opt.workers, "worker threads (default: GARCHQR_WORKERS or hardware)");
    cmd->add_option("--delimiter", opt.delimiter, "CSV delimiter");
    cmd->add_option("--config", "key=value config file; explicit flags override")
        ->expected(1)
        ->each([](const std::string&) {}); // consumed in expand_config_args
}

// Rewrites argv so that `key = value` lines from --config FILE become
// trailing `--key value` tokens, skipping keys the user already passed.
std::vector<std::string> expand_config_args(int argc, char** argv) {
    std::vector<std::string> args(argv, argv + argc);
    std::string config_path;
    for (std::size_t i = 1; i < args.size(); ++i) {
        if (args[i] == "--config" && i + 1 < args.size()) config_path = args[i + 1];
        else if (args[i].rfind("--config=", 0) == 0) config_path = args[i].substr(9);
    }
    if (config_path.empty()) return args;

    std::ifstream in(config_path);
    if (!in) throw std::invalid_argument("cannot open config file " + config_path);
    auto has_flag = [&](const std::string& key) {
        const std::string flag = "--" + key;
        for (std::size_t i = 1; i < args.size(); ++i)
            if (args[i] == flag || args[i].rfind(flag + "=", 0) == 0) return true;
        return false;
    };
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        const auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        const auto eq = line.find('=');
        if (eq == std::string::npos) continue;
        auto trim = [](std::string s) {
            const auto b = s.find_first_not_of(" \t");
            const auto e = s.find_last_not_of(" \t");
            return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
        };
        const auto key = trim(line.substr(0, eq));
        const auto value = trim(line.substr(eq + 1));
        if (key.empty() || key == "config" || has_flag(key)) continue;
        args.push_back("--" + key);
        args.push_back(value);
    }
    return args;
}

ThetaBox box_of(const CommonOptions& opt) {
    return ThetaBox{opt.w_lo, opt.w_hi, opt.rho0};
}

LoadedSeries load_input(const CommonOptions& opt) {
    CsvOptions csv;
    csv.delimiter = opt.delimiter;
    return load_series_csv(opt.input, csv);
}

std::string orders_key(const CommonOptions& opt) {
    return std::to_string(opt.p) + "," + std::to_string(opt.q);
}

void describe_qmle(ResultWriter& w, const QmleFit& fit) {
    const auto theta = fit.theta_hat.to_vector();
    w.set("qmle_converged", static_cast<std::size_t>(fit.converged ? 1 : 0));
    w.set("qmle_iterations", static_cast<std::size_t>(fit.iterations));
    w.set("qmle_objective", fit.objective);
    w.begin_section("qmle", {"component", "estimate", "std_error"});
    for (std::size_t k = 0; k < theta.size(); ++k) {
        const std::string label = k == 0 ? "alpha0"
                                  : k <= fit.theta_hat.q() ? "alpha" + std::to_string(k)
                                  : "beta" + std::to_string(k - fit.theta_hat.q());
        w.add_row({label, format_double(theta[k]), format_double(fit.std_errors[k])});
    }
}

void describe_quantile(ResultWriter& w, const HybridFit& fit) {
    w.set("tau", fit.qparams.tau);
    w.set("weighted", static_cast<std::size_t>(fit.qparams.weighted ? 1 : 0));
    w.set("next_q", fit.next_q);
    w.begin_section("theta_tau", {"component", "estimate"});
    for (std::size_t k = 0; k < fit.qparams.theta_tau.size(); ++k) {
        const std::string label = k == 0 ? "alpha0"
                                  : k <= fit.q ? "alpha" + std::to_string(k)
                                  : "beta" + std::to_string(k - fit.q);
        w.add_row({label, format_double(fit.qparams.theta_tau[k])});
    }
}

int cmd_simulate(const CommonOptions& opt, const std::vector<double>& params_flat,
                 const std::string& law_name, double nu, std::size_t n, std::size_t burn_in,
                 const std::string& output) {
    const auto params = GarchParams::from_vector(params_flat, opt.p, opt.q);
    const auto law = law_name == "student" ? InnovationLaw::student(nu) : InnovationLaw::normal();
    const auto sim = simulate_garch(params, law, n, burn_in, opt.seed);
    std::ofstream out(output);
    if (!out) throw IngestionError("cannot write " + output);
    out << "return\n";
    for (double x : sim.returns.values()) out << format_double(x) << "\n";
    std::fprintf(stderr, "wrote %zu returns to %s\n", sim.returns.size(), output.c_str());
    return 0;
}

int cmd_fit(const CommonOptions& opt, bool unweighted, const std::string& output) {
    const auto data = load_input(opt);
    const auto fit = fit_hybrid(data.returns, opt.p, opt.q, opt.tau, !unweighted, box_of(opt));

    ResultWriter w("fit");
    w.set("input", opt.input);
    w.set("n", data.returns.size());
    w.set("orders", orders_key(opt));
    describe_qmle(w, *fit.qmle);
    describe_quantile(w, fit);

    // diagnostics summary: residual QACF, plus the bootstrap test when B > 0
    const auto residuals = weighted_residuals(fit);
    const auto r = qacf(residuals, opt.tau, opt.K);
    if (opt.B > 0) {
        const auto ens = run_ensemble(data.returns, fit, opt.B, WeightLaw::from_name(opt.weights),
                                      opt.K, opt.seed, opt.workers);
        const auto report = portmanteau_test(fit, ens, opt.K);
        w.set("q_stat", report.q_stat);
        w.set("p_value", report.p_value);
        w.begin_section("qacf", {"lag", "r", "lower", "upper"});
        for (std::size_t k = 0; k < opt.K; ++k)
            w.add_row({std::to_string(k + 1), format_double(report.r[k]),
                       format_double(report.per_lag_bounds[k].lo),
                       format_double(report.per_lag_bounds[k].hi)});
    } else {
        w.begin_section("qacf", {"lag", "r"});
        for (std::size_t k = 0; k < opt.K; ++k)
            w.add_row({std::to_string(k + 1), format_double(r[k])});
    }
    w.write_file(output);
    std::fprintf(stderr, "fit written to %s (next_q = %g)\n", output.c_str(), fit.next_q);
    return 0;
}

int cmd_forecast(const CommonOptions& opt, double level, const std::string& output) {
    const auto data = load_input(opt);
    const auto fit = fit_hybrid(data.returns, opt.p, opt.q, opt.tau, true, box_of(opt));
    ResultWriter w("forecast");
    w.set("input", opt.input);
    w.set("orders", orders_key(opt));
    w.set("tau", opt.tau);
    w.set("forecast", forecast_next(fit));
    if (opt.B > 0) {
        const auto ens = run_ensemble(data.returns, fit, opt.B, WeightLaw::from_name(opt.weights),
                                      opt.K, opt.seed, opt.workers);
        const auto ci = summarize(ens, fit).next_quantile_ci(level);
        w.set("ci_level", level);
        w.set("ci_lo", ci.lo);
        w.set("ci_hi", ci.hi);
    }
    w.write_file(output);
    std::fprintf(stderr, "forecast written to %s\n", output.c_str());
    return 0;
}

int cmd_diagnose(CommonOptions opt, const std::string& output, const std::string& plot) {
    if (opt.B == 0) opt.B = 1000; // default ensemble size
    if (opt.B < 2) throw std::invalid_argument("diagnose needs --B >= 2");
    const auto data = load_input(opt);
    const auto fit = fit_hybrid(data.returns, opt.p, opt.q, opt.tau, true, box_of(opt));
    const auto ens = run_ensemble(data.returns, fit, opt.B, WeightLaw::from_name(opt.weights),
                                  opt.K, opt.seed, opt.workers);
    const auto report = portmanteau_test(fit, ens, opt.K);

    ResultWriter w("diagnose");
    w.set("input", opt.input);
    w.set("orders", orders_key(opt));
    w.set("tau", opt.tau);
    w.set("K", opt.K);
    w.set("B", ens.replicates.size());
    w.set("weights", opt.weights);
    w.set("q_stat", report.q_stat);
    w.set("p_value", report.p_value);
    w.set("ridged", static_cast<std::size_t>(report.ridged ? 1 : 0));
    w.begin_section("lags", {"lag", "r", "lower", "upper"});
    for (std::size_t k = 0; k < opt.K; ++k)
        w.add_row({std::to_string(k + 1), format_double(report.r[k]),
                   format_double(report.per_lag_bounds[k].lo),
                   format_double(report.per_lag_bounds[k].hi)});
    w.write_file(output);
    if (!plot.empty()) write_qacf_plot_data(report, plot);
    std::printf("Q(%zu) = %.4f, p-value = %.4f\n", opt.K, report.q_stat, report.p_value);
    return 0;
}

int cmd_bootstrap(CommonOptions opt, double level, const std::string& output) {
    if (opt.B == 0) opt.B = 1000; // default ensemble size
    if (opt.B < 2) throw std::invalid_argument("bootstrap needs --B >= 2");
    const auto data = load_input(opt);
    const auto fit = fit_hybrid(data.returns, opt.p, opt.q, opt.tau, true, box_of(opt));
    const auto ens = run_ensemble(data.returns, fit, opt.B, WeightLaw::from_name(opt.weights),
                                  opt.K, opt.seed, opt.workers);
    const auto summary = summarize(ens, fit);

    ResultWriter w("bootstrap");
    w.set("input", opt.input);
    w.set("orders", orders_key(opt));
    w.set("tau", opt.tau);
    w.set("B", ens.replicates.size());
    w.set("weights", opt.weights);
    w.set("ci_level", level);
    const auto ci_next = summary.next_quantile_ci(level);
    w.set("next_q", fit.next_q);
    w.set("next_q_ci_lo", ci_next.lo);
    w.set("next_q_ci_hi", ci_next.hi);
    w.begin_section("parameters", {"component", "estimate", "asd", "ci_lo", "ci_hi"});
    for (std::size_t k = 0; k < fit.dim(); ++k) {
        const std::string label = k == 0 ? "alpha0"
                                  : k <= fit.q ? "alpha" + std::to_string(k)
                                  : "beta" + std::to_string(k - fit.q);
        const auto ci = summary.parameter_ci(k, level);
        w.add_row({label, format_double(fit.qparams.theta_tau[k]), format_double(summary.asd()[k]),
                   format_double(ci.lo), format_double(ci.hi)});
    }
    w.begin_section("e_covariance", {"row", "values"});
    for (std::size_t a = 0; a < fit.dim(); ++a) {
        std::string vals;
        for (std::size_t b = 0; b < fit.dim(); ++b)
            vals += (b ? ";" : "") + format_double(summary.e_covariance()(a, b));
        w.add_row({std::to_string(a), vals});
    }
    w.write_file(output);
    std::fprintf(stderr, "bootstrap summary written to %s\n", output.c_str());
    return 0;
}

int cmd_backtest(const CommonOptions& opt, BacktestSpec spec, const std::string& start_date,
                 const std::string& method_arg, const std::string& subperiod_arg,
                 bool paper_subperiods, double level, const std::string& output,
                 const std::string& plot) {
    const auto data = load_input(opt);
    spec.tau = opt.tau;
    spec.p = opt.p;
    spec.q = opt.q;
    spec.B = opt.B;
    spec.K = opt.K;
    spec.wlaw = WeightLaw::from_name(opt.weights);
    spec.seed = opt.seed;
    spec.workers = opt.workers;
    spec.ci_level = level;

    if (!start_date.empty()) {
        if (data.dates.empty()) throw std::invalid_argument("--start-date needs dated input");
        spec.start_index = 0;
        while (spec.start_index < data.dates.size() && data.dates[spec.start_index] < start_date)
            ++spec.start_index;
    }
    if (paper_subperiods) {
        spec.subperiods = {{"2010-01-01", "2011-12-31"},
                           {"2012-01-01", "2013-12-31"},
                           {"2014-01-01", "2015-12-31"},
                           {"2016-01-01", "2016-12-31"}};
    }
    if (!subperiod_arg.empty()) {
        std::stringstream ss(subperiod_arg);
        std::string range;
        while (std::getline(ss, range, ',')) {
            const auto colon = range.find(':');
            if (colon == std::string::npos)
                throw std::invalid_argument("subperiods: expected from:to[,from:to...]");
            spec.subperiods.emplace_back(range.substr(0, colon), range.substr(colon + 1));
        }
    }

    std::vector<Method> methods;
    {
        std::stringstream ss(method_arg);
        std::string name;
        while (std::getline(ss, name, ',')) methods.push_back(method_from_name(name));
    }
    if (methods.empty()) throw std::invalid_argument("--method: no methods given");

    std::vector<BacktestReport> reports;
    for (Method m : methods) {
        spec.method = m;
        reports.push_back(backtest(data.returns, spec, data.dates));
    }
    const auto& report = reports.front();
    spec.method = methods.front();
    write_backtest_result(report, spec, data.dates, output);

    if (!plot.empty()) {
        ResultWriter w("backtest-plot");
        w.set("tau", opt.tau);
        w.begin_section("rows", {"index", "date", "return", "forecast", "ci_lo", "ci_hi"});
        for (const auto& f : report.forecasts) {
            if (!f.ok) continue;
            w.add_row({std::to_string(f.target),
                       data.dates.empty() ? "" : data.dates[f.target],
                       format_double(data.returns[f.target]), format_double(f.forecast),
                       f.ci ? format_double(f.ci->lo) : "", f.ci ? format_double(f.ci->hi) : ""});
        }
        w.write_file(plot);
    }

    for (std::size_t m = 0; m < methods.size(); ++m) {
        std::printf("%s: evaluated %zu origins, ECR = %.4f%%\n", method_name(methods[m]),
                    reports[m].evaluated, 100.0 * reports[m].ecr);
        for (const auto& s : reports[m].subperiods)
            std::printf("  %s: ECR = %.4f%% (%zu origins)\n", s.label.c_str(), 100.0 * s.ecr,
                        s.evaluated);
    }

    // Best-ECR tally across methods, overall and per subperiod; ties all
    // score (the convention travels with the numbers).
    if (methods.size() > 1) {
        std::vector<std::size_t> tally(methods.size(), 0);
        auto score_cell = [&](auto ecr_of) {
            double best = 1e300;
            for (std::size_t m = 0; m < methods.size(); ++m)
                best = std::min(best, std::abs(ecr_of(reports[m]) - spec.tau));
            for (std::size_t m = 0; m < methods.size(); ++m)
                if (std::abs(ecr_of(reports[m]) - spec.tau) <= best + 1e-15) ++tally[m];
        };
        score_cell([](const BacktestReport& r) { return r.ecr; });
        for (std::size_t s = 0; s < report.subperiods.size(); ++s)
            score_cell([s](const BacktestReport& r) { return r.subperiods[s].ecr; });

        ResultWriter w("backtest-comparison");
        w.set("tau", spec.tau);
        w.set("tie_rule", std::string("ties counted for every tied method"));
        std::vector<std::string> cols{"method", "ecr", "best_count"};
        for (const auto& s : report.subperiods) cols.push_back("ecr:" + s.label);
        w.begin_section("methods", cols);
        for (std::size_t m = 0; m < methods.size(); ++m) {
            std::vector<std::string> row{method_name(methods[m]), format_double(reports[m].ecr),
                                         std::to_string(tally[m])};
            for (const auto& s : reports[m].subperiods) row.push_back(format_double(s.ecr));
            w.add_row(row);
        }
        w.write_file(output + ".comparison");

        std::printf("best-ECR tally (ties counted): ");
        for (std::size_t m = 0; m < methods.size(); ++m)
            std::printf("%s%s %zu", m ? ", " : "", method_name(methods[m]), tally[m]);
        std::printf("\n");
    }
    return 0;
}

int cmd_montecarlo(const CommonOptions& opt, const std::string& preset, double scale,
                   std::size_t n, const std::string& law_name, double nu, double d,
                   const std::string& output) {
    ExperimentSpec spec;
    spec.n = n;
    spec.tau = opt.tau;
    spec.B = opt.B > 0 ? opt.B : 300;
    spec.K = opt.K;
    spec.wlaw = WeightLaw::from_name(opt.weights);
    spec.seed = opt.seed;
    spec.workers = opt.workers;
    spec.law = law_name == "student" ? InnovationLaw::student(nu) : InnovationLaw::normal();

    auto scaled = [&](std::size_t reps) {
        return std::max<std::size_t>(2, static_cast<std::size_t>(reps * scale));
    };

    ResultWriter w("montecarlo");
    w.set("preset", preset);
    w.set("n", n);
    w.set("law", law_name);

    if (preset == "table1a" || preset == "table1b") {
        spec.dgp = GarchParams{0.1, {preset == "table1a" ? 0.8 : 0.15},
                               {preset == "table1a" ? 0.15 : 0.8}};
        spec.reps = scaled(200);
        spec.methods = {Method::hybrid, Method::qgarch1, Method::qgarch2, Method::caviar,
                        Method::riskmetrics};
        const auto result = run_comparison(spec);
        write_comparison_table(result, std::cout);
        w.set("reps", result.reps);
        w.set("wall_seconds", result.wall_seconds);
        w.begin_section("cells", {"method", "bias_in", "mse_in", "bias_out", "mse_out", "reps_used"});
        for (const auto& c : result.comparison)
            w.add_row({method_name(c.method), format_double(c.bias_in), format_double(c.mse_in),
                       format_double(c.bias_out), format_double(c.mse_out),
                       std::to_string(c.reps_used)});
    } else if (preset == "table2" || preset == "table3") {
        spec.dgp = GarchParams{0.4, {0.4}, {0.4}};
        spec.reps = scaled(150);
        const auto result = run_inference_study(spec);
        write_inference_table(result, std::cout);
        w.set("reps", result.reps);
        w.set("wall_seconds", result.wall_seconds);
        w.begin_section("components", {"label", "truth", "bias", "esd", "asd"});
        for (const auto& c : result.params)
            w.add_row({c.label, format_double(c.truth), format_double(c.bias),
                       format_double(c.esd), format_double(c.asd)});
        for (const auto& c : result.qacf_lags)
            w.add_row({c.label, format_double(c.truth), format_double(c.bias),
                       format_double(c.esd), format_double(c.asd)});
    } else if (preset == "table4") {
        spec.dgp = GarchParams{0.4, {0.2}, {0.2}};
        spec.reps = scaled(400);
        w.begin_section("cells", {"d", "rejection_rate", "reps_used"});
        std::printf("d\trejection_rate\n");
        for (double dep : (d >= 0.0 ? std::vector<double>{d} : std::vector<double>{0.0, 0.3, 0.6})) {
            spec.departure_d = dep;
            const auto result = run_size_power(spec);
            std::printf("%.1f\t%.3f\n", dep, result.size_power->rejection_rate);
            w.add_row({format_double(dep), format_double(result.size_power->rejection_rate),
                       std::to_string(result.size_power->reps_used)});
        }
    } else if (preset == "fig3") {
        spec.dgp = GarchParams{0.4, {0.2}, {0.2}};
        spec.reps = scaled(300);
        const auto result = run_efficiency_study(spec);
        w.set("reps", result.reps);
        w.begin_section("components", {"label", "iqr_weighted", "iqr_unweighted"});
        std::printf("component\tiqr_weighted\tiqr_unweighted\n");
        for (const auto& c : result.components) {
            std::printf("%s\t%.5f\t%.5f\n", c.label.c_str(), c.iqr_weighted, c.iqr_unweighted);
            w.add_row({c.label, format_double(c.iqr_weighted), format_double(c.iqr_unweighted)});
        }
    } else {
        throw std::invalid_argument("unknown preset: " + preset +
                                    " (use table1a|table1b|table2|table3|table4|fig3)");
    }
    if (!output.empty()) w.write_file(output);
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Hybrid conditional-quantile (VaR) toolkit for GARCH(p,q) series"};
    app.require_subcommand(1);

    CommonOptions opt;

    // simulate
    auto* sim = app.add_subcommand("simulate", "draw a series from a GARCH model");
    std::vector<double> sim_params{0.1, 0.15, 0.8};
    std::string sim_law = "normal", sim_out = "simulated.csv";
    double sim_nu = 5.0;
    std::size_t sim_n = 1000, sim_burn = kDefaultBurnIn;
    add_common(sim, opt, false);
    sim->add_option("--params", sim_params, "theta = alpha0, alpha_1..q, beta_1..p")
        ->delimiter(',');
    sim->add_option("--law", sim_law, "normal|student")->check(CLI::IsMember({"normal", "student"}));
    sim->add_option("--nu", sim_nu, "Student degrees of freedom");
    sim->add_option("--n", sim_n, "sample size");
    sim->add_option("--burn-in", sim_burn, "burn-in length");
    sim->add_option("--output", sim_out, "output CSV");

    // fit
    auto* fit = app.add_subcommand("fit", "hybrid two-stage fit with diagnostics summary");
    bool fit_unweighted = false;
    std::string fit_out = "fit.out";
    add_common(fit, opt);
    fit->add_flag("--unweighted", fit_unweighted, "skip the 1/h weights in the quantile stage");
    fit->add_option("--output", fit_out, "result file");

    // forecast
    auto* fc = app.add_subcommand("forecast", "one-step-ahead conditional quantile");
    std::string fc_out = "forecast.out";
    double fc_level = 0.95;
    add_common(fc, opt);
    fc->add_option("--ci-level", fc_level, "confidence level for the bootstrap interval");
    fc->add_option("--output", fc_out, "result file");

    // diagnose
    auto* diag = app.add_subcommand("diagnose", "residual QACF and portmanteau test");
    std::string diag_out = "diagnose.out", diag_plot;
    add_common(diag, opt);
    diag->add_option("--output", diag_out, "result file");
    diag->add_option("--plot", diag_plot, "plot-data file (lag, r, lower, upper)");

    // bootstrap
    auto* boot = app.add_subcommand("bootstrap", "mixed-bootstrap covariance and intervals");
    std::string boot_out = "bootstrap.out";
    double boot_level = 0.95;
    add_common(boot, opt);
    boot->add_option("--ci-level", boot_level, "confidence level");
    boot->add_option("--output", boot_out, "result file");

    // backtest
    auto* bt = app.add_subcommand("backtest", "rolling one-step VaR backtest with ECR");
    BacktestSpec bt_spec;
    std::string bt_out = "backtest.out", bt_plot, bt_start_date, bt_subperiods, bt_window = "expanding",
                bt_method = "hybrid";
    bool bt_paper_subperiods = false;
    double bt_level = 0.95;
    add_common(bt, opt);
    bt->add_option("--start", bt_spec.start_index, "first forecast origin (0-based index)");
    bt->add_option("--start-date", bt_start_date, "first forecast date (needs dated input)");
    bt->add_option("--window", bt_window, "expanding|fixed")
        ->check(CLI::IsMember({"expanding", "fixed"}));
    bt->add_option("--method", bt_method,
                   "hybrid|qgarch1|qgarch2|caviar|riskmetrics; a comma list runs them all "
                   "and prints a best-ECR tally");
    bt->add_option("--subperiods", bt_subperiods, "date ranges from:to[,from:to...]");
    bt->add_flag("--paper-subperiods", bt_paper_subperiods, "2010-11/12-13/14-15/16 preset");
    bt->add_option("--ci-level", bt_level, "confidence level for forecast bands");
    bt->add_option("--caviar-screen", bt_spec.caviar_screen, "CAViaR random screen size");
    bt->add_option("--output", bt_out, "result file");
    bt->add_option("--plot", bt_plot, "plot-data file (date, return, forecast, band)");

    // montecarlo
    auto* mc = app.add_subcommand("montecarlo", "reference-table simulation studies");
    std::string mc_preset = "table1a", mc_law = "normal", mc_out;
    double mc_scale = 1.0, mc_nu = 5.0, mc_d = -1.0;
    std::size_t mc_n = 1000;
    add_common(mc, opt, false);
    mc->add_option("--preset", mc_preset, "table1a|table1b|table2|table3|table4|fig3");
    mc->add_option("--scale", mc_scale, "replication-count scale factor");
    mc->add_option("--n", mc_n, "sample size");
    mc->add_option("--law", mc_law, "normal|student")->check(CLI::IsMember({"normal", "student"}));
    mc->add_option("--nu", mc_nu, "Student degrees of freedom");
    mc->add_option("--d", mc_d, "single lag-4 departure (table4); negative = full {0,0.3,0.6} grid");
    mc->add_option("--output", mc_out, "machine-readable result file");

    try {
        auto args = expand_config_args(argc, argv);
        std::vector<const char*> raw;
        raw.reserve(args.size());
        for (const auto& a : args) raw.push_back(a.c_str());
        app.parse(static_cast<int>(raw.size()), raw.data());
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e); // prints usage/help
        return code == 0 ? 0 : 1;
    } catch (const std::invalid_argument& e) {
        std::cerr << "usage error: " << e.what() << "\n";
        return 1;
    }

    try {
        if (sim->parsed())
            return cmd_simulate(opt, sim_params, sim_law, sim_nu, sim_n, sim_burn, sim_out);
        if (fit->parsed()) return cmd_fit(opt, fit_unweighted, fit_out);
        if (fc->parsed()) return cmd_forecast(opt, fc_level, fc_out);
        if (diag->parsed()) return cmd_diagnose(opt, diag_out, diag_plot);
        if (boot->parsed()) return cmd_bootstrap(opt, boot_level, boot_out);
        if (bt->parsed()) {
            bt_spec.window = bt_window == "fixed" ? WindowKind::fixed : WindowKind::expanding;
            return cmd_backtest(opt, bt_spec, bt_start_date, bt_method, bt_subperiods,
                                bt_paper_subperiods, bt_level, bt_out, bt_plot);
        }
        if (mc->parsed())
            return cmd_montecarlo(opt, mc_preset, mc_scale, mc_n, mc_law, mc_nu, mc_d, mc_out);
    } catch (const std::invalid_argument& e) {
        std::cerr << "usage error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 1;
}
