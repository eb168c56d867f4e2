#include "garchqr/results.hpp"

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <stdexcept>

#include "garchqr/errors.hpp"

namespace garchqr {

namespace {
constexpr const char* kMagic = "# garchqr-result v1";
}

std::string format_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

void ResultWriter::set(const std::string& key, const std::string& value) {
    keys_.emplace_back(key, value);
}
void ResultWriter::set(const std::string& key, double value) {
    keys_.emplace_back(key, format_double(value));
}
void ResultWriter::set(const std::string& key, std::size_t value) {
    keys_.emplace_back(key, std::to_string(value));
}

void ResultWriter::begin_section(const std::string& name, const std::vector<std::string>& columns) {
    sections_.push_back(Section{name, columns, {}});
}

void ResultWriter::add_row(const std::vector<std::string>& cells) {
    if (sections_.empty()) throw std::logic_error("ResultWriter: no open section");
    sections_.back().rows.push_back(cells);
}

void ResultWriter::write(std::ostream& os) const {
    os << kMagic << "\n";
    os << "kind = " << kind_ << "\n";
    for (const auto& [k, v] : keys_) os << k << " = " << v << "\n";
    for (const auto& s : sections_) {
        os << "[" << s.name << "]\n";
        for (std::size_t c = 0; c < s.columns.size(); ++c)
            os << (c ? "," : "") << s.columns[c];
        os << "\n";
        for (const auto& row : s.rows) {
            for (std::size_t c = 0; c < row.size(); ++c) os << (c ? "," : "") << row[c];
            os << "\n";
        }
    }
}

void ResultWriter::write_file(const std::string& path) const {
    std::ofstream out(path);
    if (!out) throw IngestionError("cannot write " + path);
    write(out);
}

double ParsedResult::key_as_double(const std::string& key) const {
    const auto it = keys.find(key);
    if (it == keys.end()) throw IngestionError("result file: missing key " + key);
    return std::strtod(it->second.c_str(), nullptr);
}

std::size_t ParsedResult::key_as_size(const std::string& key) const {
    const auto it = keys.find(key);
    if (it == keys.end()) throw IngestionError("result file: missing key " + key);
    return static_cast<std::size_t>(std::strtoull(it->second.c_str(), nullptr, 10));
}

ParsedResult parse_result_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IngestionError("cannot open " + path);
    std::string line;
    if (!std::getline(in, line) || line != kMagic)
        throw IngestionError(path + ": not a garchqr result file");

    ParsedResult result;
    ParsedResult::Section* section = nullptr;
    bool expect_columns = false;
    std::string section_name;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        if (line.front() == '[' && line.back() == ']') {
            section_name = line.substr(1, line.size() - 2);
            section = &result.sections[section_name];
            expect_columns = true;
            continue;
        }
        if (section) {
            std::vector<std::string> cells;
            std::stringstream ss(line);
            std::string cell;
            while (std::getline(ss, cell, ',')) cells.push_back(cell);
            if (!line.empty() && line.back() == ',') cells.emplace_back();
            if (expect_columns) {
                section->columns = cells;
                expect_columns = false;
            } else {
                section->rows.push_back(cells);
            }
            continue;
        }
        const auto eq = line.find(" = ");
        if (eq == std::string::npos) throw IngestionError(path + ": malformed line: " + line);
        const auto key = line.substr(0, eq);
        const auto value = line.substr(eq + 3);
        if (key == "kind")
            result.kind = value;
        else
            result.keys[key] = value;
    }
    return result;
}

void write_backtest_result(const BacktestReport& report, const BacktestSpec& spec,
                           const std::vector<std::string>& dates, const std::string& path) {
    ResultWriter w("backtest");
    w.set("method", method_name(spec.method));
    w.set("tau", spec.tau);
    w.set("window", spec.window == WindowKind::expanding ? "expanding" : "fixed");
    w.set("start_index", spec.start_index);
    w.set("evaluated", report.evaluated);
    w.set("violations", report.violations.size());
    w.set("ecr", report.ecr);

    w.begin_section("forecasts", {"target", "date", "forecast", "ci_lo", "ci_hi", "ok", "violation"});
    std::size_t vi = 0;
    for (const auto& f : report.forecasts) {
        const bool violated = vi < report.violations.size() && report.violations[vi] == f.target;
        if (violated) ++vi;
        w.add_row({
            std::to_string(f.target),
            dates.empty() ? "" : dates[f.target],
            f.ok ? format_double(f.forecast) : "",
            f.ci ? format_double(f.ci->lo) : "",
            f.ci ? format_double(f.ci->hi) : "",
            f.ok ? "1" : "0",
            violated ? "1" : "0",
        });
    }
    if (!report.subperiods.empty()) {
        w.begin_section("subperiods", {"label", "evaluated", "violations", "ecr"});
        for (const auto& s : report.subperiods)
            w.add_row({s.label, std::to_string(s.evaluated), std::to_string(s.violations),
                       format_double(s.ecr)});
    }
    w.write_file(path);
}

BacktestReport read_backtest_result(const std::string& path) {
    const auto parsed = parse_result_file(path);
    if (parsed.kind != "backtest") throw IngestionError(path + ": not a backtest result");
    BacktestReport report;
    report.evaluated = parsed.key_as_size("evaluated");
    report.ecr = parsed.key_as_double("ecr");

    const auto it = parsed.sections.find("forecasts");
    if (it == parsed.sections.end()) throw IngestionError(path + ": missing forecasts section");
    for (const auto& row : it->second.rows) {
        if (row.size() < 7) throw IngestionError(path + ": short forecast row");
        OriginForecast f;
        f.target = static_cast<std::size_t>(std::strtoull(row[0].c_str(), nullptr, 10));
        f.ok = row[5] == "1";
        if (f.ok) f.forecast = std::strtod(row[2].c_str(), nullptr);
        if (!row[3].empty())
            f.ci = CiInterval{std::strtod(row[3].c_str(), nullptr), std::strtod(row[4].c_str(), nullptr)};
        if (row[6] == "1") report.violations.push_back(f.target);
        report.forecasts.push_back(std::move(f));
    }
    const auto sub = parsed.sections.find("subperiods");
    if (sub != parsed.sections.end()) {
        for (const auto& row : sub->second.rows) {
            SubperiodEcr s;
            s.label = row[0];
            s.evaluated = static_cast<std::size_t>(std::strtoull(row[1].c_str(), nullptr, 10));
            s.violations = static_cast<std::size_t>(std::strtoull(row[2].c_str(), nullptr, 10));
            s.ecr = std::strtod(row[3].c_str(), nullptr);
            report.subperiods.push_back(std::move(s));
        }
    }
    return report;
}

void write_qacf_plot_data(const QacfReport& report, const std::string& path) {
    ResultWriter w("qacf");
    w.set("K", report.K);
    w.set("q_stat", report.q_stat);
    w.set("p_value", report.p_value);
    w.set("ridged", static_cast<std::size_t>(report.ridged ? 1 : 0));
    w.begin_section("lags", {"lag", "r", "lower", "upper"});
    for (std::size_t k = 0; k < report.K; ++k)
        w.add_row({std::to_string(k + 1), format_double(report.r[k]),
                   format_double(report.per_lag_bounds[k].lo),
                   format_double(report.per_lag_bounds[k].hi)});
    w.write_file(path);
}

void write_comparison_table(const ExperimentResult& result, std::ostream& os) {
    os << "method\tbias_in_x10\tbias_out_x10\tmse_in\tmse_out\treps\n";
    os << std::setprecision(4) << std::fixed;
    for (const auto& c : result.comparison) {
        os << method_name(c.method) << '\t' << 10.0 * c.bias_in << '\t' << 10.0 * c.bias_out
           << '\t' << c.mse_in << '\t' << c.mse_out << '\t' << c.reps_used << "\n";
    }
    os.unsetf(std::ios_base::floatfield);
}

void write_inference_table(const ExperimentResult& result, std::ostream& os) {
    os << "component\ttruth\tbias\tesd\tasd\n";
    os << std::setprecision(4) << std::fixed;
    for (const auto& c : result.params)
        os << c.label << '\t' << c.truth << '\t' << c.bias << '\t' << c.esd << '\t' << c.asd << "\n";
    for (const auto& c : result.qacf_lags)
        os << c.label << "_x10\t" << 10.0 * c.truth << '\t' << 10.0 * c.bias << '\t'
           << 10.0 * c.esd << '\t' << 10.0 * c.asd << "\n";
    os.unsetf(std::ios_base::floatfield);
}

} // namespace garchqr
