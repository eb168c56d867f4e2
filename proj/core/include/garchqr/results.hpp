#pragma once

#include <map>
#include <ostream>
#include <string>
#include <vector>

#include "garchqr/backtest.hpp"
#include "garchqr/diagnostics.hpp"
#include "garchqr/montecarlo.hpp"

namespace garchqr {

/// Self-describing result file: a versioned header, `key = value` pairs
/// (doubles at full precision), then named CSV sections. Files written and
/// re-read reproduce the in-memory values exactly.
class ResultWriter {
public:
    explicit ResultWriter(std::string kind) : kind_(std::move(kind)) {}

    void set(const std::string& key, const std::string& value);
    void set(const std::string& key, double value);
    void set(const std::string& key, std::size_t value);

    void begin_section(const std::string& name, const std::vector<std::string>& columns);
    void add_row(const std::vector<std::string>& cells);

    void write(std::ostream& os) const;
    void write_file(const std::string& path) const;

private:
    struct Section {
        std::string name;
        std::vector<std::string> columns;
        std::vector<std::vector<std::string>> rows;
    };
    std::string kind_;
    std::vector<std::pair<std::string, std::string>> keys_;
    std::vector<Section> sections_;
};

struct ParsedResult {
    std::string kind;
    std::map<std::string, std::string> keys;
    struct Section {
        std::vector<std::string> columns;
        std::vector<std::vector<std::string>> rows;
    };
    std::map<std::string, Section> sections;

    double key_as_double(const std::string& key) const;
    std::size_t key_as_size(const std::string& key) const;
};

ParsedResult parse_result_file(const std::string& path);

/// Full-precision double formatting (round-trips through strtod).
std::string format_double(double v);

void write_backtest_result(const BacktestReport& report, const BacktestSpec& spec,
                           const std::vector<std::string>& dates, const std::string& path);
BacktestReport read_backtest_result(const std::string& path);

void write_qacf_plot_data(const QacfReport& report, const std::string& path);
void write_comparison_table(const ExperimentResult& result, std::ostream& os);
void write_inference_table(const ExperimentResult& result, std::ostream& os);

} // namespace garchqr
