#include "garchqr/csv.hpp"

#include <cctype>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "garchqr/errors.hpp"

namespace garchqr {

namespace {

std::string trim(const std::string& s) {
    std::size_t b = 0, e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return s.substr(b, e - b);
}

bool parse_number(const std::string& s, double& out) {
    if (s.empty()) return false;
    char* end = nullptr;
    out = std::strtod(s.c_str(), &end);
    return end == s.c_str() + s.size();
}

std::vector<std::string> split(const std::string& line, char delim) {
    std::vector<std::string> fields;
    std::stringstream ss(line);
    std::string field;
    while (std::getline(ss, field, delim)) fields.push_back(trim(field));
    if (!line.empty() && line.back() == delim) fields.emplace_back();
    return fields;
}

} // namespace

LoadedSeries load_series_csv(const std::string& path, const CsvOptions& options) {
    std::ifstream in(path);
    if (!in) throw IngestionError("cannot open " + path);

    std::vector<std::vector<std::string>> rows;
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (trim(line).empty()) continue;
        rows.push_back(split(line, options.delimiter));
    }
    if (rows.empty()) throw IngestionError(path + ": no data rows");

    const std::size_t ncols = rows.front().size();
    if (ncols != 1 && ncols != 2)
        throw IngestionError(path + ": expected one (return) or two (date,price) columns, got " +
                             std::to_string(ncols));

    // Header detection: the value field of the first row fails to parse.
    std::size_t first = 0;
    {
        double tmp;
        if (!parse_number(rows[0].back(), tmp)) first = 1;
    }
    if (first >= rows.size()) throw IngestionError(path + ": header only, no data rows");

    if (ncols == 2) {
        PricesInput prices;
        for (std::size_t i = first; i < rows.size(); ++i) {
            if (rows[i].size() != 2)
                throw IngestionError(path + ": ragged row " + std::to_string(i + 1));
            double p;
            if (!parse_number(rows[i][1], p))
                throw IngestionError(path + ": bad price at row " + std::to_string(i + 1));
            prices.timestamps.push_back(rows[i][0]);
            prices.prices.push_back(p);
        }
        LoadedSeries out{log_returns(prices), {}, true};
        out.dates.assign(prices.timestamps.begin() + 1, prices.timestamps.end());
        return out;
    }

    std::vector<double> values;
    for (std::size_t i = first; i < rows.size(); ++i) {
        double v;
        if (rows[i].size() != 1 || !parse_number(rows[i][0], v))
            throw IngestionError(path + ": bad return at row " + std::to_string(i + 1));
        values.push_back(v);
    }
    return LoadedSeries{ReturnSeries::from_returns(std::move(values)), {}, false};
}

} // namespace garchqr
