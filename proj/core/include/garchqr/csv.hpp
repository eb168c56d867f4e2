#pragma once

#include <string>
#include <vector>

#include "garchqr/series.hpp"

namespace garchqr {

struct CsvOptions {
    char delimiter = ',';
};

/// Parsed return data with optional date labels (one label per return when
/// the file carried dates).
struct LoadedSeries {
    ReturnSeries returns;
    std::vector<std::string> dates;
    bool from_prices = false;
};

/// Reads either a two-column (date, price) file or a one-column (return)
/// file. A header line is detected by its non-numeric value field.
LoadedSeries load_series_csv(const std::string& path, const CsvOptions& options = {});

} // namespace garchqr
