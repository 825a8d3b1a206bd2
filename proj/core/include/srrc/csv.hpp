#pragma once

// Plain CSV time series: header line, first column is the time index, one
// column per variable, reals written with 17 significant digits.

#include <filesystem>
#include <string>
#include <vector>

#include "srrc/embedding.hpp"

namespace srrc {

struct CsvTable {
    std::vector<std::string> header;
    Matrix rows;  ///< numeric body, one column per header entry
};

CsvTable parse_csv(const std::string& text);
CsvTable read_csv(const std::filesystem::path& path);
std::string format_csv(const CsvTable& table);
void write_text(const std::filesystem::path& path, const std::string& text);

/// First column becomes `time`, the rest `values`; labels from the header.
TimeSeries series_from_csv(const CsvTable& table);
TimeSeries read_series(const std::filesystem::path& path);

/// Header "t,<labels>" (x1..xn when unlabelled); t is the timestamp when
/// present, else the 1-based sample index.
std::string series_to_csv(const TimeSeries& series);
void write_series(const std::filesystem::path& path, const TimeSeries& series);

}  // namespace srrc
