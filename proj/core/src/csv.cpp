#include "srrc/csv.hpp"

#include <cerrno>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "srrc/errors.hpp"
#include "srrc/model_io.hpp"

namespace srrc {

namespace {

std::vector<std::string> split_fields(const std::string& line) {
    std::vector<std::string> out;
    std::string field;
    std::istringstream is(line);
    while (std::getline(is, field, ',')) {
        const auto first = field.find_first_not_of(" \t");
        const auto last = field.find_last_not_of(" \t\r");
        out.push_back(first == std::string::npos ? std::string() : field.substr(first, last - first + 1));
    }
    if (!line.empty() && line.back() == ',') out.emplace_back();
    return out;
}

double parse_real(const std::string& token, std::size_t line_no) {
    if (token.empty()) throw IoError("empty value on CSV line " + std::to_string(line_no));
    errno = 0;
    char* end = nullptr;
    const double v = std::strtod(token.c_str(), &end);
    if (end != token.c_str() + token.size() || errno == ERANGE) {
        throw IoError("invalid number '" + token + "' on CSV line " + std::to_string(line_no));
    }
    return v;
}

}  // namespace

CsvTable parse_csv(const std::string& text) {
    std::istringstream is(text);
    std::string line;
    CsvTable table;
    std::size_t line_no = 0;
    std::vector<std::vector<double>> body;
    while (std::getline(is, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        if (table.header.empty()) {
            table.header = split_fields(line);
            continue;
        }
        const auto fields = split_fields(line);
        if (fields.size() != table.header.size()) {
            throw IoError("CSV line " + std::to_string(line_no) + " has " + std::to_string(fields.size()) +
                          " fields, header has " + std::to_string(table.header.size()));
        }
        std::vector<double> row;
        row.reserve(fields.size());
        for (const auto& f : fields) row.push_back(parse_real(f, line_no));
        body.push_back(std::move(row));
    }
    if (table.header.empty()) throw IoError("CSV input has no header line");
    table.rows.resize(static_cast<Index>(body.size()), static_cast<Index>(table.header.size()));
    for (std::size_t r = 0; r < body.size(); ++r) {
        for (std::size_t c = 0; c < body[r].size(); ++c) {
            table.rows(static_cast<Index>(r), static_cast<Index>(c)) = body[r][c];
        }
    }
    return table;
}

CsvTable read_csv(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open '" + path.string() + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_csv(buf.str());
}

std::string format_csv(const CsvTable& table) {
    std::string out;
    for (std::size_t c = 0; c < table.header.size(); ++c) {
        if (c) out += ',';
        out += table.header[c];
    }
    out += '\n';
    for (Index r = 0; r < table.rows.rows(); ++r) {
        for (Index c = 0; c < table.rows.cols(); ++c) {
            if (c) out += ',';
            out += format_real(table.rows(r, c));
        }
        out += '\n';
    }
    return out;
}

void write_text(const std::filesystem::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
    out << text;
    if (!out) throw IoError("failed writing '" + path.string() + "'");
}

TimeSeries series_from_csv(const CsvTable& table) {
    if (table.header.size() < 2) throw IoError("time series CSV needs a time column and at least one variable");
    if (table.rows.rows() < 1) throw IoError("time series CSV has no samples");
    TimeSeries s(table.rows.rightCols(table.rows.cols() - 1));
    s.time = table.rows.col(0);
    s.labels.assign(table.header.begin() + 1, table.header.end());
    if (s.time.size() >= 2) s.dt = s.time[1] - s.time[0];
    s.validate();
    return s;
}

TimeSeries read_series(const std::filesystem::path& path) { return series_from_csv(read_csv(path)); }

std::string series_to_csv(const TimeSeries& series) {
    CsvTable table;
    table.header.push_back("t");
    for (Index j = 0; j < series.variables(); ++j) {
        table.header.push_back(series.labels.empty() ? "x" + std::to_string(j + 1)
                                                     : series.labels[static_cast<std::size_t>(j)]);
    }
    table.rows.resize(series.samples(), series.variables() + 1);
    for (Index t = 0; t < series.samples(); ++t) {
        table.rows(t, 0) = series.time.size() ? series.time[t] : static_cast<double>(t + 1);
    }
    table.rows.rightCols(series.variables()) = series.values;
    return format_csv(table);
}

void write_series(const std::filesystem::path& path, const TimeSeries& series) {
    write_text(path, series_to_csv(series));
}

}  // namespace srrc
