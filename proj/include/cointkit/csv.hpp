// csv.hpp
// Panel CSV ingestion and export. Expected layout: header row
// `date,<market>,...`, ISO-8601 dates in ascending order, one numeric cell
// per market.

#pragma once

#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "cointkit/series.hpp"

namespace cointkit {

namespace detail {

inline std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> cells;
    std::string cur;
    for (char c : line) {
        if (c == ',') {
            cells.push_back(cur);
            cur.clear();
        } else if (c != '\r') {
            cur += c;
        }
    }
    cells.push_back(cur);
    return cells;
}

inline double parse_numeric_cell(const std::string& cell, std::size_t row, std::size_t col,
                                 const std::string& column_name) {
    double value = 0.0;
    const char* first = cell.data();
    const char* last = cell.data() + cell.size();
    while (first != last && (*first == ' ' || *first == '\t')) ++first;
    while (last != first && (*(last - 1) == ' ' || *(last - 1) == '\t')) --last;
    const auto res = std::from_chars(first, last, value);
    if (res.ec != std::errc{} || res.ptr != last || !std::isfinite(value))
        throw io_error("csv: non-numeric cell '" + cell + "' at row " + std::to_string(row) +
                       ", column " + std::to_string(col) + " (" + column_name + ")");
    return value;
}

} // namespace detail

inline MarketPanel read_panel_csv(std::istream& in, const std::string& origin = "<stream>") {
    std::string line;
    if (!std::getline(in, line)) throw io_error("csv: " + origin + ": empty input");
    const auto header = detail::split_csv_line(line);
    if (header.size() < 2 || header.front() != "date")
        throw io_error("csv: " + origin + ": header must start with 'date' and name >= 1 market");
    const std::size_t markets = header.size() - 1;

    std::vector<ObservationSeries> series(markets);
    for (std::size_t m = 0; m < markets; ++m) {
        if (header[m + 1].empty())
            throw io_error("csv: " + origin + ": empty market name in header column " +
                           std::to_string(m + 2));
        series[m].name = header[m + 1];
    }

    std::size_t row = 1;
    std::string prev_date;
    while (std::getline(in, line)) {
        ++row;
        if (line.empty()) continue;
        const auto cells = detail::split_csv_line(line);
        if (cells.size() != header.size())
            throw io_error("csv: " + origin + ": row " + std::to_string(row) + " has " +
                           std::to_string(cells.size()) + " cells, expected " +
                           std::to_string(header.size()));
        require_iso_date(cells[0], "csv: " + origin + ": row " + std::to_string(row));
        if (!prev_date.empty() && !(prev_date < cells[0]))
            throw io_error("csv: " + origin + ": dates not ascending at row " +
                           std::to_string(row));
        prev_date = cells[0];
        for (std::size_t m = 0; m < markets; ++m) {
            series[m].dates.push_back(cells[0]);
            series[m].values.push_back(
                detail::parse_numeric_cell(cells[m + 1], row, m + 2, header[m + 1]));
        }
    }
    if (series.front().dates.empty()) throw io_error("csv: " + origin + ": no data rows");
    return make_panel(std::move(series));
}

inline MarketPanel read_panel_csv_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw io_error("csv: cannot open '" + path + "'");
    return read_panel_csv(in, path);
}

/// Writes a panel in the ingestible layout. Values use %.17g so a write/read
/// round trip reproduces every double exactly.
inline void write_panel_csv(const MarketPanel& panel, std::ostream& out) {
    out << "date";
    for (const auto& s : panel.series) out << ',' << s.name;
    out << '\n';
    char buf[40];
    for (std::size_t t = 0; t < panel.calendar.size(); ++t) {
        out << panel.calendar[t];
        for (const auto& s : panel.series) {
            std::snprintf(buf, sizeof(buf), "%.17g", s.values[t]);
            out << ',' << buf;
        }
        out << '\n';
    }
}

inline void write_panel_csv_file(const MarketPanel& panel, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw io_error("csv: cannot write '" + path + "'");
    write_panel_csv(panel, out);
}

} // namespace cointkit
