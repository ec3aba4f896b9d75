#pragma once

#include <rampfe/errors.hpp>

#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

/*! \file csv.hpp
    \brief Comma-separated output with '.' decimals and LF endings, plus a
    small reader for numeric columns.

    Numbers use the shortest round-trip representation (std::to_chars), so
    identical doubles always produce identical bytes.
*/

namespace rampfe::csv {

inline std::string format(double x) {
    if (std::isnan(x))
        return "nan";
    if (std::isinf(x))
        return x > 0 ? "inf" : "-inf";
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, x);
    return std::string(buf, res.ptr);
}

inline std::string format(std::size_t x) { return std::to_string(x); }

class Writer {
  public:
    explicit Writer(const std::vector<std::string>& header) { row(header); }

    void row(const std::vector<std::string>& cells) {
        for (std::size_t i = 0; i < cells.size(); ++i) {
            if (i)
                out_ += ',';
            out_ += cells[i];
        }
        out_ += '\n';
    }

    const std::string& str() const noexcept { return out_; }

  private:
    std::string out_;
};

inline void write_file(const std::filesystem::path& path, std::string_view content) {
    if (path.has_parent_path())
        std::filesystem::create_directories(path.parent_path());
    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    RAMPFE_REQUIRE(f.good(), ErrorKind::IoError, "cannot open " + path.string() + " for writing");
    f.write(content.data(), static_cast<std::streamsize>(content.size()));
    RAMPFE_REQUIRE(f.good(), ErrorKind::IoError, "failed writing " + path.string());
}

inline std::string read_file(const std::filesystem::path& path) {
    std::ifstream f(path, std::ios::binary);
    RAMPFE_REQUIRE(f.good(), ErrorKind::IoError, "cannot read " + path.string());
    std::ostringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

inline std::vector<std::string> split(std::string_view line) {
    std::vector<std::string> cells;
    std::size_t start = 0;
    while (true) {
        const auto pos = line.find(',', start);
        auto cell = line.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start);
        while (!cell.empty() && (cell.front() == ' ' || cell.front() == '\t'))
            cell.remove_prefix(1);
        while (!cell.empty() && (cell.back() == ' ' || cell.back() == '\t' || cell.back() == '\r'))
            cell.remove_suffix(1);
        cells.emplace_back(cell);
        if (pos == std::string_view::npos)
            break;
        start = pos + 1;
    }
    return cells;
}

inline double parse_double(std::string_view s, const std::string& where) {
    double x = 0.0;
    const auto res = std::from_chars(s.data(), s.data() + s.size(), x);
    RAMPFE_REQUIRE(res.ec == std::errc() && res.ptr == s.data() + s.size(), ErrorKind::ParseError,
                   where + ": '" + std::string(s) + "' is not a number");
    return x;
}

/*! Reads one numeric column from a headed CSV file: the column named
    \p column if present, otherwise the last column. Blank lines are skipped.
*/
inline std::vector<double> read_column(const std::filesystem::path& path, std::string_view column = "return") {
    const std::string text = read_file(path);
    std::istringstream in(text);
    std::string line;
    RAMPFE_REQUIRE(static_cast<bool>(std::getline(in, line)), ErrorKind::ParseError,
                   path.string() + ": missing header row");
    const auto header = split(line);
    std::size_t idx = header.size() - 1;
    for (std::size_t i = 0; i < header.size(); ++i)
        if (header[i] == column)
            idx = i;

    std::vector<double> out;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.find_first_not_of(" \t\r") == std::string::npos)
            continue;
        const auto cells = split(line);
        RAMPFE_REQUIRE(cells.size() == header.size(), ErrorKind::ParseError,
                       path.string() + ":" + std::to_string(line_no) + ": expected " +
                           std::to_string(header.size()) + " columns");
        out.push_back(parse_double(cells[idx], path.string() + ":" + std::to_string(line_no)));
    }
    return out;
}

} // namespace rampfe::csv
