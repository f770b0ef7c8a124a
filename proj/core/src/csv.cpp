#include "ranslice/csv.hpp"

#include <charconv>
#include <fstream>
#include <istream>
#include <ostream>

#include "ranslice/errors.hpp"

namespace ranslice::csv {

std::string num(double v) {
    char buf[64];
    auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, end);
}

Writer& Writer::header(const std::vector<std::string_view>& cols) {
    for (std::size_t i = 0; i < cols.size(); ++i) {
        if (i) out_ << ',';
        out_ << cols[i];
    }
    out_ << '\n';
    return *this;
}

Writer& Writer::row(const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) {
        if (i) out_ << ',';
        out_ << cells[i];
    }
    out_ << '\n';
    return *this;
}

int Table::column(std::string_view name) const {
    for (std::size_t i = 0; i < columns.size(); ++i)
        if (columns[i] == name) return static_cast<int>(i);
    return -1;
}

namespace {

std::vector<std::string> split_line(const std::string& line) {
    std::vector<std::string> out;
    std::size_t pos = 0;
    while (true) {
        const auto next = line.find(',', pos);
        out.push_back(line.substr(pos, next == std::string::npos ? std::string::npos : next - pos));
        if (next == std::string::npos) break;
        pos = next + 1;
    }
    return out;
}

}  // namespace

Table read(std::istream& in) {
    Table t;
    std::string line;
    if (!std::getline(in, line)) return t;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    t.columns = split_line(line);
    int line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        auto cells = split_line(line);
        if (cells.size() != t.columns.size())
            throw ParseError(line_no, "expected " + std::to_string(t.columns.size()) + " cells, found " +
                                          std::to_string(cells.size()));
        t.rows.push_back(std::move(cells));
    }
    return t;
}

Table read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot open '" + path + "'");
    return read(in);
}

}  // namespace ranslice::csv
