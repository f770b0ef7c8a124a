#pragma once

#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

namespace ranslice::csv {

// Shortest decimal text that reads back as the same double.
std::string num(double v);

// Rows of comma-separated cells with no quoting (the harness never emits
// commas inside a cell).
class Writer {
public:
    explicit Writer(std::ostream& out) : out_(out) {}
    Writer& header(const std::vector<std::string_view>& cols);
    Writer& row(const std::vector<std::string>& cells);

private:
    std::ostream& out_;
};

struct Table {
    std::vector<std::string> columns;
    std::vector<std::vector<std::string>> rows;

    // -1 when absent.
    int column(std::string_view name) const;
};

Table read(std::istream& in);
Table read_file(const std::string& path);

}  // namespace ranslice::csv
