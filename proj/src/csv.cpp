#include "uavcomm/csv.hpp"

#include <array>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace uavcomm::csv {

std::string format_number(double value)
{
    if (std::isnan(value)) {
        return "nan";
    }
    if (std::isinf(value)) {
        return value > 0 ? "inf" : "-inf";
    }
    if (value == 0.0) {
        return "0"; // folds -0
    }
    std::array<char, 32> buf{};
    const auto result = std::to_chars(buf.data(), buf.data() + buf.size(), value);
    return {buf.data(), result.ptr};
}

void Writer::header(std::initializer_list<std::string_view> columns)
{
    bool first = true;
    for (auto c : columns) {
        write_field(c, first);
    }
    out_ << '\n';
}

void Writer::header(const std::vector<std::string>& columns)
{
    bool first = true;
    for (const auto& c : columns) {
        write_field(c, first);
    }
    out_ << '\n';
}

std::size_t Table::column(std::string_view name) const
{
    for (std::size_t i = 0; i < columns.size(); ++i) {
        if (columns[i] == name) {
            return i;
        }
    }
    throw std::out_of_range("no column named " + std::string(name));
}

namespace {

std::vector<std::string> split(const std::string& line)
{
    std::vector<std::string> fields;
    std::string field;
    std::istringstream in(line);
    while (std::getline(in, field, ',')) {
        fields.push_back(field);
    }
    if (!line.empty() && line.back() == ',') {
        fields.emplace_back();
    }
    return fields;
}

} // namespace

Table read_table(const std::string& path)
{
    std::ifstream in(path);
    if (!in) {
        throw std::runtime_error("cannot open " + path);
    }
    Table table;
    std::string line;
    if (std::getline(in, line)) {
        table.columns = split(line);
    }
    while (std::getline(in, line)) {
        if (!line.empty()) {
            table.rows.push_back(split(line));
        }
    }
    return table;
}

} // namespace uavcomm::csv
