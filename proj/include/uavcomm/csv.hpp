#ifndef UAVCOMM_CSV_HPP
#define UAVCOMM_CSV_HPP

#include <concepts>
#include <cstdint>
#include <initializer_list>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

namespace uavcomm::csv {

/// Shortest decimal text that round-trips to `value` ("inf", "-inf", "nan"
/// for non-finite values). Locale-independent.
std::string format_number(double value);

/// Comma-separated, '.' decimal point, header row, LF line endings.
class Writer {
public:
    explicit Writer(std::ostream& out) : out_(out) {}

    void header(std::initializer_list<std::string_view> columns);
    void header(const std::vector<std::string>& columns);

    template <typename... Fields>
    void row(const Fields&... fields)
    {
        bool first = true;
        ((write_field(fields, first)), ...);
        out_ << '\n';
    }

private:
    void separator(bool& first)
    {
        if (!first) {
            out_ << ',';
        }
        first = false;
    }

    void write_field(double v, bool& first)
    {
        separator(first);
        out_ << format_number(v);
    }

    template <std::integral T>
    void write_field(T v, bool& first)
    {
        separator(first);
        if constexpr (std::same_as<T, bool>) {
            out_ << (v ? "true" : "false");
        } else {
            out_ << v;
        }
    }

    void write_field(std::string_view v, bool& first)
    {
        separator(first);
        out_ << v;
    }

    void write_field(const std::string& v, bool& first) { write_field(std::string_view(v), first); }
    void write_field(const char* v, bool& first) { write_field(std::string_view(v), first); }

    std::ostream& out_;
};

/// Minimal reader for files produced by Writer (no quoting).
struct Table {
    std::vector<std::string> columns;
    std::vector<std::vector<std::string>> rows;

    /// Index of `name`; throws std::out_of_range if absent.
    std::size_t column(std::string_view name) const;
};

Table read_table(const std::string& path);

} // namespace uavcomm::csv

#endif
