#include "plap/csv_io.hpp"

#include <cmath>
#include <cstdio>
#include <vector>

namespace plap::csv {

std::string format_double(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[32];
    const int len = std::snprintf(buf, sizeof buf, "%.17g", v);
    return std::string(buf, static_cast<std::size_t>(len));
}

void Writer::header(std::initializer_list<std::string_view> columns) {
    bool first = true;
    for (auto c : columns) {
        if (!first) out_ << ',';
        out_ << c;
        first = false;
    }
    out_ << '\n';
}

void Writer::row(std::span<const double> values) {
    for (std::size_t k = 0; k < values.size(); ++k) {
        if (k) out_ << ',';
        out_ << format_double(values[k]);
    }
    out_ << '\n';
}

void Writer::row(std::initializer_list<double> values) {
    row(std::span<const double>(values.begin(), values.size()));
}

}  // namespace plap::csv
