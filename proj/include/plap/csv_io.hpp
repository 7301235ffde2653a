#pragma once

#include <initializer_list>
#include <ostream>
#include <span>
#include <string>
#include <string_view>

namespace plap::csv {

/// Decimal text with 17 significant digits: lossless for doubles and
/// independent of locale and stream state.
std::string format_double(double v);

/// Minimal comma-separated writer; fields are written verbatim.
class Writer {
public:
    explicit Writer(std::ostream& out) : out_(out) {}

    void header(std::initializer_list<std::string_view> columns);
    void row(std::span<const double> values);
    void row(std::initializer_list<double> values);

private:
    std::ostream& out_;
};

}  // namespace plap::csv
