#include "resonance/grid.hpp"

#include "resonance/error.hpp"

#include <charconv>
#include <cmath>
#include <string>

namespace resonance {

namespace {

double parse_number(std::string_view text)
{
    while (!text.empty() && text.front() == ' ')
        text.remove_prefix(1);
    while (!text.empty() && text.back() == ' ')
        text.remove_suffix(1);
    double value = 0.0;
    const auto [end, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (ec != std::errc() || end != text.data() + text.size() || !std::isfinite(value))
        fail(ErrorCode::InvalidInput, "bad number '" + std::string(text) + "' in grid");
    return value;
}

std::vector<std::string_view> split(std::string_view text, char sep)
{
    std::vector<std::string_view> parts;
    std::size_t start = 0;
    for (;;) {
        const auto pos = text.find(sep, start);
        parts.push_back(text.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start));
        if (pos == std::string_view::npos)
            return parts;
        start = pos + 1;
    }
}

}  // namespace

std::vector<double> parse_grid(std::string_view text)
{
    std::vector<double> values;
    for (const auto item : split(text, ',')) {
        const auto fields = split(item, ':');
        if (fields.size() == 1) {
            values.push_back(parse_number(fields[0]));
            continue;
        }
        if (fields.size() != 3)
            fail(ErrorCode::InvalidInput, "range '" + std::string(item) + "' must be start:stop:step");
        const double start = parse_number(fields[0]);
        const double stop = parse_number(fields[1]);
        const double step = parse_number(fields[2]);
        if (step == 0.0 || (stop - start) * step < 0.0)
            fail(ErrorCode::InvalidInput, "range '" + std::string(item) + "' has a step of the wrong sign");
        const auto count = static_cast<long long>(std::floor((stop - start) / step + 1e-9)) + 1;
        if (count > 10'000'000)
            fail(ErrorCode::InvalidInput, "range '" + std::string(item) + "' is too long");
        for (long long m = 0; m < count; ++m)
            values.push_back(start + static_cast<double>(m) * step);
    }
    if (values.empty())
        fail(ErrorCode::InvalidInput, "empty grid");
    return values;
}

}  // namespace resonance
