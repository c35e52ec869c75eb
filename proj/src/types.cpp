#include "coin/types.hpp"

#include <charconv>
#include <cstdio>

namespace coin {

std::string_view to_string(Horizon h)
{
    return h == Horizon::Quarterly ? "qoq" : "yoy";
}

Error::Error(std::string module, const std::string& what)
    : std::runtime_error(module + ": " + what), module_(std::move(module))
{
}

YearMonth YearMonth::from_index(int idx)
{
    int y = idx >= 0 ? idx / 12 : -((-idx + 11) / 12);
    return YearMonth{y, idx - y * 12 + 1};
}

std::string YearMonth::str() const
{
    char buf[16];
    std::snprintf(buf, sizeof buf, "%04d-%02d", year, month);
    return buf;
}

namespace {

int to_int(std::string_view s, std::string_view whole)
{
    int v = 0;
    auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || p != s.data() + s.size())
        throw DataError("dates", "cannot parse date '" + std::string(whole) + "'");
    return v;
}

}  // namespace

YearMonth YearMonth::parse(std::string_view text)
{
    while (!text.empty() && (text.front() == ' ' || text.front() == '"')) text.remove_prefix(1);
    while (!text.empty() && (text.back() == ' ' || text.back() == '"' || text.back() == '\r'))
        text.remove_suffix(1);

    YearMonth ym;
    if (auto slash = text.find('/'); slash != std::string_view::npos) {
        // M/D/YYYY
        auto last = text.rfind('/');
        ym.month = to_int(text.substr(0, slash), text);
        ym.year = to_int(text.substr(last + 1), text);
    } else if (auto colon = text.find(':'); colon != std::string_view::npos) {
        ym.year = to_int(text.substr(0, colon), text);
        ym.month = to_int(text.substr(colon + 1), text);
    } else {
        auto dash = text.find('-');
        if (dash == std::string_view::npos)
            throw DataError("dates", "cannot parse date '" + std::string(text) + "'");
        ym.year = to_int(text.substr(0, dash), text);
        auto rest = text.substr(dash + 1);
        auto dash2 = rest.find('-');
        ym.month = to_int(rest.substr(0, dash2), text);
    }
    if (ym.month < 1 || ym.month > 12)
        throw DataError("dates", "month out of range in '" + std::string(text) + "'");
    return ym;
}

}  // namespace coin
