#include "alphacross/money.hpp"

#include <limits>

#include "alphacross/error.hpp"

namespace alphacross {

Cents Cents::parse(std::string_view text) {
    auto fail = [&] { return InputError("invalid dollar amount '" + std::string(text) + "'"); };

    std::string_view s = text;
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
    if (s.empty()) throw fail();

    bool negative = false;
    if (s.front() == '+' || s.front() == '-') {
        negative = s.front() == '-';
        s.remove_prefix(1);
    }
    if (s.empty()) throw fail();

    constexpr std::int64_t kMax = std::numeric_limits<std::int64_t>::max() / 1000;
    std::int64_t whole = 0;
    std::size_t i = 0;
    bool any_digit = false;
    for (; i < s.size() && s[i] != '.'; ++i) {
        if (s[i] < '0' || s[i] > '9') throw fail();
        whole = whole * 10 + (s[i] - '0');
        if (whole > kMax) throw InputError("dollar amount out of range '" + std::string(text) + "'");
        any_digit = true;
    }
    std::int64_t frac = 0;
    if (i < s.size()) {
        ++i; // '.'
        int digits = 0;
        for (; i < s.size(); ++i) {
            if (s[i] < '0' || s[i] > '9') throw fail();
            if (++digits > 2) throw InputError("more than two decimal places in '" + std::string(text) + "'");
            frac = frac * 10 + (s[i] - '0');
            any_digit = true;
        }
        if (digits == 1) frac *= 10;
    }
    if (!any_digit) throw fail();
    std::int64_t v = whole * 100 + frac;
    return Cents{negative ? -v : v};
}

std::string Cents::to_string() const {
    std::int64_t a = value_ < 0 ? -value_ : value_;
    std::string out = value_ < 0 ? "-" : "";
    out += std::to_string(a / 100);
    std::int64_t c = a % 100;
    out += '.';
    out += static_cast<char>('0' + c / 10);
    out += static_cast<char>('0' + c % 10);
    return out;
}

} // namespace alphacross
