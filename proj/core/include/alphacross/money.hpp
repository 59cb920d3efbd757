#pragma once

#include <compare>
#include <cstdint>
#include <string>
#include <string_view>

namespace alphacross {

/// Signed dollar amount held as an exact count of cents.
class Cents {
public:
    constexpr Cents() = default;
    constexpr explicit Cents(std::int64_t cents) : value_(cents) {}

    static constexpr Cents from_dollars(std::int64_t dollars) { return Cents{dollars * 100}; }

    /// Parses a signed decimal dollar string with at most two fractional digits
    /// ("1000000", "-200000.5", "+12.34"). Throws InputError otherwise.
    static Cents parse(std::string_view text);

    constexpr std::int64_t count() const { return value_; }
    constexpr double dollars() const { return static_cast<double>(value_) / 100.0; }

    /// Canonical decimal form, e.g. "-1234.05".
    std::string to_string() const;

    constexpr Cents abs() const { return Cents{value_ < 0 ? -value_ : value_}; }
    constexpr Cents positive_part() const { return Cents{value_ > 0 ? value_ : 0}; }
    constexpr Cents negative_part() const { return Cents{value_ < 0 ? -value_ : 0}; }

    constexpr Cents operator-() const { return Cents{-value_}; }
    constexpr Cents& operator+=(Cents o) { value_ += o.value_; return *this; }
    constexpr Cents& operator-=(Cents o) { value_ -= o.value_; return *this; }
    friend constexpr Cents operator+(Cents a, Cents b) { return Cents{a.value_ + b.value_}; }
    friend constexpr Cents operator-(Cents a, Cents b) { return Cents{a.value_ - b.value_}; }
    friend constexpr Cents operator*(Cents a, std::int64_t k) { return Cents{a.value_ * k}; }
    friend constexpr auto operator<=>(Cents, Cents) = default;

private:
    std::int64_t value_ = 0;
};

constexpr Cents min(Cents a, Cents b) { return a < b ? a : b; }

/// Exact ratio of two cent amounts as a double (denominator must be non-zero).
inline double ratio(Cents num, Cents den) {
    return static_cast<double>(num.count()) / static_cast<double>(den.count());
}

} // namespace alphacross
