#pragma once

#include <compare>
#include <cstdint>
#include <string>
#include <string_view>

#include "twin/ledger/types.hpp"

namespace twin::ledger {

/// Fixed-point token quantity in indivisible units (1e-18 of a whole coin or
/// token). Backed by a 128-bit integer so ETH-scale balances do not overflow.
class Amount {
public:
    static constexpr int decimals = 18;

    constexpr Amount() = default;
    constexpr explicit Amount(__int128 units) : units_(units) {}

    static constexpr Amount zero() { return Amount{}; }
    static Amount from_units(std::string_view digits);
    /// Parses a decimal such as "0.235323" or "12" in whole-coin units.
    static Amount from_decimal(std::string_view text);
    /// Accepts either an integer or a digit string of units.
    static Amount from_value(const Value& value);
    static Amount gwei(std::int64_t n);

    constexpr __int128 units() const { return units_; }

    std::string to_string() const;  // integer units
    Value to_value() const { return to_string(); }
    /// Whole-coin decimal rendering with `places` fractional digits (truncated).
    std::string to_decimal(int places = decimals) const;
    /// Whole-coin value as a double, for display and fiat conversion only.
    double to_double() const;

    constexpr Amount operator+(Amount o) const { return Amount{units_ + o.units_}; }
    constexpr Amount operator-(Amount o) const { return Amount{units_ - o.units_}; }
    constexpr Amount operator*(std::int64_t k) const { return Amount{units_ * k}; }
    Amount& operator+=(Amount o) { units_ += o.units_; return *this; }
    Amount& operator-=(Amount o) { units_ -= o.units_; return *this; }
    constexpr auto operator<=>(const Amount&) const = default;

private:
    __int128 units_ = 0;
};

} // namespace twin::ledger
