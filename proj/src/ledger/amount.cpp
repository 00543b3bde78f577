#include "twin/ledger/amount.hpp"

#include <algorithm>

namespace twin::ledger {

namespace {

__int128 parse_digits(std::string_view digits, std::string_view what) {
    if (digits.empty()) throw LedgerError(Errc::Malformed, std::string(what) + ": empty amount");
    __int128 v = 0;
    for (char c : digits) {
        if (c < '0' || c > '9') throw LedgerError(Errc::Malformed, std::string(what) + ": bad digit in amount");
        v = v * 10 + (c - '0');
    }
    return v;
}

} // namespace

Amount Amount::from_units(std::string_view digits) {
    bool negative = !digits.empty() && digits.front() == '-';
    if (negative) digits.remove_prefix(1);
    __int128 v = parse_digits(digits, "units");
    return Amount{negative ? -v : v};
}

Amount Amount::from_decimal(std::string_view text) {
    bool negative = !text.empty() && text.front() == '-';
    if (negative) text.remove_prefix(1);
    auto dot = text.find('.');
    std::string_view whole = text.substr(0, dot);
    std::string_view frac = dot == std::string_view::npos ? std::string_view{} : text.substr(dot + 1);
    if (frac.size() > static_cast<std::size_t>(decimals)) {
        throw LedgerError(Errc::Malformed, "more than 18 fractional digits");
    }
    __int128 v = parse_digits(whole.empty() ? "0" : whole, "decimal");
    std::string padded(frac);
    padded.append(static_cast<std::size_t>(decimals) - frac.size(), '0');
    for (int i = 0; i < decimals; ++i) v *= 10;
    v += parse_digits(padded, "decimal");
    return Amount{negative ? -v : v};
}

Amount Amount::from_value(const Value& value) {
    if (value.is_number_integer()) return Amount{static_cast<__int128>(value.get<std::int64_t>())};
    if (value.is_string()) return from_units(value.get_ref<const std::string&>());
    throw LedgerError(Errc::Malformed, "amount must be an integer or digit string");
}

Amount Amount::gwei(std::int64_t n) {
    return Amount{static_cast<__int128>(n) * 1'000'000'000};
}

std::string Amount::to_string() const {
    if (units_ == 0) return "0";
    __int128 v = units_ < 0 ? -units_ : units_;
    std::string out;
    while (v > 0) {
        out.push_back(static_cast<char>('0' + static_cast<int>(v % 10)));
        v /= 10;
    }
    if (units_ < 0) out.push_back('-');
    std::reverse(out.begin(), out.end());
    return out;
}

std::string Amount::to_decimal(int places) const {
    std::string digits = (units_ < 0 ? Amount{-units_} : *this).to_string();
    if (digits.size() <= static_cast<std::size_t>(decimals)) {
        digits.insert(0, static_cast<std::size_t>(decimals) + 1 - digits.size(), '0');
    }
    std::string whole = digits.substr(0, digits.size() - decimals);
    std::string frac = digits.substr(digits.size() - decimals, static_cast<std::size_t>(std::clamp(places, 0, decimals)));
    std::string out = (units_ < 0 ? "-" : "") + whole;
    if (!frac.empty()) out += "." + frac;
    return out;
}

double Amount::to_double() const {
    return static_cast<double>(units_) / 1e18;
}

} // namespace twin::ledger
