#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace hgtidf::detail {

inline constexpr std::array<std::string_view, 20> kSmallNumbers = {
    "zero",    "one",     "two",       "three",    "four",    "five",    "six",
    "seven",   "eight",   "nine",      "ten",      "eleven",  "twelve",  "thirteen",
    "fourteen", "fifteen", "sixteen",  "seventeen", "eighteen", "nineteen"};

inline constexpr std::array<std::string_view, 10> kTens = {
    "", "", "twenty", "thirty", "forty", "fifty", "sixty", "seventy", "eighty", "ninety"};

inline constexpr std::array<std::string_view, 7> kScales = {
    "", "thousand", "million", "billion", "trillion", "quadrillion", "quintillion"};

/// Parses a string of ASCII digits into an unsigned 64-bit value; nullopt on
/// empty input, any non-digit or overflow.
inline std::optional<std::uint64_t> parse_unsigned(std::string_view digits)
{
    if (digits.empty()) {
        return std::nullopt;
    }
    std::uint64_t value = 0;
    for (char c : digits) {
        if (c < '0' || c > '9') {
            return std::nullopt;
        }
        auto const d = static_cast<std::uint64_t>(c - '0');
        if (value > (UINT64_MAX - d) / 10) {
            return std::nullopt;
        }
        value = value * 10 + d;
    }
    return value;
}

inline void append_below_thousand(std::uint64_t v, std::vector<std::string>& out)
{
    if (v >= 100) {
        out.emplace_back(kSmallNumbers[v / 100]);
        out.emplace_back("hundred");
        v %= 100;
        if (v == 0) {
            return;
        }
    }
    if (v < 20) {
        out.emplace_back(kSmallNumbers[v]);
        return;
    }
    out.emplace_back(kTens[v / 10]);
    if (v % 10 != 0) {
        out.emplace_back(kSmallNumbers[v % 10]);
    }
}

/// English words for a nonnegative integer, one word per element:
/// 21 -> {"twenty", "one"}, 1005 -> {"one", "thousand", "five"}.
inline std::vector<std::string> number_to_words(std::uint64_t value)
{
    std::vector<std::string> out;
    if (value == 0) {
        out.emplace_back(kSmallNumbers[0]);
        return out;
    }
    std::array<std::uint64_t, kScales.size()> groups{};
    std::size_t used = 0;
    while (value > 0) {
        groups[used++] = value % 1000;
        value /= 1000;
    }
    for (std::size_t g = used; g-- > 0;) {
        if (groups[g] == 0) {
            continue;
        }
        append_below_thousand(groups[g], out);
        if (g > 0) {
            out.emplace_back(kScales[g]);
        }
    }
    return out;
}

}  // namespace hgtidf::detail
