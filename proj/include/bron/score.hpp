#pragma once

#include <charconv>
#include <cmath>
#include <compare>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

namespace bron {

/// CVSS severity in tenths of a point. Sums of scores stay exact.
class Score {
public:
    constexpr Score() = default;
    static constexpr Score from_tenths(std::int64_t tenths) { return Score(tenths); }

    /// Rounds to the nearest tenth, halves away from zero.
    static Score from_double(double value) { return Score(static_cast<std::int64_t>(std::llround(value * 10.0))); }

    /// Parses "7", "7.5", "7.50". Returns nullopt for anything else,
    /// including negative values.
    static std::optional<Score> parse(std::string_view text) {
        if (text.empty()) return std::nullopt;
        double value = 0;
        const auto* end = text.data() + text.size();
        auto [ptr, ec] = std::from_chars(text.data(), end, value);
        if (ec != std::errc() || ptr != end || !(value >= 0.0) || value > 1e12) return std::nullopt;
        return from_double(value);
    }

    constexpr std::int64_t tenths() const { return tenths_; }
    double value() const { return static_cast<double>(tenths_) / 10.0; }

    /// Always one decimal: "6.8", "10.0", "0.0".
    std::string to_string() const {
        const auto whole = tenths_ / 10;
        const auto frac = tenths_ % 10;
        return std::to_string(whole) + "." + std::to_string(frac < 0 ? -frac : frac);
    }

    constexpr Score& operator+=(Score other) {
        tenths_ += other.tenths_;
        return *this;
    }
    friend constexpr Score operator+(Score a, Score b) { return a += b; }
    friend constexpr auto operator<=>(Score, Score) = default;

private:
    constexpr explicit Score(std::int64_t tenths) : tenths_(tenths) {}
    std::int64_t tenths_ = 0;
};

} // namespace bron
