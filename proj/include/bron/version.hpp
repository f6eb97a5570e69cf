#pragma once

#include <compare>
#include <cstddef>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace bron {

/// Sort key for dotted version strings.
///
/// The text is split on '.'; each segment is further split into runs of
/// digits and runs of non-digits. Digit runs compare numerically (leading
/// zeros ignored, no width limit), other runs compare byte-wise, and a digit
/// run sorts before a non-digit run at the same position. Within a segment
/// and across segments, a shorter sequence that is a prefix of a longer one
/// sorts first. "1.10" > "1.9", "1.0" < "1.0a" < "1.0b", "rc2" < "rc10".
class VersionKey {
public:
    struct Number {
        std::string digits;  // no leading zeros; "" means zero
        auto operator<=>(const Number& other) const {
            if (auto c = digits.size() <=> other.digits.size(); c != 0) return c;
            return digits.compare(other.digits) <=> 0;
        }
        bool operator==(const Number&) const = default;
    };
    struct Text {
        std::string text;
        auto operator<=>(const Text& other) const { return text.compare(other.text) <=> 0; }
        bool operator==(const Text&) const = default;
    };
    // Number precedes Text through variant index ordering.
    using Run = std::variant<Number, Text>;
    using Segment = std::vector<Run>;

    VersionKey() = default;

    explicit VersionKey(std::string_view version) {
        std::size_t start = 0;
        while (true) {
            const auto dot = version.find('.', start);
            const auto piece = version.substr(start, dot == std::string_view::npos ? dot : dot - start);
            segments_.push_back(split_runs(piece));
            if (dot == std::string_view::npos) break;
            start = dot + 1;
        }
    }

    const std::vector<Segment>& segments() const { return segments_; }

    std::strong_ordering operator<=>(const VersionKey& other) const {
        return compare_seq(segments_, other.segments_, [](const Segment& a, const Segment& b) {
            return compare_seq(a, b, [](const Run& x, const Run& y) { return x <=> y; });
        });
    }
    bool operator==(const VersionKey& other) const { return (*this <=> other) == 0; }

private:
    template <typename T, typename Cmp>
    static std::strong_ordering compare_seq(const std::vector<T>& a, const std::vector<T>& b, Cmp cmp) {
        const std::size_t n = a.size() < b.size() ? a.size() : b.size();
        for (std::size_t i = 0; i < n; ++i) {
            if (auto c = cmp(a[i], b[i]); c != 0) return c;
        }
        return a.size() <=> b.size();
    }

    static bool is_digit(char c) { return c >= '0' && c <= '9'; }

    static Segment split_runs(std::string_view piece) {
        Segment runs;
        std::size_t i = 0;
        while (i < piece.size()) {
            const bool digit = is_digit(piece[i]);
            std::size_t j = i;
            while (j < piece.size() && is_digit(piece[j]) == digit) ++j;
            auto run = piece.substr(i, j - i);
            if (digit) {
                const auto nz = run.find_first_not_of('0');
                runs.emplace_back(Number{nz == std::string_view::npos ? std::string() : std::string(run.substr(nz))});
            } else {
                runs.emplace_back(Text{std::string(run)});
            }
            i = j;
        }
        return runs;
    }

    std::vector<Segment> segments_;
};

/// Total preorder over arbitrary version strings (see VersionKey).
inline std::strong_ordering compare_versions(std::string_view a, std::string_view b) {
    return VersionKey(a) <=> VersionKey(b);
}

} // namespace bron
