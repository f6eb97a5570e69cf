#include <gtest/gtest.h>

#include <random>

#include "bron/cpe.hpp"
#include "bron/version.hpp"

using namespace bron;

namespace {

ErrorCode parse_error(std::string_view text) {
    try {
        parse_cpe23(text);
    } catch (const Error& e) {
        return e.code();
    }
    ADD_FAILURE() << "parsed: " << text;
    return ErrorCode::InvalidArgument;
}

} // namespace

TEST(Cpe, ParsesChromeWildcardName) {
    const auto n = parse_cpe23("cpe:2.3:a:google:chrome:*:*:*:*:*:*:*:*");
    EXPECT_EQ(n.part(), CpeAttribute::value("a"));
    EXPECT_EQ(n.vendor(), CpeAttribute::value("google"));
    EXPECT_EQ(n.product(), CpeAttribute::value("chrome"));
    EXPECT_TRUE(n.version().is_any());
    EXPECT_EQ(vendor_product(n), std::make_pair(std::string("google"), std::string("chrome")));
}

TEST(Cpe, AllWildcards) {
    const auto n = parse_cpe23("cpe:2.3:*:*:*:*:*:*:*:*:*:*:*");
    for (const auto& f : n.fields) EXPECT_TRUE(f.is_any());
    EXPECT_THROW(
        {
            try {
                vendor_product(n);
            } catch (const Error& e) {
                EXPECT_EQ(e.code(), ErrorCode::WildcardVendorProduct);
                throw;
            }
        },
        Error);
}

TEST(Cpe, UnescapesValuesAndKeepsNa) {
    const auto n = parse_cpe23(R"(cpe:2.3:a:acme:my\*tool:1.0:-:*:*:*:*:*:*)");
    EXPECT_EQ(n.product(), CpeAttribute::value("my*tool"));
    EXPECT_TRUE(n[CpeName::Update].is_na());
    EXPECT_EQ(vendor_product(n), std::make_pair(std::string("acme"), std::string("my*tool")));
    EXPECT_EQ(serialize(n), R"(cpe:2.3:a:acme:my\*tool:1.0:-:*:*:*:*:*:*)");
}

TEST(Cpe, EscapedColonStaysInsideField) {
    const auto n = parse_cpe23(R"(cpe:2.3:a:acme:a\:b:2\.0:*:*:*:*:*:*:*)");
    EXPECT_EQ(n.product().text(), "a:b");
    EXPECT_EQ(n.version().text(), "2.0");
    EXPECT_EQ(serialize(n), R"(cpe:2.3:a:acme:a\:b:2.0:*:*:*:*:*:*:*)");
}

TEST(Cpe, EscapedWildcardCharactersAreValues) {
    const auto n = parse_cpe23(R"(cpe:2.3:a:acme:\*:\-:*:*:*:*:*:*:*)");
    EXPECT_EQ(n.product(), CpeAttribute::value("*"));
    EXPECT_EQ(n.version(), CpeAttribute::value("-"));
    EXPECT_EQ(parse_cpe23(serialize(n)), n);
}

TEST(Cpe, CanonicalFormIsLowercase) {
    EXPECT_EQ(canonical_cpe("cpe:2.3:a:Google:Chrome:10.0:*:*:*:*:*:*:*"), "cpe:2.3:a:google:chrome:10.0:*:*:*:*:*:*:*");
}

TEST(Cpe, Errors) {
    EXPECT_EQ(parse_error("cpe:/a:google:chrome"), ErrorCode::Malformed);
    EXPECT_EQ(parse_error("cpe:2.3:a:google:chrome"), ErrorCode::Malformed);
    EXPECT_EQ(parse_error("cpe:2.2:a:google:chrome:*:*:*:*:*:*:*:*"), ErrorCode::Malformed);
    EXPECT_EQ(parse_error("cpx:2.3:a:google:chrome:*:*:*:*:*:*:*:*"), ErrorCode::Malformed);
    EXPECT_EQ(parse_error("cpe:2.3:a:google:chrome:*:*:*:*:*:*:*:*:*"), ErrorCode::Malformed);
    EXPECT_EQ(parse_error("cpe:2.3:x:google:chrome:*:*:*:*:*:*:*:*"), ErrorCode::Malformed);
    EXPECT_EQ(parse_error("cpe:2.3:a:google:chrome:*:*:*:*:*:*:*:\\"), ErrorCode::BadEscape);
    EXPECT_EQ(parse_error("cpe:2.3:a::chrome:*:*:*:*:*:*:*:*"), ErrorCode::EmptyField);
    EXPECT_EQ(parse_error(""), ErrorCode::Malformed);
}

TEST(CpeProperty, RoundTripIsAFixedPoint) {
    std::mt19937_64 rng(2020);
    const std::string alphabet = "abcxyz09._-*?:\\!~";
    std::uniform_int_distribution<std::size_t> len(1, 8);
    std::uniform_int_distribution<std::size_t> ch(0, alphabet.size() - 1);
    std::uniform_int_distribution<int> kind(0, 5);
    for (int i = 0; i < 10000; ++i) {
        CpeName n;
        n.fields[CpeName::Part] = CpeAttribute::value(std::string(1, "aoh"[i % 3]));
        for (std::size_t f = 1; f < CpeName::kFieldCount; ++f) {
            const int k = kind(rng);
            if (k == 0) {
                n.fields[f] = CpeAttribute::any();
            } else if (k == 1) {
                n.fields[f] = CpeAttribute::na();
            } else {
                std::string s;
                for (std::size_t j = len(rng); j > 0; --j) s.push_back(alphabet[ch(rng)]);
                n.fields[f] = CpeAttribute::value(s);
            }
        }
        const auto text = serialize(n);
        const auto back = parse_cpe23(text);
        ASSERT_EQ(back, n) << text;
        ASSERT_EQ(serialize(back), text);
    }
}

TEST(CpeProperty, SingleValueEscaping) {
    std::mt19937_64 rng(5);
    const std::string alphabet = "abcdefXYZ.*:";
    for (int i = 0; i < 2000; ++i) {
        std::string s;
        for (auto n = std::uniform_int_distribution<int>(1, 10)(rng); n > 0; --n) {
            s.push_back(alphabet[std::uniform_int_distribution<std::size_t>(0, alphabet.size() - 1)(rng)]);
        }
        const auto v = CpeAttribute::value(s);
        const std::string text = "cpe:2.3:a:v:" + format_cpe_attribute(v) + ":*:*:*:*:*:*:*:*";
        EXPECT_EQ(parse_cpe23(text).product(), v) << text;
    }
}

TEST(Version, Examples) {
    EXPECT_EQ(compare_versions("10.0.648.126", "10.0.648.127"), std::strong_ordering::less);
    EXPECT_EQ(compare_versions("1.0", "1.0"), std::strong_ordering::equal);
    EXPECT_EQ(compare_versions("1.10", "1.9"), std::strong_ordering::greater);
    EXPECT_EQ(compare_versions("1.0", "1.0.1"), std::strong_ordering::less);
    EXPECT_EQ(compare_versions("2", "10"), std::strong_ordering::less);
    EXPECT_EQ(compare_versions("1.0", "1.0a"), std::strong_ordering::less);
    EXPECT_EQ(compare_versions("rc2", "rc10"), std::strong_ordering::less);
    EXPECT_EQ(compare_versions("1.01", "1.1"), std::strong_ordering::equal);
    EXPECT_EQ(compare_versions("", "0"), std::strong_ordering::less);
}

TEST(VersionProperty, TotalOrderOnRandomTriples) {
    std::mt19937_64 rng(99);
    const std::string alphabet = "0123456789.ab-";
    const auto random_version = [&] {
        std::string s;
        for (auto n = std::uniform_int_distribution<int>(0, 7)(rng); n > 0; --n) {
            s.push_back(alphabet[std::uniform_int_distribution<std::size_t>(0, alphabet.size() - 1)(rng)]);
        }
        return s;
    };
    for (int i = 0; i < 10000; ++i) {
        const auto a = random_version(), b = random_version(), c = random_version();
        const auto ab = compare_versions(a, b), ba = compare_versions(b, a);
        EXPECT_EQ(compare_versions(a, a), std::strong_ordering::equal);
        EXPECT_EQ(ab == 0, ba == 0);
        EXPECT_EQ(ab < 0, ba > 0);
        if (ab <= 0 && compare_versions(b, c) <= 0) {
            EXPECT_TRUE(compare_versions(a, c) <= 0) << a << " " << b << " " << c;
        }
    }
}
