#include <gtest/gtest.h>

#include <random>
#include <string>
#include <vector>

#include "fuzzyclass/ctph.hpp"
#include "fuzzyclass/error.hpp"
#include "oracles.hpp"

using namespace fuzzyclass;

namespace {

std::vector<unsigned char> random_bytes(std::mt19937_64& g, std::size_t n) {
    std::vector<unsigned char> v(n);
    for (auto& b : v) b = static_cast<unsigned char>(g());
    return v;
}

// Text-like data triggers far more often than uniform bytes at small block sizes.
std::vector<unsigned char> random_text(std::mt19937_64& g, std::size_t n) {
    static const std::string alpha = "etaoin shrdlu\nETAOIN_0123";
    std::vector<unsigned char> v(n);
    for (auto& b : v) b = static_cast<unsigned char>(alpha[g() % alpha.size()]);
    return v;
}

std::uint64_t starting_block_size(std::size_t n) {
    std::uint64_t b = 3;
    while (b * 64 < n) b *= 2;
    return b;
}

} // namespace

TEST(Digest, KnownVectors) {
    EXPECT_EQ(digest(std::string_view("")).render(), "3::");
    EXPECT_EQ(digest(std::string_view("abcdefghijklmnopqrstuvwxyz")).render(), "3:u+6LO5Sfn:u+6LO5Sfn");
}

TEST(Digest, DeterministicAndParsable) {
    std::mt19937_64 g(1);
    const auto data = random_bytes(g, 65536);
    const auto a = digest(data);
    EXPECT_EQ(a, digest(data));
    EXPECT_EQ(FuzzyHash::parse(a.render()), a);
}

TEST(Digest, MatchesClassicHalvingAlgorithm) {
    std::mt19937_64 g(2024);
    for (int i = 0; i < 600; ++i) {
        const std::size_t n = static_cast<std::size_t>(g() % 20000);
        const auto data = (i % 2) ? random_bytes(g, n) : random_text(g, n);
        ASSERT_EQ(digest(data).render(), oracle::classic_ctph(data)) << "case " << i << " size " << n;
    }
}

TEST(Digest, BlockSizeAndLengthBounds) {
    std::mt19937_64 g(5);
    for (int i = 0; i < 300; ++i) {
        const std::size_t n = static_cast<std::size_t>(g() % 50000);
        const auto data = (i % 3) ? random_bytes(g, n) : random_text(g, n);
        const auto h = digest(data);
        ASSERT_TRUE(ctph::is_valid_block_size(h.block_size));
        ASSERT_LE(h.block_size, starting_block_size(n));
        ASSERT_LE(h.sig1.size(), 64u);
        ASSERT_LE(h.sig2.size(), 32u);
        if (h.block_size > 3) ASSERT_GE(h.sig1.size(), 32u);
    }
}

TEST(FuzzyHashParse, RoundTripAndRejections) {
    const auto h = FuzzyHash::parse("96:abc+/Z09:xy");
    EXPECT_EQ(h.block_size, 96u);
    EXPECT_EQ(h.sig1, "abc+/Z09");
    EXPECT_EQ(h.sig2, "xy");
    EXPECT_EQ(h.render(), "96:abc+/Z09:xy");
    EXPECT_EQ(FuzzyHash::parse("3::").render(), "3::");

    for (const char* bad : {"", "3", "3:abc", ":a:b", "x:a:b", "5:a:b", "0:a:b", "3:a!:b", "3:a:b:c", "-3:a:b"}) {
        try {
            FuzzyHash::parse(bad);
            ADD_FAILURE() << "accepted " << bad;
        } catch (const Error& e) {
            EXPECT_EQ(e.kind(), ErrorKind::Format) << bad;
        }
    }
    EXPECT_THROW(FuzzyHash::parse("3:" + std::string(65, 'a') + ":b"), Error);
    EXPECT_THROW(FuzzyHash::parse("3:a:" + std::string(33, 'b')), Error);
}

TEST(NormalizeSignature, Examples) {
    EXPECT_EQ(normalize_signature("aaaab"), "aaab");
    EXPECT_EQ(normalize_signature("abc"), "abc");
    EXPECT_EQ(normalize_signature("aaaaaabbbb"), "aaabbb");
    EXPECT_EQ(normalize_signature(""), "");
    EXPECT_EQ(normalize_signature("aaabaaa"), "aaabaaa");
}

TEST(Compare, IdentityAndIncomparable) {
    const auto h = FuzzyHash::parse("24:abcdefgh:abcdefgh");
    EXPECT_EQ(compare(h, h), 100);
    EXPECT_EQ(compare(FuzzyHash::parse("3:abcdefghij:abcd"), FuzzyHash::parse("24:abcdefghij:abcd")), 0);
    EXPECT_EQ(compare(FuzzyHash::parse("3:abc:def"), FuzzyHash::parse("3:abc:def")), 0);
    EXPECT_EQ(compare(FuzzyHash::parse("3::"), FuzzyHash::parse("3::")), 0);
}

TEST(Compare, NoCommonSubstringScoresZero) {
    EXPECT_EQ(compare(FuzzyHash::parse("48:abcdefghijk:abc"), FuzzyHash::parse("48:abcdefXhijk:xyz")), 0);
    EXPECT_GT(compare(FuzzyHash::parse("48:abcdefghijk:abc"), FuzzyHash::parse("48:abcdefghXjk:xyz")), 0);
}

TEST(Compare, AdjacentBlockSizesUseSharedSignature) {
    // a.sig2 is at block size 96, the same as b.sig1.
    const auto a = FuzzyHash::parse("48:zzzzzzzzzz:ABCDEFGHIJKL");
    const auto b = FuzzyHash::parse("96:ABCDEFGHIJKL:qq");
    EXPECT_EQ(compare(a, b), 100);
    EXPECT_EQ(compare(b, a), 100);
}

TEST(Compare, SmallBlockSizeCap) {
    const auto a = FuzzyHash::parse("3:ABCDEFGHIJ:");
    const auto b = FuzzyHash::parse("3:ABCDEFGHIK:");
    // indel distance 2 over 20 chars scores 91, capped at 3/3 * 10.
    EXPECT_EQ(compare(a, b), 10);
    EXPECT_EQ(compare(a, b, ScoreDistance::osa), 10);
    const auto c = FuzzyHash::parse("96:ABCDEFGHIJ:");
    const auto d = FuzzyHash::parse("96:ABCDEFGHIK:");
    EXPECT_EQ(compare(c, d), 91);
    EXPECT_EQ(compare(c, d, ScoreDistance::osa), 96);
}

TEST(Compare, PropertiesOnRealDigests) {
    std::mt19937_64 g(9);
    std::vector<FuzzyHash> hs;
    for (int i = 0; i < 40; ++i) {
        auto base = random_text(g, 4000 + (g() % 4000));
        hs.push_back(digest(base));
        for (int k = 0; k < 3; ++k) base[g() % base.size()] ^= 0x5a;
        hs.push_back(digest(base));
    }
    for (const auto& a : hs) {
        if (std::max(a.sig1.size(), a.sig2.size()) >= 7) EXPECT_EQ(compare(a, a), 100);
        for (const auto& b : hs) {
            const int s = compare(a, b);
            ASSERT_GE(s, 0);
            ASSERT_LE(s, 100);
            ASSERT_EQ(s, compare(b, a));
        }
    }
}

TEST(Compare, LocalEditKeepsHighScore) {
    std::mt19937_64 g(11);
    auto data = random_bytes(g, 65536);
    const auto before = digest(data);
    data[30000] ^= 0xff;
    const auto after = digest(data);
    EXPECT_NE(before, after);
    EXPECT_GE(compare(before, after), 80);
}
