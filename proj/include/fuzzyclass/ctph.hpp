#ifndef FUZZYCLASS_CTPH_HPP
#define FUZZYCLASS_CTPH_HPP

// Context-triggered piecewise hashing, output-compatible with ssdeep.
//
// A 7-byte rolling hash marks chunk boundaries: at block size b a boundary is
// any position where roll % b == b - 1. Each chunk is summarised by the low six
// bits of an FNV-1 style hash, rendered through the base64 alphabet. All 31
// candidate block sizes (3 * 2^k) are tracked in one pass; the digest picks the
// smallest one whose signature is expected to fit in 64 characters and then
// walks down while the signature stays shorter than 32 characters.

#include <algorithm>
#include <array>
#include <charconv>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>

#include "fuzzyclass/edit_distance.hpp"
#include "fuzzyclass/error.hpp"

namespace fuzzyclass {

namespace ctph {

inline constexpr std::size_t rolling_window = 7;
inline constexpr std::uint64_t min_block_size = 3;
inline constexpr std::size_t signature_length = 64;
inline constexpr std::size_t num_block_hashes = 31;
inline constexpr std::uint32_t hash_prime = 0x01000193;
inline constexpr std::uint32_t hash_init = 0x28021967;
inline constexpr std::string_view alphabet =
    "ABCDEFGHIJKLMNOPQRSTUVWXYZabcdefghijklmnopqrstuvwxyz0123456789+/";

constexpr std::uint64_t block_size_at(std::size_t index) { return min_block_size << index; }

constexpr bool in_alphabet(char c) {
    return (c >= 'A' && c <= 'Z') || (c >= 'a' && c <= 'z') || (c >= '0' && c <= '9') || c == '+' ||
           c == '/';
}

constexpr bool is_valid_block_size(std::uint64_t b) {
    if (b < min_block_size || b % min_block_size != 0) return false;
    const std::uint64_t p = b / min_block_size;
    return (p & (p - 1)) == 0;
}

class RollingHash {
public:
    void update(unsigned char c) {
        h2_ -= h1_;
        h2_ += static_cast<std::uint32_t>(rolling_window) * c;
        h1_ += c;
        h1_ -= window_[n_ % rolling_window];
        window_[n_ % rolling_window] = c;
        ++n_;
        h3_ <<= 5;
        h3_ ^= c;
    }

    std::uint32_t sum() const { return h1_ + h2_ + h3_; }

private:
    std::array<unsigned char, rolling_window> window_{};
    std::uint32_t h1_ = 0, h2_ = 0, h3_ = 0, n_ = 0;
};

constexpr std::uint32_t piece_hash(unsigned char c, std::uint32_t h) {
    return (h * hash_prime) ^ c;
}

} // namespace ctph

/// A parsed CTPH digest, "block_size:sig1:sig2".
struct FuzzyHash {
    std::uint64_t block_size = ctph::min_block_size;
    std::string sig1;
    std::string sig2;

    std::string render() const { return std::to_string(block_size) + ":" + sig1 + ":" + sig2; }

    static FuzzyHash parse(std::string_view text) {
        auto fail = [&](std::string_view why) {
            return Error(ErrorKind::Format, "bad digest '" + std::string(text) + "': " + std::string(why));
        };
        const auto c1 = text.find(':');
        if (c1 == std::string_view::npos || c1 == 0) throw fail("missing block size");
        const auto c2 = text.find(':', c1 + 1);
        if (c2 == std::string_view::npos) throw fail("missing second signature");

        FuzzyHash h;
        const auto bs = text.substr(0, c1);
        auto [p, ec] = std::from_chars(bs.data(), bs.data() + bs.size(), h.block_size);
        if (ec != std::errc{} || p != bs.data() + bs.size()) throw fail("block size is not a number");
        if (!ctph::is_valid_block_size(h.block_size)) throw fail("block size is not 3*2^k");

        h.sig1 = std::string(text.substr(c1 + 1, c2 - c1 - 1));
        h.sig2 = std::string(text.substr(c2 + 1));
        if (h.sig1.size() > ctph::signature_length) throw fail("first signature too long");
        if (h.sig2.size() > ctph::signature_length / 2) throw fail("second signature too long");
        for (char c : h.sig1 + h.sig2)
            if (!ctph::in_alphabet(c)) throw fail("character outside base64 alphabet");
        return h;
    }

    friend bool operator==(const FuzzyHash&, const FuzzyHash&) = default;
};

namespace ctph {

struct BlockHashState {
    std::uint32_t h = hash_init;
    std::uint32_t half_h = hash_init;
    std::array<char, signature_length> digest{};
    char half_digest = 0;
    std::size_t len = 0;
};

/// One-pass engine over all block sizes (the layout of ssdeep's fuzzy_state).
class Engine {
public:
    explicit Engine(std::uint64_t total_size) : total_size_(total_size) {}

    void update(unsigned char c) {
        roll_.update(c);
        const std::uint32_t h = roll_.sum();

        for (std::size_t i = start_; i < end_; ++i) {
            bh_[i].h = piece_hash(c, bh_[i].h);
            bh_[i].half_h = piece_hash(c, bh_[i].half_h);
        }
        if (need_last_hash_) last_h_ = piece_hash(c, last_h_);

        for (std::size_t i = start_; i < end_; ++i) {
            // The rolling sum is tested as (h + 1) % bs to match the
            // reference's 32-bit wrap-around exactly.
            if ((static_cast<std::uint64_t>(h) + 1) % block_size_at(i) != 0) break;
            auto& b = bh_[i];
            if (b.len == 0) try_fork();
            b.digest[b.len] = alphabet[b.h % 64];
            b.half_digest = alphabet[b.half_h % 64];
            if (b.len < signature_length - 1) {
                ++b.len;
                b.digest[b.len] = 0;
                b.h = hash_init;
                if (b.len < signature_length / 2) {
                    b.half_h = hash_init;
                    b.half_digest = 0;
                }
            } else {
                try_reduce();
            }
        }
    }

    FuzzyHash finish() const {
        const std::uint32_t h = roll_.sum();
        std::size_t bi = start_;
        while (block_size_at(bi) * signature_length < total_size_) {
            ++bi;
            if (bi >= num_block_hashes) throw Error(ErrorKind::Usage, "input too large to digest");
        }
        if (bi >= end_) bi = end_ - 1;
        while (bi > start_ && bh_[bi].len < signature_length / 2) --bi;

        FuzzyHash out;
        out.block_size = block_size_at(bi);

        const auto& first = bh_[bi];
        out.sig1.assign(first.digest.data(), first.len);
        if (h != 0)
            out.sig1.push_back(alphabet[first.h % 64]);
        else if (first.len < signature_length && first.digest[first.len] != 0)
            out.sig1.push_back(first.digest[first.len]);

        if (bi < end_ - 1) {
            const auto& second = bh_[bi + 1];
            const std::size_t n = std::min(second.len, signature_length / 2 - 1);
            out.sig2.assign(second.digest.data(), n);
            if (h != 0)
                out.sig2.push_back(alphabet[second.half_h % 64]);
            else if (second.half_digest != 0)
                out.sig2.push_back(second.half_digest);
        } else if (h != 0) {
            out.sig2.push_back(bi == 0 ? alphabet[bh_[bi].h % 64] : alphabet[last_h_ % 64]);
        }
        return out;
    }

private:
    void try_fork() {
        if (end_ < num_block_hashes) {
            const auto& src = bh_[end_ - 1];
            auto& dst = bh_[end_];
            dst.h = src.h;
            dst.half_h = src.half_h;
            dst.digest[0] = 0;
            dst.half_digest = 0;
            dst.len = 0;
            ++end_;
        } else if (end_ == num_block_hashes && !need_last_hash_) {
            need_last_hash_ = true;
            last_h_ = bh_[end_ - 1].h;
        }
    }

    void try_reduce() {
        if (end_ - start_ < 2) return;
        if (block_size_at(start_) * signature_length >= total_size_) return;
        if (bh_[start_ + 1].len < signature_length / 2) return;
        ++start_;
    }

    RollingHash roll_;
    std::array<BlockHashState, num_block_hashes> bh_{};
    std::size_t start_ = 0;
    std::size_t end_ = 1;
    std::uint64_t total_size_;
    std::uint32_t last_h_ = 0;
    bool need_last_hash_ = false;
};

} // namespace ctph

inline FuzzyHash digest(std::span<const unsigned char> data) {
    ctph::Engine engine(data.size());
    for (unsigned char c : data) engine.update(c);
    return engine.finish();
}

inline FuzzyHash digest(std::string_view text) {
    return digest(std::span(reinterpret_cast<const unsigned char*>(text.data()), text.size()));
}

/// Truncates every run of more than three identical characters to three.
inline std::string normalize_signature(std::string_view s) {
    std::string out;
    out.reserve(s.size());
    for (std::size_t i = 0; i < s.size(); ++i) {
        if (i >= 3 && s[i] == s[i - 1] && s[i] == s[i - 2] && s[i] == s[i - 3]) continue;
        out.push_back(s[i]);
    }
    return out;
}

/// True when a and b share a substring of exactly `ctph::rolling_window` characters.
inline bool has_common_substring(std::string_view a, std::string_view b) {
    constexpr std::size_t w = ctph::rolling_window;
    if (a.size() < w || b.size() < w) return false;
    for (std::size_t i = 0; i + w <= a.size(); ++i)
        if (b.find(a.substr(i, w)) != std::string_view::npos) return true;
    return false;
}

/// Distance used inside the 0-100 score. `reference` reproduces ssdeep's
/// scores; `osa` plugs in the transposition-aware recurrence instead.
enum class ScoreDistance { reference, osa };

/// Score of two normalized signatures computed at the same block size.
inline int score_signatures(std::string_view a, std::string_view b, std::uint64_t block_size,
                            ScoreDistance metric = ScoreDistance::reference) {
    if (a.size() > ctph::signature_length || b.size() > ctph::signature_length) return 0;
    if (!has_common_substring(a, b)) return 0;

    const std::uint64_t raw = metric == ScoreDistance::reference ? indel_distance(a, b) : osa_distance(a, b);
    std::uint64_t scaled = raw * ctph::signature_length / (a.size() + b.size());
    scaled = 100 * scaled / ctph::signature_length;
    if (scaled >= 100) return 0;
    std::uint64_t score = 100 - scaled;

    // Small block sizes produce short, easily matched signatures; cap them.
    constexpr std::uint64_t uncapped_from =
        (99 + ctph::rolling_window) / ctph::rolling_window * ctph::min_block_size;
    if (block_size >= uncapped_from) return static_cast<int>(score);
    const std::uint64_t cap = block_size / ctph::min_block_size * std::min(a.size(), b.size());
    return static_cast<int>(std::min(score, cap));
}

/// Similarity of two digests on a 0-100 scale; 0 for incomparable block sizes.
inline int compare(const FuzzyHash& a, const FuzzyHash& b, ScoreDistance metric = ScoreDistance::reference) {
    const std::uint64_t ba = a.block_size;
    const std::uint64_t bb = b.block_size;
    if (ba != bb && ba * 2 != bb && !(ba % 2 == 0 && ba / 2 == bb)) return 0;

    const std::string a1 = normalize_signature(a.sig1);
    const std::string a2 = normalize_signature(a.sig2);
    const std::string b1 = normalize_signature(b.sig1);
    const std::string b2 = normalize_signature(b.sig2);

    // Identical digests are a full match, but only when there is a signature
    // long enough to pass the common-substring gate.
    if (ba == bb && a1 == b1 && a2 == b2 &&
        std::max(a1.size(), a2.size()) >= ctph::rolling_window)
        return 100;

    if (ba == bb)
        return std::max(score_signatures(a1, b1, ba, metric), score_signatures(a2, b2, ba * 2, metric));
    if (ba * 2 == bb) return score_signatures(b1, a2, bb, metric);
    return score_signatures(a1, b2, ba, metric);
}

} // namespace fuzzyclass

#endif // FUZZYCLASS_CTPH_HPP
