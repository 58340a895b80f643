#pragma once

// Bit-packed vectors over Z/2.

#include <bit>
#include <cstdint>
#include <vector>

namespace qph {

class BitVector {
public:
    BitVector() = default;
    explicit BitVector(std::size_t size) : size_(size), words_((size + 63) / 64, 0) {}

    std::size_t size() const { return size_; }

    void set(std::size_t i) { words_[i >> 6] |= std::uint64_t{1} << (i & 63); }
    void flip(std::size_t i) { words_[i >> 6] ^= std::uint64_t{1} << (i & 63); }
    bool test(std::size_t i) const { return (words_[i >> 6] >> (i & 63)) & 1u; }

    BitVector &operator^=(const BitVector &other) {
        for (std::size_t w = 0; w < words_.size(); ++w) words_[w] ^= other.words_[w];
        return *this;
    }

    bool none() const {
        for (auto w : words_) {
            if (w) return false;
        }
        return true;
    }

    /// Index of the highest set bit, or -1 if empty.
    long highest() const {
        for (std::size_t w = words_.size(); w-- > 0;) {
            if (words_[w]) return static_cast<long>(w * 64 + 63 - static_cast<std::size_t>(std::countl_zero(words_[w])));
        }
        return -1;
    }

    /// Index of the lowest set bit, or -1 if empty.
    long lowest() const {
        for (std::size_t w = 0; w < words_.size(); ++w) {
            if (words_[w]) return static_cast<long>(w * 64 + static_cast<std::size_t>(std::countr_zero(words_[w])));
        }
        return -1;
    }

private:
    std::size_t size_ = 0;
    std::vector<std::uint64_t> words_;
};

/// Rank of a set of row vectors by forward elimination.
inline std::size_t gf2_rank(std::vector<BitVector> rows) {
    std::size_t rank = 0;
    for (std::size_t r = 0; r < rows.size(); ++r) {
        const long pivot = rows[r].lowest();
        if (pivot < 0) continue;
        ++rank;
        for (std::size_t s = r + 1; s < rows.size(); ++s) {
            if (rows[s].test(static_cast<std::size_t>(pivot))) rows[s] ^= rows[r];
        }
    }
    return rank;
}

}  // namespace qph
