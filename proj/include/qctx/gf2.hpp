#pragma once

// Bit-packed vectors and matrices over GF(2).

#include <bit>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace qctx {

class BitVector {
public:
    BitVector() = default;
    explicit BitVector(std::size_t size) : size_(size), words_((size + 63) / 64, 0) {}

    std::size_t size() const { return size_; }
    std::size_t word_count() const { return words_.size(); }

    bool get(std::size_t i) const { return (words_[i >> 6] >> (i & 63)) & 1; }
    void set(std::size_t i, bool v = true) {
        const std::uint64_t m = std::uint64_t{1} << (i & 63);
        if (v) words_[i >> 6] |= m; else words_[i >> 6] &= ~m;
    }
    void flip(std::size_t i) { words_[i >> 6] ^= std::uint64_t{1} << (i & 63); }
    void clear() { std::fill(words_.begin(), words_.end(), 0); }

    std::size_t count() const {
        std::size_t c = 0;
        for (std::uint64_t w : words_) c += static_cast<std::size_t>(std::popcount(w));
        return c;
    }
    bool none() const {
        for (std::uint64_t w : words_) if (w) return false;
        return true;
    }
    /// Index of the lowest set bit, or size() if none.
    std::size_t first() const {
        for (std::size_t w = 0; w < words_.size(); ++w) {
            if (words_[w]) return w * 64 + static_cast<std::size_t>(std::countr_zero(words_[w]));
        }
        return size_;
    }
    /// Lowest set bit with index >= from, or size() if none.
    std::size_t next(std::size_t from) const;

    BitVector& operator^=(const BitVector& o) {
        for (std::size_t w = 0; w < words_.size(); ++w) words_[w] ^= o.words_[w];
        return *this;
    }
    friend BitVector operator^(BitVector a, const BitVector& b) { return a ^= b; }
    friend bool operator==(const BitVector&, const BitVector&) = default;

    /// Parity of the dot product with another vector of the same size.
    bool dot(const BitVector& o) const {
        std::uint64_t acc = 0;
        for (std::size_t w = 0; w < words_.size(); ++w) acc ^= words_[w] & o.words_[w];
        return std::popcount(acc) & 1;
    }
    std::size_t distance(const BitVector& o) const {
        std::size_t c = 0;
        for (std::size_t w = 0; w < words_.size(); ++w) c += static_cast<std::size_t>(std::popcount(words_[w] ^ o.words_[w]));
        return c;
    }

    std::span<std::uint64_t> words() { return words_; }
    std::span<const std::uint64_t> words() const { return words_; }

    /// '0'/'1' string, index 0 first.
    std::string to_string() const;
    static BitVector from_string(std::string_view s);

private:
    std::size_t size_ = 0;
    std::vector<std::uint64_t> words_;
};

/// Dense row-major bit matrix; each row is a BitVector of width cols().
class BitMatrix {
public:
    BitMatrix() = default;
    BitMatrix(std::size_t rows, std::size_t cols) : cols_(cols), rows_(rows, BitVector(cols)) {}

    std::size_t rows() const { return rows_.size(); }
    std::size_t cols() const { return cols_; }

    BitVector& row(std::size_t i) { return rows_[i]; }
    const BitVector& row(std::size_t i) const { return rows_[i]; }
    bool get(std::size_t i, std::size_t j) const { return rows_[i].get(j); }
    void set(std::size_t i, std::size_t j, bool v = true) { rows_[i].set(j, v); }

    void append_row(BitVector r) { rows_.push_back(std::move(r)); }

    /// y = M x over GF(2).
    BitVector multiply(const BitVector& x) const;
    BitMatrix transpose() const;

    friend bool operator==(const BitMatrix&, const BitMatrix&) = default;

private:
    std::size_t cols_ = 0;
    std::vector<BitVector> rows_;
};

/// Incremental row echelon basis. Rows are inserted one at a time; each basis
/// row's lowest set bit is its pivot, and pivots are restricted to columns
/// below `pivot_limit` (so an augmented column can be carried along). The
/// basis remembers which inserted rows were summed to produce each of its rows.
class Gf2Echelon {
public:
    Gf2Echelon(std::size_t cols, std::size_t pivot_limit, bool track_origins = true);
    explicit Gf2Echelon(std::size_t cols) : Gf2Echelon(cols, cols, false) {}

    struct Reduction {
        bool independent = false;
        /// Basis slots summed into the row during reduction.
        BitVector slots;
    };

    /// Reduces `row` against the basis and adds it when a pivot is found.
    /// The reduced row is left in `row`; `tag` identifies it in origins.
    Reduction insert(BitVector& row, std::size_t tag);

    std::size_t rank() const { return basis_.size(); }
    std::size_t cols() const { return cols_; }
    const BitVector& basis_row(std::size_t slot) const { return basis_[slot]; }
    std::size_t pivot(std::size_t slot) const { return pivot_col_[slot]; }

    /// Tags of the inserted rows whose sum equals the sum of the given slots.
    std::vector<std::size_t> origin(const BitVector& slots) const;

    /// Solves (basis) x = (augmented column) by back substitution, with free
    /// variables set to zero. Only meaningful for augmented bases where the
    /// augmented column is `pivot_limit`.
    BitVector back_substitute() const;

private:
    std::size_t cols_;
    std::size_t pivot_limit_;
    bool track_;
    std::vector<BitVector> basis_;
    std::vector<BitVector> combo_;
    std::vector<std::size_t> tag_;
    std::vector<std::size_t> pivot_col_;
    std::vector<std::size_t> slot_of_col_;
};

/// Rank of a matrix over GF(2).
std::size_t gf2_rank(const BitMatrix& m);

}  // namespace qctx
