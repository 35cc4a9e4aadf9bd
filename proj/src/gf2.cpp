#include "qctx/gf2.hpp"

#include <algorithm>
#include <stdexcept>

namespace qctx {

namespace {
constexpr std::size_t kNoSlot = static_cast<std::size_t>(-1);
}

std::size_t BitVector::next(std::size_t from) const {
    if (from >= size_) return size_;
    std::size_t w = from >> 6;
    std::uint64_t cur = words_[w] & (~std::uint64_t{0} << (from & 63));
    while (true) {
        if (cur) {
            const std::size_t i = w * 64 + static_cast<std::size_t>(std::countr_zero(cur));
            return i < size_ ? i : size_;
        }
        if (++w >= words_.size()) return size_;
        cur = words_[w];
    }
}

std::string BitVector::to_string() const {
    std::string s(size_, '0');
    for (std::size_t i = 0; i < size_; ++i) if (get(i)) s[i] = '1';
    return s;
}

BitVector BitVector::from_string(std::string_view s) {
    BitVector v(s.size());
    for (std::size_t i = 0; i < s.size(); ++i) {
        if (s[i] == '1') v.set(i);
        else if (s[i] != '0') throw std::invalid_argument("bit string must contain only 0 and 1");
    }
    return v;
}

BitVector BitMatrix::multiply(const BitVector& x) const {
    if (x.size() != cols_) throw std::invalid_argument("matrix-vector size mismatch");
    BitVector y(rows_.size());
    for (std::size_t i = 0; i < rows_.size(); ++i) if (rows_[i].dot(x)) y.set(i);
    return y;
}

BitMatrix BitMatrix::transpose() const {
    BitMatrix t(cols_, rows_.size());
    for (std::size_t i = 0; i < rows_.size(); ++i) {
        for (std::size_t j = rows_[i].first(); j < cols_; j = rows_[i].next(j + 1)) t.set(j, i);
    }
    return t;
}

Gf2Echelon::Gf2Echelon(std::size_t cols, std::size_t pivot_limit, bool track_origins)
    : cols_(cols), pivot_limit_(pivot_limit), track_(track_origins), slot_of_col_(pivot_limit, kNoSlot) {
    if (pivot_limit > cols) throw std::invalid_argument("pivot limit exceeds column count");
}

Gf2Echelon::Reduction Gf2Echelon::insert(BitVector& row, std::size_t tag) {
    Reduction r{false, BitVector(track_ ? pivot_limit_ : 0)};
    std::size_t b = row.first();
    while (b < pivot_limit_) {
        const std::size_t s = slot_of_col_[b];
        if (s == kNoSlot) {
            const std::size_t slot = basis_.size();
            if (track_) {
                BitVector combo = r.slots;
                combo.set(slot);
                combo_.push_back(std::move(combo));
            }
            basis_.push_back(row);
            tag_.push_back(tag);
            pivot_col_.push_back(b);
            slot_of_col_[b] = slot;
            r.independent = true;
            return r;
        }
        row ^= basis_[s];
        if (track_) r.slots ^= combo_[s];
        b = row.next(b + 1);
    }
    return r;
}

std::vector<std::size_t> Gf2Echelon::origin(const BitVector& slots) const {
    std::vector<std::size_t> tags;
    for (std::size_t s = slots.first(); s < slots.size(); s = slots.next(s + 1)) tags.push_back(tag_[s]);
    return tags;
}

BitVector Gf2Echelon::back_substitute() const {
    BitVector x(pivot_limit_);
    const bool augmented = cols_ > pivot_limit_;
    // Every basis row only has bits at or above its pivot, so solving from the
    // highest pivot down never reads an unsolved variable.
    std::vector<std::size_t> order(basis_.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return pivot_col_[a] > pivot_col_[b]; });
    for (std::size_t s : order) {
        const BitVector& row = basis_[s];
        const std::size_t piv = pivot_col_[s];
        bool v = augmented && row.get(pivot_limit_);
        for (std::size_t j = row.next(piv + 1); j < pivot_limit_; j = row.next(j + 1)) v ^= x.get(j);
        x.set(piv, v);
    }
    return x;
}

std::size_t gf2_rank(const BitMatrix& m) {
    // Eliminate along the shorter side.
    const BitMatrix* src = &m;
    BitMatrix t;
    if (m.cols() > m.rows()) {
        t = m.transpose();
        src = &t;
    }
    Gf2Echelon ech(src->cols());
    for (std::size_t i = 0; i < src->rows() && ech.rank() < src->cols(); ++i) {
        BitVector r = src->row(i);
        ech.insert(r, i);
    }
    return ech.rank();
}

}  // namespace qctx
