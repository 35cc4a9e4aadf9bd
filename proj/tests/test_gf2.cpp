#include <gtest/gtest.h>

#include <random>

#include "qctx/gf2.hpp"

using namespace qctx;

namespace {

BitVector random_vector(std::size_t n, std::mt19937_64& rng) {
    BitVector v(n);
    for (std::size_t i = 0; i < n; ++i) v.set(i, rng() & 1);
    return v;
}

// Rank by textbook elimination on a dense 0/1 table.
std::size_t dense_rank(std::vector<std::vector<int>> m) {
    std::size_t r = 0;
    const std::size_t cols = m.empty() ? 0 : m[0].size();
    for (std::size_t c = 0; c < cols && r < m.size(); ++c) {
        std::size_t p = r;
        while (p < m.size() && !m[p][c]) ++p;
        if (p == m.size()) continue;
        std::swap(m[p], m[r]);
        for (std::size_t i = 0; i < m.size(); ++i)
            if (i != r && m[i][c])
                for (std::size_t j = 0; j < cols; ++j) m[i][j] ^= m[r][j];
        ++r;
    }
    return r;
}

}  // namespace

TEST(BitVector, Basics) {
    BitVector v(130);
    EXPECT_TRUE(v.none());
    v.set(0);
    v.set(64);
    v.set(129);
    EXPECT_EQ(v.count(), 3u);
    EXPECT_EQ(v.first(), 0u);
    EXPECT_EQ(v.next(1), 64u);
    EXPECT_EQ(v.next(65), 129u);
    EXPECT_EQ(v.next(130), 130u);
    v.flip(64);
    EXPECT_FALSE(v.get(64));
    EXPECT_EQ(BitVector::from_string(v.to_string()), v);
    EXPECT_THROW(BitVector::from_string("01a"), std::invalid_argument);
}

TEST(BitVector, DotAndDistance) {
    std::mt19937_64 rng(1);
    for (int t = 0; t < 100; ++t) {
        const BitVector a = random_vector(97, rng), b = random_vector(97, rng);
        std::size_t dot = 0, dist = 0;
        for (std::size_t i = 0; i < 97; ++i) {
            dot += a.get(i) && b.get(i);
            dist += a.get(i) != b.get(i);
        }
        EXPECT_EQ(a.dot(b), dot % 2 == 1);
        EXPECT_EQ(a.distance(b), dist);
        EXPECT_EQ((a ^ b).count(), dist);
    }
}

TEST(BitMatrix, MultiplyAndTranspose) {
    std::mt19937_64 rng(2);
    BitMatrix m(20, 70);
    for (std::size_t i = 0; i < 20; ++i) m.row(i) = random_vector(70, rng);
    const BitVector x = random_vector(70, rng);
    const BitVector y = m.multiply(x);
    for (std::size_t i = 0; i < 20; ++i) EXPECT_EQ(y.get(i), m.row(i).dot(x));
    const BitMatrix t = m.transpose();
    ASSERT_EQ(t.rows(), 70u);
    for (std::size_t i = 0; i < 20; ++i)
        for (std::size_t j = 0; j < 70; ++j) EXPECT_EQ(t.get(j, i), m.get(i, j));
    EXPECT_EQ(t.transpose(), m);
}

TEST(Gf2, RankMatchesDenseElimination) {
    std::mt19937_64 rng(3);
    for (int t = 0; t < 50; ++t) {
        const std::size_t r = 1 + rng() % 40, c = 1 + rng() % 40;
        BitMatrix m(r, c);
        std::vector<std::vector<int>> d(r, std::vector<int>(c));
        for (std::size_t i = 0; i < r; ++i)
            for (std::size_t j = 0; j < c; ++j)
                if (rng() % 3 == 0) {
                    m.set(i, j);
                    d[i][j] = 1;
                }
        EXPECT_EQ(gf2_rank(m), dense_rank(d));
    }
}

TEST(Gf2, EchelonOriginsAndSolve) {
    std::mt19937_64 rng(4);
    for (int t = 0; t < 30; ++t) {
        const std::size_t p = 12, l = 20;
        std::vector<BitVector> rows;
        Gf2Echelon ech(p + 1, p, true);
        bool consistent = true;
        BitMatrix a(l, p);
        BitVector e(l);
        for (std::size_t i = 0; i < l; ++i) {
            BitVector row = random_vector(p + 1, rng);
            for (std::size_t j = 0; j < p; ++j) a.set(i, j, row.get(j));
            e.set(i, row.get(p));
            rows.push_back(row);
            BitVector work = row;
            const auto red = ech.insert(work, i);
            if (!red.independent) {
                // the reduced row is row_i plus the origin rows
                BitVector sum = row;
                for (std::size_t tag : ech.origin(red.slots)) sum ^= rows[tag];
                EXPECT_EQ(sum, work);
                if (work.get(p)) consistent = false;
            }
        }
        if (consistent) {
            const BitVector x = ech.back_substitute();
            EXPECT_EQ(a.multiply(x), e);
        }
    }
}
