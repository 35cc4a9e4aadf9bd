#include <gtest/gtest.h>

#include <algorithm>
#include <random>

#include "oracles.hpp"
#include "qctx/geometry.hpp"
#include "qctx/pauli.hpp"

using namespace qctx;

namespace {

std::vector<unsigned> coords(const Point& p) {
    std::vector<unsigned> v;
    for (unsigned j = 1; j <= 2 * p.qubits(); ++j) v.push_back(p.coordinate(j));
    return v;
}

bool dense_commute(const std::string& a, const std::string& b) {
    const auto ma = oracle::matrix(a), mb = oracle::matrix(b);
    return (ma * mb).near(mb * ma);
}

oracle::cd i_pow(unsigned k) {
    static const oracle::cd kPow[4] = {{1, 0}, {0, 1}, {-1, 0}, {0, -1}};
    return kPow[k & 3];
}

}  // namespace

TEST(Encode, SingleQubitTable) {
    EXPECT_EQ(coords(encode("X")), (std::vector<unsigned>{0, 1}));
    EXPECT_EQ(coords(encode("Y")), (std::vector<unsigned>{1, 1}));
    EXPECT_EQ(coords(encode("Z")), (std::vector<unsigned>{1, 0}));
}

TEST(Encode, TwoQubitExamples) {
    EXPECT_EQ(coords(encode("YX")), (std::vector<unsigned>{1, 0, 1, 1}));
    EXPECT_EQ(coords(encode("ZZ")), (std::vector<unsigned>{1, 1, 0, 0}));
    EXPECT_EQ(decode(Point(2, 0b1011)), "YX");
    EXPECT_EQ(decode(Point(1, 0b01)), "X");
    EXPECT_EQ(decode(Point(2, 0b0011)), "XX");
}

TEST(Encode, MatchesQubitwiseMapping) {
    // (g_j, g_{j+N}) per qubit: I=(0,0) X=(0,1) Y=(1,1) Z=(1,0)
    for (unsigned n = 1; n <= 3; ++n) {
        for (const std::string& s : oracle::all_observables(n)) {
            const Point p = encode(s);
            for (unsigned j = 1; j <= n; ++j) {
                const unsigned z = p.coordinate(j), x = p.coordinate(j + n);
                const char c = s[j - 1];
                EXPECT_EQ(z, c == 'Y' || c == 'Z' ? 1u : 0u) << s;
                EXPECT_EQ(x, c == 'X' || c == 'Y' ? 1u : 0u) << s;
            }
        }
    }
}

TEST(Encode, RoundTripExhaustiveUpToThree) {
    for (unsigned n = 1; n <= 3; ++n)
        for (const std::string& s : oracle::all_observables(n)) EXPECT_EQ(decode(encode(s)), s);
}

TEST(Encode, RoundTripSampledFourAndFive) {
    std::mt19937_64 rng(7);
    for (unsigned n : {4u, 5u, 16u, 32u}) {
        for (int t = 0; t < 500; ++t) {
            std::string s(n, 'I');
            for (char& c : s) c = "IXYZ"[rng() % 4];
            if (s == std::string(n, 'I')) continue;
            EXPECT_EQ(decode(encode(s)), s);
        }
    }
}

TEST(Encode, Errors) {
    EXPECT_THROW(encode(""), PauliError);
    EXPECT_THROW(encode("II"), PauliError);
    EXPECT_THROW(encode("XA"), PauliError);
    EXPECT_THROW(encode("xx"), PauliError);
    EXPECT_THROW(Point(2, 0), PauliError);
    EXPECT_THROW(Point(2, 16), PauliError);
    EXPECT_EQ(encode_bits("II"), 0u);
}

TEST(Encode, OrderIsLexicographic) {
    const auto obs = oracle::all_observables(2);
    std::vector<Point> pts;
    for (const auto& s : obs) pts.push_back(encode(s));
    std::sort(pts.begin(), pts.end());
    for (std::size_t i = 1; i < pts.size(); ++i) EXPECT_LT(coords(pts[i - 1]), coords(pts[i]));
}

TEST(Symplectic, Examples) {
    EXPECT_EQ(symplectic_form(encode("X"), encode("Z")), 1u);
    EXPECT_EQ(symplectic_form(encode("XX"), encode("YY")), 0u);
    EXPECT_TRUE(commutes(encode("XX"), encode("YY")));
    EXPECT_FALSE(commutes(encode("X"), encode("Z")));
    for (const auto& s : oracle::all_observables(3)) EXPECT_EQ(symplectic_form(encode(s), encode(s)), 0u);
    EXPECT_THROW(symplectic_form(encode("X"), encode("XX")), PauliError);
    EXPECT_THROW(commutes(encode("X"), encode("XX")), PauliError);
}

TEST(Symplectic, MatchesDefinitionAndIsBilinear) {
    std::mt19937_64 rng(11);
    const unsigned n = 5;
    auto def = [&](std::uint64_t x, std::uint64_t y) {
        unsigned acc = 0;
        auto g = [&](std::uint64_t v, unsigned j) { return static_cast<unsigned>((v >> (2 * n - j)) & 1); };
        for (unsigned i = 1; i <= n; ++i) acc += g(x, i) * g(y, n + i) + g(x, n + i) * g(y, i);
        return acc & 1;
    };
    for (int t = 0; t < 2000; ++t) {
        const std::uint64_t x = rng() % 1023 + 1, y = rng() % 1023 + 1, z = rng() % 1023 + 1;
        EXPECT_EQ(code::symplectic(x, y, n), def(x, y));
        EXPECT_EQ(code::symplectic(x, y, n), code::symplectic(y, x, n));
        EXPECT_EQ(code::symplectic(x ^ y, z, n), code::symplectic(x, z, n) ^ code::symplectic(y, z, n));
    }
}

TEST(Symplectic, CommutesMatchesDenseExhaustiveOneTwoQubits) {
    for (unsigned n = 1; n <= 2; ++n) {
        const auto obs = oracle::all_observables(n);
        for (const auto& a : obs)
            for (const auto& b : obs) EXPECT_EQ(commutes(encode(a), encode(b)), dense_commute(a, b)) << a << ' ' << b;
    }
}

TEST(Symplectic, CommutesMatchesDenseRandomThreeQubits) {
    const auto obs = oracle::all_observables(3);
    std::mt19937_64 rng(3);
    for (int t = 0; t < 1000; ++t) {
        const auto& a = obs[rng() % obs.size()];
        const auto& b = obs[rng() % obs.size()];
        EXPECT_EQ(commutes(encode(a), encode(b)), dense_commute(a, b)) << a << ' ' << b;
    }
}

TEST(Product, SingleQubitCycles) {
    const auto x = PhasedPauli::of(encode("X")), y = PhasedPauli::of(encode("Y")), z = PhasedPauli::of(encode("Z"));
    const PhasedPauli xy = pauli_product(x, y);
    EXPECT_EQ(xy.bits, encode("Z").bits());
    EXPECT_EQ(xy.phase, 1u);
    const PhasedPauli xyz = pauli_product(xy, z);
    EXPECT_EQ(xyz.bits, 0u);
    EXPECT_EQ(xyz.phase, 1u);
    const PhasedPauli xzy = pauli_product(pauli_product(x, z), y);
    EXPECT_EQ(xzy.bits, 0u);
    EXPECT_EQ(xzy.phase, 3u);
}

TEST(Product, MatchesDense) {
    auto check = [](const std::string& a, const std::string& b, unsigned n) {
        const PhasedPauli pa{n, encode_bits(a), 0}, pb{n, encode_bits(b), 0};
        const PhasedPauli c = pauli_product(pa, pb);
        const auto lhs = oracle::matrix(a) * oracle::matrix(b);
        const auto rhs = oracle::matrix(decode_bits(c.bits, n)).scaled(i_pow(c.phase));
        EXPECT_TRUE(lhs.near(rhs)) << a << " * " << b;
    };
    for (unsigned n = 1; n <= 2; ++n) {
        auto obs = oracle::all_observables(n);
        obs.push_back(std::string(n, 'I'));
        for (const auto& a : obs)
            for (const auto& b : obs) check(a, b, n);
    }
    const auto obs3 = oracle::all_observables(3);
    std::mt19937_64 rng(5);
    for (int t = 0; t < 1000; ++t) check(obs3[rng() % obs3.size()], obs3[rng() % obs3.size()], 3);
}

TEST(Product, PhasesAccumulate) {
    const PhasedPauli a{1, encode_bits("X"), 3};
    const PhasedPauli b{1, encode_bits("Y"), 2};
    const PhasedPauli c = pauli_product(a, b);
    EXPECT_EQ(c.bits, encode_bits("Z"));
    EXPECT_EQ(c.phase, (3u + 2u + 1u) % 4u);
    EXPECT_THROW(pauli_product(PhasedPauli::identity(1), PhasedPauli::identity(2)), PauliError);
}

TEST(ContextSign, Examples) {
    const std::vector<Point> neg{encode("XX"), encode("YY"), encode("ZZ")};
    EXPECT_EQ(context_sign(neg), -1);
    const std::vector<Point> pos{encode("XI"), encode("IX"), encode("XX")};
    EXPECT_EQ(context_sign(pos), 1);
}

TEST(ContextSign, Errors) {
    const std::vector<Point> anti{encode("X"), encode("Z"), encode("Y")};
    EXPECT_THROW(context_sign(anti), PauliError);
    const std::vector<Point> open{encode("XI"), encode("IX")};
    EXPECT_THROW(context_sign(open), PauliError);
}

TEST(ContextSign, AllThreeQubitLinesMatchDense) {
    const Configuration lines = subspace_configuration(3, 1);
    ASSERT_EQ(lines.contexts.size(), 315u);
    const auto id = oracle::Dense::identity(8);
    std::size_t negative = 0;
    for (std::size_t i = 0; i < lines.contexts.size(); ++i) {
        const auto pts = lines.context_points(i);
        oracle::Dense prod = oracle::Dense::identity(8);
        for (const Point& p : pts) prod = prod * oracle::matrix(decode(p));
        int dense_sign = 0;
        if (prod.near(id)) dense_sign = 1;
        else if (prod.near(id.scaled(-1))) dense_sign = -1;
        ASSERT_NE(dense_sign, 0);
        EXPECT_EQ(context_sign(pts), dense_sign);
        EXPECT_EQ(lines.contexts[i].sign, dense_sign);
        negative += dense_sign < 0;
    }
    EXPECT_EQ(negative, 90u);
}

TEST(ContextSign, PermutationInvariant) {
    const Configuration planes = subspace_configuration(3, 2);
    std::mt19937_64 rng(9);
    for (std::size_t i = 0; i < planes.contexts.size(); ++i) {
        auto pts = planes.context_points(i);
        const int s = context_sign(pts);
        for (int t = 0; t < 10; ++t) {
            std::shuffle(pts.begin(), pts.end(), rng);
            EXPECT_EQ(context_sign(pts), s);
        }
    }
}

TEST(Counts, Examples) {
    EXPECT_EQ(subspace_count({2, 3, 1}), 315);
    EXPECT_EQ(subspace_count({2, 5, 3}), 782595);
    EXPECT_EQ(subspace_count({2, 7, 6}), 635037975);
    EXPECT_EQ(subspace_count({2, 6, 2}), 50868675);
    EXPECT_EQ(subspace_count({2, 6, 5}), 4922775);
    EXPECT_EQ(subspace_count({2, 3, 0}), 63);
    EXPECT_THROW(subspace_count({2, 3, 3}), std::invalid_argument);
    EXPECT_THROW(subspace_count({1, 3, 1}), std::invalid_argument);
}

TEST(Counts, GaussianBinomial) {
    EXPECT_EQ(gaussian_binomial(2, 4, 2), 35);
    EXPECT_EQ(gaussian_binomial(3, 3, 1), 13);
    EXPECT_EQ(gaussian_binomial(2, 5, 0), 1);
    EXPECT_EQ(gaussian_binomial(2, 5, 5), 1);
}

TEST(Counts, ExceedsSixtyFourBits) {
    const BigInt big = subspace_count({2, 32, 16});
    EXPECT_GT(big, BigInt(std::numeric_limits<std::uint64_t>::max()));
}

TEST(Counts, OddFieldOrder) {
    // W(3,3): 40 points, 40 lines.
    EXPECT_EQ(subspace_count({3, 2, 0}), 40);
    EXPECT_EQ(subspace_count({3, 2, 1}), 40);
}

TEST(Counts, MatchBruteForceUpToFour) {
    for (unsigned n = 2; n <= 4; ++n)
        for (unsigned k = 0; k < n; ++k)
            EXPECT_EQ(BigInt(oracle::brute_force_subspaces(n, k).size()), subspace_count({2, n, k})) << n << ' ' << k;
}
