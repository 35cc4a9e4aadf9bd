#pragma once

// N-qubit Pauli observables as points of the binary symplectic polar space.
//
// An observable G_1 ... G_N is stored as one 64-bit code holding the bitvector
// (g_1, ..., g_{2N}) with g_1 in bit 2N-1 and g_{2N} in bit 0, so that integer
// order on codes is the lexicographic order on bitvectors. Qubit j (1-based)
// owns bit N-j of the upper half (the "z" bit g_j) and bit N-j of the lower
// half (the "x" bit g_{j+N}):
//
//   I <-> (0,0)   X <-> (0,1)   Y <-> (1,1)   Z <-> (1,0)

#include <bit>
#include <compare>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>

#include <boost/multiprecision/cpp_int.hpp>

namespace qctx {

inline constexpr unsigned kMaxQubits = 32;

using BigInt = boost::multiprecision::cpp_int;

/// Raw code helpers. No validation; used by the hot enumeration kernels.
namespace code {

constexpr std::uint64_t half_mask(unsigned n) {
    return n >= 64 ? ~std::uint64_t{0} : (std::uint64_t{1} << n) - 1;
}

/// One past the largest code for n qubits (4^n), or 0 when n == 32.
constexpr std::uint64_t space_end(unsigned n) { return n >= 32 ? 0 : std::uint64_t{1} << (2 * n); }

constexpr std::uint64_t z_half(std::uint64_t c, unsigned n) { return c >> n; }
constexpr std::uint64_t x_half(std::uint64_t c, unsigned n) { return c & half_mask(n); }

constexpr unsigned symplectic(std::uint64_t a, std::uint64_t b, unsigned n) {
    const std::uint64_t m = half_mask(n);
    const std::uint64_t v = ((a >> n) & (b & m)) ^ ((a & m) & (b >> n));
    return static_cast<unsigned>(std::popcount(v) & 1);
}

/// Exponent k of i^k in P(a) * P(b) = i^k P(a xor b), Hermitian convention.
constexpr unsigned product_phase(std::uint64_t a, std::uint64_t b, unsigned n) {
    const std::uint64_t m = half_mask(n);
    const std::uint64_t za = a >> n, xa = a & m;
    const std::uint64_t zb = b >> n, xb = b & m;
    const std::uint64_t zc = za ^ zb, xc = xa ^ xb;
    const int k = std::popcount(zc & xc) - std::popcount(za & xa) - std::popcount(zb & xb) +
                  2 * std::popcount(xa & zb);
    return static_cast<unsigned>(k & 3);
}

}  // namespace code

/// A nonzero bitvector of length 2N.
class Point {
public:
    Point() = default;
    Point(unsigned qubits, std::uint64_t bits);

    unsigned qubits() const { return qubits_; }
    std::uint64_t bits() const { return bits_; }

    /// Bit g_j, 1-based as in (g_1, ..., g_{2N}).
    unsigned coordinate(unsigned j) const { return static_cast<unsigned>((bits_ >> (2 * qubits_ - j)) & 1); }

    friend bool operator==(const Point&, const Point&) = default;
    friend auto operator<=>(const Point& a, const Point& b) {
        if (auto c = a.qubits_ <=> b.qubits_; c != 0) return c;
        return a.bits_ <=> b.bits_;
    }

private:
    std::uint64_t bits_ = 1;
    unsigned qubits_ = 1;
};

/// A Pauli operator i^phase * P(bits); bits may be zero (identity).
struct PhasedPauli {
    unsigned qubits = 1;
    std::uint64_t bits = 0;
    unsigned phase = 0;  ///< exponent of i, in {0,1,2,3}

    static PhasedPauli identity(unsigned qubits) { return {qubits, 0, 0}; }
    static PhasedPauli of(const Point& p) { return {p.qubits(), p.bits(), 0}; }

    friend bool operator==(const PhasedPauli&, const PhasedPauli&) = default;
};

struct CountParams {
    unsigned q = 2;
    unsigned n = 2;
    unsigned k = 1;
};

class PauliError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Parses a string over {I,X,Y,Z}; identity strings are rejected.
Point encode(std::string_view observable);
/// Same as encode but accepts the all-I string, returning code 0.
std::uint64_t encode_bits(std::string_view observable);

std::string decode(const Point& p);
std::string decode_bits(std::uint64_t bits, unsigned qubits);

unsigned symplectic_form(const Point& x, const Point& y);
bool commutes(const Point& x, const Point& y);

PhasedPauli pauli_product(const PhasedPauli& a, const PhasedPauli& b);

/// +1 if the product of the (pairwise commuting) points is the identity, -1 if
/// it is minus the identity. Throws PauliError on invalid contexts.
int context_sign(std::span<const Point> points);

/// Sign of a commuting point set given as raw codes, without the pairwise
/// commutation check. Throws if the product is not +-identity.
int context_sign_unchecked(std::span<const std::uint64_t> codes, unsigned qubits);

/// Gaussian binomial coefficient [n choose k]_q.
BigInt gaussian_binomial(unsigned q, unsigned n, unsigned k);

/// Number of k-dimensional (projective) totally isotropic subspaces of W(2N-1, q).
BigInt subspace_count(const CountParams& params);

}  // namespace qctx
