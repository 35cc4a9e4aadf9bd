#include "qctx/pauli.hpp"

#include <array>

namespace qctx {

namespace {

void check_qubits(unsigned n) {
    if (n == 0 || n > kMaxQubits) {
        throw PauliError("qubit count must be in [1, " + std::to_string(kMaxQubits) + "], got " +
                         std::to_string(n));
    }
}

void check_same(unsigned a, unsigned b) {
    if (a != b) {
        throw PauliError("mismatched qubit counts " + std::to_string(a) + " and " + std::to_string(b));
    }
}

}  // namespace

Point::Point(unsigned qubits, std::uint64_t bits) : bits_(bits), qubits_(qubits) {
    check_qubits(qubits);
    if (bits == 0) throw PauliError("the zero vector is not a point");
    const std::uint64_t end = code::space_end(qubits);
    if (end != 0 && bits >= end) throw PauliError("bitvector longer than 2N");
}

std::uint64_t encode_bits(std::string_view observable) {
    const auto n = static_cast<unsigned>(observable.size());
    check_qubits(n);
    std::uint64_t z = 0, x = 0;
    for (char c : observable) {
        z <<= 1;
        x <<= 1;
        switch (c) {
            case 'I': break;
            case 'X': x |= 1; break;
            case 'Y': x |= 1; z |= 1; break;
            case 'Z': z |= 1; break;
            default:
                throw PauliError(std::string("invalid observable character '") + c + "' in \"" +
                                 std::string(observable) + "\"");
        }
    }
    return (z << n) | x;
}

Point encode(std::string_view observable) {
    const std::uint64_t bits = encode_bits(observable);
    if (bits == 0) throw PauliError("identity observable \"" + std::string(observable) + "\" is not a point");
    return Point(static_cast<unsigned>(observable.size()), bits);
}

std::string decode_bits(std::uint64_t bits, unsigned qubits) {
    static constexpr std::array<char, 4> kLetters{'I', 'X', 'Z', 'Y'};  // index = 2*z + x
    std::string out(qubits, 'I');
    for (unsigned j = 0; j < qubits; ++j) {
        const unsigned shift = qubits - 1 - j;
        const unsigned z = static_cast<unsigned>((bits >> (qubits + shift)) & 1);
        const unsigned x = static_cast<unsigned>((bits >> shift) & 1);
        out[j] = kLetters[2 * z + x];
    }
    return out;
}

std::string decode(const Point& p) { return decode_bits(p.bits(), p.qubits()); }

unsigned symplectic_form(const Point& x, const Point& y) {
    check_same(x.qubits(), y.qubits());
    return code::symplectic(x.bits(), y.bits(), x.qubits());
}

bool commutes(const Point& x, const Point& y) { return symplectic_form(x, y) == 0; }

PhasedPauli pauli_product(const PhasedPauli& a, const PhasedPauli& b) {
    check_same(a.qubits, b.qubits);
    const unsigned k = code::product_phase(a.bits, b.bits, a.qubits);
    return {a.qubits, a.bits ^ b.bits, (a.phase + b.phase + k) & 3};
}

int context_sign_unchecked(std::span<const std::uint64_t> codes, unsigned qubits) {
    std::uint64_t acc = 0;
    unsigned phase = 0;
    for (std::uint64_t c : codes) {
        phase += code::product_phase(acc, c, qubits);
        acc ^= c;
    }
    if (acc != 0) throw PauliError("context product is not proportional to the identity");
    // Hermitian commuting factors always give a real phase here.
    if (phase & 1) throw std::logic_error("imaginary residual phase in context product");
    return (phase & 3) == 0 ? 1 : -1;
}

int context_sign(std::span<const Point> points) {
    if (points.empty()) throw PauliError("empty context");
    const unsigned n = points.front().qubits();
    for (std::size_t i = 0; i < points.size(); ++i) {
        check_same(n, points[i].qubits());
        for (std::size_t j = i + 1; j < points.size(); ++j) {
            if (code::symplectic(points[i].bits(), points[j].bits(), n) != 0) {
                throw PauliError("context contains anticommuting observables " + decode(points[i]) + " and " +
                                 decode(points[j]));
            }
        }
    }
    std::uint64_t acc = 0;
    unsigned phase = 0;
    for (const Point& p : points) {
        phase += code::product_phase(acc, p.bits(), n);
        acc ^= p.bits();
    }
    if (acc != 0) throw PauliError("context product is not proportional to the identity");
    if (phase & 1) throw std::logic_error("imaginary residual phase in context product");
    return (phase & 3) == 0 ? 1 : -1;
}

BigInt gaussian_binomial(unsigned q, unsigned n, unsigned k) {
    if (k > n) return 0;
    BigInt num = 1, den = 1;
    const BigInt bq = q;
    for (unsigned i = 1; i <= k; ++i) {
        num *= boost::multiprecision::pow(bq, n - k + i) - 1;
        den *= boost::multiprecision::pow(bq, i) - 1;
    }
    return num / den;
}

BigInt subspace_count(const CountParams& params) {
    if (params.q < 2) throw PauliError("field order must be at least 2");
    if (params.n == 0 || params.k >= params.n) {
        throw PauliError("subspace dimension k=" + std::to_string(params.k) + " out of range for N=" +
                         std::to_string(params.n));
    }
    BigInt count = gaussian_binomial(params.q, params.n, params.k + 1);
    const BigInt bq = params.q;
    for (unsigned i = 1; i <= params.k + 1; ++i) count *= boost::multiprecision::pow(bq, params.n + 1 - i) + 1;
    return count;
}

}  // namespace qctx
