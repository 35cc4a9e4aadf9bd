#pragma once

// Totally isotropic subspaces of W(2N-1,2) and the point-line configurations
// built from them.

#include <array>
#include <bit>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "qctx/pauli.hpp"

namespace qctx {

class GeometryError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

struct Subspace {
    unsigned qubits = 0;
    unsigned dim = 0;
    std::vector<Point> points;  ///< sorted, 2^(dim+1) - 1 of them
};

/// A subspace as produced by the enumeration kernel. `codes` are in
/// construction order (not sorted) and only valid during the callback.
struct SubspaceView {
    unsigned qubits;
    unsigned dim;
    std::span<const std::uint64_t> codes;
    int sign;
};

struct Context {
    std::vector<std::uint32_t> members;  ///< sorted indices into Configuration::points
    int sign = 1;

    friend bool operator==(const Context&, const Context&) = default;
};

struct Configuration {
    unsigned qubits = 0;
    std::string family;
    std::vector<Point> points;  ///< sorted ascending
    std::vector<Context> contexts;

    std::size_t negative_count() const;
    /// Index of a point, or nullopt.
    std::optional<std::uint32_t> index_of(std::uint64_t bits) const;
    /// Points of context i, in member order.
    std::vector<Point> context_points(std::size_t i) const;
};

enum class QuadricType { hyperbolic, elliptic };

struct Quadric {
    Configuration config;
    QuadricType type;
    std::uint64_t index;  ///< the vector q of Q_q(x) = Q_0(x) + <x|q>
};

// ---------------------------------------------------------------------------
// Enumeration kernels.

namespace detail {

/// Depth-first walker for the subspace recursion. A candidate p extends the
/// current subspace S iff p is orthogonal to a basis of S, p > max(S), and p
/// has no bit at any leading position of S (equivalently p + q > p for all q
/// in S). Construction order of points and emission order match the plain
/// recursion exactly.
template <class Visit>
class IsotropicWalker {
public:
    IsotropicWalker(unsigned n, unsigned k, Visit& visit)
        : n_(n), k_(k), end_(code::space_end(n)), pts_((std::size_t{1} << (k + 1)) - 1), visit_(visit) {}

    /// Visits every subspace whose first-chosen (smallest-lead) point is `first`.
    void run_branch(std::uint64_t first) {
        pts_[0] = first;
        basis_[0] = first;
        const unsigned lead = static_cast<unsigned>(std::bit_width(first)) - 1;
        extend(1, 1, std::uint64_t{1} << lead, lead + 1, first, 0);
    }

    void run_all() {
        for (std::uint64_t p = 1; p < end_; ++p) run_branch(p);
    }

private:
    void extend(std::size_t size, unsigned level, std::uint64_t lead_mask, unsigned min_width, std::uint64_t acc,
                unsigned phase) {
        if (level == k_ + 1) {
            visit_(SubspaceView{n_, k_, std::span<const std::uint64_t>(pts_.data(), size),
                                (phase & 3) == 0 ? 1 : -1});
            return;
        }
        const unsigned total_bits = 2 * n_;
        if (min_width >= total_bits) return;
        for (std::uint64_t p = std::uint64_t{1} << min_width; p < end_; p = ((p | lead_mask) + 1) & ~lead_mask) {
            bool ok = true;
            for (unsigned b = 0; b < level; ++b) {
                if (code::symplectic(p, basis_[b], n_)) {
                    ok = false;
                    break;
                }
            }
            if (!ok) continue;
            std::uint64_t a = acc;
            unsigned ph = phase + code::product_phase(a, p, n_);
            a ^= p;
            pts_[size] = p;
            for (std::size_t i = 0; i < size; ++i) {
                const std::uint64_t c = pts_[i] ^ p;
                ph += code::product_phase(a, c, n_);
                a ^= c;
                pts_[size + 1 + i] = c;
            }
            basis_[level] = p;
            const unsigned lead = static_cast<unsigned>(std::bit_width(p)) - 1;
            extend(2 * size + 1, level + 1, lead_mask | (std::uint64_t{1} << lead), lead + 1, a, ph & 3);
        }
    }

    unsigned n_, k_;
    std::uint64_t end_;
    std::vector<std::uint64_t> pts_;
    std::array<std::uint64_t, 2 * kMaxQubits> basis_{};
    Visit& visit_;
};

void check_subspace_args(unsigned n, unsigned k);

}  // namespace detail

/// Serial streaming enumeration; `visit` is called once per subspace.
template <class Visit>
void for_each_isotropic_subspace(unsigned n, unsigned k, Visit&& visit) {
    detail::check_subspace_args(n, k);
    detail::IsotropicWalker<std::remove_reference_t<Visit>> w(n, k, visit);
    w.run_all();
}

/// Visits the subspaces whose smallest point is `first`; branches for
/// different `first` are disjoint and together cover everything.
template <class Visit>
void for_each_isotropic_subspace_in_branch(unsigned n, unsigned k, std::uint64_t first, Visit&& visit) {
    detail::check_subspace_args(n, k);
    detail::IsotropicWalker<std::remove_reference_t<Visit>> w(n, k, visit);
    w.run_branch(first);
}

struct SubspaceCensus {
    std::uint64_t count = 0;
    std::uint64_t negative = 0;

    SubspaceCensus& operator+=(const SubspaceCensus& o) {
        count += o.count;
        negative += o.negative;
        return *this;
    }
    friend bool operator==(const SubspaceCensus&, const SubspaceCensus&) = default;
};

/// Count and sign census using the serial kernel.
SubspaceCensus isotropic_census_serial(unsigned n, unsigned k);
/// Same result, branches distributed over OpenMP threads (0 = default count).
SubspaceCensus isotropic_census(unsigned n, unsigned k, unsigned threads = 0);

/// All subspaces in emission order, each sorted. Memory grows with the count.
std::vector<Subspace> totally_isotropic_subspaces(unsigned n, unsigned k, unsigned threads = 0);

namespace reference {

/// Direct transcription of the recursive construction: every point above
/// max(S) is tried against every element of S. Slow; kept as the oracle for
/// the pruned kernel. Each result is in construction order.
std::vector<std::vector<std::uint64_t>> totally_isotropic_subspaces(unsigned n, unsigned k);

}  // namespace reference

/// All nonzero GF(2) combinations of an independent, pairwise orthogonal basis.
Subspace closure(std::span<const Point> basis);

// ---------------------------------------------------------------------------
// Configurations.

/// Builds a configuration from contexts given as point sets, computing signs.
Configuration make_configuration(unsigned qubits, std::string family,
                                 const std::vector<std::vector<std::uint64_t>>& contexts,
                                 std::span<const std::uint64_t> extra_points = {});

/// All points of W_N with the k-subspaces as contexts.
Configuration subspace_configuration(unsigned n, unsigned k, unsigned threads = 0);

Configuration perpset(unsigned n, const Point& center);
std::vector<Configuration> all_perpsets(unsigned n);

/// Q_0(x) = sum_i x_i x_{N+i}.
unsigned quadratic_form(std::uint64_t x, unsigned n);
Quadric quadric(unsigned n, std::uint64_t q);
std::vector<Quadric> all_quadrics(unsigned n);

/// Two-qubit doily padded with identities at the given 1-based qubit slots.
Configuration doily(unsigned n, std::span<const unsigned> identity_slots);
Configuration doily(unsigned n);  ///< identities on qubits 3..N

/// Each spread as 5 context indices of the doily.
std::vector<std::array<std::size_t, 5>> spreads(const Configuration& doily);
bool has_doily_incidence(const Configuration& c);
std::vector<Configuration> two_spreads(const Configuration& doily);

/// The 10 Mermin-Peres grids of W_2.
std::vector<Configuration> grids();

// ---------------------------------------------------------------------------

struct FamilySpec {
    enum class Family { subspaces, perpset, quadric, doily, two_spread, grid };
    Family family = Family::subspaces;
    unsigned qubits = 2;
    unsigned k = 1;
    std::optional<std::uint64_t> anchor;  ///< perpset center / quadric index
    std::optional<QuadricType> quadric_type;  ///< filter when no anchor is given
    std::vector<unsigned> embedding;
};

std::string family_name(FamilySpec::Family f);
std::optional<FamilySpec::Family> parse_family(std::string_view name);

/// Every configuration the family description selects.
std::vector<Configuration> generate(const FamilySpec& spec, unsigned threads = 0);

// ---------------------------------------------------------------------------
// Text format: header `qubits=N family=<name>`, then one context per line as
// observable strings followed by `+` or `-`. Blank lines and lines starting
// with '#' are ignored. Points on no context are listed on an optional line
// `isolated: P1 P2 ...`.

void write_configuration(std::ostream& os, const Configuration& c);
Configuration read_configuration(std::istream& is);

}  // namespace qctx
