#pragma once

// The linear system A x = E of a configuration: A is the context x observable
// incidence matrix and E marks the negative contexts.

#include <iosfwd>
#include <string>
#include <vector>

#include "qctx/geometry.hpp"
#include "qctx/gf2.hpp"

namespace qctx {

struct IncidenceSystem {
    BitMatrix a;  ///< l x p
    BitVector e;  ///< length l

    std::size_t contexts() const { return a.rows(); }
    std::size_t observables() const { return a.cols(); }

    friend bool operator==(const IncidenceSystem&, const IncidenceSystem&) = default;
};

struct ConfigStats {
    std::size_t n_contexts = 0;
    std::size_t n_observables = 0;
    std::size_t n_negative = 0;
    std::size_t n_positive = 0;
    std::size_t rank = 0;
};

struct Violation {
    enum class Kind { anticommuting, product_not_identity, sign_mismatch, duplicate_member, too_small };
    Kind kind;
    std::size_t context;
    std::string message;
};

std::string to_string(Violation::Kind k);

/// Rows follow c.contexts, columns follow c.points.
IncidenceSystem build_incidence(const Configuration& c);

/// Builds a system from explicit rows of observable indices.
IncidenceSystem make_incidence(std::size_t observables, const std::vector<std::vector<std::size_t>>& rows,
                               const std::vector<bool>& negative);

/// Every violation found, in context order.
std::vector<Violation> validate(const Configuration& c);

ConfigStats stats(const IncidenceSystem& s);

/// Text matrix format: header `l p`, then l lines of p '0'/'1' characters,
/// a space, and the E bit.
void write_incidence(std::ostream& os, const IncidenceSystem& s);
IncidenceSystem read_incidence(std::istream& is);

}  // namespace qctx
