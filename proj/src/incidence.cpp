#include "qctx/incidence.hpp"

#include <algorithm>
#include <istream>
#include <ostream>
#include <sstream>

namespace qctx {

std::string to_string(Violation::Kind k) {
    switch (k) {
        case Violation::Kind::anticommuting: return "anticommuting";
        case Violation::Kind::product_not_identity: return "product-not-identity";
        case Violation::Kind::sign_mismatch: return "sign-mismatch";
        case Violation::Kind::duplicate_member: return "duplicate-member";
        case Violation::Kind::too_small: return "too-small";
    }
    return "?";
}

IncidenceSystem build_incidence(const Configuration& c) {
    IncidenceSystem s{BitMatrix(c.contexts.size(), c.points.size()), BitVector(c.contexts.size())};
    for (std::size_t i = 0; i < c.contexts.size(); ++i) {
        for (std::uint32_t m : c.contexts[i].members) s.a.set(i, m);
        if (c.contexts[i].sign < 0) s.e.set(i);
    }
    return s;
}

IncidenceSystem make_incidence(std::size_t observables, const std::vector<std::vector<std::size_t>>& rows,
                               const std::vector<bool>& negative) {
    if (negative.size() != rows.size()) throw std::invalid_argument("one sign bit per row required");
    IncidenceSystem s{BitMatrix(rows.size(), observables), BitVector(rows.size())};
    for (std::size_t i = 0; i < rows.size(); ++i) {
        for (std::size_t j : rows[i]) {
            if (j >= observables) throw std::invalid_argument("observable index out of range");
            s.a.set(i, j);
        }
        if (negative[i]) s.e.set(i);
    }
    return s;
}

std::vector<Violation> validate(const Configuration& c) {
    std::vector<Violation> out;
    const unsigned n = c.qubits;
    for (std::size_t i = 0; i < c.contexts.size(); ++i) {
        const auto& members = c.contexts[i].members;
        if (members.size() < 2) {
            out.push_back({Violation::Kind::too_small, i, "context has fewer than two observables"});
        }
        std::vector<std::uint32_t> sorted = members;
        std::sort(sorted.begin(), sorted.end());
        if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) {
            out.push_back({Violation::Kind::duplicate_member, i, "context repeats an observable"});
            continue;
        }
        bool commuting = true;
        for (std::size_t a = 0; a < members.size(); ++a) {
            for (std::size_t b = a + 1; b < members.size(); ++b) {
                const Point& x = c.points[members[a]];
                const Point& y = c.points[members[b]];
                if (code::symplectic(x.bits(), y.bits(), n)) {
                    out.push_back({Violation::Kind::anticommuting, i, decode(x) + " and " + decode(y) + " anticommute"});
                    commuting = false;
                }
            }
        }
        std::uint64_t acc = 0;
        for (std::uint32_t m : members) acc ^= c.points[m].bits();
        if (acc != 0) {
            out.push_back({Violation::Kind::product_not_identity, i,
                           "product is proportional to " + decode_bits(acc, n) + ", sign undefined"});
            continue;
        }
        if (commuting) {
            const int sign = context_sign(c.context_points(i));
            if (sign != c.contexts[i].sign) {
                out.push_back({Violation::Kind::sign_mismatch, i,
                               std::string("recorded sign ") + (c.contexts[i].sign < 0 ? "-" : "+") +
                                   " but the product gives " + (sign < 0 ? "-" : "+")});
            }
        }
    }
    return out;
}

ConfigStats stats(const IncidenceSystem& s) {
    ConfigStats st;
    st.n_contexts = s.contexts();
    st.n_observables = s.observables();
    st.n_negative = s.e.count();
    st.n_positive = st.n_contexts - st.n_negative;
    st.rank = gf2_rank(s.a);
    return st;
}

void write_incidence(std::ostream& os, const IncidenceSystem& s) {
    os << s.contexts() << ' ' << s.observables() << '\n';
    for (std::size_t i = 0; i < s.contexts(); ++i) {
        os << s.a.row(i).to_string() << ' ' << (s.e.get(i) ? '1' : '0') << '\n';
    }
}

IncidenceSystem read_incidence(std::istream& is) {
    std::size_t l = 0, p = 0;
    if (!(is >> l >> p)) throw std::invalid_argument("incidence file: expected 'l p' header");
    IncidenceSystem s{BitMatrix(l, p), BitVector(l)};
    for (std::size_t i = 0; i < l; ++i) {
        std::string bits, ebit;
        if (!(is >> bits >> ebit)) throw std::invalid_argument("incidence file: truncated at row " + std::to_string(i));
        if (bits.size() != p) throw std::invalid_argument("incidence file: row " + std::to_string(i) + " has wrong width");
        s.a.row(i) = BitVector::from_string(bits);
        if (ebit == "1") s.e.set(i);
        else if (ebit != "0") throw std::invalid_argument("incidence file: bad E bit at row " + std::to_string(i));
    }
    return s;
}

}  // namespace qctx
