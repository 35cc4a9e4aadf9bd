#include "qctx/geometry.hpp"

#include <algorithm>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace qctx {

namespace detail {

void check_subspace_args(unsigned n, unsigned k) {
    if (n < 2 || n > 16) throw GeometryError("subspace enumeration needs 2 <= N <= 16, got N=" + std::to_string(n));
    if (k < 1 || k > n - 1) {
        throw GeometryError("subspace dimension k=" + std::to_string(k) + " out of range [1, " +
                            std::to_string(n - 1) + "]");
    }
}

}  // namespace detail

namespace {

int resolve_threads(unsigned threads) {
#ifdef _OPENMP
    return threads == 0 ? omp_get_max_threads() : static_cast<int>(threads);
#else
    (void)threads;
    return 1;
#endif
}

std::vector<std::uint64_t> sorted_codes(std::span<const std::uint64_t> codes) {
    std::vector<std::uint64_t> v(codes.begin(), codes.end());
    std::sort(v.begin(), v.end());
    return v;
}

Subspace to_subspace(const SubspaceView& view) {
    Subspace s{view.qubits, view.dim, {}};
    s.points.reserve(view.codes.size());
    for (std::uint64_t c : sorted_codes(view.codes)) s.points.emplace_back(view.qubits, c);
    return s;
}

}  // namespace

SubspaceCensus isotropic_census_serial(unsigned n, unsigned k) {
    SubspaceCensus c;
    for_each_isotropic_subspace(n, k, [&](const SubspaceView& v) {
        ++c.count;
        c.negative += v.sign < 0;
    });
    return c;
}

SubspaceCensus isotropic_census(unsigned n, unsigned k, unsigned threads) {
    detail::check_subspace_args(n, k);
    const auto end = static_cast<std::int64_t>(code::space_end(n));
    std::uint64_t count = 0, negative = 0;
#pragma omp parallel for schedule(dynamic, 1) reduction(+ : count, negative) num_threads(resolve_threads(threads))
    for (std::int64_t first = 1; first < end; ++first) {
        for_each_isotropic_subspace_in_branch(n, k, static_cast<std::uint64_t>(first), [&](const SubspaceView& v) {
            ++count;
            negative += v.sign < 0;
        });
    }
    return {count, negative};
}

std::vector<Subspace> totally_isotropic_subspaces(unsigned n, unsigned k, unsigned threads) {
    detail::check_subspace_args(n, k);
    const auto end = static_cast<std::int64_t>(code::space_end(n));
    std::vector<std::vector<Subspace>> per_branch(static_cast<std::size_t>(end));
#pragma omp parallel for schedule(dynamic, 1) num_threads(resolve_threads(threads))
    for (std::int64_t first = 1; first < end; ++first) {
        auto& out = per_branch[static_cast<std::size_t>(first)];
        for_each_isotropic_subspace_in_branch(n, k, static_cast<std::uint64_t>(first),
                                              [&](const SubspaceView& v) { out.push_back(to_subspace(v)); });
    }
    std::vector<Subspace> all;
    for (auto& b : per_branch) std::move(b.begin(), b.end(), std::back_inserter(all));
    return all;
}

namespace reference {

namespace {

void recurse(unsigned n, unsigned k, const std::vector<std::uint64_t>& s, unsigned level,
             std::vector<std::vector<std::uint64_t>>& out) {
    if (level == k + 1) {
        out.push_back(s);
        return;
    }
    const std::uint64_t max_s = s.empty() ? 0 : *std::max_element(s.begin(), s.end());
    const std::uint64_t end = code::space_end(n);
    for (std::uint64_t p = s.empty() ? 1 : max_s + 1; p < end; ++p) {
        std::vector<std::uint64_t> c = s;
        c.push_back(p);
        bool valid = true;
        for (std::uint64_t q : s) {
            if (code::symplectic(p, q, n) == 1 || (p ^ q) < p) {
                valid = false;
                break;
            }
            c.push_back(p ^ q);
        }
        if (valid) recurse(n, k, c, level + 1, out);
    }
}

}  // namespace

std::vector<std::vector<std::uint64_t>> totally_isotropic_subspaces(unsigned n, unsigned k) {
    detail::check_subspace_args(n, k);
    std::vector<std::vector<std::uint64_t>> out;
    recurse(n, k, {}, 0, out);
    return out;
}

}  // namespace reference

Subspace closure(std::span<const Point> basis) {
    if (basis.empty()) throw GeometryError("closure of an empty basis");
    const unsigned n = basis.front().qubits();
    std::vector<std::uint64_t> pts;
    for (const Point& b : basis) {
        if (b.qubits() != n) throw GeometryError("basis points have different qubit counts");
        for (std::uint64_t q : pts) {
            if (code::symplectic(q, b.bits(), n)) {
                throw GeometryError("basis is not totally isotropic: " + decode(b) + " anticommutes");
            }
        }
        if (std::find(pts.begin(), pts.end(), b.bits()) != pts.end()) {
            throw GeometryError("basis is linearly dependent at " + decode(b));
        }
        const std::size_t m = pts.size();
        pts.push_back(b.bits());
        for (std::size_t i = 0; i < m; ++i) pts.push_back(pts[i] ^ b.bits());
    }
    Subspace s{n, static_cast<unsigned>(basis.size() - 1), {}};
    for (std::uint64_t c : sorted_codes(pts)) s.points.emplace_back(n, c);
    return s;
}

// ---------------------------------------------------------------------------

std::size_t Configuration::negative_count() const {
    return static_cast<std::size_t>(
        std::count_if(contexts.begin(), contexts.end(), [](const Context& c) { return c.sign < 0; }));
}

std::optional<std::uint32_t> Configuration::index_of(std::uint64_t bits) const {
    auto it = std::lower_bound(points.begin(), points.end(), bits,
                               [](const Point& p, std::uint64_t b) { return p.bits() < b; });
    if (it == points.end() || it->bits() != bits) return std::nullopt;
    return static_cast<std::uint32_t>(it - points.begin());
}

std::vector<Point> Configuration::context_points(std::size_t i) const {
    std::vector<Point> out;
    out.reserve(contexts[i].members.size());
    for (std::uint32_t m : contexts[i].members) out.push_back(points[m]);
    return out;
}

Configuration make_configuration(unsigned qubits, std::string family,
                                 const std::vector<std::vector<std::uint64_t>>& contexts,
                                 std::span<const std::uint64_t> extra_points) {
    std::vector<std::uint64_t> all(extra_points.begin(), extra_points.end());
    for (const auto& c : contexts) all.insert(all.end(), c.begin(), c.end());
    std::sort(all.begin(), all.end());
    all.erase(std::unique(all.begin(), all.end()), all.end());

    Configuration cfg;
    cfg.qubits = qubits;
    cfg.family = std::move(family);
    cfg.points.reserve(all.size());
    for (std::uint64_t c : all) cfg.points.emplace_back(qubits, c);
    cfg.contexts.reserve(contexts.size());
    for (const auto& c : contexts) {
        Context ctx;
        std::vector<Point> pts;
        for (std::uint64_t code : c) {
            ctx.members.push_back(*cfg.index_of(code));
            pts.emplace_back(qubits, code);
        }
        std::sort(ctx.members.begin(), ctx.members.end());
        ctx.sign = context_sign(pts);
        cfg.contexts.push_back(std::move(ctx));
    }
    return cfg;
}

Configuration subspace_configuration(unsigned n, unsigned k, unsigned threads) {
    detail::check_subspace_args(n, k);
    const std::uint64_t end = code::space_end(n);
    const auto iend = static_cast<std::int64_t>(end);
    std::vector<std::vector<Context>> per_branch(static_cast<std::size_t>(end));
#pragma omp parallel for schedule(dynamic, 1) num_threads(resolve_threads(threads))
    for (std::int64_t first = 1; first < iend; ++first) {
        auto& out = per_branch[static_cast<std::size_t>(first)];
        for_each_isotropic_subspace_in_branch(n, k, static_cast<std::uint64_t>(first), [&](const SubspaceView& v) {
            Context c;
            c.members.reserve(v.codes.size());
            // Points are all of W_N in order, so code c sits at index c - 1.
            for (std::uint64_t code : v.codes) c.members.push_back(static_cast<std::uint32_t>(code - 1));
            std::sort(c.members.begin(), c.members.end());
            c.sign = v.sign;
            out.push_back(std::move(c));
        });
    }
    Configuration cfg;
    cfg.qubits = n;
    cfg.family = k == 1 ? "lines" : (k == n - 1 ? "generators" : "subspaces");
    cfg.points.reserve(end - 1);
    for (std::uint64_t c = 1; c < end; ++c) cfg.points.emplace_back(n, c);
    for (auto& b : per_branch) std::move(b.begin(), b.end(), std::back_inserter(cfg.contexts));
    return cfg;
}

Configuration perpset(unsigned n, const Point& center) {
    if (center.qubits() != n) throw GeometryError("perpset center has the wrong qubit count");
    const std::uint64_t p = center.bits();
    const std::uint64_t end = code::space_end(n);
    std::vector<std::vector<std::uint64_t>> lines;
    std::vector<std::uint64_t> pts;
    for (std::uint64_t q = 1; q < end; ++q) {
        if (code::symplectic(p, q, n)) continue;
        pts.push_back(q);
        if (q != p && q < (q ^ p)) lines.push_back({p, q, q ^ p});
    }
    return make_configuration(n, "perpset", lines, pts);
}

std::vector<Configuration> all_perpsets(unsigned n) {
    std::vector<Configuration> out;
    for (std::uint64_t p = 1; p < code::space_end(n); ++p) out.push_back(perpset(n, Point(n, p)));
    return out;
}

unsigned quadratic_form(std::uint64_t x, unsigned n) {
    return static_cast<unsigned>(std::popcount(code::z_half(x, n) & code::x_half(x, n)) & 1);
}

Quadric quadric(unsigned n, std::uint64_t q) {
    const std::uint64_t end = code::space_end(n);
    if (n < 1 || n > 16 || q >= end) throw GeometryError("quadric index out of range");
    std::vector<std::uint64_t> pts;
    for (std::uint64_t x = 1; x < end; ++x) {
        if ((quadratic_form(x, n) ^ code::symplectic(x, q, n)) == 0) pts.push_back(x);
    }
    // A totally isotropic line lies on the quadric once two of its points do.
    std::vector<std::vector<std::uint64_t>> lines;
    std::vector<bool> on(end, false);
    for (std::uint64_t x : pts) on[x] = true;
    for (std::size_t i = 0; i < pts.size(); ++i) {
        for (std::size_t j = i + 1; j < pts.size(); ++j) {
            const std::uint64_t a = pts[i], b = pts[j], c = a ^ b;
            if (c > b && on[c] && code::symplectic(a, b, n) == 0) lines.push_back({a, b, c});
        }
    }
    const QuadricType type = quadratic_form(q, n) == 0 ? QuadricType::hyperbolic : QuadricType::elliptic;
    Configuration cfg = make_configuration(n, type == QuadricType::hyperbolic ? "hyperbolic" : "elliptic", lines, pts);
    return {std::move(cfg), type, q};
}

std::vector<Quadric> all_quadrics(unsigned n) {
    std::vector<Quadric> out;
    for (std::uint64_t q = 0; q < code::space_end(n); ++q) out.push_back(quadric(n, q));
    return out;
}

namespace {

std::uint64_t pad_code(std::uint64_t two_qubit, unsigned n, const std::array<unsigned, 2>& slots) {
    std::uint64_t z = 0, x = 0;
    for (unsigned j = 0; j < 2; ++j) {
        const unsigned src = 1 - j;             // qubit j+1 of the 2-qubit code sits at bit 1-j
        const unsigned dst = n - slots[j];      // qubit slot s sits at bit n-s
        z |= ((two_qubit >> (2 + src)) & 1) << dst;
        x |= ((two_qubit >> src) & 1) << dst;
    }
    return (z << n) | x;
}

}  // namespace

Configuration doily(unsigned n, std::span<const unsigned> identity_slots) {
    if (n < 2 || n > 16) throw GeometryError("doily needs 2 <= N <= 16");
    if (identity_slots.size() != n - 2) {
        throw GeometryError("doily embedding needs exactly N-2 identity slots, got " +
                            std::to_string(identity_slots.size()));
    }
    std::vector<bool> used(n + 1, false);
    for (unsigned s : identity_slots) {
        if (s < 1 || s > n || used[s]) throw GeometryError("bad doily embedding slot " + std::to_string(s));
        used[s] = true;
    }
    std::array<unsigned, 2> slots{};
    unsigned j = 0;
    for (unsigned s = 1; s <= n; ++s) if (!used[s]) slots[j++] = s;

    std::vector<std::vector<std::uint64_t>> lines;
    for_each_isotropic_subspace(2, 1, [&](const SubspaceView& v) {
        std::vector<std::uint64_t> l;
        for (std::uint64_t c : v.codes) l.push_back(pad_code(c, n, slots));
        lines.push_back(std::move(l));
    });
    return make_configuration(n, "doily", lines);
}

Configuration doily(unsigned n) {
    std::vector<unsigned> slots;
    for (unsigned s = 3; s <= n; ++s) slots.push_back(s);
    return doily(n, slots);
}

bool has_doily_incidence(const Configuration& c) {
    if (c.points.size() != 15 || c.contexts.size() != 15) return false;
    std::vector<int> deg(15, 0);
    for (const Context& ctx : c.contexts) {
        if (ctx.members.size() != 3) return false;
        for (std::uint32_t m : ctx.members) ++deg[m];
    }
    return std::all_of(deg.begin(), deg.end(), [](int d) { return d == 3; });
}

std::vector<std::array<std::size_t, 5>> spreads(const Configuration& d) {
    if (!has_doily_incidence(d)) throw GeometryError("spreads: configuration is not a doily");
    std::vector<std::uint32_t> line_mask(15, 0);
    for (std::size_t i = 0; i < 15; ++i) {
        for (std::uint32_t m : d.contexts[i].members) line_mask[i] |= 1u << m;
    }
    std::vector<std::array<std::size_t, 5>> out;
    std::array<std::size_t, 5> pick{};
    auto search = [&](auto&& self, std::size_t from, std::size_t depth, std::uint32_t covered) -> void {
        if (depth == 5) {
            if (covered == 0x7fff) out.push_back(pick);
            return;
        }
        for (std::size_t i = from; i < 15; ++i) {
            if (line_mask[i] & covered) continue;
            pick[depth] = i;
            self(self, i + 1, depth + 1, covered | line_mask[i]);
        }
    };
    search(search, 0, 0, 0);
    return out;
}

std::vector<Configuration> two_spreads(const Configuration& d) {
    std::vector<Configuration> out;
    for (const auto& sp : spreads(d)) {
        Configuration t;
        t.qubits = d.qubits;
        t.family = "two-spread";
        t.points = d.points;
        for (std::size_t i = 0; i < d.contexts.size(); ++i) {
            if (std::find(sp.begin(), sp.end(), i) == sp.end()) t.contexts.push_back(d.contexts[i]);
        }
        out.push_back(std::move(t));
    }
    return out;
}

std::vector<Configuration> grids() {
    std::vector<Configuration> out;
    for (Quadric& q : all_quadrics(2)) {
        if (q.type != QuadricType::hyperbolic) continue;
        q.config.family = "grid";
        out.push_back(std::move(q.config));
    }
    return out;
}

// ---------------------------------------------------------------------------

std::string family_name(FamilySpec::Family f) {
    switch (f) {
        case FamilySpec::Family::subspaces: return "subspaces";
        case FamilySpec::Family::perpset: return "perpset";
        case FamilySpec::Family::quadric: return "quadric";
        case FamilySpec::Family::doily: return "doily";
        case FamilySpec::Family::two_spread: return "two-spread";
        case FamilySpec::Family::grid: return "grid";
    }
    return "?";
}

std::optional<FamilySpec::Family> parse_family(std::string_view name) {
    using F = FamilySpec::Family;
    static const std::map<std::string, F, std::less<>> kNames{
        {"subspaces", F::subspaces}, {"lines", F::subspaces},      {"generators", F::subspaces},
        {"perpset", F::perpset},     {"perpsets", F::perpset},     {"quadric", F::quadric},
        {"hyperbolic", F::quadric},  {"elliptic", F::quadric},     {"doily", F::doily},
        {"two-spread", F::two_spread}, {"two-spreads", F::two_spread}, {"grid", F::grid},
        {"grids", F::grid}};
    auto it = kNames.find(name);
    if (it == kNames.end()) return std::nullopt;
    return it->second;
}

std::vector<Configuration> generate(const FamilySpec& spec, unsigned threads) {
    using F = FamilySpec::Family;
    const unsigned n = spec.qubits;
    std::vector<Configuration> out;
    switch (spec.family) {
        case F::subspaces:
            out.push_back(subspace_configuration(n, spec.k, threads));
            break;
        case F::perpset:
            if (spec.anchor) out.push_back(perpset(n, Point(n, *spec.anchor)));
            else out = all_perpsets(n);
            break;
        case F::quadric:
            if (spec.anchor) {
                Quadric q = quadric(n, *spec.anchor);
                if (spec.quadric_type && *spec.quadric_type != q.type) {
                    throw GeometryError("quadric anchor has the other type");
                }
                out.push_back(std::move(q.config));
            } else {
                for (Quadric& q : all_quadrics(n)) {
                    if (!spec.quadric_type || *spec.quadric_type == q.type) out.push_back(std::move(q.config));
                }
            }
            break;
        case F::doily:
            out.push_back(spec.embedding.empty() ? doily(n) : doily(n, spec.embedding));
            break;
        case F::two_spread: {
            Configuration d = spec.embedding.empty() ? doily(n) : doily(n, spec.embedding);
            out = two_spreads(d);
            break;
        }
        case F::grid:
            if (n != 2) throw GeometryError("grids are generated for N=2 only");
            out = grids();
            break;
    }
    return out;
}

// ---------------------------------------------------------------------------

void write_configuration(std::ostream& os, const Configuration& c) {
    os << "qubits=" << c.qubits << " family=" << (c.family.empty() ? "custom" : c.family) << '\n';
    std::vector<bool> used(c.points.size(), false);
    for (const Context& ctx : c.contexts) {
        for (std::uint32_t m : ctx.members) {
            os << decode(c.points[m]) << ' ';
            used[m] = true;
        }
        os << (ctx.sign < 0 ? '-' : '+') << '\n';
    }
    if (std::find(used.begin(), used.end(), false) != used.end()) {
        os << "isolated:";
        for (std::size_t i = 0; i < used.size(); ++i) if (!used[i]) os << ' ' << decode(c.points[i]);
        os << '\n';
    }
}

Configuration read_configuration(std::istream& is) {
    std::string line;
    std::size_t lineno = 0;
    auto fail = [&](const std::string& what) -> GeometryError {
        return GeometryError("configuration line " + std::to_string(lineno) + ": " + what);
    };
    unsigned qubits = 0;
    std::string family;
    bool have_header = false;
    std::vector<std::pair<std::vector<std::uint64_t>, int>> raw;
    std::vector<std::uint64_t> isolated;

    while (std::getline(is, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        std::istringstream ls(line);
        std::string tok;
        if (!(ls >> tok) || tok[0] == '#') continue;
        if (!have_header) {
            do {
                auto eq = tok.find('=');
                if (eq == std::string::npos) throw fail("expected key=value header, got '" + tok + "'");
                const std::string key = tok.substr(0, eq), val = tok.substr(eq + 1);
                if (key == "qubits") {
                    try {
                        qubits = static_cast<unsigned>(std::stoul(val));
                    } catch (const std::exception&) {
                        throw fail("bad qubit count '" + val + "'");
                    }
                } else if (key == "family") {
                    family = val;
                }
            } while (ls >> tok);
            if (qubits == 0 || qubits > kMaxQubits) throw fail("header needs qubits=N");
            have_header = true;
            continue;
        }
        if (tok == "isolated:") {
            while (ls >> tok) isolated.push_back(encode(tok).bits());
            continue;
        }
        std::vector<std::uint64_t> pts;
        int sign = 0;
        do {
            if (tok == "+" || tok == "-") {
                sign = tok == "+" ? 1 : -1;
                if (ls >> tok) throw fail("tokens after the sign");
                break;
            }
            if (tok.size() != qubits) throw fail("observable '" + tok + "' has the wrong length");
            try {
                pts.push_back(encode(tok).bits());
            } catch (const PauliError& e) {
                throw fail(e.what());
            }
        } while (ls >> tok);
        if (sign == 0) throw fail("context is missing its sign");
        if (pts.empty()) throw fail("empty context");
        raw.emplace_back(std::move(pts), sign);
    }
    if (!have_header) throw GeometryError("configuration has no header");

    std::vector<std::uint64_t> all = isolated;
    for (const auto& [pts, sign] : raw) all.insert(all.end(), pts.begin(), pts.end());
    std::sort(all.begin(), all.end());
    all.erase(std::unique(all.begin(), all.end()), all.end());
    Configuration cfg;
    cfg.qubits = qubits;
    cfg.family = family;
    for (std::uint64_t c : all) cfg.points.emplace_back(qubits, c);
    for (const auto& [pts, sign] : raw) {
        Context ctx;
        for (std::uint64_t c : pts) ctx.members.push_back(*cfg.index_of(c));
        std::sort(ctx.members.begin(), ctx.members.end());
        ctx.sign = sign;
        cfg.contexts.push_back(std::move(ctx));
    }
    return cfg;
}

}  // namespace qctx
