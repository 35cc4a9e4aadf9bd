#include "qctx/solver.hpp"

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <limits>
#include <map>
#include <numeric>
#include <random>
#include <stdexcept>

#include "qctx/satbridge.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace qctx {

std::string to_string(DegreeStatus s) {
    switch (s) {
        case DegreeStatus::non_contextual: return "non_contextual";
        case DegreeStatus::exact: return "exact";
        case DegreeStatus::upper_bound: return "upper_bound";
    }
    return "?";
}

std::string to_string(Method m) {
    switch (m) {
        case Method::automatic: return "auto";
        case Method::gauss_only: return "gauss";
        case Method::branch_bound: return "branch_bound";
        case Method::coset_search: return "coset_search";
        case Method::heuristic: return "heuristic";
        case Method::external_sat: return "external_sat";
    }
    return "?";
}

std::optional<Method> parse_method(std::string_view name) {
    static const std::map<std::string, Method, std::less<>> kNames{
        {"auto", Method::automatic},           {"gauss", Method::gauss_only},
        {"gauss_only", Method::gauss_only},    {"branch_bound", Method::branch_bound},
        {"bb", Method::branch_bound},          {"coset_search", Method::coset_search},
        {"coset", Method::coset_search},       {"heuristic", Method::heuristic},
        {"isd", Method::heuristic},            {"external_sat", Method::external_sat},
        {"sat", Method::external_sat}};
    auto it = kNames.find(name);
    if (it == kNames.end()) return std::nullopt;
    return it->second;
}

namespace {

using Clock = std::chrono::steady_clock;

struct Deadline {
    explicit Deadline(double seconds)
        : active(seconds > 0),
          at(Clock::now() + std::chrono::duration_cast<Clock::duration>(std::chrono::duration<double>(seconds))) {}
    bool expired() const { return active && Clock::now() >= at; }
    bool active;
    Clock::time_point at;
};

BitVector with_extra_bit(const BitVector& row, bool bit) {
    BitVector out(row.size() + 1);
    auto src = row.words();
    auto dst = out.words();
    std::copy(src.begin(), src.end(), dst.begin());
    if (bit) out.set(row.size());
    return out;
}

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

int resolve_threads(unsigned threads) {
#ifdef _OPENMP
    return threads == 0 ? omp_get_max_threads() : static_cast<int>(threads);
#else
    (void)threads;
    return 1;
#endif
}

BitVector residual(const IncidenceSystem& s, const BitVector& x) {
    BitVector r = s.a.multiply(x);
    r ^= s.e;
    return r;
}

DegreeResult non_contextual_result(const IncidenceSystem& s, BitVector x, std::string method) {
    DegreeResult r;
    r.status = DegreeStatus::non_contextual;
    r.d = 0;
    r.witness = std::move(x);
    r.method = std::move(method);
    r.history = {0};
    finalize(s, r);
    return r;
}

}  // namespace

ConsistencyResult is_contextual(const IncidenceSystem& s) {
    const std::size_t p = s.observables();
    Gf2Echelon ech(p + 1, p, true);
    for (std::size_t i = 0; i < s.contexts(); ++i) {
        BitVector row = with_extra_bit(s.a.row(i), s.e.get(i));
        const auto red = ech.insert(row, i);
        if (!red.independent && row.get(p)) {
            ConsistencyResult c;
            c.contextual = true;
            c.certificate = ech.origin(red.slots);
            c.certificate.push_back(i);
            std::sort(c.certificate.begin(), c.certificate.end());
            return c;
        }
    }
    return {false, ech.back_substitute(), {}};
}

std::vector<std::size_t> unsatisfied_contexts(const IncidenceSystem& s, const BitVector& x) {
    if (x.size() != s.observables()) throw std::invalid_argument("assignment length differs from observable count");
    const BitVector r = residual(s, x);
    std::vector<std::size_t> out;
    for (std::size_t i = r.first(); i < r.size(); i = r.next(i + 1)) out.push_back(i);
    return out;
}

std::size_t satisfied_count(const IncidenceSystem& s, const BitVector& x) {
    if (x.size() != s.observables()) throw std::invalid_argument("assignment length differs from observable count");
    return s.contexts() - residual(s, x).count();
}

long long cabello_bound(std::size_t contexts, std::size_t degree) {
    if (degree > contexts) throw std::invalid_argument("degree exceeds the number of contexts");
    return static_cast<long long>(contexts) - 2 * static_cast<long long>(degree);
}

void finalize(const IncidenceSystem& s, DegreeResult& r) {
    r.unsatisfied = unsatisfied_contexts(s, r.witness);
    if (r.unsatisfied.size() != r.d) {
        throw std::logic_error("witness violates " + std::to_string(r.unsatisfied.size()) + " contexts, reported d=" +
                               std::to_string(r.d));
    }
}

// ---------------------------------------------------------------------------
// Branch and bound.

BranchBoundOracle::BranchBoundOracle(const IncidenceSystem& s, std::uint64_t node_limit)
    : s_(s), node_limit_(node_limit), rows_of_(s.observables()), vars_of_(s.contexts()) {
    for (std::size_t i = 0; i < s.contexts(); ++i) {
        const BitVector& row = s.a.row(i);
        for (std::size_t j = row.first(); j < row.size(); j = row.next(j + 1)) {
            rows_of_[j].push_back(static_cast<std::uint32_t>(i));
            vars_of_[i].push_back(static_cast<std::uint32_t>(j));
        }
    }
    order_.resize(s.observables());
    std::iota(order_.begin(), order_.end(), 0u);
    std::stable_sort(order_.begin(), order_.end(),
                     [&](std::uint32_t a, std::uint32_t b) { return rows_of_[a].size() > rows_of_[b].size(); });
}

namespace {

class BranchBoundSearch {
public:
    BranchBoundSearch(const IncidenceSystem& s, const std::vector<std::vector<std::uint32_t>>& rows_of,
                      const std::vector<std::vector<std::uint32_t>>& vars_of, const std::vector<std::uint32_t>& order,
                      std::size_t allowed, std::uint64_t node_budget)
        : s_(s), rows_of_(rows_of), order_(order), allowed_(allowed), budget_(node_budget),
          remaining_(s.contexts()), unassigned_(s.contexts(), 0), parity_(s.contexts(), 0),
          need_(s.observables(), {0, 0}), x_(s.observables()) {
        for (std::size_t r = 0; r < s.contexts(); ++r) {
            remaining_[r] = static_cast<std::uint32_t>(vars_of[r].size());
            for (std::uint32_t v : vars_of[r]) unassigned_[r] ^= v;
            const unsigned want = s.e.get(r) ? 1 : 0;
            if (remaining_[r] == 0) violated_ += want;
            else if (remaining_[r] == 1) bump(unassigned_[r], want, +1);
        }
    }

    enum class Result { found, exhausted, aborted };

    Result run() {
        const bool ok = dfs(0);
        if (aborted_) return Result::aborted;
        return ok ? Result::found : Result::exhausted;
    }

    const BitVector& assignment() const { return x_; }
    std::uint64_t nodes() const { return nodes_; }

private:
    static std::uint32_t min2(const std::array<std::uint32_t, 2>& a) { return std::min(a[0], a[1]); }

    void bump(std::uint32_t var, unsigned want, int delta) {
        const std::uint32_t before = min2(need_[var]);
        need_[var][want] = static_cast<std::uint32_t>(static_cast<int>(need_[var][want]) + delta);
        lb_ = lb_ + min2(need_[var]) - before;
    }

    void assign(std::uint32_t v, unsigned val) {
        lb_ -= min2(need_[v]);
        for (std::uint32_t r : rows_of_[v]) {
            parity_[r] ^= static_cast<std::uint8_t>(val);
            unassigned_[r] ^= v;
            const std::uint32_t rem = --remaining_[r];
            const unsigned want = (s_.e.get(r) ? 1u : 0u) ^ parity_[r];
            if (rem == 0) violated_ += want;
            else if (rem == 1) bump(unassigned_[r], want, +1);
        }
    }

    void unassign(std::uint32_t v, unsigned val, const std::array<std::uint32_t, 2>& saved) {
        for (auto it = rows_of_[v].rbegin(); it != rows_of_[v].rend(); ++it) {
            const std::uint32_t r = *it;
            const unsigned want = (s_.e.get(r) ? 1u : 0u) ^ parity_[r];
            if (remaining_[r] == 0) violated_ -= want;
            else if (remaining_[r] == 1) bump(unassigned_[r], want, -1);
            ++remaining_[r];
            unassigned_[r] ^= v;
            parity_[r] ^= static_cast<std::uint8_t>(val);
        }
        need_[v] = saved;
        lb_ += min2(saved);
    }

    bool dfs(std::size_t idx) {
        if (++nodes_ > budget_) {
            aborted_ = true;
            return false;
        }
        if (violated_ + lb_ > allowed_) return false;
        if (idx == order_.size()) return true;
        const std::uint32_t v = order_[idx];
        const unsigned first = need_[v][1] > need_[v][0] ? 1 : 0;
        for (unsigned val : {first, 1 - first}) {
            const auto saved = need_[v];
            assign(v, val);
            need_[v] = {0, 0};
            x_.set(v, val != 0);
            if (dfs(idx + 1)) return true;
            unassign(v, val, saved);
            if (aborted_) return false;
        }
        x_.set(v, false);
        return false;
    }

    const IncidenceSystem& s_;
    const std::vector<std::vector<std::uint32_t>>& rows_of_;
    const std::vector<std::uint32_t>& order_;
    std::size_t allowed_;
    std::uint64_t budget_;
    std::vector<std::uint32_t> remaining_;
    std::vector<std::uint32_t> unassigned_;
    std::vector<std::uint8_t> parity_;
    std::vector<std::array<std::uint32_t, 2>> need_;
    BitVector x_;
    std::size_t violated_ = 0;
    std::size_t lb_ = 0;
    std::uint64_t nodes_ = 0;
    bool aborted_ = false;
};

}  // namespace

ThresholdOracle::Answer BranchBoundOracle::find(std::size_t min_satisfied) {
    const std::size_t l = s_.contexts();
    if (min_satisfied > l) return {Outcome::infeasible, {}, "threshold above the context count"};
    const std::uint64_t left = node_limit_ > nodes_ ? node_limit_ - nodes_ : 0;
    BranchBoundSearch search(s_, rows_of_, vars_of_, order_, l - min_satisfied, left);
    const auto res = search.run();
    nodes_ += search.nodes();
    switch (res) {
        case BranchBoundSearch::Result::found: return {Outcome::found, search.assignment(), {}};
        case BranchBoundSearch::Result::exhausted: return {Outcome::infeasible, {}, {}};
        case BranchBoundSearch::Result::aborted: break;
    }
    return {Outcome::unknown, {}, "node limit reached"};
}

// ---------------------------------------------------------------------------
// Coset enumeration over information sets.

namespace {

struct Systematic {
    std::vector<BitVector> rows;
    std::vector<BitVector> xs;
    std::vector<std::size_t> pivots;
};

/// Gauss-Jordan on `rows`, choosing pivots from `positions` in order. Pivot
/// rows come first; remaining rows are zero on every listed position.
Systematic gauss_jordan(std::vector<BitVector> rows, std::vector<BitVector> xs,
                        const std::vector<std::size_t>& positions, std::size_t max_rank) {
    Systematic out;
    std::size_t nr = 0;
    for (std::size_t pos : positions) {
        if (nr == rows.size() || nr == max_rank) break;
        std::size_t i = nr;
        while (i < rows.size() && !rows[i].get(pos)) ++i;
        if (i == rows.size()) continue;
        std::swap(rows[i], rows[nr]);
        std::swap(xs[i], xs[nr]);
        for (std::size_t j = 0; j < rows.size(); ++j) {
            if (j != nr && rows[j].get(pos)) {
                rows[j] ^= rows[nr];
                xs[j] ^= xs[nr];
            }
        }
        out.pivots.push_back(pos);
        ++nr;
    }
    out.rows = std::move(rows);
    out.xs = std::move(xs);
    return out;
}

std::vector<BitVector> columns_of(const IncidenceSystem& s) {
    const BitMatrix t = s.a.transpose();
    std::vector<BitVector> cols;
    cols.reserve(t.rows());
    for (std::size_t j = 0; j < t.rows(); ++j) cols.push_back(t.row(j));
    return cols;
}

std::vector<BitVector> unit_vectors(std::size_t p) {
    std::vector<BitVector> xs(p, BitVector(p));
    for (std::size_t j = 0; j < p; ++j) xs[j].set(j);
    return xs;
}

}  // namespace

CosetSearchOracle::CosetSearchOracle(const IncidenceSystem& s, std::uint64_t node_limit)
    : s_(s), node_limit_(node_limit) {
    const std::size_t l = s.contexts(), p = s.observables();
    std::vector<std::size_t> positions(l);
    std::iota(positions.begin(), positions.end(), std::size_t{0});

    Systematic first = gauss_jordan(columns_of(s), unit_vectors(p), positions, p);
    rank_ = first.pivots.size();
    first.rows.resize(rank_);
    first.xs.resize(rank_);

    std::vector<bool> used(l, false);
    Systematic cur = std::move(first);
    while (true) {
        InfoSet set;
        set.rank = cur.pivots.size();
        set.e = s.e;
        set.xe = BitVector(p);
        for (std::size_t k = 0; k < set.rank; ++k) {
            if (set.e.get(cur.pivots[k])) {
                set.e ^= cur.rows[k];
                set.xe ^= cur.xs[k];
            }
            used[cur.pivots[k]] = true;
        }
        set.rows = cur.rows;
        set.xs = cur.xs;
        sets_.push_back(std::move(set));

        std::vector<std::size_t> avail;
        for (std::size_t i = 0; i < l; ++i) if (!used[i]) avail.push_back(i);
        if (avail.empty() || rank_ == 0) break;
        cur = gauss_jordan(sets_.back().rows, sets_.back().xs, avail, rank_);
        if (cur.pivots.empty()) break;
    }
}

std::size_t CosetSearchOracle::lower_bound_after(std::size_t w) const {
    std::size_t lb = 0;
    for (const InfoSet& set : sets_) {
        const std::size_t missing = rank_ - set.rank;
        if (w + 1 > missing) lb += w + 1 - missing;
    }
    return lb;
}

ThresholdOracle::Answer CosetSearchOracle::find(std::size_t min_satisfied) {
    const std::size_t l = s_.contexts();
    if (min_satisfied > l) return {Outcome::infeasible, {}, "threshold above the context count"};
    const std::size_t allowed = l - min_satisfied;

    std::uint64_t nodes = 0;
    std::vector<std::size_t> chosen;
    std::vector<BitVector> acc;

    for (std::size_t w = 0; w <= rank_; ++w) {
        for (const InfoSet& set : sets_) {
            acc.assign(w + 1, set.e);
            chosen.assign(w, 0);
            bool hit = false, abort = false;
            auto rec = [&](auto&& self, std::size_t from, std::size_t depth) -> void {
                if (depth == w) {
                    if (++nodes > node_limit_) abort = true;
                    else if (acc[depth].count() <= allowed) hit = true;
                    return;
                }
                const std::size_t last = rank_ - (w - depth);
                for (std::size_t i = from; i <= last && !hit && !abort; ++i) {
                    chosen[depth] = i;
                    acc[depth + 1] = acc[depth];
                    acc[depth + 1] ^= set.rows[i];
                    self(self, i + 1, depth + 1);
                }
            };
            rec(rec, 0, 0);
            if (hit) {
                BitVector x = set.xe;
                for (std::size_t i : chosen) x ^= set.xs[i];
                return {Outcome::found, std::move(x), {}};
            }
            if (abort) return {Outcome::unknown, {}, "node limit reached"};
        }
        if (lower_bound_after(w) > allowed) return {Outcome::infeasible, {}, {}};
    }
    // The first set has seen every subset: the coset is exhausted.
    return {Outcome::infeasible, {}, {}};
}

// ---------------------------------------------------------------------------

DegreeResult contextuality_degree(const IncidenceSystem& s, ThresholdOracle& oracle,
                                  const std::optional<BitVector>& start) {
    const std::size_t l = s.contexts();
    DegreeResult r;
    r.method = oracle.name();
    BitVector x = start ? *start : BitVector(s.observables());
    std::size_t i = satisfied_count(s, x);
    r.history.push_back(l - i);
    while (i < l) {
        auto ans = oracle.find(i + 1);
        if (ans.outcome == ThresholdOracle::Outcome::infeasible) {
            r.status = DegreeStatus::exact;
            r.d = l - i;
            r.witness = std::move(x);
            finalize(s, r);
            return r;
        }
        if (ans.outcome == ThresholdOracle::Outcome::unknown) {
            r.status = DegreeStatus::upper_bound;
            r.d = l - i;
            r.witness = std::move(x);
            r.note = ans.diagnostic;
            finalize(s, r);
            return r;
        }
        const std::size_t got = satisfied_count(s, ans.assignment);
        if (got <= i) throw std::logic_error(oracle.name() + " returned an assignment below the threshold");
        x = std::move(ans.assignment);
        i = got;
        r.history.push_back(l - i);
    }
    r.status = DegreeStatus::non_contextual;
    r.d = 0;
    r.witness = std::move(x);
    finalize(s, r);
    return r;
}

DegreeResult degree_exact(const IncidenceSystem& s, const SolveBudget& budget) {
    if (s.contexts() == 0) return non_contextual_result(s, BitVector(s.observables()), "trivial");
    if (budget.method == Method::branch_bound) {
        BranchBoundOracle oracle(s, budget.node_limit);
        return contextuality_degree(s, oracle);
    }
    CosetSearchOracle oracle(s, budget.node_limit);
    return contextuality_degree(s, oracle);
}

// ---------------------------------------------------------------------------
// Information-set decoding.

namespace {

struct Candidate {
    std::size_t weight = std::numeric_limits<std::size_t>::max();
    std::uint64_t iteration = std::numeric_limits<std::uint64_t>::max();
    BitVector x;

    bool better_than(const Candidate& o) const {
        return weight < o.weight || (weight == o.weight && iteration < o.iteration);
    }
};

/// Flips single variables while that lowers the residual weight.
void polish(const std::vector<BitVector>& cols, const std::vector<std::size_t>& degree, BitVector& x, BitVector& v) {
    while (true) {
        long best_gain = 0;
        std::size_t best_j = cols.size();
        for (std::size_t j = 0; j < cols.size(); ++j) {
            std::size_t ones = 0;
            auto a = cols[j].words();
            auto b = v.words();
            for (std::size_t w = 0; w < a.size(); ++w) ones += static_cast<std::size_t>(std::popcount(a[w] & b[w]));
            const long gain = 2 * static_cast<long>(ones) - static_cast<long>(degree[j]);
            if (gain > best_gain) {
                best_gain = gain;
                best_j = j;
            }
        }
        if (best_j == cols.size()) return;
        x.flip(best_j);
        v ^= cols[best_j];
    }
}

}  // namespace

DegreeResult degree_upper_bound(const IncidenceSystem& s, const SolveBudget& budget) {
    const std::size_t l = s.contexts(), p = s.observables();
    DegreeResult r;
    r.method = "heuristic";
    if (l == 0) return non_contextual_result(s, BitVector(p), "heuristic");

    const std::vector<BitVector> cols = columns_of(s);
    std::vector<std::size_t> degree(p);
    for (std::size_t j = 0; j < p; ++j) degree[j] = cols[j].count();
    const std::size_t rank = gf2_rank(s.a);
    const std::uint64_t iters = std::max<std::uint64_t>(budget.iterations, 1);
    const Deadline deadline(budget.time_limit);
    const bool pairs = rank <= 256;

    std::vector<std::uint32_t> per_iter(iters, std::numeric_limits<std::uint32_t>::max());
    Candidate global;
    global.weight = s.e.count();
    global.iteration = 0;
    global.x = BitVector(p);
    std::atomic<bool> stop{false};

#pragma omp parallel num_threads(resolve_threads(budget.threads))
    {
        Candidate local = global;
        const std::vector<BitVector> xs0 = unit_vectors(p);
        std::vector<std::size_t> positions(l);
#pragma omp for schedule(dynamic, 8)
        for (std::int64_t it64 = 0; it64 < static_cast<std::int64_t>(iters); ++it64) {
            if (stop.load(std::memory_order_relaxed)) continue;
            if (deadline.expired()) {
                stop = true;
                continue;
            }
            const auto it = static_cast<std::uint64_t>(it64);
            std::mt19937_64 rng(splitmix64(budget.seed ^ splitmix64(it)));
            std::iota(positions.begin(), positions.end(), std::size_t{0});
            std::shuffle(positions.begin(), positions.end(), rng);
            Systematic sys = gauss_jordan(cols, xs0, positions, rank);
            const std::size_t rk = sys.pivots.size();

            BitVector v = s.e, x(p);
            for (std::size_t k = 0; k < rk; ++k) {
                if (v.get(sys.pivots[k])) {
                    v ^= sys.rows[k];
                    x ^= sys.xs[k];
                }
            }
            // Lee-Brickell: also try adding one or two systematic rows.
            std::size_t best = v.count();
            std::size_t bi = rk, bj = rk;
            for (std::size_t a = 0; a < rk; ++a) {
                const std::size_t w1 = v.distance(sys.rows[a]);
                if (w1 < best) {
                    best = w1;
                    bi = a;
                    bj = rk;
                }
                if (!pairs) continue;
                const BitVector va = v ^ sys.rows[a];
                for (std::size_t b = a + 1; b < rk; ++b) {
                    const std::size_t w2 = va.distance(sys.rows[b]);
                    if (w2 < best) {
                        best = w2;
                        bi = a;
                        bj = b;
                    }
                }
            }
            if (bi < rk) {
                v ^= sys.rows[bi];
                x ^= sys.xs[bi];
            }
            if (bj < rk) {
                v ^= sys.rows[bj];
                x ^= sys.xs[bj];
            }
            polish(cols, degree, x, v);
            Candidate c{v.count(), it, std::move(x)};
            per_iter[it] = static_cast<std::uint32_t>(c.weight);
            if (c.better_than(local)) local = std::move(c);
            if (local.weight <= budget.target) stop = true;
        }
#pragma omp critical
        {
            if (local.better_than(global)) global = std::move(local);
        }
    }

    std::size_t run = s.e.count();
    r.history.push_back(run);
    for (std::uint32_t w : per_iter) {
        if (w < run) {
            run = w;
            r.history.push_back(run);
        }
    }
    r.d = global.weight;
    r.witness = std::move(global.x);
    r.status = r.d == 0 ? DegreeStatus::non_contextual : DegreeStatus::upper_bound;
    if (stop && deadline.expired()) r.note = "time limit reached";
    finalize(s, r);
    return r;
}

// ---------------------------------------------------------------------------

DegreeResult degree(const IncidenceSystem& s, const SolveBudget& budget) {
    const std::size_t p = s.observables();
    if (s.contexts() == 0) return non_contextual_result(s, BitVector(p), "trivial");

    const ConsistencyResult gauss = is_contextual(s);
    if (!gauss.contextual) return non_contextual_result(s, gauss.solution, "gauss");

    switch (budget.method) {
        case Method::gauss_only: {
            DegreeResult r;
            r.status = DegreeStatus::upper_bound;
            r.witness = BitVector(p);
            r.d = s.e.count();
            r.method = "gauss";
            r.history = {r.d};
            r.note = "contextual; degree not searched";
            finalize(s, r);
            return r;
        }
        case Method::branch_bound:
        case Method::coset_search:
            return degree_exact(s, budget);
        case Method::heuristic:
            return degree_upper_bound(s, budget);
        case Method::external_sat: {
            ExternalSatOracle oracle(s, budget.solver_cmd, budget.time_limit);
            return contextuality_degree(s, oracle);
        }
        case Method::automatic:
            break;
    }

    DegreeResult best = degree_upper_bound(s, budget);
    if (best.status == DegreeStatus::non_contextual) return best;

    CosetSearchOracle coset(s, budget.node_limit);
    // Work needed to prove the heuristic bound optimal.
    std::size_t w = 0;
    while (w <= coset.code_dimension() && coset.lower_bound_after(w) < best.d) ++w;
    long double work = 0;
    {
        long double binom = 1;  // C(r, j)
        const std::size_t r = coset.code_dimension();
        for (std::size_t j = 0; j <= std::min(w, r); ++j) {
            work += binom * static_cast<long double>(coset.information_sets());
            binom = binom * static_cast<long double>(r - j) / static_cast<long double>(j + 1);
        }
    }
    if (work <= static_cast<long double>(budget.node_limit)) {
        DegreeResult exact = contextuality_degree(s, coset, best.witness);
        exact.history.insert(exact.history.begin(), best.history.begin(), best.history.end() - 1);
        if (exact.status == DegreeStatus::exact || exact.d <= best.d) return exact;
    } else {
        char buf[32];
        std::snprintf(buf, sizeof buf, "%.1e", static_cast<double>(work));
        best.note = std::string("coset search needs ~") + buf + " nodes; bound only";
    }

    if (!budget.solver_cmd.empty()) {
        ExternalSatOracle oracle(s, budget.solver_cmd, budget.time_limit);
        DegreeResult ext = contextuality_degree(s, oracle, best.witness);
        ext.history.insert(ext.history.begin(), best.history.begin(), best.history.end() - 1);
        return ext;
    }
    return best;
}

}  // namespace qctx
