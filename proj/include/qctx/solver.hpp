#pragma once

// Contextuality decision and the contextuality degree d = d_H(E, Im A).

#include <chrono>
#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "qctx/incidence.hpp"

namespace qctx {

enum class DegreeStatus { non_contextual, exact, upper_bound };
std::string to_string(DegreeStatus s);

struct DegreeResult {
    DegreeStatus status = DegreeStatus::non_contextual;
    std::size_t d = 0;
    BitVector witness;                     ///< length p, achieves exactly d violations
    std::vector<std::size_t> unsatisfied;  ///< contexts violated by the witness
    std::vector<std::size_t> history;      ///< distance after each improvement
    std::string method;
    std::string note;
};

enum class Method { automatic, gauss_only, branch_bound, coset_search, heuristic, external_sat };
std::string to_string(Method m);
std::optional<Method> parse_method(std::string_view name);

struct SolveBudget {
    Method method = Method::automatic;
    double time_limit = 0;              ///< seconds, 0 = unlimited
    std::uint64_t iterations = 20000;   ///< heuristic restarts
    std::uint64_t node_limit = 2'000'000'000;  ///< search nodes for the exact oracles
    std::uint64_t seed = 0;
    std::size_t target = 0;             ///< heuristic stops once it reaches this distance
    unsigned threads = 0;                ///< 0 = OpenMP default
    std::vector<std::string> solver_cmd;  ///< external SAT solver argv prefix
};

struct ConsistencyResult {
    bool contextual = false;
    BitVector solution;                    ///< A x = E when not contextual
    std::vector<std::size_t> certificate;  ///< rows summing to (0...0 | 1) when contextual
};

/// Gaussian elimination on [A | E].
ConsistencyResult is_contextual(const IncidenceSystem& s);

std::vector<std::size_t> unsatisfied_contexts(const IncidenceSystem& s, const BitVector& x);
/// Number of rows with (A x)_i = E_i.
std::size_t satisfied_count(const IncidenceSystem& s, const BitVector& x);

long long cabello_bound(std::size_t contexts, std::size_t degree);

/// Answers "is there an assignment satisfying at least t contexts?".
class ThresholdOracle {
public:
    enum class Outcome { found, infeasible, unknown };
    struct Answer {
        Outcome outcome = Outcome::unknown;
        BitVector assignment;
        std::string diagnostic;
    };

    virtual ~ThresholdOracle() = default;
    virtual Answer find(std::size_t min_satisfied) = 0;
    virtual std::string name() const = 0;
};

/// Depth-first branch and bound over observable variables, most frequent
/// first. The bound adds, for every variable, the unavoidable conflicts among
/// rows in which it is the last unassigned variable.
class BranchBoundOracle final : public ThresholdOracle {
public:
    BranchBoundOracle(const IncidenceSystem& s, std::uint64_t node_limit);
    Answer find(std::size_t min_satisfied) override;
    std::string name() const override { return "branch_bound"; }
    std::uint64_t nodes() const { return nodes_; }

private:
    const IncidenceSystem& s_;
    std::uint64_t node_limit_;
    std::uint64_t nodes_ = 0;
    std::vector<std::vector<std::uint32_t>> rows_of_;
    std::vector<std::vector<std::uint32_t>> vars_of_;
    std::vector<std::uint32_t> order_;
};

/// Enumerates the coset E + Im(A) by increasing weight on several disjoint
/// information sets; after every weight level the sets give a lower bound on
/// all coset vectors not yet seen.
class CosetSearchOracle final : public ThresholdOracle {
public:
    CosetSearchOracle(const IncidenceSystem& s, std::uint64_t node_limit);
    Answer find(std::size_t min_satisfied) override;
    std::string name() const override { return "coset_search"; }

    std::size_t code_dimension() const { return rank_; }
    std::size_t information_sets() const { return sets_.size(); }
    /// Lower bound on every coset weight once all subsets of size <= w were seen.
    std::size_t lower_bound_after(std::size_t w) const;

private:
    struct InfoSet {
        std::size_t rank = 0;
        std::vector<BitVector> rows;  ///< length l, systematic on this set
        std::vector<BitVector> xs;    ///< length p, rows[i] = A xs[i]
        BitVector e;                  ///< E reduced to zero on the set
        BitVector xe;                 ///< e = E + A xe
    };

    const IncidenceSystem& s_;
    std::uint64_t node_limit_;
    std::size_t rank_ = 0;
    std::vector<InfoSet> sets_;
};

/// Improvement loop: start from the all-zero assignment (or `start`), ask the
/// oracle for one more satisfied context than the best known, adopt whatever
/// it returns, and stop when the oracle proves no improvement exists.
DegreeResult contextuality_degree(const IncidenceSystem& s, ThresholdOracle& oracle,
                                  const std::optional<BitVector>& start = std::nullopt);

/// Exact degree with the internal oracles. Method automatic picks coset
/// search; branch_bound forces the branch-and-bound oracle. Budget exhaustion
/// yields status upper_bound.
DegreeResult degree_exact(const IncidenceSystem& s, const SolveBudget& budget);

/// Randomized information-set decoding on E + Im(A) with greedy polishing.
/// Deterministic given the seed and independent of the thread count.
DegreeResult degree_upper_bound(const IncidenceSystem& s, const SolveBudget& budget);

/// Method ladder: elimination, then the exact oracle, then the heuristic,
/// then (if configured) an external SAT oracle seeded with the best witness.
DegreeResult degree(const IncidenceSystem& s, const SolveBudget& budget);

/// Fills `unsatisfied` and checks the witness achieves d.
void finalize(const IncidenceSystem& s, DegreeResult& r);

}  // namespace qctx
