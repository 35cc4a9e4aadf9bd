#pragma once

// XOR-threshold problems for external SAT solvers: bc2cnf text, DIMACS CNF
// with a totalizer, subprocess invocation and model parsing.

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "qctx/incidence.hpp"
#include "qctx/solver.hpp"

namespace qctx {

/// Satisfy between `low` and `high` rows of A x = E.
struct XorThresholdProblem {
    IncidenceSystem system;
    std::size_t low = 0;
    std::size_t high = 0;

    /// Throws std::invalid_argument unless low <= high <= l.
    void check() const;
};

struct SolverModel {
    BitVector assignment;  ///< v1..vp
    std::size_t satisfied_count = 0;
};

std::size_t n_match(const SolverModel& m, const IncidenceSystem& s);

std::string to_bc_text(const XorThresholdProblem& prob);
/// Parses the ASSIGN grammar. The observable count is the largest variable
/// index unless `observables` is larger.
XorThresholdProblem parse_bc_text(std::string_view text, std::size_t observables = 0);

struct CnfFormula {
    std::size_t variables = 0;
    std::vector<std::vector<int>> clauses;
    std::size_t originals = 0;           ///< CNF variables 1..p are v1..vp
    std::vector<int> indicators;         ///< CNF variable of "context i satisfied"

    std::string dimacs() const;
    /// One `v<j> <var>` / `s<i> <var>` line per mapped variable.
    std::string variable_map() const;
};

/// Tseitin XOR chains per row, an indicator per row, and a totalizer over the
/// indicators bounded to [low, high].
CnfFormula encode_cnf(const XorThresholdProblem& prob);
std::string to_dimacs(const XorThresholdProblem& prob);

enum class SatStatus { sat, unsat, unknown };
std::string to_string(SatStatus s);

struct ExternalResult {
    SatStatus status = SatStatus::unknown;
    std::optional<SolverModel> model;
    std::string diagnostic;
};

/// Parses SAT-competition output (`s ...` and `v ...` lines).
ExternalResult parse_solver_output(std::string_view output, const CnfFormula& cnf, const XorThresholdProblem& prob);

/// Writes the CNF to a temporary file, runs `command... file`, and parses its
/// stdout. Timeout (seconds, 0 = none), spawn failures and malformed output
/// give SatStatus::unknown.
ExternalResult run_external(const XorThresholdProblem& prob, const std::vector<std::string>& command,
                            double timeout = 0);

/// Whitespace split honouring single and double quotes.
std::vector<std::string> tokenize_command(std::string_view text);
/// Tokenized CONTEXT_SAT_SOLVER, empty when unset.
std::vector<std::string> solver_command_from_env();

class ExternalSatOracle final : public ThresholdOracle {
public:
    ExternalSatOracle(const IncidenceSystem& s, std::vector<std::string> command, double timeout = 0);
    Answer find(std::size_t min_satisfied) override;
    std::string name() const override { return "external_sat"; }

private:
    const IncidenceSystem& s_;
    std::vector<std::string> command_;
    double timeout_;
};

}  // namespace qctx
