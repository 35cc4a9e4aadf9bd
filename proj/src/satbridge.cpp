#include "qctx/satbridge.hpp"

#include <fcntl.h>
#include <signal.h>
#include <sys/wait.h>
#include <unistd.h>

#include <cerrno>
#include <chrono>
#include <cstdlib>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <thread>

namespace qctx {

void XorThresholdProblem::check() const {
    if (low > high || high > system.contexts()) {
        throw std::invalid_argument("threshold band [" + std::to_string(low) + "," + std::to_string(high) +
                                    "] invalid for " + std::to_string(system.contexts()) + " contexts");
    }
}

std::size_t n_match(const SolverModel& m, const IncidenceSystem& s) { return satisfied_count(s, m.assignment); }

// ---------------------------------------------------------------------------
// bc2cnf text

std::string to_bc_text(const XorThresholdProblem& prob) {
    prob.check();
    const IncidenceSystem& s = prob.system;
    std::ostringstream os;
    os << "BC1.1\nASSIGN[" << prob.low << ',' << prob.high << "](\n";
    for (std::size_t i = 0; i < s.contexts(); ++i) {
        const BitVector& row = s.a.row(i);
        bool first = true;
        for (std::size_t j = row.first(); j < row.size(); j = row.next(j + 1)) {
            if (!first) os << " ^ ";
            os << 'v' << (j + 1);
            first = false;
        }
        if (first) os << 'F';
        os << " == " << (s.e.get(i) ? 'T' : 'F');
        if (i + 1 < s.contexts()) os << ',';
        os << '\n';
    }
    os << ");\n";
    return os.str();
}

namespace {

class BcLexer {
public:
    explicit BcLexer(std::string_view t) : t_(t) {}

    void skip() {
        while (pos_ < t_.size() && std::isspace(static_cast<unsigned char>(t_[pos_]))) ++pos_;
    }
    bool at_end() {
        skip();
        return pos_ >= t_.size();
    }
    bool accept(std::string_view tok) {
        skip();
        if (t_.substr(pos_, tok.size()) != tok) return false;
        pos_ += tok.size();
        return true;
    }
    void expect(std::string_view tok) {
        if (!accept(tok)) fail("expected '" + std::string(tok) + "'");
    }
    char peek() {
        skip();
        return pos_ < t_.size() ? t_[pos_] : '\0';
    }
    std::size_t number() {
        skip();
        const std::size_t start = pos_;
        while (pos_ < t_.size() && std::isdigit(static_cast<unsigned char>(t_[pos_]))) ++pos_;
        if (start == pos_) fail("expected a number");
        return std::stoull(std::string(t_.substr(start, pos_ - start)));
    }
    [[noreturn]] void fail(const std::string& what) const {
        throw std::invalid_argument("bc text: " + what + " at offset " + std::to_string(pos_));
    }

private:
    std::string_view t_;
    std::size_t pos_ = 0;
};

}  // namespace

XorThresholdProblem parse_bc_text(std::string_view text, std::size_t observables) {
    BcLexer lx(text);
    lx.expect("BC1.1");
    lx.expect("ASSIGN");
    lx.expect("[");
    const std::size_t low = lx.number();
    lx.expect(",");
    const std::size_t high = lx.number();
    lx.expect("]");
    lx.expect("(");

    std::vector<std::vector<std::size_t>> rows;
    std::vector<bool> negative;
    std::size_t max_var = 0;
    if (!lx.accept(")")) {
        while (true) {
            std::vector<std::size_t> row;
            bool constant = false;
            do {
                if (lx.accept("F")) {
                    constant = true;
                    continue;
                }
                lx.expect("v");
                const std::size_t v = lx.number();
                if (v == 0) lx.fail("variables are 1-based");
                row.push_back(v - 1);
                max_var = std::max(max_var, v);
            } while (lx.accept("^"));
            if (constant && !row.empty()) lx.fail("constant mixed with variables");
            lx.expect("==");
            if (lx.accept("T")) negative.push_back(true);
            else if (lx.accept("F")) negative.push_back(false);
            else lx.fail("expected T or F");
            rows.push_back(std::move(row));
            if (lx.accept(",")) continue;
            lx.expect(")");
            break;
        }
    }
    lx.expect(";");
    if (!lx.at_end()) lx.fail("trailing input");

    XorThresholdProblem prob{make_incidence(std::max(observables, max_var), rows, negative), low, high};
    prob.check();
    return prob;
}

// ---------------------------------------------------------------------------
// DIMACS

namespace {

class CnfBuilder {
public:
    explicit CnfBuilder(CnfFormula& f) : f_(f) {}

    int fresh() { return static_cast<int>(++f_.variables); }
    void add(std::vector<int> clause) { f_.clauses.push_back(std::move(clause)); }

    /// y <-> a xor b
    int xor2(int a, int b) {
        const int y = fresh();
        add({-y, a, b});
        add({-y, -a, -b});
        add({y, -a, b});
        add({y, a, -b});
        return y;
    }

    /// Unary counter outputs r[0..m-1], r[j] meaning "at least j+1 inputs true".
    std::vector<int> totalizer(const std::vector<int>& leaves, std::size_t lo, std::size_t hi) {
        if (hi - lo == 1) return {leaves[lo]};
        const std::size_t mid = lo + (hi - lo) / 2;
        const std::vector<int> a = totalizer(leaves, lo, mid);
        const std::vector<int> b = totalizer(leaves, mid, hi);
        const std::size_t m1 = a.size(), m2 = b.size();
        std::vector<int> r(m1 + m2);
        for (int& v : r) v = fresh();
        for (std::size_t i = 0; i <= m1; ++i) {
            for (std::size_t j = 0; j <= m2; ++j) {
                if (i + j >= 1) {
                    std::vector<int> c;
                    if (i > 0) c.push_back(-a[i - 1]);
                    if (j > 0) c.push_back(-b[j - 1]);
                    c.push_back(r[i + j - 1]);
                    add(std::move(c));
                }
                if (i + j < m1 + m2) {
                    std::vector<int> c;
                    if (i < m1) c.push_back(a[i]);
                    if (j < m2) c.push_back(b[j]);
                    c.push_back(-r[i + j]);
                    add(std::move(c));
                }
            }
        }
        return r;
    }

private:
    CnfFormula& f_;
};

}  // namespace

CnfFormula encode_cnf(const XorThresholdProblem& prob) {
    prob.check();
    const IncidenceSystem& s = prob.system;
    const std::size_t l = s.contexts(), p = s.observables();
    CnfFormula f;
    f.originals = p;
    f.variables = p;
    CnfBuilder b(f);

    for (std::size_t i = 0; i < l; ++i) {
        const BitVector& row = s.a.row(i);
        const bool negative = s.e.get(i);
        const int ind = b.fresh();
        f.indicators.push_back(ind);
        std::size_t j = row.first();
        if (j == row.size()) {
            // Empty row: satisfied exactly when E_i = 0.
            b.add({negative ? -ind : ind});
            continue;
        }
        int chain = static_cast<int>(j + 1);
        for (j = row.next(j + 1); j < row.size(); j = row.next(j + 1)) chain = b.xor2(chain, static_cast<int>(j + 1));
        // ind <-> (chain == E_i)
        const int lit = negative ? chain : -chain;
        b.add({-ind, lit});
        b.add({ind, -lit});
    }

    if (l == 0) {
        if (prob.low > 0) {
            const int z = b.fresh();
            b.add({z});
            b.add({-z});
        }
        return f;
    }
    if (prob.low == 0 && prob.high == l) return f;
    const std::vector<int> r = b.totalizer(f.indicators, 0, l);
    if (prob.low > 0) b.add({r[prob.low - 1]});
    if (prob.high < l) b.add({-r[prob.high]});
    return f;
}

std::string CnfFormula::dimacs() const {
    std::string out = "p cnf " + std::to_string(variables) + ' ' + std::to_string(clauses.size()) + '\n';
    for (const auto& c : clauses) {
        for (int lit : c) {
            out += std::to_string(lit);
            out += ' ';
        }
        out += "0\n";
    }
    return out;
}

std::string CnfFormula::variable_map() const {
    std::ostringstream os;
    for (std::size_t j = 0; j < originals; ++j) os << 'v' << (j + 1) << ' ' << (j + 1) << '\n';
    for (std::size_t i = 0; i < indicators.size(); ++i) os << 's' << (i + 1) << ' ' << indicators[i] << '\n';
    return os.str();
}

std::string to_dimacs(const XorThresholdProblem& prob) { return encode_cnf(prob).dimacs(); }

// ---------------------------------------------------------------------------
// External solvers

std::string to_string(SatStatus s) {
    switch (s) {
        case SatStatus::sat: return "SAT";
        case SatStatus::unsat: return "UNSAT";
        case SatStatus::unknown: return "UNKNOWN";
    }
    return "?";
}

ExternalResult parse_solver_output(std::string_view output, const CnfFormula& cnf, const XorThresholdProblem& prob) {
    ExternalResult res;
    std::optional<SatStatus> status;
    BitVector x(cnf.originals);
    bool terminated = false;
    std::istringstream in{std::string(output)};
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.rfind("s ", 0) == 0) {
            const std::string word = line.substr(2);
            if (word == "SATISFIABLE") status = SatStatus::sat;
            else if (word == "UNSATISFIABLE") status = SatStatus::unsat;
            else if (word.rfind("UNKNOWN", 0) == 0) status = SatStatus::unknown;
            else {
                res.diagnostic = "malformed status line: " + line;
                return res;
            }
        } else if (line.rfind("v ", 0) == 0 || line == "v") {
            std::istringstream vs(line.substr(1));
            std::string tok;
            while (vs >> tok) {
                long long lit = 0;
                try {
                    std::size_t used = 0;
                    lit = std::stoll(tok, &used);
                    if (used != tok.size()) throw std::invalid_argument(tok);
                } catch (const std::exception&) {
                    res.diagnostic = "malformed model token: " + tok;
                    return res;
                }
                if (lit == 0) {
                    terminated = true;
                    continue;
                }
                const auto var = static_cast<std::size_t>(lit < 0 ? -lit : lit);
                if (var <= cnf.originals) x.set(var - 1, lit > 0);
            }
        }
    }
    if (!status) {
        res.diagnostic = "no status line in solver output";
        return res;
    }
    if (*status != SatStatus::sat) {
        res.status = *status;
        if (*status == SatStatus::unknown) res.diagnostic = "solver reported UNKNOWN";
        return res;
    }
    if (!terminated) {
        res.diagnostic = "model not terminated by 0";
        return res;
    }
    SolverModel m{x, satisfied_count(prob.system, x)};
    if (m.satisfied_count < prob.low || m.satisfied_count > prob.high) {
        res.diagnostic = "model satisfies " + std::to_string(m.satisfied_count) + " contexts, outside the band";
        return res;
    }
    res.status = SatStatus::sat;
    res.model = std::move(m);
    return res;
}

namespace {

struct TempFile {
    explicit TempFile(const std::string& stem) {
        const auto dir = std::filesystem::temp_directory_path();
        std::string templ = (dir / (stem + "-XXXXXX")).string();
        fd = ::mkstemp(templ.data());
        if (fd < 0) throw std::runtime_error("cannot create temporary file: " + std::string(std::strerror(errno)));
        path = templ;
    }
    ~TempFile() {
        if (fd >= 0) ::close(fd);
        std::error_code ec;
        std::filesystem::remove(path, ec);
    }
    TempFile(const TempFile&) = delete;
    TempFile& operator=(const TempFile&) = delete;

    int fd = -1;
    std::string path;
};

}  // namespace

ExternalResult run_external(const XorThresholdProblem& prob, const std::vector<std::string>& command, double timeout) {
    ExternalResult res;
    if (command.empty()) {
        res.diagnostic = "no solver command configured";
        return res;
    }
    const CnfFormula cnf = encode_cnf(prob);
    try {
        TempFile input("qctx-cnf");
        TempFile output("qctx-out");
        {
            const std::string text = cnf.dimacs();
            std::ofstream os(input.path, std::ios::binary);
            os << text;
            if (!os) {
                res.diagnostic = "cannot write " + input.path;
                return res;
            }
        }

        int status_pipe[2];
        if (::pipe2(status_pipe, O_CLOEXEC) != 0) {
            res.diagnostic = "pipe failed: " + std::string(std::strerror(errno));
            return res;
        }
        std::vector<std::string> args = command;
        args.push_back(input.path);
        std::vector<char*> argv;
        for (auto& a : args) argv.push_back(a.data());
        argv.push_back(nullptr);

        const pid_t pid = ::fork();
        if (pid < 0) {
            ::close(status_pipe[0]);
            ::close(status_pipe[1]);
            res.diagnostic = "spawn failure: fork: " + std::string(std::strerror(errno));
            return res;
        }
        if (pid == 0) {
            ::close(status_pipe[0]);
            ::dup2(output.fd, STDOUT_FILENO);
            const int devnull = ::open("/dev/null", O_WRONLY);
            if (devnull >= 0) ::dup2(devnull, STDERR_FILENO);
            ::execvp(argv[0], argv.data());
            const int err = errno;
            [[maybe_unused]] ssize_t n = ::write(status_pipe[1], &err, sizeof err);
            ::_exit(127);
        }
        ::close(status_pipe[1]);
        int child_errno = 0;
        const ssize_t got = ::read(status_pipe[0], &child_errno, sizeof child_errno);
        ::close(status_pipe[0]);
        if (got == static_cast<ssize_t>(sizeof child_errno)) {
            ::waitpid(pid, nullptr, 0);
            res.diagnostic = "spawn failure: " + command[0] + ": " + std::strerror(child_errno);
            return res;
        }

        const auto start = std::chrono::steady_clock::now();
        int wstatus = 0;
        bool timed_out = false;
        while (true) {
            const pid_t w = ::waitpid(pid, &wstatus, WNOHANG);
            if (w == pid) break;
            if (w < 0 && errno != EINTR) break;
            if (timeout > 0 &&
                std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count() > timeout) {
                ::kill(pid, SIGKILL);
                ::waitpid(pid, &wstatus, 0);
                timed_out = true;
                break;
            }
            std::this_thread::sleep_for(std::chrono::milliseconds(5));
        }
        if (timed_out) {
            res.diagnostic = "timeout after " + std::to_string(timeout) + " s";
            return res;
        }
        std::ifstream is(output.path, std::ios::binary);
        std::stringstream buf;
        buf << is.rdbuf();
        res = parse_solver_output(buf.str(), cnf, prob);
        if (res.status == SatStatus::unknown && WIFSIGNALED(wstatus)) {
            res.diagnostic += "; solver killed by signal " + std::to_string(WTERMSIG(wstatus));
        }
        return res;
    } catch (const std::exception& e) {
        res.status = SatStatus::unknown;
        res.diagnostic = e.what();
        return res;
    }
}

std::vector<std::string> tokenize_command(std::string_view text) {
    std::vector<std::string> out;
    std::string cur;
    bool have = false;
    char quote = 0;
    for (char c : text) {
        if (quote) {
            if (c == quote) quote = 0;
            else cur += c;
        } else if (c == '\'' || c == '"') {
            quote = c;
            have = true;
        } else if (std::isspace(static_cast<unsigned char>(c))) {
            if (have) out.push_back(cur);
            cur.clear();
            have = false;
        } else {
            cur += c;
            have = true;
        }
    }
    if (quote) throw std::invalid_argument("unterminated quote in solver command");
    if (have) out.push_back(cur);
    return out;
}

std::vector<std::string> solver_command_from_env() {
    const char* v = std::getenv("CONTEXT_SAT_SOLVER");
    return v ? tokenize_command(v) : std::vector<std::string>{};
}

ExternalSatOracle::ExternalSatOracle(const IncidenceSystem& s, std::vector<std::string> command, double timeout)
    : s_(s), command_(std::move(command)), timeout_(timeout) {}

ThresholdOracle::Answer ExternalSatOracle::find(std::size_t min_satisfied) {
    if (min_satisfied > s_.contexts()) return {Outcome::infeasible, {}, "threshold above the context count"};
    XorThresholdProblem prob{s_, min_satisfied, s_.contexts()};
    ExternalResult r = run_external(prob, command_, timeout_);
    switch (r.status) {
        case SatStatus::sat: return {Outcome::found, std::move(r.model->assignment), {}};
        case SatStatus::unsat: return {Outcome::infeasible, {}, {}};
        case SatStatus::unknown: break;
    }
    return {Outcome::unknown, {}, r.diagnostic};
}

}  // namespace qctx
