#include "cli.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <set>
#include <sstream>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "qctx/geometry.hpp"
#include "qctx/incidence.hpp"
#include "qctx/satbridge.hpp"
#include "qctx/solver.hpp"

namespace qctx::cli {
namespace {

using json = nlohmann::json;
using Clock = std::chrono::steady_clock;

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct IoError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct FamilyOptions {
    std::string family;
    unsigned qubits = 0;
    std::optional<unsigned> k;
    std::string anchor;
    std::string embedding;
    std::string input;
};

struct BudgetOptions {
    std::string method = "auto";
    std::uint64_t seed = 0;
    unsigned threads = 0;
    double time_limit = 0;
    std::uint64_t iters = 20000;
    std::uint64_t node_limit = 2'000'000'000;
    std::string solver_cmd;
};

void add_family_options(CLI::App* app, FamilyOptions& f) {
    app->add_option("--family", f.family,
                    "lines, generators, subspaces, perpset, quadric, hyperbolic, elliptic, doily, two-spread, grid");
    app->add_option("--qubits", f.qubits, "number of qubits N");
    app->add_option("--k", f.k, "projective dimension for --family subspaces");
    app->add_option("--anchor", f.anchor, "perpset center or quadric observable, e.g. XI");
    app->add_option("--embedding", f.embedding, "comma-separated identity qubit slots for the doily, e.g. 3,4");
}

void add_budget_options(CLI::App* app, BudgetOptions& b) {
    app->add_option("--method", b.method, "auto, gauss, branch_bound, coset_search, heuristic, external_sat");
    app->add_option("--seed", b.seed, "random seed");
    app->add_option("--threads", b.threads, "worker threads, 0 = all");
    app->add_option("--time-limit", b.time_limit, "seconds, 0 = none")->check(CLI::NonNegativeNumber);
    app->add_option("--iters", b.iters, "heuristic iterations")->check(CLI::PositiveNumber);
    app->add_option("--node-limit", b.node_limit, "exact-search node budget")->check(CLI::PositiveNumber);
    app->add_option("--solver-cmd", b.solver_cmd, "external SAT solver command (default: $CONTEXT_SAT_SOLVER)");
}

std::vector<unsigned> parse_slots(const std::string& text) {
    std::vector<unsigned> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (item.empty()) continue;
        try {
            out.push_back(static_cast<unsigned>(std::stoul(item)));
        } catch (const std::exception&) {
            throw UsageError("bad --embedding entry '" + item + "'");
        }
    }
    return out;
}

FamilySpec family_spec(const FamilyOptions& f) {
    if (f.family.empty()) throw UsageError("--family is required");
    const auto fam = parse_family(f.family);
    if (!fam) throw UsageError("unknown family '" + f.family + "'");
    if (f.qubits == 0) throw UsageError("--qubits is required");
    FamilySpec spec;
    spec.family = *fam;
    spec.qubits = f.qubits;
    if (f.family == "lines") spec.k = 1;
    else if (f.family == "generators") spec.k = f.qubits - 1;
    else spec.k = f.k.value_or(1);
    if (f.k && (f.family == "lines" || f.family == "generators") && *f.k != spec.k) {
        throw UsageError("--k conflicts with --family " + f.family);
    }
    if (f.family == "hyperbolic") spec.quadric_type = QuadricType::hyperbolic;
    if (f.family == "elliptic") spec.quadric_type = QuadricType::elliptic;
    if (!f.anchor.empty()) {
        const Point a = encode(f.anchor);
        if (a.qubits() != f.qubits) throw UsageError("--anchor has the wrong number of qubits");
        spec.anchor = a.bits();
    }
    spec.embedding = parse_slots(f.embedding);
    return spec;
}

json family_json(const FamilyOptions& f) {
    json j;
    if (!f.input.empty()) j["input"] = f.input;
    if (!f.family.empty()) {
        j["family"] = f.family;
        j["qubits"] = f.qubits;
        if (f.k) j["k"] = *f.k;
        if (!f.anchor.empty()) j["anchor"] = f.anchor;
        if (!f.embedding.empty()) j["embedding"] = f.embedding;
    }
    return j;
}

std::vector<Configuration> load_configurations(const FamilyOptions& f, unsigned threads) {
    if (!f.input.empty()) {
        if (!f.family.empty()) throw UsageError("give either --input or --family, not both");
        std::ifstream is(f.input);
        if (!is) throw IoError("cannot open " + f.input);
        try {
            std::vector<Configuration> out;
            out.push_back(read_configuration(is));
            return out;
        } catch (const std::invalid_argument& e) {
            throw IoError(f.input + ": " + e.what());
        }
    }
    return generate(family_spec(f), threads);
}

std::ofstream open_output(const std::string& path) {
    std::ofstream os(path);
    if (!os) throw IoError("cannot write " + path);
    return os;
}

void apply_threads(unsigned threads) {
#ifdef _OPENMP
    if (threads > 0) omp_set_num_threads(static_cast<int>(threads));
#else
    (void)threads;
#endif
}

std::string join(const std::vector<std::size_t>& v, char sep = ',') {
    std::string s;
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (i) s += sep;
        s += std::to_string(v[i]);
    }
    return s;
}

std::string range_of(const std::vector<std::size_t>& v) {
    if (v.empty()) return "0";
    const auto [lo, hi] = std::minmax_element(v.begin(), v.end());
    return *lo == *hi ? std::to_string(*lo) : std::to_string(*lo) + ".." + std::to_string(*hi);
}

double seconds_since(Clock::time_point t) { return std::chrono::duration<double>(Clock::now() - t).count(); }

void write_manifest(const std::string& path, json manifest) {
    if (path.empty()) return;
    std::ofstream os = open_output(path);
    os << manifest.dump(2) << '\n';
}

// ---------------------------------------------------------------------------

int cmd_generate(const FamilyOptions& f, bool count_only, const std::string& output, const std::string& format,
                 unsigned threads, std::ostream& out, json& manifest) {
    const auto t0 = Clock::now();
    const FamilySpec spec = family_spec(f);
    json result;
    if (count_only && spec.family == FamilySpec::Family::subspaces) {
        const SubspaceCensus c = isotropic_census(spec.qubits, spec.k, threads);
        out << "family=" << f.family << "\nqubits=" << spec.qubits << "\nk=" << spec.k << "\nconfigurations=1"
            << "\ncontexts=" << c.count << "\nobservables=" << (code::space_end(spec.qubits) - 1)
            << "\nnegative=" << c.negative << "\npositive=" << (c.count - c.negative) << '\n';
        result = {{"contexts", c.count}, {"negative", c.negative}};
    } else {
        const std::vector<Configuration> configs = generate(spec, threads);
        std::vector<std::size_t> contexts, observables, negative;
        std::size_t total_contexts = 0, total_negative = 0;
        for (const Configuration& c : configs) {
            contexts.push_back(c.contexts.size());
            observables.push_back(c.points.size());
            negative.push_back(c.negative_count());
            total_contexts += c.contexts.size();
            total_negative += c.negative_count();
        }
        out << "family=" << f.family << "\nqubits=" << spec.qubits;
        if (spec.family == FamilySpec::Family::subspaces) out << "\nk=" << spec.k;
        out << "\nconfigurations=" << configs.size() << "\ncontexts=" << range_of(contexts)
            << "\nobservables=" << range_of(observables) << "\nnegative=" << range_of(negative);
        if (configs.size() > 1) {
            out << "\ncontexts_total=" << total_contexts << "\nnegative_total=" << total_negative;
        }
        out << '\n';
        result = {{"configurations", configs.size()},
                  {"contexts", range_of(contexts)},
                  {"negative", range_of(negative)}};

        if (!count_only && !output.empty()) {
            auto write_one = [&](std::ostream& os, const Configuration& c) {
                if (format == "incidence") write_incidence(os, build_incidence(c));
                else write_configuration(os, c);
            };
            if (configs.size() == 1) {
                std::ofstream os = open_output(output);
                write_one(os, configs[0]);
            } else {
                std::error_code ec;
                std::filesystem::create_directories(output, ec);
                if (ec) throw IoError("cannot create directory " + output);
                for (std::size_t i = 0; i < configs.size(); ++i) {
                    const std::string path = (std::filesystem::path(output) / (f.family + "-" + std::to_string(i) + ".txt")).string();
                    std::ofstream os = open_output(path);
                    write_one(os, configs[i]);
                }
            }
            out << "output=" << output << '\n';
        }
    }
    manifest["result"] = result;
    manifest["timings"] = {{"total_s", seconds_since(t0)}};
    return ok;
}

SolveBudget make_budget(const BudgetOptions& b) {
    SolveBudget budget;
    const auto m = parse_method(b.method);
    if (!m) throw UsageError("unknown method '" + b.method + "'");
    budget.method = *m;
    budget.seed = b.seed;
    budget.threads = b.threads;
    budget.time_limit = b.time_limit;
    budget.iterations = b.iters;
    budget.node_limit = b.node_limit;
    budget.solver_cmd = b.solver_cmd.empty() ? solver_command_from_env() : tokenize_command(b.solver_cmd);
    if (budget.method == Method::external_sat && budget.solver_cmd.empty()) {
        throw UsageError("--method external_sat needs --solver-cmd or CONTEXT_SAT_SOLVER");
    }
    return budget;
}

int cmd_degree(const FamilyOptions& f, const BudgetOptions& b, std::optional<std::size_t> index,
               const std::string& output, const std::string& unsat_out, std::ostream& out, json& manifest) {
    const auto t0 = Clock::now();
    const SolveBudget budget = make_budget(b);
    std::vector<Configuration> configs = load_configurations(f, b.threads);
    if (index) {
        if (*index >= configs.size()) {
            throw UsageError("--index " + std::to_string(*index) + " out of range (" + std::to_string(configs.size()) +
                             " configurations)");
        }
        configs = {configs[*index]};
    }

    std::ostringstream record;
    std::ofstream unsat;
    if (!unsat_out.empty()) unsat = open_output(unsat_out);
    json results = json::array();
    std::set<std::string> summaries;
    for (std::size_t ci = 0; ci < configs.size(); ++ci) {
        const Configuration& c = configs[ci];
        const auto problems = validate(c);
        if (!problems.empty()) {
            throw IoError("configuration " + std::to_string(ci) + ": context " +
                          std::to_string(problems.front().context) + ": " + problems.front().message);
        }
        const IncidenceSystem s = build_incidence(c);
        const auto t = Clock::now();
        const DegreeResult r = degree(s, budget);
        const double elapsed = seconds_since(t);
        const long long bnd = cabello_bound(s.contexts(), r.d);
        const std::string bound_text = r.status == DegreeStatus::upper_bound ? "d<=" : "d=";
        const std::string summary = to_string(r.status) + " " + bound_text + std::to_string(r.d) + " b=" +
                                    (r.status == DegreeStatus::upper_bound ? ">=" : "") + std::to_string(bnd);
        summaries.insert(summary);

        if (configs.size() > 1) record << "config=" << ci << '\n';
        record << "status=" << to_string(r.status) << "\nd=" << r.d << "\nb=" << bnd << "\ncontexts=" << s.contexts()
               << "\nobservables=" << s.observables() << "\nnegative=" << s.e.count() << "\nmethod=" << r.method
               << "\nwitness=" << r.witness.to_string() << "\nunsatisfied=" << join(r.unsatisfied)
               << "\nhistory=" << join(r.history) << "\nseconds=" << elapsed << '\n';
        if (!r.note.empty()) record << "note=" << r.note << '\n';
        record << "summary=" << summary << '\n';
        if (configs.size() > 1) record << '\n';

        if (unsat) {
            Configuration u;
            u.qubits = c.qubits;
            u.family = "unsatisfied";
            std::vector<std::vector<std::uint64_t>> ctxs;
            for (std::size_t i : r.unsatisfied) {
                std::vector<std::uint64_t> codes;
                for (const Point& p : c.context_points(i)) codes.push_back(p.bits());
                ctxs.push_back(std::move(codes));
            }
            unsat << "# configuration " << ci << ": " << r.unsatisfied.size() << " unsatisfied contexts\n";
            write_configuration(unsat, make_configuration(c.qubits, "unsatisfied", ctxs));
        }
        results.push_back({{"status", to_string(r.status)},
                           {"d", r.d},
                           {"b", bnd},
                           {"contexts", s.contexts()},
                           {"observables", s.observables()},
                           {"method", r.method},
                           {"witness", r.witness.to_string()},
                           {"seconds", elapsed}});
    }
    if (configs.size() > 1) {
        record << "configurations=" << configs.size() << '\n';
        record << "summary=" << (summaries.size() == 1 ? *summaries.begin() : std::string("mixed")) << '\n';
    }
    out << record.str();
    if (!output.empty()) {
        std::ofstream os = open_output(output);
        os << record.str();
    }
    manifest["budget"] = {{"method", b.method},       {"seed", b.seed},       {"threads", b.threads},
                          {"time_limit", b.time_limit}, {"iters", b.iters}, {"node_limit", b.node_limit},
                          {"solver_cmd", budget.solver_cmd}};
    manifest["result"] = results;
    manifest["timings"] = {{"total_s", seconds_since(t0)}};
    return ok;
}

int cmd_check(const std::string& property, unsigned min_q, unsigned max_q, unsigned qubits, unsigned k,
              unsigned threads, std::ostream& out, json& manifest) {
    const auto t0 = Clock::now();
    bool pass = true;
    json details = json::array();
    if (property == "perpsets") {
        for (unsigned n = min_q; n <= max_q; ++n) {
            std::size_t count = 0, contextual = 0;
            for (const Configuration& c : all_perpsets(n)) {
                ++count;
                if (is_contextual(build_incidence(c)).contextual) ++contextual;
            }
            const bool okn = contextual == 0;
            pass &= okn;
            out << "perpsets qubits=" << n << " count=" << count << " contextual=" << contextual << ' '
                << (okn ? "pass" : "fail") << '\n';
            details.push_back({{"qubits", n}, {"count", count}, {"contextual", contextual}});
        }
    } else if (property == "positivity") {
        const unsigned lo = qubits ? qubits : min_q, hi = qubits ? qubits : max_q;
        for (unsigned n = lo; n <= hi; ++n) {
            if (k >= n) continue;
            const SubspaceCensus c = isotropic_census(n, k, threads);
            const bool okn = c.negative == 0;
            pass &= okn;
            out << "positivity qubits=" << n << " k=" << k << " count=" << c.count << " negative=" << c.negative << ' '
                << (okn ? "pass" : "fail") << '\n';
            details.push_back({{"qubits", n}, {"k", k}, {"count", c.count}, {"negative", c.negative}});
        }
    } else if (property == "two-spreads") {
        SolveBudget budget;
        budget.method = Method::coset_search;
        for (unsigned n = min_q; n <= max_q; ++n) {
            const auto ts = two_spreads(doily(n));
            std::vector<std::size_t> degrees;
            bool okn = ts.size() == 6;
            for (const Configuration& c : ts) {
                const DegreeResult r = degree_exact(build_incidence(c), budget);
                degrees.push_back(r.d);
                okn &= r.status == DegreeStatus::exact && r.d == 1;
            }
            pass &= okn;
            out << "two-spreads qubits=" << n << " count=" << ts.size() << " degrees=" << join(degrees) << ' '
                << (okn ? "pass" : "fail") << '\n';
            details.push_back({{"qubits", n}, {"count", ts.size()}, {"degrees", degrees}});
        }
    } else {
        throw UsageError("unknown property '" + property + "' (perpsets, positivity, two-spreads)");
    }
    out << "result=" << (pass ? "pass" : "fail") << '\n';
    manifest["result"] = {{"pass", pass}, {"details", details}};
    manifest["timings"] = {{"total_s", seconds_since(t0)}};
    return pass ? ok : property_failure;
}

int cmd_export(const FamilyOptions& f, std::optional<std::size_t> index, const std::string& format,
               std::optional<std::size_t> low, std::optional<std::size_t> high, const std::string& output,
               const std::string& map_out, std::ostream& out) {
    std::vector<Configuration> configs = load_configurations(f, 0);
    const std::size_t i = index.value_or(0);
    if (i >= configs.size()) throw UsageError("--index out of range");
    if (configs.size() > 1 && !index) throw UsageError("family has several configurations; pick one with --index");
    const Configuration& c = configs[i];
    const IncidenceSystem s = build_incidence(c);
    std::string text;
    std::string map;
    if (format == "config") {
        std::ostringstream os;
        write_configuration(os, c);
        text = os.str();
    } else if (format == "incidence") {
        std::ostringstream os;
        write_incidence(os, s);
        text = os.str();
    } else if (format == "bc" || format == "dimacs") {
        XorThresholdProblem prob{s, low.value_or(s.contexts()), high.value_or(s.contexts())};
        try {
            prob.check();
        } catch (const std::invalid_argument& e) {
            throw UsageError(e.what());
        }
        if (format == "bc") {
            text = to_bc_text(prob);
        } else {
            const CnfFormula cnf = encode_cnf(prob);
            text = cnf.dimacs();
            map = cnf.variable_map();
        }
    } else {
        throw UsageError("unknown export format '" + format + "' (config, incidence, bc, dimacs)");
    }
    if (output.empty()) {
        out << text;
    } else {
        std::ofstream os = open_output(output);
        os << text;
    }
    if (!map_out.empty()) {
        if (map.empty()) throw UsageError("--map-out applies to --format dimacs only");
        std::ofstream os = open_output(map_out);
        os << map;
    }
    return ok;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Contextuality of multi-qubit Pauli configurations"};
    app.require_subcommand(1);
    std::string manifest_path;

    FamilyOptions gen_f;
    bool count_only = false;
    std::string gen_output, gen_format = "config";
    unsigned gen_threads = 0;
    auto* gen = app.add_subcommand("generate", "build a configuration family and print its census");
    add_family_options(gen, gen_f);
    gen->add_flag("--count-only", count_only, "count without materializing or writing");
    gen->add_option("--output", gen_output, "file, or directory when the family has several configurations");
    gen->add_option("--format", gen_format, "config or incidence")->check(CLI::IsMember({"config", "incidence"}));
    gen->add_option("--threads", gen_threads, "worker threads, 0 = all");
    gen->add_option("--manifest", manifest_path, "write a JSON run manifest");

    FamilyOptions deg_f;
    BudgetOptions deg_b;
    std::optional<std::size_t> deg_index;
    std::string deg_output, unsat_out;
    auto* deg = app.add_subcommand("degree", "compute or bound the contextuality degree");
    add_family_options(deg, deg_f);
    deg->add_option("--input", deg_f.input, "configuration file");
    deg->add_option("--index", deg_index, "only this configuration of the family");
    add_budget_options(deg, deg_b);
    deg->add_option("--output", deg_output, "also write the result record here");
    deg->add_option("--unsat-out", unsat_out, "write the unsatisfied contexts as a configuration");
    deg->add_option("--manifest", manifest_path, "write a JSON run manifest");

    std::string property;
    unsigned min_q = 2, max_q = 5, chk_qubits = 0, chk_k = 3, chk_threads = 0;
    auto* chk = app.add_subcommand("check", "verify a structural property: perpsets, positivity, two-spreads");
    chk->add_option("property", property, "perpsets, positivity or two-spreads")->required();
    chk->add_option("--min-qubits", min_q, "smallest N")->check(CLI::Range(2u, 16u));
    chk->add_option("--max-qubits", max_q, "largest N")->check(CLI::Range(2u, 16u));
    chk->add_option("--qubits", chk_qubits, "single N (positivity)");
    chk->add_option("--k", chk_k, "subspace dimension (positivity)");
    chk->add_option("--threads", chk_threads, "worker threads, 0 = all");
    chk->add_option("--manifest", manifest_path, "write a JSON run manifest");

    FamilyOptions exp_f;
    std::optional<std::size_t> exp_index, low, high;
    std::string exp_format = "dimacs", exp_output, map_out;
    auto* exp = app.add_subcommand("export", "write a configuration as config, incidence, bc or DIMACS text");
    add_family_options(exp, exp_f);
    exp->add_option("--input", exp_f.input, "configuration file");
    exp->add_option("--index", exp_index, "configuration of the family");
    exp->add_option("--format", exp_format, "config, incidence, bc, dimacs");
    exp->add_option("--low", low, "minimum satisfied contexts (default l)");
    exp->add_option("--high", high, "maximum satisfied contexts (default l)");
    exp->add_option("--output", exp_output, "output file (default stdout)");
    exp->add_option("--map-out", map_out, "DIMACS variable map file");

    std::string replay_path;
    auto* rep = app.add_subcommand("replay", "re-run the command recorded in a manifest");
    rep->add_option("manifest", replay_path, "manifest file")->required();

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return ok;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return ok;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << '\n';
        return usage_error;
    }

    json manifest;
    manifest["command"] = "qctx";
    manifest["argv"] = args;
    try {
        int rc = ok;
        if (*rep) {
            std::ifstream is(replay_path);
            if (!is) throw IoError("cannot open " + replay_path);
            json m;
            try {
                m = json::parse(is);
            } catch (const json::exception& e) {
                throw IoError(replay_path + ": " + e.what());
            }
            if (!m.contains("argv") || !m["argv"].is_array()) throw IoError(replay_path + ": no argv recorded");
            auto argv = m["argv"].get<std::vector<std::string>>();
            if (!argv.empty() && argv.front() == "replay") throw UsageError("manifest records a replay");
            return run(argv, out, err);
        }
        if (*gen) {
            apply_threads(gen_threads);
            manifest["family"] = family_json(gen_f);
            rc = cmd_generate(gen_f, count_only, gen_output, gen_format, gen_threads, out, manifest);
        } else if (*deg) {
            apply_threads(deg_b.threads);
            manifest["family"] = family_json(deg_f);
            manifest["seed"] = deg_b.seed;
            rc = cmd_degree(deg_f, deg_b, deg_index, deg_output, unsat_out, out, manifest);
        } else if (*chk) {
            apply_threads(chk_threads);
            if (min_q > max_q) throw UsageError("--min-qubits exceeds --max-qubits");
            rc = cmd_check(property, min_q, max_q, chk_qubits, chk_k, chk_threads, out, manifest);
        } else if (*exp) {
            rc = cmd_export(exp_f, exp_index, exp_format, low, high, exp_output, map_out, out);
        }
        write_manifest(manifest_path, manifest);
        return rc;
    } catch (const IoError& e) {
        err << "error: " << e.what() << '\n';
        return io_error;
    } catch (const UsageError& e) {
        err << "error: " << e.what() << '\n';
        return usage_error;
    } catch (const std::invalid_argument& e) {
        err << "error: " << e.what() << '\n';
        return usage_error;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return io_error;
    }
}

}  // namespace qctx::cli
