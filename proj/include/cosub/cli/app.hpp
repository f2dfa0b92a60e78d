#pragma once

// Command-line front end: rn, check {thm51|prop52|prop56}, example
// {diag|banded|singular}. Exit codes: 0 all pass, 1 any fail,
// 2 evidence-only, 3 usage error.

#include "CLI11.hpp"
#include "cosub/checker.hpp"
#include "cosub/families.hpp"
#include "cosub/gaussmeas.hpp"
#include "cosub/report.hpp"

#include <chrono>
#include <cstdlib>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace cosub::cli {

inline constexpr const char* version = "0.1.0";
inline constexpr int schema_version = 1;
inline constexpr int usage_error = 3;

struct RunConfig {
    std::string command;
    std::string target;  ///< suite or example name
    std::string builtin;
    std::optional<double> q;
    std::string alphas = "1-2^-j";
    std::string alpha_tail = "2^-N";
    std::string matrix;
    bool matrix_is_inverse = false;
    std::string partition;
    int n = 1;
    int r = 1;
    std::optional<std::size_t> L;
    std::size_t kappa = 0;
    std::string boxes = "1,2";
    std::string points;
    int power = 1;
    std::uint64_t seed = 0;
    std::optional<double> rho;
    std::size_t samples = 200;
    std::size_t quad_order = 40;
    double quad_tol = 1e-9;
    double alpha = 0.5;
    std::size_t N = 10000;
    std::string out;
    std::string table;
    std::string format = "text";

    [[nodiscard]] json to_json() const {
        json j;
        j["command"] = command;
        if (!target.empty()) j["target"] = target;
        if (!builtin.empty()) j["builtin"] = builtin;
        if (q) j["q"] = *q;
        j["alphas"] = alphas;
        j["alpha_tail"] = alpha_tail;
        if (!matrix.empty()) j["matrix"] = matrix, j["matrix_is_inverse"] = matrix_is_inverse;
        if (!partition.empty()) j["partition"] = partition;
        j["n"] = n;
        j["r"] = r;
        if (L) j["L"] = *L;
        j["kappa"] = kappa;
        j["boxes"] = boxes;
        if (!points.empty()) j["points"] = points;
        j["power"] = power;
        j["seed"] = seed;
        if (rho) j["rho"] = *rho;
        j["samples"] = samples;
        j["quad_order"] = quad_order;
        j["quad_tol"] = quad_tol;
        if (command == "example" && target == "singular") j["alpha"] = alpha, j["N"] = N;
        return j;
    }
};

class UsageError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

namespace detail {

inline std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::string cur;
    std::istringstream in(s);
    while (std::getline(in, cur, sep))
        if (!cur.empty()) out.push_back(cur);
    return out;
}

inline double to_double(const std::string& s) {
    std::size_t used = 0;
    double v = 0.0;
    try {
        v = std::stod(s, &used);
    } catch (const std::exception&) {
        throw UsageError("not a number: '" + s + "'");
    }
    if (used != s.size()) throw UsageError("not a number: '" + s + "'");
    return v;
}

inline std::vector<double> parse_list(const std::string& s) {
    std::vector<double> out;
    for (const auto& t : split(s, ',')) out.push_back(to_double(t));
    return out;
}

inline std::vector<Vector> parse_points(const std::string& s, std::size_t dim) {
    std::vector<Vector> out;
    if (s.empty()) {
        out.push_back(Vector::Zero(static_cast<Eigen::Index>(dim)));
        return out;
    }
    for (const auto& group : split(s, ';')) {
        const auto xs = parse_list(group);
        if (xs.size() != dim)
            throw UsageError("point '" + group + "' has " + std::to_string(xs.size()) + " coordinates, expected " +
                             std::to_string(dim));
        Vector v(static_cast<Eigen::Index>(dim));
        for (std::size_t k = 0; k < dim; ++k) v(static_cast<Eigen::Index>(k)) = xs[k];
        out.push_back(v);
    }
    return out;
}

struct Builtin {
    std::string name;
    std::string arg;
};

/// "ex59 q=0.5" -> {ex59, q=0.5}; "diag 1-2^-j" -> {diag, 1-2^-j}.
inline Builtin parse_builtin(const std::string& s) {
    const auto pos = s.find_first_of(" \t");
    Builtin b;
    b.name = s.substr(0, pos);
    if (pos != std::string::npos) {
        b.arg = s.substr(s.find_first_not_of(" \t", pos));
        while (!b.arg.empty() && std::isspace(static_cast<unsigned char>(b.arg.back()))) b.arg.pop_back();
    }
    return b;
}

inline double builtin_q(const RunConfig& cfg, const Builtin& b) {
    if (!b.arg.empty()) {
        if (b.arg.rfind("q=", 0) != 0) throw UsageError("expected 'ex59 q=<value>', got '" + cfg.builtin + "'");
        return to_double(b.arg.substr(2));
    }
    if (cfg.q) return *cfg.q;
    return 0.5;
}

inline BlockPartition resolve_partition(const RunConfig& cfg) {
    if (cfg.partition.empty()) return BlockPartition::uniform();
    return load_partition(cfg.partition);
}

inline SymbolFamily resolve_family(const RunConfig& cfg) {
    std::string spec = cfg.builtin;
    if (spec.empty() && !cfg.matrix.empty()) spec = "file " + cfg.matrix;
    if (spec.empty()) throw UsageError("a symbol is required (--builtin or --matrix)");
    const Builtin b = parse_builtin(spec);
    try {
        if (b.name == "identity") return identity_family();
        if (b.name == "ex53") return SymbolFamily::from_diagonal(diagonal_data(cfg.alphas, cfg.alpha_tail));
        if (b.name == "diag") {
            if (b.arg.empty()) throw UsageError("'diag' needs an expression in j");
            return SymbolFamily::from_diagonal(diagonal_data(b.arg));
        }
        if (b.name == "ex59") return geometric_family(builtin_q(cfg, b));
        if (b.name == "file") {
            if (b.arg.empty()) throw UsageError("'file' needs a path");
            const BandedSymbol sym = load_symbol(b.arg);
            if (cfg.matrix_is_inverse) return SymbolFamily::from_inverse_symbol(sym);
            if (sym.kind() == SymbolKind::diagonal) {
                SymbolFamily f = SymbolFamily::from_symbol(sym);
                f.inverse_symbol = BandedSymbol::from_rule(
                    SymbolKind::diagonal, 0, [sym](std::size_t i, std::size_t) { return 1.0 / sym(i, i); },
                    "inverse of (" + sym.description() + ")");
                return f;
            }
            return SymbolFamily::from_symbol(sym);
        }
    } catch (const std::invalid_argument& e) {
        throw UsageError(e.what());
    }
    throw UsageError("unknown builtin '" + b.name + "'");
}

struct Perturbed {
    PerturbedIdentity b;
    double rho;
};

inline Perturbed resolve_perturbed(const RunConfig& cfg) {
    const Builtin b = parse_builtin(cfg.builtin);
    if (b.name == "ex59") {
        const double q = builtin_q(cfg, b);
        try {
            return {geometric_perturbed_identity(q), cfg.rho.value_or(geometric_det_floor(q))};
        } catch (const std::invalid_argument& e) {
            throw UsageError(e.what());
        }
    }
    if (b.name == "identity") return {trivial_perturbed_identity(), cfg.rho.value_or(1.0)};
    throw UsageError("prop56 supports the builtins 'ex59' and 'identity' only");
}

inline std::string timestamp() {
    const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&now, &tm);
    std::ostringstream os;
    os << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
    return os.str();
}

inline std::string default_path(const std::string& explicit_path, const std::string& stem) {
    if (!explicit_path.empty()) return explicit_path;
    if (const char* dir = std::getenv("COSUB_OUT_DIR"); dir && *dir)
        return (std::filesystem::path(dir) / stem).string();
    return {};
}

inline void write_file(const std::string& path, const std::string& text) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot write '" + path + "'");
    f << text;
}

struct Outcome {
    Verdict verdict = Verdict::pass;
    json body;
    std::vector<CheckReport> reports;
    std::string table;  ///< CSV text, examples only
    std::vector<std::string> summary;
};

inline QuadSpec quad_spec(const RunConfig& cfg) {
    QuadSpec q;
    q.order = cfg.quad_order;
    q.tol = cfg.quad_tol;
    return q;
}

inline Outcome cmd_rn(const RunConfig& cfg) {
    const SymbolFamily fam = resolve_family(cfg);
    const std::size_t kappa = cfg.kappa == 0 ? 1 : cfg.kappa;
    const Matrix A = fam.truncation(kappa);
    const RnDerivative h = RnDerivative::of_power(A, cfg.power);
    Outcome o;
    json values = json::array();
    for (const Vector& x : parse_points(cfg.points, kappa)) {
        const double lv = h.log_eval(x);
        values.push_back({{"x", std::vector<double>(x.data(), x.data() + x.size())},
                          {"value", std::exp(lv)},
                          {"log_value", lv}});
        std::ostringstream os;
        os << "h(" << x.transpose() << ") = " << std::setprecision(12) << std::exp(lv);
        o.summary.push_back(os.str());
    }
    json norms = json::array();
    for (double k : parse_list(cfg.boxes)) {
        const ChiNormResult cr = chi_norm_sq(A, cfg.power, Box::cube(kappa, k), quad_spec(cfg));
        json cell = {{"k", k}, {"divergent", cr.divergent}, {"converged", cr.converged}};
        if (!cr.divergent) cell["norm_sq"] = cr.value;
        norms.push_back(cell);
        std::ostringstream os;
        os << "||chi h||^2 on [-" << k << "," << k << "]^" << kappa << " = " << std::setprecision(12);
        if (cr.divergent) os << "inf";
        else os << cr.value;
        o.summary.push_back(os.str());
        if (cr.divergent || !cr.converged) o.verdict = worst(o.verdict, Verdict::evidence_only);
    }
    const double mass = transport_mass(matrix_power(A, cfg.power));
    o.body = {{"family", fam.description},
              {"kappa", kappa},
              {"power", cfg.power},
              {"matrix", [&] {
                   json rows = json::array();
                   for (Eigen::Index i = 0; i < A.rows(); ++i) {
                       json row = json::array();
                       for (Eigen::Index j = 0; j < A.cols(); ++j) row.push_back(A(i, j));
                       rows.push_back(row);
                   }
                   return rows;
               }()},
              {"values", values},
              {"box_norms", norms},
              {"transport_mass", mass}};
    return o;
}

inline Outcome cmd_check(const RunConfig& cfg) {
    Outcome o;
    const BlockPartition s = resolve_partition(cfg);
    if (cfg.target == "prop56") {
        const Perturbed p = resolve_perturbed(cfg);
        o.reports = prop56_suite(p.b, s, cfg.n, cfg.r, p.rho, cfg.L.value_or(64), cfg.seed, cfg.samples);
    } else {
        SuiteOptions so;
        so.n = cfg.n;
        so.r = cfg.r;
        so.L = cfg.L.value_or(6);
        so.kappa = cfg.kappa;
        so.boxes = parse_list(cfg.boxes);
        so.quad = quad_spec(cfg);
        so.seed = cfg.seed;
        const SymbolFamily fam = resolve_family(cfg);
        try {
            o.reports = cfg.target == "thm51" ? thm51_suite(fam, s, so) : prop52_suite(fam, s, so);
        } catch (const std::invalid_argument& e) {
            throw UsageError(e.what());
        }
    }
    o.verdict = combined_verdict(o.reports);
    for (const auto& r : o.reports)
        o.summary.push_back(r.anchor + "  " + to_string(r.verdict) + "  " + r.name + (r.note.empty() ? "" : " (" + r.note + ")"));
    o.body = {{"suite", cfg.target}, {"reports", to_json(o.reports)}};
    return o;
}

inline std::string csv_number(double v) {
    std::ostringstream os;
    os << std::setprecision(17) << v;
    return os.str();
}

inline Outcome example_diag(const RunConfig& cfg) {
    const DiagonalData d = diagonal_data(cfg.alphas, cfg.alpha_tail);
    const SymbolFamily fam = SymbolFamily::from_diagonal(d);
    const std::size_t dim = cfg.kappa == 0 ? static_cast<std::size_t>(std::max(cfg.n + cfg.r, 1)) : cfg.kappa;
    const std::size_t L = cfg.L.value_or(6);
    const BlockPartition s = resolve_partition(cfg);
    std::ostringstream csv;
    csv << "i,k,l,closed_form,quadrature,relative_difference\n";
    double worst_rel = 0.0;
    Outcome o;
    for (int i = 1; i <= std::max(cfg.n + cfg.r, 1); ++i)
        for (double k : parse_list(cfg.boxes)) {
            const GlodTrajectory t = glod_trajectory(fam, s, i, k, dim, L, quad_spec(cfg));
            for (std::size_t m = 0; m < t.l.size(); ++m) {
                const double rel = relative_difference(t.quadrature[m], t.closed_form[m]);
                worst_rel = std::max(worst_rel, rel);
                csv << i << ',' << csv_number(k) << ',' << t.l[m] << ',' << csv_number(t.closed_form[m]) << ','
                    << csv_number(t.quadrature[m]) << ',' << csv_number(rel) << '\n';
            }
        }
    o.verdict = worst_rel < 1e-8 ? Verdict::pass : Verdict::fail;
    o.table = csv.str();
    o.body = {{"example", "diag"}, {"alphas", cfg.alphas}, {"box_dim", dim}, {"L", L},
              {"max_relative_difference", worst_rel}, {"tolerance", 1e-8}};
    o.summary.push_back("max relative difference closed form vs quadrature: " + csv_number(worst_rel));
    return o;
}

inline Outcome example_banded(const RunConfig& cfg) {
    const double q = cfg.q.value_or(cfg.builtin.empty() ? 0.5 : builtin_q(cfg, parse_builtin(cfg.builtin)));
    if (!(q > 0 && q < 1)) throw UsageError("q must lie in (0, 1)");
    const std::size_t L = cfg.L.value_or(64);
    const BandedSymbol b = BandedSymbol::geometric_tridiagonal(q, 1.0);
    const auto dets = det_sequence(b, BlockPartition::uniform(), L);
    const double floor = geometric_det_floor(q);
    std::ostringstream csv;
    csv << "l,det,recursion_residual,partial_lower,floor,upper\n";
    double worst_resid = 0.0;
    bool inside = true;
    CompensatedSum partial;
    for (std::size_t l = 1; l <= L; ++l) {
        const double d = dets[l - 1].value();
        double resid = 0.0;
        if (l >= 3) {
            const double pred = dets[l - 2].value() - std::pow(q, 2.0 * l - 2.0) * dets[l - 3].value();
            resid = std::abs(d - pred) / std::abs(d);
        }
        if (l >= 2) partial.add(std::pow(q, 2.0 * l - 2.0));
        worst_resid = std::max(worst_resid, resid);
        if (l >= 2) inside = inside && d > floor && d < 1.0;
        csv << l << ',' << csv_number(d) << ',' << csv_number(resid) << ',' << csv_number(1.0 - partial.value()) << ','
            << csv_number(floor) << ",1\n";
    }
    Outcome o;
    o.verdict = (worst_resid <= 1e-12 && inside) ? Verdict::pass : Verdict::fail;
    o.table = csv.str();
    o.body = {{"example", "banded"}, {"q", q}, {"L", L}, {"floor", floor}, {"det_L", dets.back().value()},
              {"max_recursion_residual", worst_resid}, {"within_bounds", inside}};
    o.summary.push_back("det b_L = " + csv_number(dets.back().value()) + ", floor " + csv_number(floor));
    return o;
}

inline Outcome example_singular(const RunConfig& cfg) {
    SingularScalingReport rep;
    try {
        rep = singular_scaling_demo(cfg.alpha, cfg.N);
    } catch (const std::invalid_argument& e) {
        throw UsageError(e.what());
    }
    std::ostringstream csv;
    csv << "n,log_P,log_Q\n";
    for (std::size_t n = 1; n <= rep.N; ++n)
        csv << n << ',' << csv_number(rep.log_p[n - 1]) << ',' << csv_number(rep.log_q[n - 1]) << '\n';
    const double pN = std::exp(rep.log_p.back());
    const bool q_decreasing = rep.N >= 2 && rep.log_q[rep.N - 1] < rep.log_q[rep.N - 2];
    Outcome o;
    const bool ok = rep.p_monotone && rep.q_monotone && q_decreasing && pN >= rep.p_infinity_lower;
    o.verdict = ok ? (rep.q_divergence_certified ? Verdict::pass : Verdict::evidence_only) : Verdict::fail;
    o.table = csv.str();
    o.body = {{"example", "singular"},
              {"alpha", rep.alpha},
              {"beta", rep.beta},
              {"N", rep.N},
              {"sum_exponent", rep.sum_exponent},
              {"root_exponent", rep.root_exponent},
              {"q_exponent", rep.q_exponent},
              {"P_N", pN},
              {"P_infinity_lower", rep.p_infinity_lower},
              {"log_Q_N", rep.log_q.back()},
              {"log_Q_upper_bound", rep.log_q_upper_bound},
              {"p_monotone", rep.p_monotone},
              {"q_monotone", rep.q_monotone},
              {"q_still_decreasing", q_decreasing},
              {"q_divergence_certified", rep.q_divergence_certified},
              {"near_degenerate", rep.near_degenerate}};
    o.summary.push_back("P_N = " + csv_number(pN) + " (certified limit >= " + csv_number(rep.p_infinity_lower) + ")");
    o.summary.push_back("log Q_N = " + csv_number(rep.log_q.back()));
    if (rep.near_degenerate) o.summary.push_back("warning: exponents within 0.05 of the critical value");
    return o;
}

/// Appends options from a JSON config file for keys not given on the command line.
inline std::vector<std::string> merge_config(std::vector<std::string> args) {
    std::string path;
    for (std::size_t k = 0; k < args.size(); ++k) {
        if (args[k] == "--config" && k + 1 < args.size()) path = args[k + 1];
        else if (args[k].rfind("--config=", 0) == 0) path = args[k].substr(9);
    }
    if (path.empty()) return args;
    std::ifstream f(path);
    if (!f) throw UsageError("cannot read config '" + path + "'");
    json cfg;
    try {
        cfg = json::parse(f);
    } catch (const json::exception& e) {
        throw UsageError("bad config '" + path + "': " + e.what());
    }
    if (!cfg.is_object()) throw UsageError("config must be a JSON object");
    for (const auto& [key, value] : cfg.items()) {
        const std::string flag = "--" + key;
        bool given = false;
        for (const auto& a : args) given = given || a == flag || a.rfind(flag + "=", 0) == 0;
        if (given) continue;
        if (value.is_boolean()) {
            if (value.get<bool>()) args.push_back(flag);
            continue;
        }
        args.push_back(flag);
        args.push_back(value.is_string() ? value.get<std::string>() : value.dump());
    }
    return args;
}

inline void add_common(CLI::App& sub, RunConfig& cfg) {
    sub.add_option("--builtin", cfg.builtin, "identity | diag <expr> | ex53 | ex59 q=<v> | file <path>");
    sub.add_option("--q", cfg.q, "parameter q of the ex59 family");
    sub.add_option("--alphas", cfg.alphas, "diagonal entries alpha_j as an expression in j")->capture_default_str();
    sub.add_option("--alpha-tail", cfg.alpha_tail, "bound on sum_{j>N} |1 - alpha_j| as an expression in N")
        ->capture_default_str();
    sub.add_option("--matrix", cfg.matrix, "matrix file")->check(CLI::ExistingFile);
    sub.add_flag("--inverse", cfg.matrix_is_inverse, "the matrix file holds the inverse symbol");
    sub.add_option("--partition", cfg.partition, "block partition file")->check(CLI::ExistingFile);
    sub.add_option("--n", cfg.n, "n")->capture_default_str();
    sub.add_option("--r", cfg.r, "r")->capture_default_str();
    sub.add_option("--L", cfg.L, "truncation depth");
    sub.add_option("--kappa", cfg.kappa, "dimension of the finite-dimensional box space");
    sub.add_option("--boxes", cfg.boxes, "box half-widths k, comma separated")->capture_default_str();
    sub.add_option("--seed", cfg.seed, "random seed")->capture_default_str();
    sub.add_option("--quad-order", cfg.quad_order, "initial Legendre order")->capture_default_str();
    sub.add_option("--quad-tol", cfg.quad_tol, "quadrature refinement tolerance")->capture_default_str();
    sub.add_option("--out", cfg.out, "report path (JSON)");
    sub.add_option("--format", cfg.format, "stdout format")->check(CLI::IsMember({"text", "json"}))->capture_default_str();
    sub.add_option("--config", "JSON file supplying defaults for unset options");
}

}  // namespace detail

/// Runs the tool on `args` (without the program name).
inline int run(std::vector<std::string> args, std::ostream& out, std::ostream& err) {
    RunConfig cfg;
    CLI::App app{"Composition operators over Gaussian measure: hypothesis checks and examples", "cosub"};
    app.set_version_flag("--version", version);
    app.require_subcommand(1);

    CLI::App* rn = app.add_subcommand("rn", "Radon-Nikodym derivative h_{A^i} at points and box norms");
    detail::add_common(*rn, cfg);
    rn->add_option("--points", cfg.points, "points 'x1,x2;y1,y2' (default: origin)");
    rn->add_option("--power", cfg.power, "power i")->capture_default_str()->check(CLI::PositiveNumber);

    CLI::App* check = app.add_subcommand("check", "hypothesis suites");
    detail::add_common(*check, cfg);
    check->add_option("suite", cfg.target, "thm51 | prop52 | prop56")
        ->required()
        ->check(CLI::IsMember({"thm51", "prop52", "prop56"}));
    check->add_option("--rho", cfg.rho, "determinant floor (prop56)");
    check->add_option("--samples", cfg.samples, "random sequences per power (prop56)")->capture_default_str();

    CLI::App* example = app.add_subcommand("example", "scripted reproductions with CSV tables");
    detail::add_common(*example, cfg);
    example->add_option("kind", cfg.target, "diag | banded | singular")
        ->required()
        ->check(CLI::IsMember({"diag", "banded", "singular"}));
    example->add_option("--alpha", cfg.alpha, "scaling alpha in (0, 1) (singular)")->capture_default_str();
    example->add_option("--N", cfg.N, "number of factors (singular)")->capture_default_str();
    example->add_option("--table", cfg.table, "CSV output path");

    try {
        args = detail::merge_config(std::move(args));
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? 0 : usage_error;
    } catch (const UsageError& e) {
        err << "error: " << e.what() << '\n';
        return usage_error;
    }

    detail::Outcome o;
    try {
        if (rn->parsed()) {
            cfg.command = "rn";
            o = detail::cmd_rn(cfg);
        } else if (check->parsed()) {
            cfg.command = "check";
            if (cfg.target != "prop56" && cfg.builtin.empty() && cfg.matrix.empty())
                throw UsageError("check " + cfg.target + " needs --builtin or --matrix");
            if (cfg.target == "prop56" && cfg.builtin.empty()) throw UsageError("check prop56 needs --builtin");
            o = detail::cmd_check(cfg);
        } else {
            cfg.command = "example";
            if (cfg.target == "diag") o = detail::example_diag(cfg);
            else if (cfg.target == "banded") o = detail::example_banded(cfg);
            else o = detail::example_singular(cfg);
        }
    } catch (const UsageError& e) {
        err << "error: " << e.what() << '\n';
        return usage_error;
    } catch (const std::invalid_argument& e) {
        err << "error: " << e.what() << '\n';
        return usage_error;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return 1;
    }

    json body;
    body["schema_version"] = schema_version;
    body["config"] = cfg.to_json();
    body["verdict"] = to_string(o.verdict);
    body["exit_code"] = exit_code(o.verdict);
    for (auto& [k, v] : o.body.items()) body[k] = v;
    json doc;
    doc["header"] = {{"tool", "cosub"}, {"version", version}, {"timestamp", detail::timestamp()}};
    doc["body"] = body;

    std::string stem = cfg.command + (cfg.target.empty() ? "" : "-" + cfg.target);
    try {
        if (const std::string path = detail::default_path(cfg.out, stem + ".json"); !path.empty())
            detail::write_file(path, doc.dump(2) + "\n");
        if (!o.table.empty())
            if (const std::string path = detail::default_path(cfg.table, stem + ".csv"); !path.empty())
                detail::write_file(path, o.table);
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return 1;
    }

    if (cfg.format == "json") {
        out << doc.dump(2) << '\n';
    } else {
        for (const auto& line : o.summary) out << line << '\n';
        out << "verdict: " << to_string(o.verdict) << '\n';
    }
    return exit_code(o.verdict);
}

}  // namespace cosub::cli
