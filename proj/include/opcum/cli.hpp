#pragma once

#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "opcum/appendix_a.hpp"
#include "opcum/fermi.hpp"
#include "opcum/numeric.hpp"
#include "opcum/transforms.hpp"

namespace opcum::cli {

inline std::string fmt(double v) {
    std::ostringstream os;
    os << std::scientific << std::setprecision(12) << v;
    return os.str();
}

inline Rational parse_rational_arg(const std::string& text) {
    auto slash = text.find('/');
    try {
        if (slash == std::string::npos) return Rational(std::stoll(text));
        return Rational(std::stoll(text.substr(0, slash)), std::stoll(text.substr(slash + 1)));
    } catch (const std::exception&) {
        throw validation_error("cannot parse rational '" + text + "'");
    }
}

namespace detail {

struct Options {
    // expand
    std::string direction;
    std::string map_name = "pto";
    std::string format = "text";
    int n = 0;
    // verify
    std::string verify_kind;
    int dim = 4;
    int samples = 3;
    std::uint64_t seed = 0;
    double tol = 1e-10;
    int split = 0;
    bool correlated = false;
    std::string model_file;
    // demo
    int degree = 6;
    std::string t1 = "1", t2 = "0", t = "1";
    bool continuous = false;
    bool commuting = false;
    // rdm
    std::string rdm_action;
    std::string state_file;
    std::string rdm_case;
    int p = 2;
    int orbitals = 0;
    int electrons = 0;
};

inline int run_expand(const Options& opt, std::ostream& out) {
    OrderingMap map = ordering_map_from_string(opt.map_name);
    Expression expr;
    if (opt.direction == "moments")
        expr = moments_from_cumulants(opt.n, map);
    else if (opt.direction == "cumulants")
        expr = cumulants_from_moments_recursive(opt.n, map);
    else
        throw CLI::ValidationError("--direction must be moments or cumulants");
    out << render(expr, opt.format == "json" ? RenderFormat::Json : RenderFormat::Text)
        << "\n";
    return 0;
}

inline int report_outcome(const VerificationReport& report, const std::string& label,
                          const Options& opt, std::ostream& out, bool expect_pass = true) {
    for (const std::string& line : report.diagnostics) out << "  " << line << "\n";
    out << label << ": seed=" << opt.seed << " tol=" << opt.tol
        << " max_rel_dev=" << fmt(report.max_rel_deviation)
        << (report.pass ? " PASS" : " FAIL") << "\n";
    (void)expect_pass;
    return report.pass ? 0 : 1;
}

inline int run_verify(const Options& opt, std::ostream& out) {
    OrderingMap map = ordering_map_from_string(opt.map_name);
    int n = opt.n;
    if (n < 1) throw validation_error("--n must be >= 1");
    int split = opt.split > 0 ? opt.split : std::max(1, n / 2);

    if (opt.verify_kind == "identity") {
        OperatorModel model = opt.model_file.empty()
                                  ? build_random_model(opt.dim, n, opt.samples, opt.seed)
                                  : load_model(opt.model_file);
        Expression lhs = moments_from_cumulants(n, map);
        std::vector<int> atoms(n);
        for (int i = 0; i < n; ++i) atoms[i] = i + 1;
        Expression rhs = Expression::single(moment(atoms));
        auto report = verify_identity(lhs, rhs, model, map, opt.tol);
        return report_outcome(report, "identity map=" + opt.map_name + " n=" + std::to_string(n),
                              opt, out);
    }
    if (opt.verify_kind == "cluster") {
        VerificationReport report;
        if (opt.correlated) {
            OperatorModel joint = build_random_model(opt.dim, n, opt.samples, opt.seed);
            std::set<int> group_a;
            for (int i = 1; i <= split; ++i) group_a.insert(i);
            report = verify_cluster_property(n, group_a, map, joint, opt.tol);
        } else {
            SplitModel sm =
                build_split_model(opt.dim, n, split, opt.samples, opt.seed, opt.seed + 1);
            report = verify_cluster_property(n, split, map, sm, opt.tol);
        }
        return report_outcome(report,
                              "cluster map=" + opt.map_name + " n=" + std::to_string(n) +
                                  " split=" + std::to_string(split) +
                                  (opt.correlated ? " correlated" : ""),
                              opt, out);
    }
    if (opt.verify_kind == "factorization") {
        OperatorModel joint;
        if (opt.correlated) {
            joint = build_random_model(opt.dim, n, opt.samples, opt.seed);
        } else {
            joint = build_split_model(opt.dim, n, split, opt.samples, opt.seed, opt.seed + 1)
                        .combined();
        }
        auto report = verify_unconnected_factorization(joint, n, split, n, opt.tol);
        return report_outcome(report,
                              "factorization n=" + std::to_string(n) +
                                  " split=" + std::to_string(split) +
                                  (opt.correlated ? " correlated" : ""),
                              opt, out);
    }
    if (opt.verify_kind == "roerdnik-equivalence") {
        OperatorModel model = build_random_model(opt.dim, n, opt.samples, opt.seed);
        Matrix lhs = evaluate(cumulants_from_moments_roerdnik(n), model, OrderingMap::TTO);
        Matrix rhs = evaluate(cumulants_from_moments_recursive(n, OrderingMap::PTO), model,
                              OrderingMap::PTO);
        VerificationReport report;
        report.max_abs_deviation = max_abs(lhs - rhs);
        double scale = std::max(max_abs(lhs), max_abs(rhs));
        report.max_rel_deviation =
            scale > 0.0 ? report.max_abs_deviation / scale : 0.0;
        report.pass = report.max_rel_deviation <= opt.tol;
        return report_outcome(report, "roerdnik-equivalence n=" + std::to_string(n), opt, out);
    }
    throw CLI::ValidationError(
        "verify kind must be identity|cluster|factorization|roerdnik-equivalence");
}

inline int run_demo(const Options& opt, std::ostream& out) {
    if (opt.continuous) {
        Rational t = parse_rational_arg(opt.t);
        auto report = appendix_a_continuous(opt.degree, t);
        out << "continuous t=" << t.str() << " degree=" << opt.degree << "\n";
        out << "  ordered double integral mixed term: " << (t * t * t / Rational(3)).str()
            << "*(2*CD + DC)  -> " << (report.ordered_matches_printed ? "exact" : "MISMATCH")
            << "\n";
        out << "  naive squared integral mixed term:  " << (t * t * t / Rational(2)).str()
            << "*(CD + DC)  -> " << (report.naive_matches_printed ? "exact" : "MISMATCH")
            << "\n";
        return (report.ordered_matches_printed && report.naive_matches_printed) ? 0 : 1;
    }
    Rational t1 = parse_rational_arg(opt.t1);
    Rational t2 = parse_rational_arg(opt.t2);
    auto report = appendix_a_discrete(opt.degree, t1, t2, opt.commuting);
    out << "discrete t1=" << t1.str() << " t2=" << t2.str() << " degree=" << opt.degree
        << (opt.commuting ? " commuting" : "") << "\n";
    out << "  summed-first vs per-basis-ordered discrepancy "
        << (report.discrepancy_zero ? "is zero" : "is nonzero") << "\n";
    out << "  residual vs (t1+t2)*(DC-CD): "
        << (report.matches_sum_form ? "0" : "nonzero") << "\n";
    out << "  residual vs (t1-t2)*(DC-CD): "
        << (report.matches_diff_form ? "0" : "nonzero") << "\n";
    return report.matches_sum_form ? 0 : 1;
}

inline FockVector rdm_build_state(const Options& opt) {
    if (!opt.state_file.empty()) return load_state(opt.state_file);
    if (opt.rdm_case == "determinant") {
        if (opt.orbitals < 1 || opt.electrons < 0)
            throw validation_error("need --orbitals and --electrons");
        std::vector<int> occ;
        for (int i = 1; i <= opt.electrons; ++i) occ.push_back(i);
        return determinant_state(opt.orbitals, occ);
    }
    if (opt.rdm_case == "random") {
        if (opt.orbitals < 1 || opt.electrons < 1)
            throw validation_error("need --orbitals and --electrons");
        return random_number_state(opt.orbitals, opt.electrons, opt.seed);
    }
    throw validation_error("need --state FILE or --case determinant|random");
}

inline void print_canonical_entries(const AntisymmetricTensor& t, const std::string& name,
                                    std::ostream& out, double eps = 1e-14) {
    auto tuples = opcum::detail::increasing_tuples(t.n_orbitals, t.rank);
    for (const auto& ui : tuples)
        for (const auto& lj : tuples) {
            Amplitude v = t.at(ui, lj);
            if (std::abs(v) <= eps) continue;
            out << name << "[";
            for (std::size_t k = 0; k < ui.size(); ++k) out << (k ? "." : "") << ui[k];
            out << "|";
            for (std::size_t k = 0; k < lj.size(); ++k) out << (k ? "." : "") << lj[k];
            out << "] " << fmt(v.real()) << " " << fmt(v.imag()) << "\n";
        }
}

inline int run_rdm(const Options& opt, std::ostream& out) {
    if (opt.rdm_action == "compute") {
        FockVector state = rdm_build_state(opt);
        AntisymmetricTensor t = compute_rdm(state, opt.p);
        print_canonical_entries(t, "D" + std::to_string(opt.p), out);
        return 0;
    }
    if (opt.rdm_action == "cumulants") {
        FockVector state = rdm_build_state(opt);
        auto deltas = rdm_cumulants(state, opt.p);
        for (int r = 1; r <= opt.p; ++r)
            out << "max|Delta_" << r << "| = " << fmt(deltas[r - 1].max_abs()) << "\n";
        print_canonical_entries(deltas[opt.p - 1], "Delta" + std::to_string(opt.p), out);
        return 0;
    }
    if (opt.rdm_action == "check") {
        double tol = opt.tol == 1e-10 ? 1e-12 : opt.tol;
        if (opt.rdm_case == "determinant") {
            if (opt.orbitals < 1 || opt.electrons < 2)
                throw validation_error("need --orbitals and --electrons >= 2");
            double worst = 0.0;
            std::vector<int> occ(opt.electrons);
            auto rec = [&](auto&& self, int depth, int start) -> void {
                if (depth == opt.electrons) {
                    FockVector det = determinant_state(opt.orbitals, occ);
                    auto deltas = rdm_cumulants(det, 2);
                    worst = std::max(worst, deltas[1].max_abs());
                    return;
                }
                for (int v = start; v <= opt.orbitals; ++v) {
                    occ[depth] = v;
                    self(self, depth + 1, v + 1);
                }
            };
            rec(rec, 0, 1);
            bool pass = worst < tol;
            out << "determinant check: orbitals=" << opt.orbitals
                << " electrons=" << opt.electrons << " max|Delta_2| over all determinants = "
                << fmt(worst) << (pass ? " PASS" : " FAIL") << "\n";
            return pass ? 0 : 1;
        }
        if (opt.rdm_case == "additivity") {
            if (opt.orbitals < 2) throw validation_error("need --orbitals");
            int split = opt.split > 0 ? opt.split : opt.orbitals / 2;
            if (split < 1 || split >= opt.orbitals)
                throw validation_error("split must be inside the orbital range");
            int na = std::max(1, split / 2), nb = std::max(1, (opt.orbitals - split) / 2);
            FockVector a = random_number_state(split, na, opt.seed);
            FockVector b = random_number_state(opt.orbitals - split, nb, opt.seed + 1);
            FockVector prod = product_state(a, b);
            auto deltas = rdm_cumulants(prod, 2);
            double worst_cross_delta = 0.0, best_cross_rdm = 0.0;
            AntisymmetricTensor d2 = compute_rdm(prod, 2);
            for (int i1 = 1; i1 <= opt.orbitals; ++i1)
                for (int i2 = 1; i2 <= opt.orbitals; ++i2)
                    for (int j1 = 1; j1 <= opt.orbitals; ++j1)
                        for (int j2 = 1; j2 <= opt.orbitals; ++j2) {
                            bool all_a = i1 <= split && i2 <= split && j1 <= split && j2 <= split;
                            bool all_b = i1 > split && i2 > split && j1 > split && j2 > split;
                            if (all_a || all_b) continue;
                            worst_cross_delta = std::max(
                                worst_cross_delta, std::abs(deltas[1].at({i1, i2}, {j1, j2})));
                            best_cross_rdm = std::max(best_cross_rdm,
                                                      std::abs(d2.at({i1, i2}, {j1, j2})));
                        }
            bool pass = worst_cross_delta < tol;
            out << "additivity check: orbitals=" << opt.orbitals << " split=" << split
                << " seed=" << opt.seed
                << " max cross-block |Delta_2| = " << fmt(worst_cross_delta)
                << " (cross-block |D_2| reaches " << fmt(best_cross_rdm) << ")"
                << (pass ? " PASS" : " FAIL") << "\n";
            return pass ? 0 : 1;
        }
        throw validation_error("check case must be determinant|additivity");
    }
    throw CLI::ValidationError("rdm action must be compute|cumulants|check");
}

}  // namespace detail

/// Entry point shared by the binary and the in-process CLI tests.
/// Exit codes: 0 success, 1 verification/domain failure, 2 usage error.
inline int run_cli(std::vector<std::string> args, std::ostream& out, std::ostream& err) {
    CLI::App app{"generalized moment/cumulant expansion and verification toolkit"};
    app.require_subcommand(1);
    detail::Options opt;

    CLI::App* expand = app.add_subcommand("expand", "print a moment/cumulant expansion");
    expand->add_option("--direction", opt.direction, "moments|cumulants")
        ->required()
        ->check(CLI::IsMember({"moments", "cumulants"}));
    expand->add_option("--n", opt.n, "expansion order")->required();
    expand->add_option("--map", opt.map_name, "classical|pto|tto|grassmann")
        ->check(CLI::IsMember({"classical", "pto", "tto", "grassmann"}));
    expand->add_option("--format", opt.format, "text|json")
        ->check(CLI::IsMember({"text", "json"}));

    CLI::App* verify = app.add_subcommand("verify", "numeric verification on finite models");
    verify->add_option("kind", opt.verify_kind,
                       "identity|cluster|factorization|roerdnik-equivalence")
        ->required();
    verify->add_option("--n", opt.n, "order")->required();
    verify->add_option("--map", opt.map_name, "classical|pto|tto")
        ->check(CLI::IsMember({"classical", "pto", "tto"}));
    verify->add_option("--dim", opt.dim, "matrix dimension");
    verify->add_option("--samples", opt.samples, "samples per measure");
    verify->add_option("--seed", opt.seed, "model seed");
    verify->add_option("--tol", opt.tol, "relative tolerance");
    verify->add_option("--split", opt.split, "group A = indices 1..split");
    verify->add_flag("--correlated", opt.correlated, "use a correlated control model");
    verify->add_option("--model", opt.model_file, "JSON model file");

    CLI::App* demo = app.add_subcommand("demo", "ordering-pitfall demonstration");
    std::string demo_name;
    demo->add_option("name", demo_name, "appendix-a")->required();
    demo->add_option("--degree", opt.degree, "monomial basis degree cap");
    demo->add_option("--t1", opt.t1, "first time (rational)");
    demo->add_option("--t2", opt.t2, "second time (rational)");
    demo->add_option("--t", opt.t, "upper integration time (rational)");
    demo->add_flag("--continuous", opt.continuous, "run the integrated-square comparison");
    demo->add_flag("--commuting", opt.commuting, "replace both operators by the identity");

    CLI::App* rdm = app.add_subcommand("rdm", "fermionic reduced density matrix toolkit");
    rdm->add_option("action", opt.rdm_action, "compute|cumulants|check")->required();
    rdm->add_option("--state", opt.state_file, "state file (bitstring re im per line)");
    rdm->add_option("--case", opt.rdm_case, "determinant|random|additivity");
    rdm->add_option("--p", opt.p, "tensor rank");
    rdm->add_option("--orbitals", opt.orbitals, "orbital count");
    rdm->add_option("--electrons", opt.electrons, "electron count");
    rdm->add_option("--split", opt.split, "orbital split for additivity");
    rdm->add_option("--seed", opt.seed, "random state seed");
    rdm->add_option("--tol", opt.tol, "tolerance");

    args.insert(args.begin(), "opcumulant");
    std::vector<char*> argv;
    for (std::string& s : args) argv.push_back(s.data());
    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::CallForHelp& e) {
        out << app.help();
        return 0;
    } catch (const CLI::ParseError& e) {
        err << "usage error: " << e.what() << "\n";
        return 2;
    }

    try {
        if (expand->parsed()) return detail::run_expand(opt, out);
        if (verify->parsed()) return detail::run_verify(opt, out);
        if (demo->parsed()) {
            if (demo_name != "appendix-a") {
                err << "usage error: unknown demo '" << demo_name << "'\n";
                return 2;
            }
            return detail::run_demo(opt, out);
        }
        if (rdm->parsed()) return detail::run_rdm(opt, out);
    } catch (const CLI::ValidationError& e) {
        err << "usage error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return 1;
    }
    return 2;
}

}  // namespace opcum::cli
