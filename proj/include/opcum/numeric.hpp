#pragma once

#include <algorithm>
#include <complex>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "opcum/model.hpp"
#include "opcum/transforms.hpp"

namespace opcum {

struct VerificationReport {
    double max_abs_deviation = 0.0;
    double max_rel_deviation = 0.0;
    bool pass = false;
    std::vector<std::string> diagnostics;
};

/// Rewrites every multi-atom cumulant bracket through its moment expansion
/// for the given map; the result contains moment brackets only.
inline Expression expand_cumulants(Expression expr, OrderingMap map) {
    expr = canonicalize_ordered(std::move(expr), map);
    while (auto target = detail::find_multi_atom_cumulant(expr)) {
        Expression repl = cumulants_from_moments_recursive_atoms(target->atoms, map);
        expr = detail::apply_substitution(expr, *target, repl, map);
    }
    return expr;
}

namespace detail {

inline Matrix evaluate_term(const Term& t, const OperatorModel& model, OrderingMap map) {
    std::vector<Matrix> values;
    values.reserve(t.factors.size());
    for (const Bracket& f : t.factors) values.push_back(moment_value(model, f.atoms));
    const std::complex<double> coeff(t.coeff.to_double(), 0.0);
    if (map == OrderingMap::Classical && values.size() > 1) {
        // c-number limit realized as total symmetrization over factor orders
        std::vector<int> order(values.size());
        for (std::size_t i = 0; i < order.size(); ++i) order[i] = static_cast<int>(i);
        Matrix acc = Matrix::Zero(model.dim, model.dim);
        std::int64_t count = 0;
        do {
            Matrix prod = Matrix::Identity(model.dim, model.dim);
            for (int i : order) prod = prod * values[i];
            acc += prod;
            ++count;
        } while (std::next_permutation(order.begin(), order.end()));
        return coeff * (acc / static_cast<double>(count));
    }
    Matrix prod = Matrix::Identity(model.dim, model.dim);
    for (const Matrix& v : values) prod = prod * v;
    return coeff * prod;
}

}  // namespace detail

/// Exact evaluation on a finite model. Cumulant brackets are expanded per
/// the map; moment brackets are weighted sums of ordered matrix products;
/// factor products multiply left-to-right (symmetrized in Classical mode).
inline Matrix evaluate(const Expression& expr, const OperatorModel& model, OrderingMap map) {
    if (map == OrderingMap::Grassmann)
        throw validation_error("grassmann expressions act on tensors, not matrix models");
    model.validate();
    Expression expanded = expand_cumulants(expr, map);
    Matrix acc = Matrix::Zero(model.dim, model.dim);
    for (const Term& t : expanded.terms) acc += detail::evaluate_term(t, model, map);
    return acc;
}

inline VerificationReport verify_identity(const Expression& lhs, const Expression& rhs,
                                          const OperatorModel& model, OrderingMap map,
                                          double tol) {
    Matrix l = evaluate(lhs, model, map);
    Matrix r = evaluate(rhs, model, map);
    VerificationReport report;
    report.max_abs_deviation = max_abs(l - r);
    double scale = std::max(max_abs(l), max_abs(r));
    report.max_rel_deviation = scale > 0.0 ? report.max_abs_deviation / scale : 0.0;
    report.pass = report.max_rel_deviation <= tol;
    std::ostringstream os;
    os << "|lhs|=" << max_abs(l) << " |rhs|=" << max_abs(r)
       << " abs_dev=" << report.max_abs_deviation << " rel_dev=" << report.max_rel_deviation;
    report.diagnostics.push_back(os.str());
    return report;
}

/// Every cumulant bracket mixing the two groups, up to size n, must vanish
/// on a product-measure model. Deviations are relative to the largest
/// unmixed moment bracket norm.
inline VerificationReport verify_cluster_property(int n, const std::set<int>& group_a,
                                                  OrderingMap map,
                                                  const OperatorModel& joint, double tol) {
    if (group_a.empty() || static_cast<int>(group_a.size()) >= n)
        throw validation_error("group A must be a nonempty proper subset of 1..n");
    for (int a : group_a)
        if (a < 1 || a > n) throw validation_error("group A atom out of range");
    if (map == OrderingMap::TTO) {
        int expect = 1;
        for (int a : group_a)
            if (a != expect++)
                throw inadmissible_term_error(
                    "tto cluster split must be time-contiguous: group A has to be the "
                    "leading index range 1..split");
    }

    double scale = 0.0;
    std::vector<std::vector<int>> subsets;
    for (int mask = 1; mask < (1 << n); ++mask) {
        std::vector<int> subset;
        for (int i = 1; i <= n; ++i)
            if (mask & (1 << (i - 1))) subset.push_back(i);
        subsets.push_back(std::move(subset));
    }
    for (const auto& s : subsets) {
        bool in_a = group_a.count(s.front()) > 0;
        bool mixed = false;
        for (int a : s)
            if ((group_a.count(a) > 0) != in_a) mixed = true;
        if (!mixed) scale = std::max(scale, max_abs(moment_value(joint, s)));
    }

    VerificationReport report;
    report.pass = true;
    for (const auto& s : subsets) {
        if (s.size() < 2) continue;
        bool has_a = false, has_b = false;
        for (int a : s) (group_a.count(a) > 0 ? has_a : has_b) = true;
        if (!has_a || !has_b) continue;
        Matrix value = evaluate(Expression::single(cumulant(s)), joint, map);
        double dev = max_abs(value);
        double rel = scale > 0.0 ? dev / scale : dev;
        report.max_abs_deviation = std::max(report.max_abs_deviation, dev);
        report.max_rel_deviation = std::max(report.max_rel_deviation, rel);
        std::ostringstream os;
        os << "mixed cumulant " << render_text(cumulant(s)) << " rel_dev=" << rel;
        report.diagnostics.push_back(os.str());
    }
    report.pass = report.max_rel_deviation <= tol;
    return report;
}

inline VerificationReport verify_cluster_property(int n, int split, OrderingMap map,
                                                  const SplitModel& model, double tol) {
    if (split < 1 || split >= n) throw validation_error("split must satisfy 1 <= split < n");
    std::set<int> group_a;
    for (int i = 1; i <= split; ++i) group_a.insert(i);
    return verify_cluster_property(n, group_a, map, model.combined(), tol);
}

namespace detail {

inline Matrix ordered_power_sum(const OperatorModel& model, const std::vector<int>& atoms_a,
                                int k, const std::vector<int>& atoms_b, int m) {
    // sum over all ordered index sequences of (sum_A Omega)^k (x) (sum_B Omega)^m,
    // each monomial time-ordered (atoms ascending) before averaging
    Matrix acc = Matrix::Zero(model.dim, model.dim);
    std::vector<int> seq_a(k), seq_b(m);
    auto loop_b = [&](auto&& self, int depth) -> void {
        if (depth == m) {
            std::vector<int> atoms;
            atoms.insert(atoms.end(), seq_a.begin(), seq_a.end());
            atoms.insert(atoms.end(), seq_b.begin(), seq_b.end());
            std::sort(atoms.begin(), atoms.end());
            acc += moment_value(model, atoms);
            return;
        }
        for (int a : atoms_b) {
            seq_b[depth] = a;
            self(self, depth + 1);
        }
    };
    auto loop_a = [&](auto&& self, int depth) -> void {
        if (depth == k) {
            loop_b(loop_b, 0);
            return;
        }
        for (int a : atoms_a) {
            seq_a[depth] = a;
            self(self, depth + 1);
        }
    };
    loop_a(loop_a, 0);
    return acc;
}

}  // namespace detail

/// Per-order factorization check {A^k (x) B^m}_M~ = {A^k}_M~ (x) {B^m}_M~ for
/// A = sum of group-A atoms, B = sum of group-B atoms, k+m <= order_n,
/// expanded multinomially under the time-ordering M map.
inline VerificationReport verify_unconnected_factorization(const OperatorModel& joint,
                                                           int n_atoms, int split,
                                                           int order_n, double tol) {
    if (split < 1 || split >= n_atoms)
        throw validation_error("split must satisfy 1 <= split < n_atoms");
    if (order_n < 2 || order_n > 6)
        throw validation_error("order cap must be in [2,6]");
    std::vector<int> atoms_a, atoms_b;
    for (int i = 1; i <= split; ++i) atoms_a.push_back(i);
    for (int i = split + 1; i <= n_atoms; ++i) atoms_b.push_back(i);

    VerificationReport report;
    for (int k = 1; k < order_n; ++k)
        for (int m = 1; k + m <= order_n; ++m) {
            Matrix lhs = detail::ordered_power_sum(joint, atoms_a, k, atoms_b, m);
            Matrix pa = detail::ordered_power_sum(joint, atoms_a, k, {}, 0);
            Matrix pb = detail::ordered_power_sum(joint, atoms_b, m, {}, 0);
            Matrix rhs = pa * pb;
            double dev = max_abs(lhs - rhs);
            double scale = std::max(max_abs(lhs), max_abs(rhs));
            double rel = scale > 0.0 ? dev / scale : 0.0;
            report.max_abs_deviation = std::max(report.max_abs_deviation, dev);
            report.max_rel_deviation = std::max(report.max_rel_deviation, rel);
            std::ostringstream os;
            os << "(k,m)=(" << k << "," << m << ") rel_dev=" << rel;
            report.diagnostics.push_back(os.str());
        }
    report.pass = report.max_rel_deviation <= tol;
    return report;
}

/// The generalized moments must not be affected by the M_O map: evaluates a
/// full moment bracket directly and after the map's canonical reordering and
/// reports the deviation. For Grassmann the reordering is the full signed
/// symmetrization over atom orders, so only models with built-in antisymmetry
/// satisfy the constraint.
inline VerificationReport check_mo_constraint(int n, OrderingMap map,
                                              const OperatorModel& model, double tol = 1e-12) {
    model.validate();
    std::vector<int> atoms(n);
    for (int i = 0; i < n; ++i) atoms[i] = i + 1;
    for (const auto& s : model.samples)
        for (int a : atoms)
            if (!s.ops.count(a))
                throw validation_error("model does not define atom " + std::to_string(a));

    Matrix direct = moment_value(model, atoms);
    Matrix mapped;
    if (map == OrderingMap::Grassmann) {
        if (n > 8) throw enumeration_cap_error("grassmann constraint check capped at n=8");
        mapped = Matrix::Zero(model.dim, model.dim);
        std::vector<int> perm = atoms;
        std::int64_t count = 0;
        do {
            int sign = permutation_parity(perm);
            mapped += static_cast<double>(sign) * moment_value(model, perm);
            ++count;
        } while (std::next_permutation(perm.begin(), perm.end()));
        mapped /= static_cast<double>(count);
    } else {
        // a single averaged bracket is a fixed point of the reordering:
        // canonicalizing any atom order reproduces the ascending sequence
        std::vector<int> shuffled(atoms.rbegin(), atoms.rend());
        Expression e = canonicalize(Expression::single(moment(shuffled)), map);
        mapped = evaluate(e, model, map);
    }

    VerificationReport report;
    report.max_abs_deviation = max_abs(direct - mapped);
    double scale = max_abs(direct);
    report.max_rel_deviation = scale > 0.0 ? report.max_abs_deviation / scale : 0.0;
    report.pass = report.max_rel_deviation <= tol;
    std::ostringstream os;
    os << "map=" << to_string(map) << " n=" << n << " rel_dev=" << report.max_rel_deviation;
    report.diagnostics.push_back(os.str());
    return report;
}

}  // namespace opcum
