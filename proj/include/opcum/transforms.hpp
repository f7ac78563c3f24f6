#pragma once

#include <algorithm>
#include <map>
#include <optional>
#include <utility>
#include <vector>

#include "opcum/combinatorics.hpp"
#include "opcum/expr.hpp"
#include "opcum/ordering.hpp"

namespace opcum {

namespace detail {

inline Bracket block_to_bracket(const std::vector<int>& positions,
                                const std::vector<int>& atoms, BracketKind kind) {
    Bracket b;
    b.kind = kind;
    for (int pos : positions) b.atoms.push_back(atoms[pos - 1]);
    return b;
}

/// Factors for one size profile over the given atoms: blocks taken size
/// descending, consuming atoms in ascending order ([1..r1], [r1+1..], ...).
inline std::vector<Bracket> profile_blocks(const SizeProfile& profile,
                                           const std::vector<int>& atoms) {
    std::vector<Bracket> factors;
    std::size_t next = 0;
    for (auto it = profile.multiplicities.rbegin(); it != profile.multiplicities.rend(); ++it) {
        auto [r, s] = *it;
        for (int k = 0; k < s; ++k) {
            Bracket b;
            b.kind = BracketKind::Cumulant;
            for (int i = 0; i < r; ++i) b.atoms.push_back(atoms[next++]);
            factors.push_back(std::move(b));
        }
    }
    return factors;
}

}  // namespace detail

/// The moment bracket over the given ascending atom sequence expanded as a
/// sum of canonically ordered cumulant-bracket products, one term per
/// admissible partition (per size profile with multiplicity coefficients in
/// Grassmann mode), all other coefficients +1.
inline Expression moments_from_cumulants_atoms(const std::vector<int>& atoms,
                                               OrderingMap map) {
    int n = static_cast<int>(atoms.size());
    Expression out;
    if (map == OrderingMap::Grassmann) {
        for (const SizeProfile& profile : enumerate_size_profiles(n)) {
            Term t;
            t.coeff = Rational(partitions_with_profile_count(profile));
            t.op = ProductOp::Wedge;
            t.factors = detail::profile_blocks(profile, atoms);
            out.terms.push_back(std::move(t));
        }
    } else {
        for (const SetPartition& partition : admissible_partitions(n, map)) {
            Term t;
            for (const auto& block : partition.blocks)
                t.factors.push_back(
                    detail::block_to_bracket(block, atoms, BracketKind::Cumulant));
            out.terms.push_back(std::move(t));
        }
    }
    // under pto/tto the construction is already in canonical factor order;
    // reordering would also re-check index contiguity, which does not apply
    // to a generalized (gappy) atom sequence
    if (map == OrderingMap::PTO || map == OrderingMap::TTO)
        return canonicalize_ordered(std::move(out), map);
    return canonicalize(std::move(out), map);
}

inline Expression moments_from_cumulants(int n, OrderingMap map) {
    std::vector<int> atoms(n);
    for (int i = 0; i < n; ++i) atoms[i] = i + 1;
    return moments_from_cumulants_atoms(atoms, map);
}

namespace detail {

inline std::optional<Bracket> find_multi_atom_cumulant(const Expression& e) {
    for (const Term& t : e.terms)
        for (const Bracket& f : t.factors)
            if (f.kind == BracketKind::Cumulant && f.size() > 1) return f;
    return std::nullopt;
}

inline Expression cumulants_recursive_atoms(const std::vector<int>& atoms, OrderingMap map,
                                            std::map<std::vector<int>, Expression>& memo);

inline Expression apply_substitution(const Expression& e, const Bracket& target,
                                     const Expression& repl, OrderingMap map) {
    // Classical and Grassmann products commute, so their canonical form may
    // reorder freely; PTO/TTO inversions are explicit operator products.
    if (map == OrderingMap::Classical || map == OrderingMap::Grassmann)
        return substitute(e, target, repl, map);
    return substitute_ordered(e, target, repl);
}

inline Expression cumulants_recursive_atoms(const std::vector<int>& atoms, OrderingMap map,
                                            std::map<std::vector<int>, Expression>& memo) {
    if (auto it = memo.find(atoms); it != memo.end()) return it->second;
    int n = static_cast<int>(atoms.size());
    if (n == 1) {
        Expression e = Expression::single(moment(atoms));
        memo.emplace(atoms, e);
        return e;
    }
    Expression forward = moments_from_cumulants_atoms(atoms, map);
    Expression rest;
    bool removed = false;
    for (Term& t : forward.terms) {
        if (!removed && t.factors.size() == 1 &&
            t.factors[0].kind == BracketKind::Cumulant && t.factors[0].atoms == atoms) {
            removed = true;  // the n-cumulant itself, coefficient 1
            continue;
        }
        rest.terms.push_back(std::move(t));
    }
    Expression result = add(Expression::single(moment(atoms)), scale(std::move(rest), -1));
    while (auto target = find_multi_atom_cumulant(result)) {
        Expression repl = cumulants_recursive_atoms(target->atoms, map, memo);
        result = apply_substitution(result, *target, repl, map);
    }
    memo.emplace(atoms, result);
    return result;
}

}  // namespace detail

/// Triangular inversion of moments_from_cumulants: the n-cumulant bracket in
/// terms of moment brackets only. The single source of truth the direct
/// formulas are tested against.
inline Expression cumulants_from_moments_recursive_atoms(const std::vector<int>& atoms,
                                                         OrderingMap map) {
    std::map<std::vector<int>, Expression> memo;
    std::vector<int> sorted = atoms;
    std::sort(sorted.begin(), sorted.end());
    return detail::cumulants_recursive_atoms(sorted, map, memo);
}

inline Expression cumulants_from_moments_recursive(int n, OrderingMap map) {
    std::vector<int> atoms(n);
    for (int i = 0; i < n; ++i) atoms[i] = i + 1;
    return cumulants_from_moments_recursive_atoms(atoms, map);
}

/// PTO inversion: sum over set partitions and over block orderings with the
/// block containing index 1 fixed leftmost, each term signed (-1)^(|pi|-1).
/// The permutation sum cannot be collapsed into a factor (|pi|-1)!.
inline Expression cumulants_from_moments_pto_direct(int n) {
    Expression out;
    for (const SetPartition& partition : enumerate_set_partitions(n)) {
        int sign = (partition.blocks.size() % 2 == 1) ? 1 : -1;
        for (const auto& ordering : block_permutations_first_fixed(partition)) {
            Term t;
            t.coeff = Rational(sign);
            for (const auto& block : ordering)
                t.factors.push_back({BracketKind::Moment, block});
            out.terms.push_back(std::move(t));
        }
    }
    return canonicalize_ordered(std::move(out));
}

/// TTO inversion: one term per interval composition, (-1)^(p+1) times the
/// product of moment brackets over the consecutive runs; 2^(n-1) terms.
inline Expression cumulants_from_moments_tto_direct(int n) {
    Expression out;
    for (const IntervalComposition& comp : enumerate_interval_compositions(n)) {
        Term t;
        t.coeff = Rational(comp.block_lengths.size() % 2 == 1 ? 1 : -1);
        for (const auto& block : comp.to_partition().blocks)
            t.factors.push_back({BracketKind::Moment, block});
        out.terms.push_back(std::move(t));
    }
    return canonicalize_ordered(std::move(out));
}

/// Run-splitting procedure: over all (n-1)! permutations with numeral 1
/// fixed first, split into maximal ascending runs, bracket each run as a
/// totally-ordered cumulant average, sign by run count. Numerically equal to
/// the recursive PTO inversion once the runs are expanded as TTO cumulants.
inline Expression cumulants_from_moments_roerdnik(int n) {
    if (n < 1 || n > kMaxPartitionOrder)
        throw enumeration_cap_error("order must be in [1," +
                                    std::to_string(kMaxPartitionOrder) + "], got " +
                                    std::to_string(n));
    std::vector<int> tail;
    for (int i = 2; i <= n; ++i) tail.push_back(i);
    Expression out;
    do {
        std::vector<int> perm{1};
        perm.insert(perm.end(), tail.begin(), tail.end());
        Term t;
        std::vector<int> run{perm[0]};
        for (std::size_t i = 1; i < perm.size(); ++i) {
            if (perm[i] > perm[i - 1]) {
                run.push_back(perm[i]);
            } else {
                t.factors.push_back({BracketKind::Cumulant, run});
                run = {perm[i]};
            }
        }
        t.factors.push_back({BracketKind::Cumulant, run});
        t.coeff = Rational(t.factors.size() % 2 == 1 ? 1 : -1);
        out.terms.push_back(std::move(t));
    } while (std::next_permutation(tail.begin(), tail.end()));
    return canonicalize_ordered(std::move(out));
}

/// One component of the generating-function series: symbolic profile terms
/// with Meeron weights prod_r 1/s_r!.
struct GeneratingComponent {
    int order = 0;
    Expression body;
    std::vector<std::pair<SizeProfile, Rational>> profile_weights;
};

namespace detail {

inline GeneratingComponent component_from_weights(
    int n, OrderingMap map, std::vector<std::pair<SizeProfile, Rational>> weights) {
    std::sort(weights.begin(), weights.end(),
              [](const auto& a, const auto& b) { return a.first < b.first; });
    GeneratingComponent comp;
    comp.order = n;
    comp.profile_weights = weights;
    std::vector<int> atoms(n);
    for (int i = 0; i < n; ++i) atoms[i] = i + 1;
    for (const auto& [profile, weight] : weights) {
        Term t;
        t.coeff = weight;
        t.op = (map == OrderingMap::Grassmann) ? ProductOp::Wedge : ProductOp::Tensor;
        t.factors = profile_blocks(profile, atoms);
        comp.body.terms.push_back(std::move(t));
    }
    comp.body = canonicalize(std::move(comp.body), map);
    return comp;
}

}  // namespace detail

/// Moment generating component of order n: sum over size profiles of
/// (prod_r 1/s_r!) times the canonically ordered product of cumulant
/// component powers.
inline GeneratingComponent meeron_component(int n, OrderingMap map) {
    std::vector<std::pair<SizeProfile, Rational>> weights;
    for (const SizeProfile& profile : enumerate_size_profiles(n)) {
        Rational w(1);
        for (auto [r, s] : profile.multiplicities) w = w / factorial_rational(s);
        weights.emplace_back(profile, w);
    }
    return detail::component_from_weights(n, map, std::move(weights));
}

/// Order-n slice of exp_{M_O}[sum_r K_r], expanded term by term through the
/// multinomial theorem: sum over m of 1/m! over all ordered size sequences.
/// Must coincide with meeron_component exactly.
inline GeneratingComponent exp_mo_component(int n, OrderingMap map) {
    std::map<SizeProfile, Rational> acc;
    std::vector<int> seq;
    auto rec = [&](auto&& self, int remaining) -> void {
        if (remaining == 0) {
            SizeProfile profile;
            for (int r : seq) ++profile.multiplicities[r];
            acc[profile] += Rational(1) / factorial_rational(static_cast<int>(seq.size()));
            return;
        }
        for (int r = 1; r <= remaining; ++r) {
            seq.push_back(r);
            self(self, remaining - r);
            seq.pop_back();
        }
    };
    rec(rec, n);
    std::vector<std::pair<SizeProfile, Rational>> weights(acc.begin(), acc.end());
    return detail::component_from_weights(n, map, std::move(weights));
}

/// With every singleton average nulled, the n-cumulant collapses to the bare
/// n-moment for n = 2, 3, whatever the map.
inline Expression vanishing_mean_simplification(int n, OrderingMap map) {
    if (n != 2 && n != 3)
        throw validation_error("vanishing-mean simplification is stated for n in {2,3}");
    Expression inv = cumulants_from_moments_recursive(n, map);
    Expression kept;
    for (const Term& t : inv.terms) {
        bool has_singleton = false;
        for (const Bracket& f : t.factors)
            if (f.size() == 1) has_singleton = true;
        if (!has_singleton) kept.terms.push_back(t);
    }
    return canonicalize_ordered(std::move(kept), map);
}

}  // namespace opcum
