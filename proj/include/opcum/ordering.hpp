#pragma once

#include <algorithm>
#include <set>
#include <vector>

#include "opcum/combinatorics.hpp"
#include "opcum/expr.hpp"

namespace opcum {

/// Partitions an expansion may sum over. Classical, PTO and Grassmann admit
/// every set partition; TTO only the 2^(n-1) contiguous interval chains.
inline std::vector<SetPartition> admissible_partitions(int n, OrderingMap map) {
    if (map == OrderingMap::TTO) {
        std::vector<SetPartition> parts;
        for (const IntervalComposition& c : enumerate_interval_compositions(n))
            parts.push_back(c.to_partition());
        return parts;
    }
    return enumerate_set_partitions(n);
}

/// Canonical order of a factor sequence under the map rule. PTO sorts by each
/// bracket's first (largest-time) index; TTO requires a contiguous chain;
/// Classical/Grassmann use the free commutative normal form.
inline std::vector<Bracket> canonical_factor_order(std::vector<Bracket> factors,
                                                   OrderingMap map) {
    std::set<int> seen;
    for (Bracket& f : factors) {
        canonicalize_bracket(f);
        for (int a : f.atoms)
            if (!seen.insert(a).second)
                throw validation_error("factors must cover disjoint index sets");
    }
    switch (map) {
        case OrderingMap::Classical:
        case OrderingMap::Grassmann:
            std::stable_sort(factors.begin(), factors.end(), detail::commutative_factor_less);
            break;
        case OrderingMap::PTO:
            std::stable_sort(factors.begin(), factors.end(),
                             [](const Bracket& a, const Bracket& b) {
                                 return a.min_atom() < b.min_atom();
                             });
            break;
        case OrderingMap::TTO:
            std::stable_sort(factors.begin(), factors.end(),
                             [](const Bracket& a, const Bracket& b) {
                                 return a.min_atom() < b.min_atom();
                             });
            for (std::size_t i = 0; i + 1 < factors.size(); ++i)
                if (factors[i].max_atom() + 1 != factors[i + 1].min_atom())
                    throw inadmissible_term_error(
                        "factors do not form a contiguous interval chain under tto");
            break;
    }
    return factors;
}

}  // namespace opcum
