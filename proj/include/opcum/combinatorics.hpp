#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "opcum/errors.hpp"

namespace opcum {

inline constexpr int kMaxPartitionOrder = 12;
inline constexpr int kMaxCompositionOrder = 24;
inline constexpr int kMaxProfileOrder = 20;

/// A partition of {1..n} into disjoint blocks. Canonical form: every block
/// sorted ascending, blocks sorted by their minimal element.
struct SetPartition {
    std::vector<std::vector<int>> blocks;

    int order() const {
        int n = 0;
        for (const auto& b : blocks) n += static_cast<int>(b.size());
        return n;
    }

    friend bool operator==(const SetPartition& a, const SetPartition& b) {
        return a.blocks == b.blocks;
    }
    friend bool operator<(const SetPartition& a, const SetPartition& b) {
        return a.blocks < b.blocks;
    }
};

/// An ordered composition (m1,...,mp) of n; the induced blocks are the
/// contiguous runs [1..m1], [m1+1..m1+m2], ...
struct IntervalComposition {
    std::vector<int> block_lengths;

    int order() const {
        int n = 0;
        for (int m : block_lengths) n += m;
        return n;
    }

    SetPartition to_partition() const {
        SetPartition p;
        int next = 1;
        for (int m : block_lengths) {
            std::vector<int> block(m);
            for (int i = 0; i < m; ++i) block[i] = next++;
            p.blocks.push_back(std::move(block));
        }
        return p;
    }

    friend bool operator==(const IntervalComposition& a, const IntervalComposition& b) {
        return a.block_lengths == b.block_lengths;
    }
};

/// Multiplicity map r -> s_r: s_r groups of size r, sum r*s_r = n.
struct SizeProfile {
    std::map<int, int> multiplicities;

    int order() const {
        int n = 0;
        for (auto [r, s] : multiplicities) n += r * s;
        return n;
    }

    friend bool operator==(const SizeProfile& a, const SizeProfile& b) {
        return a.multiplicities == b.multiplicities;
    }
    friend bool operator<(const SizeProfile& a, const SizeProfile& b) {
        return a.multiplicities < b.multiplicities;
    }
};

/// All set partitions of {1..n} in canonical order, grown element by element
/// so blocks automatically come out sorted by minimal element.
inline std::vector<SetPartition> enumerate_set_partitions(int n) {
    if (n < 1 || n > kMaxPartitionOrder)
        throw enumeration_cap_error("set-partition order must be in [1," +
                                    std::to_string(kMaxPartitionOrder) + "], got " +
                                    std::to_string(n));
    std::vector<SetPartition> result;
    SetPartition current;
    auto place = [&](auto&& self, int element) -> void {
        if (element > n) {
            result.push_back(current);
            return;
        }
        for (std::size_t i = 0; i < current.blocks.size(); ++i) {
            current.blocks[i].push_back(element);
            self(self, element + 1);
            current.blocks[i].pop_back();
        }
        current.blocks.push_back({element});
        self(self, element + 1);
        current.blocks.pop_back();
    };
    place(place, 1);
    return result;
}

/// All 2^(n-1) interval compositions, graded by part count then lexicographic:
/// n=3 -> (3),(1,2),(2,1),(1,1,1).
inline std::vector<IntervalComposition> enumerate_interval_compositions(int n) {
    if (n < 1 || n > kMaxCompositionOrder)
        throw enumeration_cap_error("composition order must be in [1," +
                                    std::to_string(kMaxCompositionOrder) + "], got " +
                                    std::to_string(n));
    std::vector<IntervalComposition> result;
    std::vector<int> parts;
    auto rec = [&](auto&& self, int remaining) -> void {
        if (remaining == 0) {
            result.push_back({parts});
            return;
        }
        for (int m = 1; m <= remaining; ++m) {
            parts.push_back(m);
            self(self, remaining - m);
            parts.pop_back();
        }
    };
    rec(rec, n);
    std::sort(result.begin(), result.end(), [](const auto& a, const auto& b) {
        if (a.block_lengths.size() != b.block_lengths.size())
            return a.block_lengths.size() < b.block_lengths.size();
        return a.block_lengths < b.block_lengths;
    });
    return result;
}

/// All size profiles with sum r*s_r = n (one per integer partition of n).
inline std::vector<SizeProfile> enumerate_size_profiles(int n) {
    if (n < 1 || n > kMaxProfileOrder)
        throw enumeration_cap_error("profile order must be in [1," +
                                    std::to_string(kMaxProfileOrder) + "], got " +
                                    std::to_string(n));
    std::vector<SizeProfile> result;
    SizeProfile current;
    auto rec = [&](auto&& self, int remaining, int max_part) -> void {
        if (remaining == 0) {
            result.push_back(current);
            return;
        }
        for (int r = std::min(remaining, max_part); r >= 1; --r) {
            ++current.multiplicities[r];
            self(self, remaining - r, r);
            if (--current.multiplicities[r] == 0) current.multiplicities.erase(r);
        }
    };
    rec(rec, n, n);
    return result;
}

/// Number of set partitions of {1..n} with the given block-size profile:
/// n! / (prod_r (r!)^{s_r} * s_r!).
inline std::int64_t partitions_with_profile_count(const SizeProfile& profile) {
    int n = profile.order();
    if (n < 1 || n > kMaxProfileOrder)
        throw validation_error("profile order out of range: " + std::to_string(n));
    for (auto [r, s] : profile.multiplicities)
        if (r < 1 || s < 0) throw validation_error("invalid size profile entry");
    auto fact = [](int k) {
        std::int64_t f = 1;
        for (int i = 2; i <= k; ++i) f *= i;
        return f;
    };
    std::int64_t count = fact(n);
    for (auto [r, s] : profile.multiplicities) {
        for (int i = 0; i < s; ++i) count /= fact(r);
        count /= fact(s);
    }
    return count;
}

/// Sign of a permutation of 1..k, via inversion count.
inline int permutation_parity(const std::vector<int>& perm) {
    int k = static_cast<int>(perm.size());
    std::vector<bool> seen(k, false);
    for (int v : perm) {
        if (v < 1 || v > k || seen[v - 1])
            throw validation_error("not a permutation of 1.." + std::to_string(k));
        seen[v - 1] = true;
    }
    int inversions = 0;
    for (int i = 0; i < k; ++i)
        for (int j = i + 1; j < k; ++j)
            if (perm[i] > perm[j]) ++inversions;
    return (inversions % 2 == 0) ? 1 : -1;
}

/// All (p-1)! orderings of the partition's blocks with the block containing
/// index 1 kept leftmost; remaining blocks run through lexicographic order.
inline std::vector<std::vector<std::vector<int>>> block_permutations_first_fixed(
    const SetPartition& partition) {
    if (partition.blocks.empty()) throw validation_error("empty partition");
    std::size_t first = 0;
    for (std::size_t i = 0; i < partition.blocks.size(); ++i)
        if (std::find(partition.blocks[i].begin(), partition.blocks[i].end(), 1) !=
            partition.blocks[i].end())
            first = i;
    std::vector<std::vector<int>> rest;
    for (std::size_t i = 0; i < partition.blocks.size(); ++i)
        if (i != first) rest.push_back(partition.blocks[i]);
    std::sort(rest.begin(), rest.end());
    std::vector<std::vector<std::vector<int>>> orderings;
    do {
        std::vector<std::vector<int>> ordering;
        ordering.push_back(partition.blocks[first]);
        for (const auto& b : rest) ordering.push_back(b);
        orderings.push_back(std::move(ordering));
    } while (std::next_permutation(rest.begin(), rest.end()));
    return orderings;
}

inline std::int64_t binomial(int n, int k) {
    if (k < 0 || k > n) return 0;
    std::int64_t r = 1;
    for (int i = 0; i < k; ++i) r = r * (n - i) / (i + 1);
    return r;
}

}  // namespace opcum
