#pragma once

#include <bit>
#include <cmath>
#include <complex>
#include <cstdint>
#include <fstream>
#include <map>
#include <random>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "opcum/combinatorics.hpp"
#include "opcum/errors.hpp"
#include "opcum/util.hpp"

namespace opcum {

inline constexpr int kMaxOrbitals = 12;
inline constexpr int kMaxRdmRank = 4;

using Amplitude = std::complex<double>;

/// State in the fermionic Fock space of up to 12 orbitals, stored sparsely
/// over occupation bitstrings (bit i-1 = orbital i).
struct FockVector {
    int n_orbitals = 0;
    std::map<std::uint32_t, Amplitude> amplitudes;

    double norm_sq() const {
        double s = 0.0;
        for (const auto& [bits, amp] : amplitudes) s += std::norm(amp);
        return s;
    }

    bool is_zero() const { return amplitudes.empty(); }

    void check_normalized(double tol = 1e-12) const {
        if (std::abs(norm_sq() - 1.0) > tol)
            throw validation_error("state is not normalized");
    }

    /// All basis strings share one popcount, or the state mixes sectors.
    int particle_number() const {
        int n = -1;
        for (const auto& [bits, amp] : amplitudes) {
            int pc = std::popcount(bits);
            if (n == -1)
                n = pc;
            else if (n != pc)
                throw validation_error("state is not particle-number definite");
        }
        return n;
    }

    void prune(double eps = 0.0) {
        for (auto it = amplitudes.begin(); it != amplitudes.end();)
            it = (std::abs(it->second) <= eps) ? amplitudes.erase(it) : std::next(it);
    }
};

inline Amplitude inner(const FockVector& a, const FockVector& b) {
    Amplitude s = 0.0;
    for (const auto& [bits, amp] : a.amplitudes) {
        auto it = b.amplitudes.find(bits);
        if (it != b.amplitudes.end()) s += std::conj(amp) * it->second;
    }
    return s;
}

namespace detail {

inline void check_orbital(const FockVector& state, int orbital) {
    if (orbital < 1 || orbital > state.n_orbitals)
        throw validation_error("orbital out of range: " + std::to_string(orbital));
}

inline int jw_parity(std::uint32_t bits, int orbital) {
    std::uint32_t below = bits & ((1u << (orbital - 1)) - 1u);
    return (std::popcount(below) % 2 == 0) ? 1 : -1;
}

}  // namespace detail

/// a_j with the Jordan-Wigner sign from orbitals below j; annihilating an
/// empty orbital contributes the zero vector.
inline FockVector apply_annihilation(const FockVector& state, int orbital) {
    detail::check_orbital(state, orbital);
    FockVector out;
    out.n_orbitals = state.n_orbitals;
    std::uint32_t mask = 1u << (orbital - 1);
    for (const auto& [bits, amp] : state.amplitudes) {
        if (!(bits & mask)) continue;
        out.amplitudes[bits & ~mask] += static_cast<double>(detail::jw_parity(bits, orbital)) * amp;
    }
    out.prune();
    return out;
}

/// a^dagger_j; creating a filled orbital contributes the zero vector.
inline FockVector apply_creation(const FockVector& state, int orbital) {
    detail::check_orbital(state, orbital);
    FockVector out;
    out.n_orbitals = state.n_orbitals;
    std::uint32_t mask = 1u << (orbital - 1);
    for (const auto& [bits, amp] : state.amplitudes) {
        if (bits & mask) continue;
        out.amplitudes[bits | mask] += static_cast<double>(detail::jw_parity(bits, orbital)) * amp;
    }
    out.prune();
    return out;
}

inline FockVector determinant_state(int n_orbitals, const std::vector<int>& occupied) {
    if (n_orbitals < 1 || n_orbitals > kMaxOrbitals)
        throw validation_error("orbital count must be in [1," + std::to_string(kMaxOrbitals) + "]");
    FockVector state;
    state.n_orbitals = n_orbitals;
    std::uint32_t bits = 0;
    for (int orb : occupied) {
        if (orb < 1 || orb > n_orbitals) throw validation_error("orbital out of range");
        bits |= 1u << (orb - 1);
    }
    state.amplitudes[bits] = 1.0;
    return state;
}

/// Deterministic random state in the N-particle sector.
inline FockVector random_number_state(int n_orbitals, int n_electrons, std::uint64_t seed) {
    if (n_orbitals < 1 || n_orbitals > kMaxOrbitals)
        throw validation_error("orbital count must be in [1," + std::to_string(kMaxOrbitals) + "]");
    std::mt19937_64 rng(seed);
    FockVector state;
    state.n_orbitals = n_orbitals;
    for (std::uint32_t bits = 0; bits < (1u << n_orbitals); ++bits)
        if (std::popcount(bits) == n_electrons)
            state.amplitudes[bits] = Amplitude(uniform_pm1(rng), uniform_pm1(rng));
    double scale = 1.0 / std::sqrt(state.norm_sq());
    for (auto& [bits, amp] : state.amplitudes) amp *= scale;
    return state;
}

/// |Psi_A Psi_B>: A lives on orbitals 1..k, B on the remaining ones. With the
/// blocks ordered this way no interleaving sign appears.
inline FockVector product_state(const FockVector& a, const FockVector& b) {
    FockVector out;
    out.n_orbitals = a.n_orbitals + b.n_orbitals;
    if (out.n_orbitals > kMaxOrbitals) throw validation_error("too many orbitals");
    for (const auto& [ba, za] : a.amplitudes)
        for (const auto& [bb, zb] : b.amplitudes)
            out.amplitudes[ba | (bb << a.n_orbitals)] = za * zb;
    return out;
}

/// Rank-(p,p) tensor indexed by an upper and a lower p-tuple of orbitals,
/// stored dense; fully antisymmetric in each tuple.
struct AntisymmetricTensor {
    int n_orbitals = 0;
    int rank = 0;
    std::vector<Amplitude> data;

    static AntisymmetricTensor zeros(int n_orbitals, int rank) {
        AntisymmetricTensor t;
        t.n_orbitals = n_orbitals;
        t.rank = rank;
        std::size_t size = 1;
        for (int i = 0; i < 2 * rank; ++i) {
            size *= static_cast<std::size_t>(n_orbitals);
            if (size > (1u << 26))
                throw enumeration_cap_error("dense tensor exceeds the size cap");
        }
        t.data.assign(size, Amplitude(0.0));
        return t;
    }

    std::size_t flat(const std::vector<int>& upper, const std::vector<int>& lower) const {
        std::size_t idx = 0;
        for (int i : upper) idx = idx * n_orbitals + static_cast<std::size_t>(i - 1);
        for (int j : lower) idx = idx * n_orbitals + static_cast<std::size_t>(j - 1);
        return idx;
    }

    Amplitude& at(const std::vector<int>& upper, const std::vector<int>& lower) {
        return data[flat(upper, lower)];
    }
    const Amplitude& at(const std::vector<int>& upper, const std::vector<int>& lower) const {
        return data[flat(upper, lower)];
    }

    double max_abs() const {
        double m = 0.0;
        for (const Amplitude& v : data) m = std::max(m, std::abs(v));
        return m;
    }

    friend AntisymmetricTensor operator+(AntisymmetricTensor a, const AntisymmetricTensor& b) {
        for (std::size_t i = 0; i < a.data.size(); ++i) a.data[i] += b.data[i];
        return a;
    }
    friend AntisymmetricTensor operator-(AntisymmetricTensor a, const AntisymmetricTensor& b) {
        for (std::size_t i = 0; i < a.data.size(); ++i) a.data[i] -= b.data[i];
        return a;
    }
    friend AntisymmetricTensor operator*(double c, AntisymmetricTensor a) {
        for (Amplitude& v : a.data) v *= c;
        return a;
    }
};

namespace detail {

inline std::vector<std::vector<int>> increasing_tuples(int n_orbitals, int p) {
    std::vector<std::vector<int>> tuples;
    std::vector<int> t(p);
    auto rec = [&](auto&& self, int depth, int start) -> void {
        if (depth == p) {
            tuples.push_back(t);
            return;
        }
        for (int v = start; v <= n_orbitals; ++v) {
            t[depth] = v;
            self(self, depth + 1, v + 1);
        }
    };
    rec(rec, 0, 1);
    return tuples;
}

/// sign sorting the tuple ascending, 0 on a repeated index
inline int sort_sign(std::vector<int>& tuple) {
    int sign = 1;
    for (std::size_t i = 1; i < tuple.size(); ++i)
        for (std::size_t j = i; j > 0 && tuple[j] < tuple[j - 1]; --j) {
            std::swap(tuple[j], tuple[j - 1]);
            sign = -sign;
        }
    for (std::size_t i = 1; i < tuple.size(); ++i)
        if (tuple[i] == tuple[i - 1]) return 0;
    return sign;
}

/// Fills the dense tensor from its values on increasing tuple pairs.
inline void spread_antisymmetric(AntisymmetricTensor& t,
                                 const std::vector<std::vector<int>>& tuples,
                                 const std::vector<std::vector<Amplitude>>& canonical) {
    const int p = t.rank;
    std::vector<int> perm(p);
    std::vector<std::vector<std::pair<std::vector<int>, int>>> images(tuples.size());
    for (std::size_t k = 0; k < tuples.size(); ++k) {
        for (int i = 0; i < p; ++i) perm[i] = i;
        do {
            std::vector<int> image(p);
            for (int i = 0; i < p; ++i) image[i] = tuples[k][perm[i]];
            std::vector<int> probe = image;
            images[k].push_back({image, sort_sign(probe)});
        } while (std::next_permutation(perm.begin(), perm.end()));
    }
    for (std::size_t a = 0; a < tuples.size(); ++a)
        for (std::size_t b = 0; b < tuples.size(); ++b) {
            Amplitude v = canonical[a][b];
            if (v == Amplitude(0.0)) continue;
            for (const auto& [ui, us] : images[a])
                for (const auto& [lj, ls] : images[b])
                    t.at(ui, lj) = static_cast<double>(us * ls) * v;
        }
}

}  // namespace detail

/// p-particle reduced density matrix by brute-force operator application:
/// D^{i...}_{j...} = (1/p!) <Psi| a+_{i1}..a+_{ip} a_{jp}..a_{j1} |Psi>.
inline AntisymmetricTensor compute_rdm(const FockVector& state, int p) {
    if (p < 1 || p > kMaxRdmRank)
        throw enumeration_cap_error("rdm rank must be in [1," + std::to_string(kMaxRdmRank) + "]");
    state.check_normalized();
    auto tuples = detail::increasing_tuples(state.n_orbitals, p);
    std::vector<FockVector> annihilated(tuples.size());
    for (std::size_t k = 0; k < tuples.size(); ++k) {
        FockVector v = state;
        for (int j : tuples[k]) v = apply_annihilation(v, j);  // a_{j1} acts first
        annihilated[k] = std::move(v);
    }
    double prefactor = 1.0;
    for (int i = 2; i <= p; ++i) prefactor /= i;
    std::vector<std::vector<Amplitude>> canonical(tuples.size(),
                                                  std::vector<Amplitude>(tuples.size()));
    for (std::size_t a = 0; a < tuples.size(); ++a)
        for (std::size_t b = 0; b < tuples.size(); ++b)
            canonical[a][b] = prefactor * inner(annihilated[a], annihilated[b]);
    AntisymmetricTensor t = AntisymmetricTensor::zeros(state.n_orbitals, p);
    detail::spread_antisymmetric(t, tuples, canonical);
    return t;
}

/// Grassmann wedge: full signed symmetrization over upper and lower index
/// permutations, scaled by 1/[(p+q)!]^2. Commutative and associative.
inline AntisymmetricTensor wedge(const AntisymmetricTensor& a, const AntisymmetricTensor& b) {
    if (a.n_orbitals != b.n_orbitals) throw validation_error("orbital count mismatch");
    int r = a.rank + b.rank;
    if (r > kMaxRdmRank)
        throw enumeration_cap_error("wedge rank exceeds the cap of " +
                                    std::to_string(kMaxRdmRank));
    auto tuples = detail::increasing_tuples(a.n_orbitals, r);
    std::vector<std::vector<int>> perms;
    {
        std::vector<int> perm(r);
        for (int i = 0; i < r; ++i) perm[i] = i;
        do {
            perms.push_back(perm);
        } while (std::next_permutation(perm.begin(), perm.end()));
    }
    std::vector<int> signs(perms.size());
    for (std::size_t i = 0; i < perms.size(); ++i) {
        std::vector<int> one_based(r);
        for (int k = 0; k < r; ++k) one_based[k] = perms[i][k] + 1;
        signs[i] = permutation_parity(one_based);
    }
    double norm = 1.0;
    for (int i = 2; i <= r; ++i) norm /= static_cast<double>(i) * i;

    std::vector<std::vector<Amplitude>> canonical(tuples.size(),
                                                  std::vector<Amplitude>(tuples.size()));
    auto work = [&](std::size_t begin, std::size_t end) {
        std::vector<int> ua(a.rank), ub(b.rank), la(a.rank), lb(b.rank);
        for (std::size_t x = begin; x < end; ++x)
            for (std::size_t y = 0; y < tuples.size(); ++y) {
                Amplitude sum = 0.0;
                for (std::size_t pi = 0; pi < perms.size(); ++pi) {
                    for (int k = 0; k < a.rank; ++k) ua[k] = tuples[x][perms[pi][k]];
                    for (int k = 0; k < b.rank; ++k) ub[k] = tuples[x][perms[pi][a.rank + k]];
                    for (std::size_t si = 0; si < perms.size(); ++si) {
                        for (int k = 0; k < a.rank; ++k) la[k] = tuples[y][perms[si][k]];
                        for (int k = 0; k < b.rank; ++k) lb[k] = tuples[y][perms[si][a.rank + k]];
                        sum += static_cast<double>(signs[pi] * signs[si]) * a.at(ua, la) *
                               b.at(ub, lb);
                    }
                }
                canonical[x][y] = norm * sum;
            }
    };
    unsigned budget = std::min<unsigned>(thread_budget(), static_cast<unsigned>(tuples.size()));
    if (budget <= 1 || tuples.size() < 32) {
        work(0, tuples.size());
    } else {
        std::vector<std::thread> pool;
        std::size_t chunk = (tuples.size() + budget - 1) / budget;
        for (unsigned i = 0; i < budget; ++i) {
            std::size_t begin = i * chunk;
            std::size_t end = std::min(tuples.size(), begin + chunk);
            if (begin < end) pool.emplace_back(work, begin, end);
        }
        for (auto& th : pool) th.join();
    }
    AntisymmetricTensor t = AntisymmetricTensor::zeros(a.n_orbitals, r);
    detail::spread_antisymmetric(t, tuples, canonical);
    return t;
}

inline AntisymmetricTensor wedge_fold(const std::vector<AntisymmetricTensor>& factors) {
    if (factors.empty()) throw validation_error("empty wedge product");
    AntisymmetricTensor acc = factors[0];
    for (std::size_t i = 1; i < factors.size(); ++i) acc = wedge(acc, factors[i]);
    return acc;
}

/// Trace over equal upper/lower tuples; C(N,p) for an N-particle state.
inline double rdm_trace(const AntisymmetricTensor& t) {
    Amplitude sum = 0.0;
    auto tuples = detail::increasing_tuples(t.n_orbitals, t.rank);
    for (const auto& tup : tuples) sum += t.at(tup, tup);
    double fact = 1.0;
    for (int i = 2; i <= t.rank; ++i) fact *= i;
    return (sum * fact).real();
}

/// D_p rebuilt from cumulant tensors through the wedge table; the
/// multiplicities are the per-profile set-partition counts.
inline AntisymmetricTensor rdm_from_cumulants(const std::vector<AntisymmetricTensor>& deltas,
                                              int p) {
    AntisymmetricTensor acc = deltas[p - 1];
    for (const SizeProfile& profile : enumerate_size_profiles(p)) {
        if (profile.multiplicities.size() == 1 && profile.multiplicities.count(p)) continue;
        std::vector<AntisymmetricTensor> factors;
        for (auto it = profile.multiplicities.rbegin(); it != profile.multiplicities.rend(); ++it)
            for (int k = 0; k < it->second; ++k) factors.push_back(deltas[it->first - 1]);
        acc = acc + static_cast<double>(partitions_with_profile_count(profile)) *
                        wedge_fold(factors);
    }
    return acc;
}

/// Cumulant tensors Delta_1..Delta_max_p by triangular subtraction:
/// Delta_p = D_p - sum over nontrivial profiles of count * wedge of lower
/// cumulants.
inline std::vector<AntisymmetricTensor> rdm_cumulants(const FockVector& state, int max_p) {
    if (max_p < 1 || max_p > kMaxRdmRank)
        throw enumeration_cap_error("cumulant rank must be in [1," +
                                    std::to_string(kMaxRdmRank) + "]");
    std::vector<AntisymmetricTensor> deltas;
    for (int p = 1; p <= max_p; ++p) {
        AntisymmetricTensor delta = compute_rdm(state, p);
        for (const SizeProfile& profile : enumerate_size_profiles(p)) {
            if (profile.multiplicities.size() == 1 && profile.multiplicities.count(p)) continue;
            std::vector<AntisymmetricTensor> factors;
            for (auto it = profile.multiplicities.rbegin(); it != profile.multiplicities.rend();
                 ++it)
                for (int k = 0; k < it->second; ++k) factors.push_back(deltas[it->first - 1]);
            delta = delta - static_cast<double>(partitions_with_profile_count(profile)) *
                                wedge_fold(factors);
        }
        deltas.push_back(std::move(delta));
    }
    return deltas;
}

// -------------------------------------------------------------- state files
//
// One basis state per line: "bitstring re im", leftmost character = orbital 1.
// '#' starts a comment.

inline FockVector load_state(std::istream& in) {
    FockVector state;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        std::istringstream ls(line);
        std::string bits;
        if (!(ls >> bits)) continue;
        double re, im;
        if (!(ls >> re >> im))
            throw validation_error("state file line " + std::to_string(lineno) +
                                   ": expected 'bitstring re im'");
        if (state.n_orbitals == 0) {
            if (bits.size() < 1 || bits.size() > kMaxOrbitals)
                throw validation_error("state file line " + std::to_string(lineno) +
                                       ": bitstring length out of range");
            state.n_orbitals = static_cast<int>(bits.size());
        } else if (static_cast<int>(bits.size()) != state.n_orbitals) {
            throw validation_error("state file line " + std::to_string(lineno) +
                                   ": inconsistent bitstring length");
        }
        std::uint32_t mask = 0;
        for (std::size_t i = 0; i < bits.size(); ++i) {
            if (bits[i] == '1')
                mask |= 1u << i;  // leftmost char = orbital 1
            else if (bits[i] != '0')
                throw validation_error("state file line " + std::to_string(lineno) +
                                       ": bitstring must be 0/1");
        }
        state.amplitudes[mask] += Amplitude(re, im);
    }
    if (state.amplitudes.empty()) throw validation_error("state file has no amplitudes");
    return state;
}

inline FockVector load_state(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw validation_error("cannot open state file: " + path);
    return load_state(in);
}

inline void save_state(const FockVector& state, std::ostream& out) {
    for (const auto& [bits, amp] : state.amplitudes) {
        std::string s(state.n_orbitals, '0');
        for (int i = 0; i < state.n_orbitals; ++i)
            if (bits & (1u << i)) s[i] = '1';
        out << s << " " << amp.real() << " " << amp.imag() << "\n";
    }
}

}  // namespace opcum
