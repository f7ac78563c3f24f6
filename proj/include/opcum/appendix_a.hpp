#pragma once

#include <vector>

#include "opcum/errors.hpp"
#include "opcum/rational.hpp"

namespace opcum {

/// Dense matrix over exact rationals, sized for the monomial-basis demos.
class RationalMatrix {
  public:
    RationalMatrix() = default;
    explicit RationalMatrix(int n) : n_(n), data_(static_cast<std::size_t>(n) * n) {}

    static RationalMatrix identity(int n) {
        RationalMatrix m(n);
        for (int i = 0; i < n; ++i) m.at(i, i) = Rational(1);
        return m;
    }

    int size() const { return n_; }
    Rational& at(int r, int c) { return data_[static_cast<std::size_t>(r) * n_ + c]; }
    const Rational& at(int r, int c) const {
        return data_[static_cast<std::size_t>(r) * n_ + c];
    }

    bool is_zero() const {
        for (const Rational& v : data_)
            if (!v.is_zero()) return false;
        return true;
    }

    friend RationalMatrix operator+(const RationalMatrix& a, const RationalMatrix& b) {
        RationalMatrix r(a.n_);
        for (std::size_t i = 0; i < a.data_.size(); ++i) r.data_[i] = a.data_[i] + b.data_[i];
        return r;
    }
    friend RationalMatrix operator-(const RationalMatrix& a, const RationalMatrix& b) {
        RationalMatrix r(a.n_);
        for (std::size_t i = 0; i < a.data_.size(); ++i) r.data_[i] = a.data_[i] - b.data_[i];
        return r;
    }
    friend RationalMatrix operator*(const Rational& c, const RationalMatrix& a) {
        RationalMatrix r(a.n_);
        for (std::size_t i = 0; i < a.data_.size(); ++i) r.data_[i] = c * a.data_[i];
        return r;
    }
    friend RationalMatrix operator*(const RationalMatrix& a, const RationalMatrix& b) {
        RationalMatrix r(a.n_);
        for (int i = 0; i < a.n_; ++i)
            for (int k = 0; k < a.n_; ++k) {
                const Rational& v = a.at(i, k);
                if (v.is_zero()) continue;
                for (int j = 0; j < a.n_; ++j) {
                    const Rational& w = b.at(k, j);
                    if (!w.is_zero()) r.at(i, j) += v * w;
                }
            }
        return r;
    }
    friend bool operator==(const RationalMatrix& a, const RationalMatrix& b) {
        return a.n_ == b.n_ && a.data_ == b.data_;
    }

  private:
    int n_ = 0;
    std::vector<Rational> data_;
};

/// Monomial basis {x^a y^b : a+b <= degree_cap}. Both y*d/dx (degree
/// preserving) and d/dy (degree lowering) act exactly on this space, so no
/// truncation error enters the demo.
class MonomialBasis {
  public:
    explicit MonomialBasis(int degree_cap) : cap_(degree_cap) {
        if (degree_cap < 4)
            throw validation_error("degree cap must be >= 4 for the ordering demo");
        for (int d = 0; d <= cap_; ++d)
            for (int a = d; a >= 0; --a) monomials_.push_back({a, d - a});
    }

    int dim() const { return static_cast<int>(monomials_.size()); }

    int index_of(int a, int b) const {
        for (int i = 0; i < dim(); ++i)
            if (monomials_[i].first == a && monomials_[i].second == b) return i;
        throw validation_error("monomial outside basis");
    }

    /// y*d/dx: x^a y^b -> a x^(a-1) y^(b+1)
    RationalMatrix y_dx() const {
        RationalMatrix m(dim());
        for (int i = 0; i < dim(); ++i) {
            auto [a, b] = monomials_[i];
            if (a >= 1) m.at(index_of(a - 1, b + 1), i) = Rational(a);
        }
        return m;
    }

    /// d/dy: x^a y^b -> b x^a y^(b-1)
    RationalMatrix dy() const {
        RationalMatrix m(dim());
        for (int i = 0; i < dim(); ++i) {
            auto [a, b] = monomials_[i];
            if (b >= 1) m.at(index_of(a, b - 1), i) = Rational(b);
        }
        return m;
    }

  private:
    int cap_;
    std::vector<std::pair<int, int>> monomials_;
};

/// Two-time square of A(t) = t*C + D computed per ordered basis element vs
/// summed-first, in exact rational arithmetic.
struct AppendixADiscreteReport {
    RationalMatrix discrepancy;       // summed-first minus per-basis-ordered
    RationalMatrix commutator;        // DC - CD
    bool discrepancy_zero = false;
    bool matches_sum_form = false;    // discrepancy == (t1+t2)(DC-CD)
    bool matches_diff_form = false;   // discrepancy == (t1-t2)(DC-CD)
};

inline AppendixADiscreteReport appendix_a_discrete(int degree_cap, const Rational& t1,
                                                   const Rational& t2,
                                                   bool commuting_override = false) {
    if (t2 < Rational(0) || !(t2 < t1))
        throw validation_error("need t1 > t2 >= 0");
    MonomialBasis basis(degree_cap);
    RationalMatrix c = commuting_override ? RationalMatrix::identity(basis.dim()) : basis.y_dx();
    RationalMatrix d = commuting_override ? RationalMatrix::identity(basis.dim()) : basis.dy();

    RationalMatrix a1 = t1 * c + d;
    RationalMatrix a2 = t2 * c + d;

    // summed first: the ordering map sees a single operator, so it is inert
    RationalMatrix f = a1 + a2;
    RationalMatrix summed_first = f * f;

    // expanded in the two-time basis: {A(ti) (x) A(tj)}_O term by term, with
    // the symmetrized equal-time rule on the diagonal
    RationalMatrix half(basis.dim());
    auto ordered_pair = [&](const RationalMatrix& x, const Rational& tx,
                            const RationalMatrix& y, const Rational& ty) {
        if (tx == ty) return Rational(1, 2) * (x * y + y * x);
        return (ty < tx) ? x * y : y * x;
    };
    RationalMatrix per_basis = ordered_pair(a1, t1, a1, t1) + ordered_pair(a1, t1, a2, t2) +
                               ordered_pair(a2, t2, a1, t1) + ordered_pair(a2, t2, a2, t2);

    AppendixADiscreteReport report;
    report.discrepancy = summed_first - per_basis;
    report.commutator = d * c - c * d;
    report.discrepancy_zero = report.discrepancy.is_zero();
    report.matches_sum_form = (report.discrepancy == (t1 + t2) * report.commutator);
    report.matches_diff_form = (report.discrepancy == (t1 - t2) * report.commutator);
    return report;
}

/// Ordered double integral of A(u) = u*C + D over [0,t]^2 versus the square
/// of the integrated operator, both exact.
struct AppendixAContinuousReport {
    RationalMatrix ordered;
    RationalMatrix naive;
    bool ordered_matches_printed = false;  // t^4/4 C^2 + t^3/3 (2CD+DC) + t^2 D^2
    bool naive_matches_printed = false;    // t^4/4 C^2 + t^3/2 (CD+DC) + t^2 D^2
};

inline AppendixAContinuousReport appendix_a_continuous(int degree_cap, const Rational& t) {
    if (!(Rational(0) < t)) throw validation_error("need t > 0");
    MonomialBasis basis(degree_cap);
    RationalMatrix c = basis.y_dx();
    RationalMatrix d = basis.dy();

    // integral of u1^p u2^q over 0 <= u2 <= u1 <= t
    auto simplex = [&](int p, int q) {
        Rational tp(1);
        for (int i = 0; i < p + q + 2; ++i) tp *= t;
        return tp / Rational((q + 1) * (p + q + 2));
    };

    AppendixAContinuousReport report;
    // 2 * int int (u1 C + D)(u2 C + D) expanded into monomials of (u1, u2)
    report.ordered = Rational(2) * (simplex(1, 1) * (c * c) + simplex(1, 0) * (c * d) +
                                    simplex(0, 1) * (d * c) + simplex(0, 0) * (d * d));

    Rational t2 = t * t, t3 = t2 * t, t4 = t3 * t;
    RationalMatrix integrated = (t2 / Rational(2)) * c + t * d;
    report.naive = integrated * integrated;

    RationalMatrix ordered_expected =
        (t4 / Rational(4)) * (c * c) +
        (t3 / Rational(3)) * (Rational(2) * (c * d) + d * c) + t2 * (d * d);
    RationalMatrix naive_expected = (t4 / Rational(4)) * (c * c) +
                                    (t3 / Rational(2)) * (c * d + d * c) + t2 * (d * d);
    report.ordered_matches_printed = (report.ordered == ordered_expected);
    report.naive_matches_printed = (report.naive == naive_expected);
    return report;
}

}  // namespace opcum
