#pragma once

#include <algorithm>
#include <cstddef>
#include <set>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include <json.hpp>

#include "opcum/errors.hpp"
#include "opcum/rational.hpp"

namespace opcum {

/// The M_O map variants. Classical treats every product as commuting,
/// PTO orders cumulant factors by their first (largest-time) index, TTO
/// admits only contiguous interval chains, Grassmann is the commutative
/// wedge of antisymmetric tensors.
enum class OrderingMap { Classical, PTO, TTO, Grassmann };

inline std::string to_string(OrderingMap map) {
    switch (map) {
        case OrderingMap::Classical: return "classical";
        case OrderingMap::PTO: return "pto";
        case OrderingMap::TTO: return "tto";
        case OrderingMap::Grassmann: return "grassmann";
    }
    return "?";
}

inline OrderingMap ordering_map_from_string(const std::string& name) {
    if (name == "classical") return OrderingMap::Classical;
    if (name == "pto") return OrderingMap::PTO;
    if (name == "tto") return OrderingMap::TTO;
    if (name == "grassmann") return OrderingMap::Grassmann;
    throw validation_error("unknown ordering map '" + name +
                           "' (expected classical|pto|tto|grassmann)");
}

enum class BracketKind { Moment, Cumulant };

/// An averaged, ordered product of atoms: <i1.i2...> or <i1.i2...>_c.
/// Atom index 1 denotes the largest time; indices ascend as time descends.
struct Bracket {
    BracketKind kind = BracketKind::Moment;
    std::vector<int> atoms;

    int size() const { return static_cast<int>(atoms.size()); }
    int min_atom() const { return *std::min_element(atoms.begin(), atoms.end()); }
    int max_atom() const { return *std::max_element(atoms.begin(), atoms.end()); }

    friend bool operator==(const Bracket& a, const Bracket& b) {
        return a.kind == b.kind && a.atoms == b.atoms;
    }
    friend bool operator<(const Bracket& a, const Bracket& b) {
        return std::tie(a.atoms, a.kind) < std::tie(b.atoms, b.kind);
    }
};

inline Bracket moment(std::vector<int> atoms) { return {BracketKind::Moment, std::move(atoms)}; }
inline Bracket cumulant(std::vector<int> atoms) {
    return {BracketKind::Cumulant, std::move(atoms)};
}

enum class ProductOp { Tensor, Wedge };

/// coeff * factor1 (x) factor2 (x) ..., read left-to-right as operator
/// composition (or wedge product in Grassmann mode).
struct Term {
    Rational coeff = Rational(1);
    ProductOp op = ProductOp::Tensor;
    std::vector<Bracket> factors;

    friend bool operator==(const Term& a, const Term& b) {
        return a.coeff == b.coeff && a.op == b.op && a.factors == b.factors;
    }
};

struct Expression {
    std::vector<Term> terms;

    static Expression zero() { return {}; }
    static Expression single(Bracket b, Rational coeff = Rational(1)) {
        Expression e;
        e.terms.push_back({coeff, ProductOp::Tensor, {std::move(b)}});
        return e;
    }

    bool is_zero() const { return terms.empty(); }

    friend bool operator==(const Expression& a, const Expression& b) {
        return a.terms == b.terms;
    }
};

namespace detail {

/// (op, factor-sequence) identity used for merging and the graded-lex term
/// order: number of factors first, then the flattened (atoms, kind) keys.
inline bool term_less(const Term& a, const Term& b) {
    if (a.factors.size() != b.factors.size()) return a.factors.size() < b.factors.size();
    if (a.factors != b.factors) return a.factors < b.factors;
    return a.op < b.op;
}

inline bool term_same_product(const Term& a, const Term& b) {
    return a.factors == b.factors && a.op == b.op;
}

/// size descending, then lexicographic: the free commutative normal form.
inline bool commutative_factor_less(const Bracket& a, const Bracket& b) {
    if (a.size() != b.size()) return a.size() > b.size();
    return a < b;
}

}  // namespace detail

/// Validates and sorts the atoms of one bracket; rewrites singleton cumulant
/// averages as plain averages (they coincide whatever the maps).
inline void canonicalize_bracket(Bracket& b) {
    if (b.atoms.empty()) throw validation_error("empty bracket");
    for (int a : b.atoms)
        if (a < 1) throw validation_error("atom index must be >= 1");
    std::sort(b.atoms.begin(), b.atoms.end());
    if (std::adjacent_find(b.atoms.begin(), b.atoms.end()) != b.atoms.end())
        throw validation_error("repeated atom index inside a bracket");
    if (b.kind == BracketKind::Cumulant && b.atoms.size() == 1) b.kind = BracketKind::Moment;
}

namespace detail {

enum class FactorPolicy { Reorder, KeepOrder };

inline void reorder_factors(Term& t, OrderingMap map) {
    if (map == OrderingMap::Classical || map == OrderingMap::Grassmann) {
        std::stable_sort(t.factors.begin(), t.factors.end(), commutative_factor_less);
        return;
    }
    // PTO/TTO reordering acts on the cumulant-product space only. Products
    // containing a plain moment bracket are already resolved operator
    // products whose order is significant.
    bool all_cumulant = !t.factors.empty();
    for (const Bracket& f : t.factors)
        if (f.kind != BracketKind::Cumulant) all_cumulant = false;
    if (!all_cumulant) return;
    std::stable_sort(t.factors.begin(), t.factors.end(),
                     [](const Bracket& a, const Bracket& b) {
                         return a.min_atom() < b.min_atom();
                     });
    if (map == OrderingMap::TTO) {
        for (std::size_t i = 0; i + 1 < t.factors.size(); ++i)
            if (t.factors[i].max_atom() + 1 != t.factors[i + 1].min_atom())
                throw inadmissible_term_error(
                    "factors do not form a contiguous interval chain under tto");
    }
}

inline Expression canonicalize_impl(Expression expr, OrderingMap map, FactorPolicy policy) {
    for (Term& t : expr.terms) {
        if (t.factors.empty()) throw validation_error("term without factors");
        for (Bracket& b : t.factors) canonicalize_bracket(b);
        // the product connective is a property of the mode, not of the term
        t.op = (map == OrderingMap::Grassmann && t.factors.size() > 1) ? ProductOp::Wedge
                                                                       : ProductOp::Tensor;
        if (policy == FactorPolicy::Reorder) reorder_factors(t, map);
    }
    std::stable_sort(expr.terms.begin(), expr.terms.end(), detail::term_less);
    std::vector<Term> merged;
    for (Term& t : expr.terms) {
        if (!merged.empty() && detail::term_same_product(merged.back(), t))
            merged.back().coeff += t.coeff;
        else
            merged.push_back(std::move(t));
    }
    std::erase_if(merged, [](const Term& t) { return t.coeff.is_zero(); });
    expr.terms = std::move(merged);
    return expr;
}

}  // namespace detail

/// Canonical form: brackets internally ascending, cumulant-product factor
/// sequences reordered per the map rule, like terms merged, zero terms
/// dropped. Idempotent.
inline Expression canonicalize(Expression expr, OrderingMap map) {
    return detail::canonicalize_impl(std::move(expr), map, detail::FactorPolicy::Reorder);
}

/// Canonicalize without permuting any factor sequence. The inverse-transform
/// generators use this: their products are explicit operator compositions
/// (permutation sums), not arguments of an M_O brace.
inline Expression canonicalize_ordered(Expression expr, OrderingMap map = OrderingMap::PTO) {
    return detail::canonicalize_impl(std::move(expr), map, detail::FactorPolicy::KeepOrder);
}

inline bool equal(const Expression& a, const Expression& b, OrderingMap map) {
    return canonicalize(a, map) == canonicalize(b, map);
}

inline Expression add(Expression a, const Expression& b) {
    a.terms.insert(a.terms.end(), b.terms.begin(), b.terms.end());
    return a;
}

inline Expression scale(Expression e, const Rational& c) {
    for (Term& t : e.terms) t.coeff *= c;
    return e;
}

/// Distributed product; factor lists concatenate left-to-right. Not
/// canonicalized.
inline Expression multiply(const Expression& a, const Expression& b) {
    Expression out;
    for (const Term& ta : a.terms)
        for (const Term& tb : b.terms) {
            Term t;
            t.coeff = ta.coeff * tb.coeff;
            t.op = (ta.op == ProductOp::Wedge || tb.op == ProductOp::Wedge) ? ProductOp::Wedge
                                                                            : ProductOp::Tensor;
            t.factors = ta.factors;
            t.factors.insert(t.factors.end(), tb.factors.begin(), tb.factors.end());
            out.terms.push_back(std::move(t));
        }
    return out;
}

inline std::set<int> expression_atoms(const Expression& e) {
    std::set<int> atoms;
    for (const Term& t : e.terms)
        for (const Bracket& f : t.factors) atoms.insert(f.atoms.begin(), f.atoms.end());
    return atoms;
}

namespace detail {

inline Expression substitute_impl(const Expression& expr, Bracket target,
                                  const Expression& replacement, OrderingMap map,
                                  FactorPolicy policy) {
    canonicalize_bracket(target);
    std::set<int> target_atoms(target.atoms.begin(), target.atoms.end());
    for (const Term& t : replacement.terms) {
        std::set<int> atoms;
        for (const Bracket& f : t.factors) atoms.insert(f.atoms.begin(), f.atoms.end());
        if (atoms != target_atoms)
            throw validation_error("replacement term atoms do not match target bracket");
    }
    Expression out;
    for (const Term& t : expr.terms) {
        std::vector<Term> partial{{t.coeff, t.op, {}}};
        for (const Bracket& f : t.factors) {
            Bracket fc = f;
            canonicalize_bracket(fc);
            if (fc == target) {
                std::vector<Term> next;
                for (const Term& p : partial)
                    for (const Term& r : replacement.terms) {
                        Term q = p;
                        q.coeff *= r.coeff;
                        q.factors.insert(q.factors.end(), r.factors.begin(), r.factors.end());
                        next.push_back(std::move(q));
                    }
                partial = std::move(next);
            } else {
                for (Term& p : partial) p.factors.push_back(f);
            }
        }
        for (Term& p : partial)
            if (!p.factors.empty()) out.terms.push_back(std::move(p));
    }
    return canonicalize_impl(std::move(out), map, policy);
}

}  // namespace detail

/// Replaces every occurrence of target_bracket, distributes the products and
/// canonicalizes the result.
inline Expression substitute(const Expression& expr, const Bracket& target,
                             const Expression& replacement, OrderingMap map) {
    return detail::substitute_impl(expr, target, replacement, map,
                                   detail::FactorPolicy::Reorder);
}

/// Substitution variant preserving every factor sequence as written.
inline Expression substitute_ordered(const Expression& expr, const Bracket& target,
                                     const Expression& replacement) {
    return detail::substitute_impl(expr, target, replacement, OrderingMap::PTO,
                                   detail::FactorPolicy::KeepOrder);
}

// ------------------------------------------------------------------ render

inline std::string render_text(const Bracket& b) {
    std::string s = "<";
    for (std::size_t i = 0; i < b.atoms.size(); ++i) {
        if (i) s += ".";
        s += std::to_string(b.atoms[i]);
    }
    s += ">";
    if (b.kind == BracketKind::Cumulant) s += "_c";
    return s;
}

inline std::string render_text(const Expression& expr) {
    if (expr.terms.empty()) return "0";
    std::string out;
    for (std::size_t i = 0; i < expr.terms.size(); ++i) {
        const Term& t = expr.terms[i];
        if (i) out += " + ";
        if (!t.coeff.is_one()) out += t.coeff.str() + "*";
        const char op = (t.op == ProductOp::Wedge) ? '^' : '*';
        for (std::size_t j = 0; j < t.factors.size(); ++j) {
            if (j) out += op;
            out += render_text(t.factors[j]);
        }
    }
    return out;
}

inline std::string render_json(const Expression& expr) {
    nlohmann::json root;
    root["terms"] = nlohmann::json::array();
    for (const Term& t : expr.terms) {
        nlohmann::json jt;
        jt["coeff"] = {t.coeff.num(), t.coeff.den()};
        jt["factors"] = nlohmann::json::array();
        for (const Bracket& f : t.factors) {
            nlohmann::json jf;
            jf["kind"] = (f.kind == BracketKind::Cumulant) ? "c" : "m";
            jf["idx"] = f.atoms;
            jt["factors"].push_back(jf);
        }
        root["terms"].push_back(jt);
    }
    return root.dump();
}

enum class RenderFormat { Text, Json };

inline std::string render(const Expression& expr, RenderFormat format) {
    return format == RenderFormat::Json ? render_json(expr) : render_text(expr);
}

// ------------------------------------------------------------------- parse

namespace detail {

class Parser {
  public:
    explicit Parser(std::string_view text) : text_(text) {}

    Expression parse() {
        if (text_ == "0") return Expression::zero();
        Expression e;
        e.terms.push_back(parse_term());
        while (pos_ < text_.size()) {
            expect(" + ");
            e.terms.push_back(parse_term());
        }
        return e;
    }

  private:
    [[noreturn]] void fail(const std::string& msg) { throw parse_error(msg, pos_); }

    bool peek_is(char c) const { return pos_ < text_.size() && text_[pos_] == c; }

    void expect(std::string_view lit) {
        if (text_.substr(pos_, lit.size()) != lit) fail("expected '" + std::string(lit) + "'");
        pos_ += lit.size();
    }

    void skip_one_space() {
        if (peek_is(' ')) ++pos_;
    }

    std::int64_t parse_int() {
        std::size_t start = pos_;
        while (pos_ < text_.size() && text_[pos_] >= '0' && text_[pos_] <= '9') ++pos_;
        if (pos_ == start) fail("expected integer");
        try {
            return std::stoll(std::string(text_.substr(start, pos_ - start)));
        } catch (const std::exception&) {
            pos_ = start;
            fail("integer out of range");
        }
    }

    Term parse_term() {
        Term t;
        bool negative = false;
        if (peek_is('-')) {
            negative = true;
            ++pos_;
        }
        Rational coeff(1);
        if (pos_ < text_.size() && text_[pos_] >= '0' && text_[pos_] <= '9') {
            std::int64_t num = parse_int();
            std::int64_t den = 1;
            if (peek_is('/')) {
                ++pos_;
                den = parse_int();
                if (den == 0) fail("zero denominator");
            }
            coeff = Rational(num, den);
            skip_one_space();
            expect("*");
            skip_one_space();
        }
        t.coeff = negative ? -coeff : coeff;
        t.factors.push_back(parse_factor());
        bool saw_wedge = false, saw_tensor = false;
        while (true) {
            std::size_t mark = pos_;
            skip_one_space();
            if (pos_ < text_.size() && (text_[pos_] == '*' || text_[pos_] == '^')) {
                (text_[pos_] == '^' ? saw_wedge : saw_tensor) = true;
                ++pos_;
                skip_one_space();
                t.factors.push_back(parse_factor());
            } else {
                pos_ = mark;
                break;
            }
        }
        if (saw_wedge && saw_tensor) fail("mixed '*' and '^' in one term");
        t.op = saw_wedge ? ProductOp::Wedge : ProductOp::Tensor;
        return t;
    }

    Bracket parse_factor() {
        expect("<");
        Bracket b;
        b.atoms.push_back(static_cast<int>(parse_int()));
        while (peek_is('.')) {
            ++pos_;
            b.atoms.push_back(static_cast<int>(parse_int()));
        }
        expect(">");
        if (text_.substr(pos_, 2) == "_c") {
            pos_ += 2;
            b.kind = BracketKind::Cumulant;
        }
        std::set<int> unique(b.atoms.begin(), b.atoms.end());
        if (unique.size() != b.atoms.size()) fail("repeated atom index inside a bracket");
        for (int a : b.atoms)
            if (a < 1) fail("atom index must be >= 1");
        return b;
    }

    std::string_view text_;
    std::size_t pos_ = 0;
};

}  // namespace detail

/// Parses the text grammar. Returns the expression as written; callers
/// canonicalize under the map they work with.
inline Expression parse(std::string_view text) { return detail::Parser(text).parse(); }

}  // namespace opcum
