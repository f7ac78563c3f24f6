#include <catch2/catch_amalgamated.hpp>

#include <random>

#include <json.hpp>

#include "opcum/expr.hpp"

using namespace opcum;

TEST_CASE("bracket canonicalization") {
    Expression e = Expression::single(moment({2, 1}));
    Expression c = canonicalize(e, OrderingMap::PTO);
    REQUIRE(c.terms.size() == 1);
    CHECK(c.terms[0].factors[0].atoms == std::vector<int>{1, 2});

    Expression dup = Expression::single(moment({1, 1}));
    CHECK_THROWS_AS(canonicalize(dup, OrderingMap::PTO), validation_error);

    // singleton cumulant averages coincide with plain averages
    Expression s = Expression::single(cumulant({3}));
    CHECK(canonicalize(s, OrderingMap::PTO).terms[0].factors[0].kind == BracketKind::Moment);
}

TEST_CASE("cumulant products reorder per map, moment products do not") {
    Expression e;
    e.terms.push_back({Rational(1), ProductOp::Tensor, {cumulant({3, 4}), cumulant({1, 2})}});
    Expression c = canonicalize(e, OrderingMap::PTO);
    REQUIRE(c.terms.size() == 1);
    CHECK(c.terms[0].factors[0] == cumulant({1, 2}));
    CHECK(c.terms[0].factors[1] == cumulant({3, 4}));

    // under tto the same product must chain contiguously
    CHECK_NOTHROW(canonicalize(e, OrderingMap::TTO));
    Expression gap;
    gap.terms.push_back({Rational(1), ProductOp::Tensor, {cumulant({1, 3}), cumulant({2, 4})}});
    CHECK_THROWS_AS(canonicalize(gap, OrderingMap::TTO), inadmissible_term_error);

    // written order of resolved moment products is significant
    Expression m1;
    m1.terms.push_back({Rational(1), ProductOp::Tensor, {moment({2}), moment({1})}});
    Expression c1 = canonicalize(m1, OrderingMap::PTO);
    CHECK(c1.terms[0].factors[0] == moment({2}));

    // but everything commutes in classical/grassmann mode
    Expression c2 = canonicalize(m1, OrderingMap::Classical);
    CHECK(c2.terms[0].factors[0] == moment({1}));
}

TEST_CASE("coefficient merge and zero removal") {
    Expression e;
    e.terms.push_back({Rational(1), ProductOp::Tensor, {moment({1}), moment({2})}});
    e.terms.push_back({Rational(1), ProductOp::Tensor, {moment({1}), moment({2})}});
    Expression c = canonicalize(e, OrderingMap::PTO);
    REQUIRE(c.terms.size() == 1);
    CHECK(c.terms[0].coeff == Rational(2));

    e.terms.push_back({Rational(-2), ProductOp::Tensor, {moment({1}), moment({2})}});
    CHECK(canonicalize(e, OrderingMap::PTO).is_zero());
}

TEST_CASE("canonicalize is idempotent") {
    std::mt19937_64 rng(11);
    for (OrderingMap map : {OrderingMap::Classical, OrderingMap::PTO, OrderingMap::Grassmann}) {
        for (int trial = 0; trial < 40; ++trial) {
            Expression e;
            int n_terms = 1 + static_cast<int>(rng() % 4);
            for (int t = 0; t < n_terms; ++t) {
                Term term;
                term.coeff = Rational(static_cast<int>(rng() % 7) - 3, 1 + rng() % 4);
                if (term.coeff.is_zero()) term.coeff = Rational(1);
                int n_factors = 1 + static_cast<int>(rng() % 3);
                std::vector<int> pool{1, 2, 3, 4, 5, 6};
                std::shuffle(pool.begin(), pool.end(), rng);
                std::size_t next = 0;
                for (int f = 0; f < n_factors; ++f) {
                    Bracket b;
                    b.kind = (rng() % 2) ? BracketKind::Cumulant : BracketKind::Moment;
                    int sz = 1 + static_cast<int>(rng() % 2);
                    for (int k = 0; k < sz && next < pool.size(); ++k)
                        b.atoms.push_back(pool[next++]);
                    if (!b.atoms.empty()) term.factors.push_back(b);
                }
                if (!term.factors.empty()) e.terms.push_back(term);
            }
            if (e.terms.empty()) continue;
            Expression once = canonicalize(e, map);
            CHECK(canonicalize(once, map) == once);
        }
    }
}

TEST_CASE("equality modulo canonical form") {
    CHECK(equal(parse("<1.2>"), parse("<1.2>"), OrderingMap::PTO));
    CHECK_FALSE(equal(parse("<1.2>_c"), parse("<1.2>"), OrderingMap::PTO));
    // resolved singleton products keep their written operator order
    CHECK_FALSE(equal(parse("<1>*<2>"), parse("<2>*<1>"), OrderingMap::PTO));
    CHECK(equal(parse("<1>*<2>"), parse("<2>*<1>"), OrderingMap::Classical));
    CHECK(equal(parse("<3.4>_c*<1.2>_c"), parse("<1.2>_c*<3.4>_c"), OrderingMap::PTO));
}

TEST_CASE("substitute distributes and preserves positions") {
    Expression target_expr = parse("<1.2>_c*<3>");
    Expression replacement = parse("<1.2> + -1*<1>*<2>");
    Expression result = substitute(target_expr, cumulant({1, 2}), replacement, OrderingMap::PTO);
    CHECK(result == canonicalize(parse("<1.2>*<3> + -1*<1>*<2>*<3>"), OrderingMap::PTO));

    // no occurrence: unchanged
    Expression untouched = parse("<1.3>*<2>");
    CHECK(substitute(untouched, cumulant({1, 2}), replacement, OrderingMap::PTO) ==
          canonicalize(untouched, OrderingMap::PTO));

    // kind rewrite only
    Expression k1 = Expression::single(cumulant({1}));
    Expression repl1 = Expression::single(moment({1}));
    Expression rewritten = substitute(parse("<1>_c*<2>"), cumulant({1}), repl1, OrderingMap::PTO);
    CHECK(rewritten == canonicalize(parse("<1>*<2>"), OrderingMap::PTO));
    (void)k1;

    // atoms of the replacement must match the target
    CHECK_THROWS_AS(substitute(target_expr, cumulant({1, 2}), parse("<1.3>"), OrderingMap::PTO),
                    validation_error);
}

TEST_CASE("parse accepts the documented grammar") {
    Expression e = parse("<1.2>_c + <1>*<2>");
    CHECK(e.terms.size() == 2);

    Expression f = parse("-1/2*<1>*<1>");
    REQUIRE(f.terms.size() == 1);
    CHECK(f.terms[0].coeff == Rational(-1, 2));
    CHECK(f.terms[0].factors.size() == 2);

    CHECK_THROWS_AS(parse("<1.1>"), parse_error);
    CHECK_THROWS_AS(parse("<1.2"), parse_error);
    CHECK_THROWS_AS(parse("<1> <2>"), parse_error);
    CHECK_THROWS_AS(parse("2<1>"), parse_error);
    CHECK_THROWS_AS(parse("<1>*<2>^<3>"), parse_error);
    CHECK_NOTHROW(parse("<1>^<2>^<3>"));
    CHECK_NOTHROW(parse("3/4*<2> + -2*<1>*<4>"));

    bool threw = false;
    try {
        parse("<1.2> + <1.x>");
    } catch (const parse_error& err) {
        threw = true;
        CHECK(err.offset == 11);
    }
    CHECK(threw);
}

TEST_CASE("render and parse round trip on canonical expressions") {
    std::mt19937_64 rng(23);
    for (int trial = 0; trial < 60; ++trial) {
        Expression e;
        int n_terms = 1 + static_cast<int>(rng() % 4);
        for (int t = 0; t < n_terms; ++t) {
            Term term;
            int num = static_cast<int>(rng() % 9) - 4;
            term.coeff = Rational(num == 0 ? 1 : num, 1 + rng() % 3);
            std::vector<int> pool{1, 2, 3, 4, 5, 6, 7};
            std::shuffle(pool.begin(), pool.end(), rng);
            std::size_t next = 0;
            int n_factors = 1 + static_cast<int>(rng() % 3);
            for (int f = 0; f < n_factors; ++f) {
                Bracket b;
                b.kind = (rng() % 2) ? BracketKind::Cumulant : BracketKind::Moment;
                int sz = 1 + static_cast<int>(rng() % 3);
                for (int k = 0; k < sz && next < pool.size(); ++k)
                    b.atoms.push_back(pool[next++]);
                if (!b.atoms.empty()) term.factors.push_back(b);
            }
            if (term.factors.empty()) continue;
            term.op = (rng() % 4 == 0) ? ProductOp::Wedge : ProductOp::Tensor;
            e.terms.push_back(term);
        }
        if (e.terms.empty()) continue;
        Expression canonical = canonicalize(e, OrderingMap::PTO);
        std::string text = render_text(canonical);
        CHECK(parse(text) == canonical);
    }

    CHECK(render_text(Expression::zero()) == "0");
    CHECK(parse("0").is_zero());
}

TEST_CASE("render matches the wire formats") {
    Expression e = parse("<1.2> + -1*<1>*<2>");
    CHECK(render_text(canonicalize(e, OrderingMap::PTO)) == "<1.2> + -1*<1>*<2>");

    nlohmann::json j = nlohmann::json::parse(render_json(canonicalize(e, OrderingMap::PTO)));
    REQUIRE(j["terms"].size() == 2);
    CHECK(j["terms"][0]["coeff"] == nlohmann::json({1, 1}));
    CHECK(j["terms"][0]["factors"][0]["kind"] == "m");
    CHECK(j["terms"][0]["factors"][0]["idx"] == nlohmann::json({1, 2}));
    CHECK(j["terms"][1]["coeff"] == nlohmann::json({-1, 1}));
}
