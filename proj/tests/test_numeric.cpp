#include <catch2/catch_amalgamated.hpp>

#include <cstdio>
#include <filesystem>

#include "opcum/appendix_a.hpp"
#include "opcum/numeric.hpp"

using namespace opcum;

namespace {

std::vector<int> upto(int n) {
    std::vector<int> atoms(n);
    for (int i = 0; i < n; ++i) atoms[i] = i + 1;
    return atoms;
}

}  // namespace

TEST_CASE("evaluate basics") {
    OperatorModel single;
    single.dim = 3;
    single.samples.push_back({1.0, {{1, Matrix::Identity(3, 3)}}});
    Matrix v = evaluate(Expression::single(moment({1})), single, OrderingMap::PTO);
    CHECK(max_abs(v - Matrix::Identity(3, 3)) == 0.0);

    // commuting assignments: both atom orders evaluate identically
    OperatorModel diag;
    diag.dim = 3;
    for (int s = 0; s < 2; ++s) {
        Matrix d = Matrix::Zero(3, 3);
        for (int i = 0; i < 3; ++i) d(i, i) = std::complex<double>(s + 1, i);
        Matrix d2 = d * d - 2.0 * d;
        diag.samples.push_back({0.5, {{1, d}, {2, d2}}});
    }
    CHECK(max_abs(moment_value(diag, {1, 2}) - moment_value(diag, {2, 1})) < 1e-14);

    // generic matrices do not silently commute
    OperatorModel random = build_random_model(4, 2, 3, 0);
    CHECK(max_abs(moment_value(random, {1, 2}) - moment_value(random, {2, 1})) > 1e-3);
}

TEST_CASE("product measure kills the 2-cumulant") {
    SplitModel sm = build_split_model(4, 2, 1, 3, 11, 12);
    OperatorModel joint = sm.combined();
    Matrix v = evaluate(parse("<1.2> + -1*<1>*<2>"), joint, OrderingMap::PTO);
    CHECK(max_abs(v) < 1e-12);
}

TEST_CASE("identity verification and mutation control") {
    for (std::uint64_t seed : {0ULL, 1ULL, 2ULL}) {
        OperatorModel model = build_random_model(4, 4, 3, seed);
        for (OrderingMap map :
             {OrderingMap::Classical, OrderingMap::PTO, OrderingMap::TTO}) {
            for (int n = 2; n <= 4; ++n) {
                Expression lhs = moments_from_cumulants(n, map);
                Expression rhs = Expression::single(moment(upto(n)));
                auto report = verify_identity(lhs, rhs, model, map, 1e-10);
                INFO("map=" << to_string(map) << " n=" << n << " seed=" << seed);
                CHECK(report.pass);
            }
        }
    }

    // dropping the <1.3>_c*<2> term must break the identity
    OperatorModel model = build_random_model(4, 3, 3, 0);
    Expression mutated;
    for (const Term& t : moments_from_cumulants(3, OrderingMap::PTO).terms) {
        if (t.factors.size() == 2 && t.factors[0] == cumulant({1, 3})) continue;
        mutated.terms.push_back(t);
    }
    REQUIRE(mutated.terms.size() == 4);
    auto report = verify_identity(mutated, Expression::single(moment(upto(3))), model,
                                  OrderingMap::PTO, 1e-10);
    CHECK_FALSE(report.pass);
    CHECK(report.max_rel_deviation > 1e-3);
}

TEST_CASE("cluster property on split and correlated models") {
    SplitModel sm2 = build_split_model(4, 2, 1, 3, 5, 6);
    auto r2 = verify_cluster_property(2, 1, OrderingMap::PTO, sm2, 1e-10);
    CHECK(r2.pass);

    SplitModel sm4 = build_split_model(4, 4, 2, 3, 7, 8);
    for (OrderingMap map : {OrderingMap::PTO, OrderingMap::TTO}) {
        auto r4 = verify_cluster_property(4, 2, map, sm4, 1e-10);
        INFO("map=" << to_string(map));
        CHECK(r4.pass);
    }

    OperatorModel correlated = build_random_model(4, 2, 3, 7);
    auto bad = verify_cluster_property(2, {1}, OrderingMap::PTO, correlated, 1e-10);
    CHECK_FALSE(bad.pass);
    CHECK(bad.max_rel_deviation > 1e-3);

    // tto requires the independent group to be a leading index range
    OperatorModel joint = build_split_model(4, 3, 1, 2, 1, 2).combined();
    CHECK_THROWS_AS(verify_cluster_property(3, {1, 3}, OrderingMap::TTO, joint, 1e-10),
                    inadmissible_term_error);
    CHECK_THROWS_AS(verify_cluster_property(3, 3, OrderingMap::PTO,
                                            build_split_model(4, 3, 1, 2, 1, 2), 1e-10),
                    validation_error);
}

TEST_CASE("unconnected factorization per order") {
    OperatorModel joint = build_split_model(4, 4, 2, 3, 3, 4).combined();
    auto report = verify_unconnected_factorization(joint, 4, 2, 4, 1e-10);
    CHECK(report.pass);

    OperatorModel correlated = build_random_model(4, 2, 3, 9);
    auto bad = verify_unconnected_factorization(correlated, 2, 1, 2, 1e-10);
    CHECK_FALSE(bad.pass);
    CHECK(bad.max_rel_deviation > 1e-3);
}

TEST_CASE("roerdnik evaluates like the recursive pto inversion") {
    for (std::uint64_t seed : {0ULL, 1ULL, 2ULL}) {
        for (int n = 2; n <= 5; ++n) {
            OperatorModel model = build_random_model(4, n, 3, seed);
            Matrix lhs = evaluate(cumulants_from_moments_roerdnik(n), model, OrderingMap::TTO);
            Matrix rhs = evaluate(cumulants_from_moments_recursive(n, OrderingMap::PTO), model,
                                  OrderingMap::PTO);
            double scale = std::max(max_abs(lhs), max_abs(rhs));
            INFO("n=" << n << " seed=" << seed);
            CHECK(max_abs(lhs - rhs) / scale < 1e-10);
        }
    }
}

TEST_CASE("substitution preserves numeric value") {
    OperatorModel model = build_random_model(4, 3, 3, 21);
    Expression original = parse("<1.2>_c*<3>");
    Expression substituted =
        substitute(original, cumulant({1, 2}), parse("<1.2> + -1*<1>*<2>"), OrderingMap::PTO);
    Matrix a = evaluate(original, model, OrderingMap::PTO);
    Matrix b = evaluate(substituted, model, OrderingMap::PTO);
    CHECK(max_abs(a - b) / max_abs(a) < 1e-10);
}

TEST_CASE("random model construction") {
    OperatorModel a = build_random_model(4, 2, 3, 42);
    OperatorModel b = build_random_model(4, 2, 3, 42);
    for (int s = 0; s < 3; ++s)
        for (int atom : {1, 2})
            CHECK(max_abs(a.samples[s].ops.at(atom) - b.samples[s].ops.at(atom)) == 0.0);

    // marginals of the split model match the standalone groups
    SplitModel sm = build_split_model(4, 3, 1, 3, 1, 2);
    OperatorModel joint = sm.combined();
    CHECK(max_abs(moment_value(joint, {1}) - moment_value(sm.group_a, {1})) < 1e-14);
    CHECK(max_abs(moment_value(joint, {2}) - moment_value(sm.group_b, {2})) < 1e-14);

    // a single-sample process is deterministic: higher cumulants vanish
    OperatorModel det = build_random_model(4, 3, 1, 3);
    for (int n = 2; n <= 3; ++n) {
        Matrix v = evaluate(Expression::single(cumulant(upto(n))), det, OrderingMap::PTO);
        CHECK(max_abs(v) < 1e-12);
    }

    CHECK_THROWS_AS(build_random_model(1, 2, 3, 0), validation_error);
    CHECK_THROWS_AS(build_split_model(4, 3, 3, 3, 0, 1), validation_error);
}

TEST_CASE("model json round trip") {
    OperatorModel model = build_random_model(3, 2, 2, 77);
    std::string path = (std::filesystem::temp_directory_path() / "opcum_model.json").string();
    save_model(model, path);
    OperatorModel loaded = load_model(path);
    REQUIRE(loaded.samples.size() == model.samples.size());
    CHECK(loaded.dim == 3);
    for (std::size_t s = 0; s < model.samples.size(); ++s) {
        CHECK(loaded.samples[s].weight == model.samples[s].weight);
        for (int atom : {1, 2})
            CHECK(max_abs(loaded.samples[s].ops.at(atom) - model.samples[s].ops.at(atom)) == 0.0);
    }
    std::remove(path.c_str());

    CHECK_THROWS_AS(load_model("/nonexistent/model.json"), validation_error);

    OperatorModel bad;
    bad.dim = 2;
    bad.samples.push_back({0.5, {{1, Matrix::Identity(2, 2)}}});
    CHECK_THROWS_AS(bad.validate(), validation_error);
}

TEST_CASE("grassmann expressions are rejected by the matrix evaluator") {
    OperatorModel model = build_random_model(4, 2, 2, 0);
    CHECK_THROWS_AS(evaluate(parse("<1>^<2>"), model, OrderingMap::Grassmann),
                    validation_error);
}

TEST_CASE("evaluation validates the model") {
    OperatorModel model = build_random_model(4, 1, 2, 0);
    CHECK_THROWS_AS(evaluate(parse("<1.2>"), model, OrderingMap::PTO), validation_error);

    OperatorModel skewed;
    skewed.dim = 2;
    skewed.samples.push_back({1.0, {{1, Matrix::Identity(3, 3)}}});
    CHECK_THROWS_AS(skewed.validate(), validation_error);
}

TEST_CASE("ordering pitfall, discrete two-time case") {
    // with t2 = 0 the discrepancy equals (t1+t2)(DC-CD) = (t1-t2)(DC-CD)
    auto report = appendix_a_discrete(6, Rational(1), Rational(0));
    CHECK_FALSE(report.discrepancy_zero);
    CHECK(report.matches_sum_form);
    CHECK(report.matches_diff_form);

    // at generic times only the difference form matches
    auto generic = appendix_a_discrete(6, Rational(2), Rational(1));
    CHECK(generic.matches_diff_form);
    CHECK_FALSE(generic.matches_sum_form);

    auto skew = appendix_a_discrete(5, Rational(3, 2), Rational(1, 3));
    CHECK(skew.matches_diff_form);

    // commuting override: both evaluations coincide
    auto commuting = appendix_a_discrete(4, Rational(1), Rational(0), true);
    CHECK(commuting.discrepancy_zero);
    CHECK(commuting.commutator.is_zero());

    CHECK_THROWS_AS(appendix_a_discrete(3, Rational(1), Rational(0)), validation_error);
    CHECK_THROWS_AS(appendix_a_discrete(6, Rational(0), Rational(1)), validation_error);
}

TEST_CASE("ordering pitfall, continuous case") {
    for (Rational t : {Rational(1), Rational(1, 2), Rational(3)}) {
        auto report = appendix_a_continuous(6, t);
        CHECK(report.ordered_matches_printed);
        CHECK(report.naive_matches_printed);
        CHECK_FALSE(report.ordered == report.naive);
    }
}
