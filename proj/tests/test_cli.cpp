#include <catch2/catch_amalgamated.hpp>

#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "opcum/cli.hpp"

using opcum::cli::run_cli;

namespace {

struct CliResult {
    int code;
    std::string out;
    std::string err;
};

CliResult run(std::vector<std::string> args) {
    std::ostringstream out, err;
    int code = run_cli(std::move(args), out, err);
    return {code, out.str(), err.str()};
}

}  // namespace

TEST_CASE("expand golden output") {
    auto pto2 = run({"expand", "--direction", "moments", "--n", "2", "--map", "pto"});
    CHECK(pto2.code == 0);
    CHECK(pto2.out == "<1.2>_c + <1>*<2>\n");

    auto tto2 = run({"expand", "--direction", "cumulants", "--n", "2", "--map", "tto"});
    CHECK(tto2.code == 0);
    CHECK(tto2.out == "<1.2> + -1*<1>*<2>\n");

    auto grass4 = run({"expand", "--direction", "moments", "--n", "4", "--map", "grassmann"});
    CHECK(grass4.code == 0);
    CHECK(grass4.out ==
          "<1.2.3.4>_c + 3*<1.2>_c^<3.4>_c + 4*<1.2.3>_c^<4> + 6*<1.2>_c^<3>^<4>"
          " + <1>^<2>^<3>^<4>\n");
}

TEST_CASE("expand output reparses to the library expression") {
    for (std::string map : {"classical", "pto", "tto", "grassmann"}) {
        for (std::string direction : {"moments", "cumulants"}) {
            for (int n : {2, 3, 4}) {
                auto r = run({"expand", "--direction", direction, "--n", std::to_string(n),
                              "--map", map});
                REQUIRE(r.code == 0);
                std::string text = r.out.substr(0, r.out.size() - 1);
                opcum::Expression reparsed = opcum::parse(text);
                opcum::OrderingMap m = opcum::ordering_map_from_string(map);
                opcum::Expression direct =
                    direction == "moments"
                        ? opcum::moments_from_cumulants(n, m)
                        : opcum::cumulants_from_moments_recursive(n, m);
                INFO("map=" << map << " direction=" << direction << " n=" << n);
                CHECK(opcum::render_text(direct) == text);
                CHECK(equal(reparsed, direct, m));
            }
        }
    }
}

TEST_CASE("expand json output follows the schema") {
    auto r = run({"expand", "--direction", "moments", "--n", "2", "--map", "pto", "--format",
                  "json"});
    REQUIRE(r.code == 0);
    nlohmann::json j = nlohmann::json::parse(r.out);
    REQUIRE(j["terms"].size() == 2);
    CHECK(j["terms"][0]["factors"][0]["kind"] == "c");
    CHECK(j["terms"][0]["factors"][0]["idx"] == nlohmann::json({1, 2}));
    CHECK(j["terms"][1]["coeff"] == nlohmann::json({1, 1}));
}

TEST_CASE("exit codes") {
    CHECK(run({"expand", "--bogus"}).code == 2);
    CHECK(run({"nonsense"}).code == 2);
    CHECK(run({}).code == 2);

    auto cap = run({"expand", "--direction", "moments", "--n", "13", "--map", "pto"});
    CHECK(cap.code == 1);
    CHECK(cap.err.find("error") != std::string::npos);

    CHECK(run({"expand", "--direction", "moments", "--n", "2", "--map", "sideways"}).code == 2);
    CHECK(run({"verify", "cluster", "--n", "3", "--map", "grassmann"}).code == 2);

    CHECK(run({"verify", "identity", "--n", "4", "--map", "pto", "--seed", "7"}).code == 0);
    CHECK(run({"verify", "identity", "--n", "3", "--map", "classical"}).code == 0);
    CHECK(run({"verify", "bogus-kind", "--n", "3"}).code == 2);
    CHECK(run({"rdm", "bogus"}).code == 2);
    CHECK(run({"verify", "cluster", "--n", "4", "--split", "2", "--map", "tto", "--seed", "7"})
              .code == 0);
    CHECK(run({"verify", "cluster", "--n", "2", "--correlated", "--seed", "7"}).code == 1);
    CHECK(run({"verify", "factorization", "--n", "4", "--split", "2"}).code == 0);
    CHECK(run({"verify", "factorization", "--n", "2", "--split", "1", "--correlated"}).code ==
          1);
    CHECK(run({"verify", "roerdnik-equivalence", "--n", "4"}).code == 0);
    CHECK(run({"--help"}).code == 0);
}

TEST_CASE("verify accepts a model file") {
    auto tmp = std::filesystem::temp_directory_path() / "opcum_cli_model.json";
    opcum::save_model(opcum::build_random_model(3, 3, 2, 13), tmp.string());
    auto r = run({"verify", "identity", "--n", "3", "--map", "pto", "--model", tmp.string()});
    CHECK(r.code == 0);
    std::filesystem::remove(tmp);

    auto missing = run({"verify", "identity", "--n", "3", "--model", "/no/such/file.json"});
    CHECK(missing.code == 1);
}

TEST_CASE("identical invocations are byte-identical") {
    std::vector<std::string> args{"verify", "identity", "--n", "3", "--map", "tto",
                                  "--seed", "5"};
    auto a = run(args);
    auto b = run(args);
    CHECK(a.code == 0);
    CHECK(a.out == b.out);
}

TEST_CASE("demo subcommand") {
    auto discrete = run({"demo", "appendix-a", "--degree", "6", "--t1", "1", "--t2", "0"});
    CHECK(discrete.code == 0);
    CHECK(discrete.out.find("residual vs (t1+t2)*(DC-CD): 0") != std::string::npos);

    auto commuting = run({"demo", "appendix-a", "--commuting"});
    CHECK(commuting.code == 0);
    CHECK(commuting.out.find("is zero") != std::string::npos);

    auto continuous = run({"demo", "appendix-a", "--continuous", "--t", "1"});
    CHECK(continuous.code == 0);
    CHECK(continuous.out.find("1/3*(2*CD + DC)") != std::string::npos);
    CHECK(continuous.out.find("1/2*(CD + DC)") != std::string::npos);

    CHECK(run({"demo", "appendix-a", "--t1", "0", "--t2", "1"}).code == 1);
    CHECK(run({"demo", "bogus"}).code == 2);
}

TEST_CASE("rdm subcommands") {
    auto compute = run({"rdm", "compute", "--p", "2", "--case", "determinant", "--orbitals",
                        "2", "--electrons", "2"});
    CHECK(compute.code == 0);
    CHECK(compute.out == "D2[1.2|1.2] 5.000000000000e-01 0.000000000000e+00\n");

    CHECK(run({"rdm", "check", "--case", "determinant", "--orbitals", "6", "--electrons",
               "3"})
              .code == 0);
    CHECK(run({"rdm", "check", "--case", "additivity", "--orbitals", "8", "--split", "4"})
              .code == 0);

    auto cumulants = run({"rdm", "cumulants", "--p", "2", "--case", "determinant",
                          "--orbitals", "4", "--electrons", "2"});
    CHECK(cumulants.code == 0);
    CHECK(cumulants.out.find("max|Delta_2| = 0.000000000000e+00") != std::string::npos);

    // a state file drives compute just like a built-in case
    auto good = std::filesystem::temp_directory_path() / "opcum_state_good.txt";
    {
        std::ofstream f(good);
        f << "# two electrons in the first two orbitals\n11 1.0 0.0\n";
    }
    auto from_file = run({"rdm", "compute", "--p", "2", "--state", good.string()});
    CHECK(from_file.code == 0);
    CHECK(from_file.out == compute.out);
    std::filesystem::remove(good);

    // malformed state file: exit 1 and the offending line number
    auto tmp = std::filesystem::temp_directory_path() / "opcum_state.txt";
    {
        std::ofstream f(tmp);
        f << "01 0.6 0.0\n01 oops\n";
    }
    auto bad = run({"rdm", "compute", "--p", "1", "--state", tmp.string()});
    CHECK(bad.code == 1);
    CHECK(bad.err.find("line 2") != std::string::npos);
    std::filesystem::remove(tmp);
}
