#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "sisdecay/cli.hpp"

#include <json.hpp>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

using namespace sisdecay;
using json = nlohmann::json;

namespace {

struct Run {
    int code;
    std::string out;
    std::string err;
};

Run cli(std::vector<std::string> args) {
    std::ostringstream out, err;
    const int code = run_cli(args, out, err);
    return {code, out.str(), err.str()};
}

std::vector<std::string> lines(const std::string& text) {
    std::vector<std::string> out;
    std::istringstream in(text);
    for (std::string line; std::getline(in, line);) out.push_back(line);
    return out;
}

std::vector<std::string> fields(const std::string& line) {
    std::vector<std::string> out;
    std::istringstream in(line);
    for (std::string f; std::getline(in, f, ',');) out.push_back(f);
    if (!line.empty() && line.back() == ',') out.emplace_back();
    return out;
}

}  // namespace

TEST_CASE("decay examples") {
    const auto r = cli({"decay", "--n", "2", "--beta", "1", "--delta", "1", "--eps", "0"});
    REQUIRE(r.code == 0);
    const auto j = json::parse(r.out);
    CHECK(j["zeta_exact"].get<double>() == doctest::Approx(-(2 - std::sqrt(2.0))).epsilon(1e-14));
    CHECK(j["zeta_lagrange1"].get<double>() == -0.5);
    CHECK(j["zeta_lagrange2"].get<double>() == -0.5625);
    CHECK(j["zeta_newton"].get<double>() == doctest::Approx(-1 / std::sqrt(3.0)).epsilon(1e-15));
    CHECK(j["bound_ordering_ok"].get<bool>());
    for (const char* key : {"n", "beta", "delta", "eps", "tau", "x", "zeta_exact", "zeta_lagrange1", "zeta_lagrange2",
                            "zeta_lagrange3", "zeta_newton", "bound_ordering_ok", "precision_bits"}) {
        CHECK(j.contains(key));
    }

    const auto one = json::parse(cli({"decay", "--n", "1", "--beta", "1", "--delta", "1", "--eps", "0"}).out);
    for (const char* key : {"zeta_exact", "zeta_lagrange1", "zeta_lagrange2", "zeta_lagrange3", "zeta_newton"}) {
        CHECK(one[key].get<double>() == doctest::Approx(-1).epsilon(1e-15));
    }

    const auto exact = json::parse(cli({"decay", "--n", "2", "--tau", "1", "--eps", "0", "--exact"}).out);
    CHECK(exact["zeta_lagrange2"] == "-9/16");
}

TEST_CASE("decay usage and precision errors") {
    CHECK(cli({"decay", "--n", "2", "--order", "4"}).code == kExitUsage);
    CHECK(cli({"decay", "--n", "0"}).code == kExitUsage);
    CHECK(cli({"decay", "--n", "2", "--tau", "1", "--x", "2"}).code == kExitUsage);
    CHECK(cli({"decay", "--n", "2", "--beta", "abc"}).code == kExitUsage);
    CHECK(cli({"nonsense"}).code == kExitUsage);
    const auto p = cli({"decay", "--n", "60", "--x", "4", "--eps", "0", "--precision-bits", "64"});
    CHECK(p.code == kExitPrecision);
    CHECK(p.err.find("precision-exhausted") != std::string::npos);
    CHECK(cli({"decay", "--n", "60", "--x", "4", "--eps", "0"}).code == kExitOk);
}

TEST_CASE("sweep: default grid") {
    const auto r = cli({"sweep"});
    REQUIRE(r.code == 0);
    const auto ls = lines(r.out);
    REQUIRE(ls.size() == 2 + 4 * 57);
    CHECK(ls[0].rfind("# meta:", 0) == 0);
    CHECK(ls[0].find("version=0.1.0") != std::string::npos);
    CHECK(ls[1] ==
          "n,tau,x,eps,zeta_exact,zeta_lagrange2,zeta_newton,rel_err_lagrange2,rel_err_newton,precision_bits,error");
    int prev_n = 0;
    double prev_x = -1;
    for (std::size_t i = 2; i < ls.size(); ++i) {
        const auto f = fields(ls[i]);
        REQUIRE(f.size() == 11);
        const int n = std::stoi(f[0]);
        const double x = std::stod(f[2]);
        CHECK((n > prev_n || (n == prev_n && x > prev_x)));
        CHECK(f[10].empty());
        prev_n = n;
        prev_x = x;
    }
    CHECK(prev_n == 60);
}

TEST_CASE("sweep is byte-stable and thread-independent") {
    const std::vector<std::string> base{"sweep", "--n-values", "4:20", "--x-values", "1/2,2"};
    auto one = base;
    one.insert(one.end(), {"--threads", "1"});
    auto many = base;
    many.insert(many.end(), {"--threads", "8"});
    const auto a = cli(one);
    const auto b = cli(many);
    CHECK(a.code == 0);
    CHECK(a.out == b.out);
    CHECK(cli(one).out == a.out);
}

TEST_CASE("sweep and decay agree on a shared point") {
    const auto s = cli({"sweep", "--n-values", "7", "--tau-values", "2/7", "--eps", "1/1000"});
    REQUIRE(s.code == 0);
    const auto ls = lines(s.out);
    REQUIRE(ls.size() == 3);
    const auto f = fields(ls[2]);
    const auto d = json::parse(cli({"decay", "--n", "7", "--tau", "2/7", "--eps", "1/1000"}).out);
    CHECK(std::stod(f[4]) == d["zeta_exact"].get<double>());
    CHECK(std::stod(f[5]) == d["zeta_lagrange2"].get<double>());
    CHECK(std::stod(f[6]) == d["zeta_newton"].get<double>());
    CHECK(std::stoi(f[9]) == d["precision_bits"].get<int>());
}

TEST_CASE("sweep json and bad specs") {
    const auto j = cli({"sweep", "--n-values", "3,5", "--x-values", "2", "--format", "json"});
    REQUIRE(j.code == 0);
    const auto doc = json::parse(j.out);
    CHECK(doc["rows"].size() == 2);
    CHECK(cli({"sweep", "--n-values", "5,3"}).code == kExitUsage);
    CHECK(cli({"sweep", "--n-values", "3", "--x-values", "2", "--tau-values", "1"}).code == kExitUsage);
    CHECK(cli({"sweep", "--eps", "-1"}).code == kExitUsage);
}

TEST_CASE("sweep records row failures") {
    const std::vector<std::string> args{"sweep", "--n-values", "60", "--x-values", "4", "--eps", "0",
                                        "--precision-bits", "64"};
    const auto loose = cli(args);
    CHECK(loose.code == 0);
    const auto f = fields(lines(loose.out)[2]);
    CHECK(f[10].find("precision-exhausted") != std::string::npos);
    auto strict = args;
    strict.push_back("--strict");
    CHECK(cli(strict).code != 0);
}

TEST_CASE("lifetime examples") {
    const auto a = json::parse(cli({"lifetime", "--n", "3", "--tau", "1", "--delta", "1", "--exact"}).out);
    CHECK(a["E_T"] == "23/6");
    CHECK(a["F_direct"] == "23/6");
    CHECK(a["F_taylor"] == "23/6");
    CHECK(a["regime"] == "above");

    const auto b = json::parse(cli({"lifetime", "--n", "3", "--tau", "0"}).out);
    CHECK(b["E_T"].get<double>() == doctest::Approx(11.0 / 6));
    CHECK(b["F_expint"].is_null());
    CHECK(b["F_asymptotic"].is_null());

    const auto c = json::parse(cli({"lifetime", "--n", "100", "--x", "2"}).out);
    CHECK(std::fabs(c["zeta_F_residual"].get<double>()) <= 1e-6);

    CHECK(cli({"lifetime", "--n", "3", "--tau", "1", "--eps", "1"}).code == kExitUsage);
}

TEST_CASE("regimes") {
    const auto r = cli({"regimes", "--n", "50", "--format", "csv"});
    REQUIRE(r.code == 0);
    const auto ls = lines(r.out);
    REQUIRE(ls.size() == 2 + 4);
    CHECK(fields(ls[2])[3] == "below");
    CHECK(fields(ls[3])[3] == "at");
    CHECK(fields(ls[4])[3] == "above");
    const auto j = json::parse(cli({"regimes", "--n", "1000", "--x-values", "1"}).out);
    CHECK(j["rows"][0]["leading_estimate"].get<double>() == doctest::Approx(5.0 / 4000));
}

TEST_CASE("simulate") {
    const std::vector<std::string> args{"simulate", "--n", "8", "--tau", "1/20", "--runs", "20000", "--seed", "5"};
    const auto r = cli(args);
    REQUIRE(r.code == 0);
    const auto j = json::parse(r.out);
    CHECK(j["complete"].get<bool>());
    CHECK(std::fabs(j["z_score"].get<double>()) < 4);
    CHECK(j["rng"].get<std::string>().find("mt19937_64") != std::string::npos);
    CHECK(cli(args).out == r.out);

    const auto c = cli({"simulate", "--n", "8", "--tau", "1/20", "--runs", "10", "--seed", "5", "--format", "csv"});
    const auto ls = lines(c.out);
    REQUIRE(ls.size() == 12);
    CHECK(ls[1] == "run,seed,start_state,t");

    CHECK(cli({"simulate", "--n", "8", "--tau", "1/20", "--eps", "1"}).code == kExitUsage);
    CHECK(cli({"simulate", "--n", "8", "--tau", "1/20", "--runs", "0"}).code == kExitUsage);
    const auto above = cli({"simulate", "--n", "4", "--x", "2", "--runs", "100"});
    CHECK(above.code == 0);
    CHECK(above.err.find("warning") != std::string::npos);
}

TEST_CASE("validate") {
    const auto ok = cli({"validate", "--level", "quick"});
    CHECK(ok.code == 0);
    const auto doc = json::parse(ok.out);
    CHECK(doc["ok"].get<bool>());
    CHECK(doc["suites"].contains("decay"));

    const auto bad = cli({"validate", "--inject-fault", "f2-sign"});
    CHECK(bad.code == kExitValidation);
    CHECK(bad.err.find("bound-ordering") != std::string::npos);
    CHECK(json::parse(bad.out)["first_failure"] == "bound-ordering");

    const auto path = std::filesystem::temp_directory_path() / "sisdecay_validate_test.json";
    CHECK(cli({"validate", "--out", path.string()}).code == 0);
    std::ifstream in(path);
    CHECK(json::parse(in)["level"] == "quick");
    std::filesystem::remove(path);

    CHECK(cli({"validate", "--level", "medium"}).code == kExitUsage);
}

TEST_CASE("version") {
    const auto r = cli({"--version"});
    CHECK(r.code == 0);
    CHECK(r.out.find("0.1.0") != std::string::npos);
}
