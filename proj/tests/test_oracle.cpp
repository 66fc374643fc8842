#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "sisdecay/decay.hpp"
#include "sisdecay/oracle.hpp"
#include "sisdecay/sis.hpp"
#include "support/dense_eigen.hpp"
#include "support/oracles.hpp"

#include <cmath>
#include <random>

using namespace sisdecay;

namespace {

double d(const Real& v) { return v.convert_to<double>(); }

RateLadder sis(unsigned n, const Rational& beta, const Rational& delta, const Rational& eps) {
    return build_eps_sis_ladder(EpsSisParams::make(n, beta, delta, eps));
}

std::vector<double> linspace(double a, double b, int n) {
    std::vector<double> out;
    for (int i = 0; i < n; ++i) out.push_back(a + (b - a) * i / (n - 1));
    return out;
}

}  // namespace

TEST_CASE("dense_spectrum examples") {
    const auto ctx = PrecisionCtx::bits(128);
    const Rational delta(3, 2);
    const auto death = RateLadder::generator({0, 0, 0}, {delta, 2 * delta, 3 * delta});
    const auto s = dense_spectrum(death, ctx);
    REQUIRE(s.size() == 4);
    for (int i = 0; i < 4; ++i) CHECK(d(s[i]) == doctest::Approx(-1.5 * i).epsilon(1e-15));

    const auto r = dense_spectrum(restrict_transient(sis(2, 1, 1, 0)), ctx);
    REQUIRE(r.size() == 2);
    CHECK(std::fabs(d(r[0]) - (-2 + std::sqrt(2.0))) < 1e-15);
    CHECK(std::fabs(d(r[1]) - (-2 - std::sqrt(2.0))) < 1e-15);
}

TEST_CASE("dense_spectrum agrees with a QR eigensolver") {
    std::mt19937_64 gen(21);
    for (int trial = 0; trial < 12; ++trial) {
        const std::size_t n = trial < 6 ? 8 : 1 + trial;
        const auto l = trial % 3 == 0 ? oracle::random_restricted(gen, n)
                       : trial % 3 == 1 ? oracle::random_generator(gen, n)
                                        : oracle::random_stochastic(gen, n);
        const auto s = dense_spectrum(l, PrecisionCtx::bits(128));
        const auto e = oracle::eigen_spectrum(l);
        REQUIRE(s.size() == e.size());
        const double scale = d(from_rational<Real>(l.max_exit_rate())) + 1;
        for (std::size_t i = 0; i < s.size(); ++i) {
            CAPTURE(trial);
            CAPTURE(i);
            CHECK(std::fabs(d(s[i]) - static_cast<double>(e[i])) <= 1e-12 * scale);
        }
    }
}

TEST_CASE("dense_spectrum power sums match newton_sums") {
    std::mt19937_64 gen(22);
    for (int trial = 0; trial < 10; ++trial) {
        const auto l = oracle::random_restricted(gen, 3 + 3 * trial);
        const auto sums = newton_sums(char_coeffs<Rational>(l));
        const auto s = dense_spectrum(l, PrecisionCtx::bits(256));
        ScopedPrecision guard(256);
        Real sz(0), sz2(0), prod(1);
        for (const auto& z : s) {
            sz += z;
            sz2 += z * z;
            prod *= -z;
        }
        const auto rel = [](const Real& a, const Rational& b) {
            return d(abs_value(Real(a / Real(b) - 1)));
        };
        CHECK(rel(sz, sums.sum_z) < 1e-10);
        CHECK(rel(sz2, sums.sum_z2) < 1e-10);
        CHECK(rel(prod, sums.prod_neg_z) < 1e-10);
    }
}

TEST_CASE("hitting_time_solve examples") {
    const auto h = hitting_time_solve(sis(2, 1, 1, 0));
    CHECK(h == std::vector<Rational>{0, Rational(3, 2), 2});
    CHECK(hitting_time_solve(restrict_transient(sis(2, 1, 1, 0))) == h);

    const Rational delta(5, 3);
    std::vector<Rational> down;
    for (int j = 1; j <= 6; ++j) down.push_back(j * delta);
    const auto death = hitting_time_solve(RateLadder::generator(std::vector<Rational>(6, 0), down));
    CHECK(death.back() == harmonic(6) / delta);

    CHECK(hitting_time_solve(sis(20, Rational(3, 20), 1, 0)).back() == F_direct(20, Rational(3, 20), 1));

    CHECK_THROWS_AS(hitting_time_solve(sis(3, 1, 1, 1)), Error);
    try {
        (void)hitting_time_solve(RateLadder::generator({0, 1, 1}, {1, 0, 1}));
        FAIL("expected unsupported-structure");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::UnsupportedStructure);
    }
}

TEST_CASE("hitting times equal F for every tau rule") {
    for (unsigned n = 1; n <= 20; ++n) {
        const int ni = static_cast<int>(n);
        for (const Rational tau : {Rational(1, 2 * ni), Rational(1, ni), Rational(2, ni), Rational(3, ni)}) {
            CHECK(hitting_time_solve(sis(n, tau, 1, 0)).back() == F_direct(n, tau, 1));
        }
    }
}

TEST_CASE("hitting_time_solve against dense elimination") {
    std::mt19937_64 gen(23);
    for (int trial = 0; trial < 8; ++trial) {
        std::vector<Rational> up{0}, down;
        for (int j = 0; j < 2 + trial; ++j) up.push_back(oracle::random_rate(gen));
        for (int j = 0; j < 3 + trial; ++j) down.push_back(oracle::random_rate(gen));
        const auto l = RateLadder::generator(up, down);
        CHECK(hitting_time_solve(l) == oracle::hitting_dense(l));
    }
}

TEST_CASE("run seeds") {
    CHECK(splitmix64(0) == 0xe220a8397b1dcdafULL);
    CHECK(run_seed(1, 0) != run_seed(1, 1));
    CHECK(run_seed(1, 0) != run_seed(2, 0));
}

TEST_CASE("gillespie single node is exponential") {
    const auto r = gillespie_simulate(EpsSisParams::make(1, 1, 1, 0), 1, 100000, 7);
    CHECK(r.complete);
    CHECK(r.samples.size() == 100000);
    CHECK(std::fabs(r.mean - 1) <= 3 * r.stderr_mean);
    CHECK(r.stderr_mean == doctest::Approx(1 / std::sqrt(1e5)).epsilon(0.05));
    for (std::size_t i = 0; i < r.samples.size(); ++i) {
        CHECK(r.samples[i].run == i);
        CHECK(r.samples[i].t > 0);
    }
    CHECK(survival_tail_slope(r.samples) == doctest::Approx(-1).epsilon(0.05));
}

TEST_CASE("gillespie is reproducible per seed") {
    const auto params = EpsSisParams::make(6, Rational(1, 5), 1, 0);
    SimulationOptions one;
    one.threads = 1;
    SimulationOptions many;
    many.threads = 4;
    const auto a = gillespie_simulate(params, 6, 3000, 99, one);
    const auto b = gillespie_simulate(params, 6, 3000, 99, many);
    const auto c = gillespie_simulate(params, 6, 3000, 100, many);
    REQUIRE(a.samples.size() == b.samples.size());
    bool same = true;
    for (std::size_t i = 0; i < a.samples.size(); ++i) same = same && a.samples[i].t == b.samples[i].t;
    CHECK(same);
    CHECK(a.samples[0].t != c.samples[0].t);
    CHECK(a.mean == b.mean);
}

TEST_CASE("gillespie preconditions and budget") {
    CHECK_THROWS_AS(gillespie_simulate(EpsSisParams::make(3, 1, 1, Rational(1, 10)), 3, 10, 1), Error);
    CHECK_THROWS_AS(gillespie_simulate(EpsSisParams::make(3, 1, 1, 0), 0, 10, 1), Error);
    CHECK_THROWS_AS(gillespie_simulate(EpsSisParams::make(3, 1, 1, 0), 4, 10, 1), Error);
    CHECK_THROWS_AS(gillespie_simulate(EpsSisParams::make(3, 1, 1, 0), 3, 0, 1), Error);

    // Far above threshold: absorption essentially never happens in budget.
    SimulationOptions opts;
    opts.budget = std::chrono::milliseconds(200);
    const auto r = gillespie_simulate(EpsSisParams::make(40, Rational(1, 5), 1, 0), 40, 4, 1, opts);
    CHECK_FALSE(r.complete);
    CHECK(r.samples.size() < 4);
}

TEST_CASE("gillespie mean and survival slope below and above threshold") {
    for (const Rational tau : {Rational(1, 20), Rational(1, 4)}) {
        const auto params = EpsSisParams::make(8, tau, 1, 0);
        const auto r = gillespie_simulate(params, 8, 100000, 2024);
        const double exact = F_direct(8, tau, 1).convert_to<double>();
        CAPTURE(tau.convert_to<double>());
        CHECK(std::fabs(r.mean - exact) <= 3 * r.stderr_mean);
        const double zeta = d(exact_zeta(restrict_transient(build_eps_sis_ladder(params)), PrecisionCtx::bits(128)));
        CHECK(survival_tail_slope(r.samples) == doctest::Approx(zeta).epsilon(0.10));
    }
}

TEST_CASE("survival slope needs enough tail samples") {
    std::vector<AbsorptionSample> few(100);
    for (std::size_t i = 0; i < few.size(); ++i) few[i].t = 1.0 + i;
    try {
        (void)survival_tail_slope(few);
        FAIL("expected fit-unreliable");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::FitUnreliable);
    }
}

TEST_CASE("transient fit: two-state chain") {
    const auto fit = transient_decay_fit(RateLadder::generator({1}, {1}), PrecisionCtx::bits(128), linspace(0, 10, 41));
    CHECK(fit.reliable);
    CHECK(std::fabs(d(fit.rate) + 2) <= 1e-6);
    CHECK(fit.log_distance.size() == 41);
}

TEST_CASE("transient fit: eps-SIS against exact zeta") {
    const auto l = sis(6, Rational(1, 3), 1, Rational(1, 1000));
    const double zeta = d(exact_zeta(l, PrecisionCtx::bits(128)));
    const auto fit = transient_decay_fit(l, PrecisionCtx::bits(128), linspace(0, 12 / -zeta, 61));
    CHECK(fit.reliable);
    CHECK(d(fit.rate) == doctest::Approx(zeta).epsilon(0.01));

    // Before the metastable plateau is reached only fast modes are visible.
    const auto early = transient_decay_fit(l, PrecisionCtx::bits(128), linspace(0, 0.5, 21));
    CHECK_FALSE(early.reliable);
    CHECK_FALSE(early.reason.empty());
}

TEST_CASE("transient fit: numerical floor is flagged") {
    const auto fit = transient_decay_fit(RateLadder::generator({1}, {1}), PrecisionCtx::bits(64), linspace(0, 60, 31));
    CHECK_FALSE(fit.reliable);
}
