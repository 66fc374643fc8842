#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "sisdecay/charpoly.hpp"
#include "sisdecay/decay.hpp"
#include "sisdecay/oracle.hpp"
#include "support/oracles.hpp"
#include "support/structure.hpp"

#include <random>

using namespace sisdecay;

namespace {

RateLadder sis2_restricted() {
    return restrict_transient(build_eps_sis_ladder(EpsSisParams::make(2, 1, 1, 0)));
}

// rho_{N+1} changes sign across z (simple zeros only).
bool brackets_root(const RateLadder& l, const Real& z) {
    const Real d = bmp::ldexp(Real(1 + abs_value(z)), -60);
    const int a = rho_sequence<Real>(l, Real(z - d)).back().sign();
    const int b = rho_sequence<Real>(l, Real(z + d)).back().sign();
    return a * b < 0;
}

Rational prod_p(const RateLadder& l, long a, long b) {
    return oracle::prod(a, b, [&](long m) { return l.p(m); });
}

}  // namespace

TEST_CASE("coefficient table examples") {
    const auto full = build_eps_sis_ladder(EpsSisParams::make(2, 1, 1, 0));
    const auto t = coefficient_table<Rational>(full);
    CHECK(t.at(1, 2) == 2);

    std::mt19937_64 gen(1);
    for (int trial = 0; trial < 6; ++trial) {
        const auto l = trial % 2 ? oracle::random_generator(gen, 2 + trial)
                                 : oracle::random_restricted(gen, 2 + trial);
        const auto table = coefficient_table<Rational>(l);
        for (std::size_t j = 0; j <= table.max_j(); ++j) {
            CHECK(table.at(j, j) == 1);
            CHECK(table.at(0, j) == oracle::rho_dense(l, j, 0));
            if (!l.is_restricted()) CHECK(table.at(0, j) == prod_p(l, 0, static_cast<long>(j) - 1));
            Rational s = 0;
            for (std::size_t m = 0; m < j; ++m) s += l.p(m) + l.q(m);
            if (j >= 1) CHECK(table.at(j - 1, j) == s);
            for (std::size_t k = 0; k <= j; ++k) CHECK(table.at(k, j) >= 0);
        }
    }
}

TEST_CASE("b/c split, second-order recursion and the general closed form agree") {
    std::mt19937_64 gen(2);
    for (int trial = 0; trial < 8; ++trial) {
        const auto l = trial % 2 ? oracle::random_generator(gen, 1 + trial)
                                 : oracle::random_restricted(gen, 1 + trial);
        const auto a = coefficient_table<Rational>(l);
        const auto b = coefficient_table_second_order<Rational>(l);
        for (std::size_t j = 0; j <= a.max_j(); ++j) {
            CHECK(a.row(j) == b.row(j));
            for (std::size_t k = 1; k <= j; ++k) {
                const auto prev = [&](long x) { return a.at(k - 1, static_cast<std::size_t>(x)); };
                CHECK(a.at(k, j) == oracle::ck_closed_form(l, static_cast<long>(k), static_cast<long>(j), prev));
            }
        }
    }
}

TEST_CASE("kmax truncation") {
    std::mt19937_64 gen(3);
    const auto l = oracle::random_generator(gen, 8);
    const auto t = coefficient_table<Rational>(l, 2);
    const auto full = coefficient_table<Rational>(l);
    CHECK(t.kmax() == 2);
    CHECK(t.at(2, 9) == full.at(2, 9));
    CHECK_THROWS_AS((void)t.at(3, 9), Error);
}

TEST_CASE("c1 and c2 closed forms") {
    const auto sis = build_eps_sis_ladder(EpsSisParams::make(2, 1, 1, 0));
    CHECK(c1_explicit(sis, 1) == 1);
    CHECK(c1_explicit(sis, 2) == 2);
    std::mt19937_64 gen(4);
    for (int trial = 0; trial < 5; ++trial) {
        const auto l = oracle::random_generator(gen, 6);
        const auto t = coefficient_table<Rational>(l, 2);
        for (std::size_t j = 1; j <= 7; ++j) {
            CHECK(c1_explicit(l, j) == t.at(1, j));
            if (j >= 2) CHECK(c2_explicit(l, j) == t.at(2, j));
        }
    }
    CHECK_THROWS_AS(c1_explicit(sis2_restricted(), 1), Error);
    CHECK_THROWS_AS(c2_explicit(sis, 1), Error);
}

TEST_CASE("diagonal bands") {
    std::mt19937_64 gen(5);
    for (int trial = 0; trial < 4; ++trial) {
        const auto l = oracle::random_generator(gen, 8);
        const auto t = coefficient_table<Rational>(l);
        for (std::size_t m = 0; m <= 4; ++m) {
            const auto band = diag_band_coeffs(l, m);
            REQUIRE(band.size() == 9 + 1 - m);
            for (std::size_t j = m; j <= 9; ++j) CHECK(band[j - m] == t.at(j - m, j));
        }
        // Literal m = 2 display.
        const auto band2 = diag_band_coeffs(l, 2);
        for (long j = 2; j <= 9; ++j) {
            Rational v = 0;
            for (long x = 0; x <= j - 1; ++x) {
                Rational inner = 0;
                for (long m = 0; m <= x - 1; ++m) inner += l.p(m) + l.q(m);
                v += (l.q(x) + l.p(x)) * inner - l.q(x) * l.p(x - 1);
            }
            CHECK(band2[static_cast<std::size_t>(j - 2)] == v);
        }
    }
}

TEST_CASE("char_coeffs examples") {
    const auto f = char_coeffs<Rational>(sis2_restricted());
    REQUIRE(f.complete);
    CHECK(f.n == 2);
    CHECK(f.get(0) == 1);
    CHECK(f.get(1) == 2);
    CHECK(f.get(2) == Rational(1, 2));
    CHECK(f.get(3) == 0);
    CHECK_THROWS_AS(char_coeffs<Rational>(build_eps_sis_ladder(EpsSisParams::make(2, 1, 1, 0))), Error);

    const auto partial = char_coeffs<Rational>(sis2_restricted(), 1);
    CHECK_THROWS_AS((void)partial.get(2), Error);
}

TEST_CASE("char_coeffs structural identities") {
    std::mt19937_64 gen(6);
    for (int trial = 0; trial < 10; ++trial) {
        const std::size_t n = 1 + trial;
        const auto l = oracle::random_generator(gen, n);
        const auto f = char_coeffs<Rational>(l);
        const auto table = coefficient_table<Rational>(l);
        Rational qprod = 1, qprod_short = 1, exits = 0;
        for (std::size_t m = 0; m < n; ++m) {
            qprod *= l.q(m + 1);
            if (m + 1 < n) qprod_short *= l.q(m + 1);
            exits += l.p(m) + l.q(m);
        }
        CHECK(f.get(n) == 1 / qprod);
        CHECK(f.get(n - 1) == 1 / qprod_short + exits / qprod);
        CHECK(f.get(0) == 1 / steady_state<Rational>(l).pi[0]);
        for (std::size_t k = 0; k <= n; ++k) {
            CHECK(f.get(k) >= 0);
            CHECK(table.at(k + 1, n + 1) * f.get(n) == f.get(k));
            CHECK(f.top_coefficient(k) == table.at(k + 1, n + 1));
        }
    }
}

TEST_CASE("rho evaluation") {
    std::mt19937_64 gen(7);
    const auto l = oracle::random_generator(gen, 6);
    const auto table = coefficient_table<Rational>(l);
    const Rational xi(-7, 3);
    const auto seq = rho_sequence<Rational>(l, xi);
    CHECK(rho_eval(table, 0, xi) == 1);
    for (std::size_t j = 0; j <= 7; ++j) {
        CHECK(rho_eval(table, j, Rational(0)) == table.at(0, j));
        CHECK(rho_eval(table, j, xi) == seq[j]);
        CHECK(seq[j] == oracle::rho_dense(l, j, xi));
    }
    const auto spectrum = dense_spectrum(l, PrecisionCtx::bits(200));
    ScopedPrecision guard(200);
    for (const auto& z : spectrum) CHECK(brackets_root(l, z));
}

TEST_CASE("rho vanishes at eigenvalue shifts of a stochastic ladder") {
    std::mt19937_64 gen(8);
    const auto l = oracle::random_stochastic(gen, 5);
    const auto spectrum = dense_spectrum(l, PrecisionCtx::bits(200));
    ScopedPrecision guard(200);
    CHECK(abs_value(spectrum.front()).convert_to<double>() < 1e-50);
    for (const auto& z : spectrum) {
        CHECK(z >= -2);
        CHECK(brackets_root(l, z));
    }
}

TEST_CASE("newton sums examples") {
    const auto s = newton_sums(char_coeffs<Rational>(sis2_restricted()));
    CHECK(s.sum_z == -4);
    CHECK(s.prod_neg_z == 2);
    CHECK(s.sum_inv_z == -2);
    // (-2+r)^2 + (-2-r)^2 = 12 with r = sqrt 2.
    CHECK(s.sum_z2 == 12);
    // 1/z^2 summed: (12)/(2^2) = 3.
    CHECK(s.sum_inv_z2 == 3);
    const Real zeta = exact_zeta(sis2_restricted(), PrecisionCtx::bits(128));
    CHECK(Real(s.sum_inv_z2) >= 1 / (zeta * zeta));

    CharCoeffs<Rational> bad;
    bad.f = {0, 1, 1};
    bad.n = 2;
    bad.complete = true;
    CHECK_THROWS_AS(newton_sums(bad), Error);
}

TEST_CASE("newton sums trace identity") {
    std::mt19937_64 gen(9);
    for (int trial = 0; trial < 5; ++trial) {
        const auto l = oracle::random_restricted(gen, 4 + trial);
        const auto s = newton_sums(char_coeffs<Rational>(l));
        Rational trace = 0;
        for (std::size_t j = 0; j < l.n_states(); ++j) trace -= l.p(j) + l.q(j);
        CHECK(s.sum_z == trace);
        CHECK(s.sum_inv_z2 >= 0);
    }
}

TEST_CASE("interlacing, Christoffel-Darboux, orthogonality") {
    std::mt19937_64 gen(10);
    for (int trial = 0; trial < 4; ++trial) {
        const auto l = oracle::random_generator(gen, 3 + 2 * trial);
        CHECK(oracle::interlacing_holds(l));
        CHECK(oracle::christoffel_darboux_residual<Rational>(l, Rational(-3, 2), Rational(5, 7)) == 0);
        {
            ScopedPrecision guard(128);
            CHECK(oracle::christoffel_darboux_residual<Real>(l, Real(-1.25), Real(-0.3)) < 1e-25);
        }
        const unsigned bits = 160;
        CHECK(oracle::orthogonality_defect(l, bits) <= 10 * std::ldexp(1.0, -static_cast<int>(bits) / 2));
    }
}
