#include "sisdecay/validate.hpp"

#include "sisdecay/chain.hpp"
#include "sisdecay/charpoly.hpp"
#include "sisdecay/decay.hpp"
#include "sisdecay/oracle.hpp"
#include "sisdecay/sis.hpp"
#include "sisdecay/special.hpp"

#include <fmt/format.h>

#include <chrono>
#include <cmath>
#include <functional>
#include <random>

namespace sisdecay {

namespace {

class Runner {
public:
    explicit Runner(ValidationReport& report) : report_(report) {}

    // A check returns an empty string on success, else a description.
    void check(const std::string& suite, const std::string& property,
               const std::function<std::string()>& body) {
        CheckOutcome outcome{suite, property, true, {}};
        try {
            outcome.detail = body();
            outcome.passed = outcome.detail.empty();
        } catch (const std::exception& e) {
            outcome.passed = false;
            outcome.detail = std::string("exception: ") + e.what();
        }
        report_.checks.push_back(std::move(outcome));
    }

private:
    ValidationReport& report_;
};

double rel_gap(double a, double b) {
    return std::fabs(a - b) / std::max({std::fabs(a), std::fabs(b), 1e-300});
}

std::vector<Rational> tau_rules(unsigned n) {
    return {Rational(1, 2 * n), Rational(1, n), Rational(2, n), Rational(3, n)};
}

RateLadder random_ladder(std::mt19937_64& gen, unsigned n) {
    std::uniform_int_distribution<int> num(1, 20);
    std::uniform_int_distribution<int> den(1, 7);
    std::vector<Rational> up, down;
    for (unsigned j = 0; j < n; ++j) {
        up.emplace_back(num(gen), den(gen));
        down.emplace_back(num(gen), den(gen));
    }
    return RateLadder::generator(up, down);
}

void chain_suite(Runner& run, bool full) {
    run.check("chain", "steady-state-normalised", [] {
        const auto ladder = build_eps_sis_ladder(EpsSisParams::make(6, 1, 2, Rational(1, 10)));
        Rational total = 0;
        for (const auto& v : steady_state<Rational>(ladder).pi) total += v;
        return total == 1 ? std::string() : "sum pi != 1";
    });
    run.check("chain", "f0-equals-inverse-pi0", [] {
        const auto params = EpsSisParams::make(7, 1, 3, Rational(1, 5));
        const auto ladder = build_eps_sis_ladder(params);
        const Rational pi0 = steady_state<Rational>(ladder).pi[0];
        const Rational f0 = char_coeffs<Rational>(ladder, 0).get(0);
        if (f0 * pi0 != 1) return std::string("f_0 pi_0 != 1");
        return f0 == f0_eps(params) ? std::string() : "f_0 closed form differs";
    });
    run.check("chain", "symmetrize-preserves-spectrum", [full] {
        std::mt19937_64 gen(7);
        const int trials = full ? 20 : 4;
        for (int t = 0; t < trials; ++t) {
            const auto ladder = random_ladder(gen, 2 + t % 9);
            const auto spectrum = dense_spectrum(ladder, PrecisionCtx::bits(160));
            const Real zeta = exact_zeta(ladder, PrecisionCtx::bits(160));
            const double gap = rel_gap(zeta.convert_to<double>(), spectrum[1].convert_to<double>());
            if (gap > 1e-12) return fmt::format("trial {}: gap {:.3g}", t, gap);
        }
        return std::string();
    });
}

void charpoly_suite(Runner& run, bool full) {
    run.check("charpoly", "f1-closed-form", [full] {
        const unsigned top = full ? 14 : 8;
        for (unsigned n = 1; n <= top; ++n) {
            const auto params = EpsSisParams::make(n, Rational(1, n), 1, Rational(1, 7));
            const auto coeffs = char_coeffs<Rational>(build_eps_sis_ladder(params), 1);
            if (coeffs.get(1) != f1_eps(params)) return fmt::format("N={}", n);
        }
        return std::string();
    });
    run.check("charpoly", "f2-eps0-closed-form", [full] {
        const unsigned top = full ? 14 : 8;
        for (unsigned n = 2; n <= top; ++n) {
            for (const auto& tau : tau_rules(n)) {
                const auto params = EpsSisParams::from_tau(n, tau, 1, 0);
                const auto ladder = restrict_transient(build_eps_sis_ladder(params));
                if (char_coeffs<Rational>(ladder, 2).get(2) != f2_eps0(params)) {
                    return fmt::format("N={} tau={}", n, format_rational(tau));
                }
            }
        }
        return std::string();
    });
    run.check("charpoly", "c1-c2-explicit", [] {
        const auto ladder = build_eps_sis_ladder(EpsSisParams::make(7, Rational(1, 3), 1, 0));
        const auto table = coefficient_table<Rational>(ladder, 2);
        for (std::size_t j = 1; j <= ladder.last_state() + 1; ++j) {
            if (table.at(1, j) != c1_explicit(ladder, j)) return fmt::format("c1 at j={}", j);
            if (j >= 2 && table.at(2, j) != c2_explicit(ladder, j)) return fmt::format("c2 at j={}", j);
        }
        return std::string();
    });
}

void decay_suite(Runner& run, bool full, Fault fault) {
    run.check("decay", "bound-ordering", [full, fault] {
        const unsigned top = full ? 40 : 16;
        for (unsigned n = 4; n <= top; n += full ? 1 : 4) {
            for (const auto& tau : tau_rules(n)) {
                const auto params = EpsSisParams::from_tau(n, tau, 1, Rational(1, 100000));
                const auto ladder = build_eps_sis_ladder(params);
                const PrecisionCtx ctx =
                    PrecisionCtx::bits(required_precision(n, (tau * n).convert_to<double>()));
                auto report = decay_report(ladder, ctx);
                bool ok = report.bound_ordering_ok;
                if (fault == Fault::F2SignFlip) {
                    ScopedPrecision guard(ctx.mantissa_bits);
                    const auto& f = report.coeffs;
                    const Real newton = newton_bound(f.get(0), f.get(1), -f.get(2));
                    ok = bound_ordering_holds(report.zeta_lo, newton, report.zeta_first_bound);
                }
                if (!ok) return fmt::format("N={} tau={}", n, format_rational(tau));
            }
        }
        return std::string();
    });
    run.check("decay", "two-state-exact", [] {
        const auto ladder = RateLadder::generator({Rational(1)}, {Rational(1)});
        const Real z = exact_zeta(ladder, PrecisionCtx::bits(128));
        return std::fabs(z.convert_to<double>() + 2) < 1e-15 ? std::string() : "zeta != -2";
    });
    run.check("decay", "newton-sums-vs-spectrum", [full] {
        std::mt19937_64 gen(11);
        const int trials = full ? 30 : 5;
        for (int t = 0; t < trials; ++t) {
            const auto ladder = random_ladder(gen, 2 + t % 12);
            const auto coeffs = char_coeffs<Rational>(ladder);
            const auto sums = newton_sums(coeffs);
            const auto spectrum = dense_spectrum(ladder, PrecisionCtx::bits(192));
            ScopedPrecision guard(192);
            Real sz(0), sinv(0), prod(1);
            for (std::size_t i = 1; i < spectrum.size(); ++i) {
                sz += spectrum[i];
                sinv += 1 / spectrum[i];
                prod *= -spectrum[i];
            }
            const double g1 = rel_gap(sz.convert_to<double>(), sums.sum_z.convert_to<double>());
            const double g2 = rel_gap(sinv.convert_to<double>(), sums.sum_inv_z.convert_to<double>());
            const double g3 = rel_gap(prod.convert_to<double>(), sums.prod_neg_z.convert_to<double>());
            if (std::max({g1, g2, g3}) > 1e-10) return fmt::format("trial {}", t);
        }
        return std::string();
    });
}

void sis_suite(Runner& run, bool full) {
    run.check("sis", "F-direct-equals-taylor", [full] {
        const unsigned top = full ? 60 : 20;
        for (unsigned n = 1; n <= top; ++n) {
            for (const auto& tau : tau_rules(n)) {
                if (F_direct(n, tau, 1) != F_taylor(n, tau, 1)) return fmt::format("N={}", n);
                if (n <= 12 && F_direct(n, tau, 1) != F_double_sum(n, tau, 1)) {
                    return fmt::format("double sum N={}", n);
                }
            }
        }
        return std::string();
    });
    run.check("sis", "B-identities", [full] {
        const unsigned top = full ? 30 : 12;
        for (unsigned n = 1; n <= top; ++n) {
            const auto a = taylor_coeffs(n).B;
            if (a != taylor_coeffs_alternating(n).B || a != taylor_coeffs_recursive(n).B) {
                return fmt::format("N={}", n);
            }
            if (a[0] != harmonic(n)) return fmt::format("B_1 != H_N at N={}", n);
        }
        return std::string();
    });
    run.check("sis", "F-expint", [full] {
        const unsigned top = full ? 20 : 8;
        for (unsigned n = 2; n <= top; ++n) {
            for (const auto& tau : {Rational(2, n), Rational(3, n)}) {
                const double exact = F_direct(n, tau, 1).convert_to<double>();
                const double quad = F_expint(n, tau.convert_to<double>(), tau.convert_to<double>());
                if (rel_gap(exact, quad) > 1e-6) return fmt::format("N={} gap {:.3g}", n, rel_gap(exact, quad));
            }
        }
        return std::string();
    });
}

void oracle_suite(Runner& run, bool full) {
    run.check("oracle", "hitting-time-equals-F", [full] {
        const unsigned top = full ? 20 : 10;
        for (unsigned n = 1; n <= top; ++n) {
            for (const auto& tau : tau_rules(n)) {
                const auto params = EpsSisParams::from_tau(n, tau, 1, 0);
                const auto h = hitting_time_solve(build_eps_sis_ladder(params));
                if (h[n] != F_direct(n, tau, 1)) return fmt::format("N={}", n);
            }
        }
        return std::string();
    });
    run.check("oracle", "zeta-times-F", [full] {
        // zeta F + 1 is about -10/F, so it needs F in the millions.
        const unsigned n = full ? 100 : 50;
        const Rational x = full ? Rational(2) : Rational(5, 2);
        const double tol = full ? 1e-6 : 1e-5;
        const auto params = EpsSisParams::from_x(n, x, 1, 0);
        const auto ladder = restrict_transient(build_eps_sis_ladder(params));
        const unsigned bits = required_precision(n, x.convert_to<double>());
        const Real z = exact_zeta(ladder, PrecisionCtx::bits(bits));
        ScopedPrecision guard(bits);
        const double r = abs_value(Real(z * Real(F_direct(n, params.tau(), 1)) + 1)).convert_to<double>();
        return r <= tol ? std::string() : fmt::format("|zeta F + 1| = {:.3g}", r);
    });
    if (full) {
        run.check("oracle", "gillespie-mean", [] {
            const auto params = EpsSisParams::from_tau(8, Rational(1, 20), 1, 0);
            const auto sim = gillespie_simulate(params, 8, 20000, 20240601);
            const double exact = F_direct(8, Rational(1, 20), 1).convert_to<double>();
            if (!sim.complete) return std::string("budget exhausted");
            return std::fabs(sim.mean - exact) <= 4 * sim.stderr_mean
                       ? std::string()
                       : fmt::format("mean {} vs {}", sim.mean, exact);
        });
        run.check("oracle", "transient-fit-two-state", [] {
            const auto ladder = RateLadder::generator({Rational(1)}, {Rational(1)});
            std::vector<double> grid;
            for (int i = 0; i <= 20; ++i) grid.push_back(0.5 * i);
            const auto fit = transient_decay_fit(ladder, PrecisionCtx::bits(256), grid);
            return std::fabs(fit.rate.convert_to<double>() + 2) < 1e-6 ? std::string() : "slope != -2";
        });
    }
}

void special_suite(Runner& run, bool full) {
    run.check("special", "expint-recursion", [full] {
        const unsigned top = full ? 200 : 40;
        for (double x : {0.1, 1.0, 10.0, 100.0}) {
            for (unsigned n = 2; n <= top; ++n) {
                const double lhs = n * exp_integral_scaled<double>(n + 1, x);
                const double rhs = 1 - x * exp_integral_scaled<double>(n, x);
                if (std::fabs(lhs - rhs) > 1e-12 * std::max(1.0, std::fabs(lhs))) {
                    return fmt::format("n={} x={}", n, x);
                }
            }
        }
        return std::string();
    });
}

}  // namespace

bool ValidationReport::ok() const { return !first_failure().has_value(); }

std::optional<CheckOutcome> ValidationReport::first_failure() const {
    for (const auto& c : checks) {
        if (!c.passed) return c;
    }
    return std::nullopt;
}

std::map<std::string, std::pair<std::size_t, std::size_t>> ValidationReport::suite_counts() const {
    std::map<std::string, std::pair<std::size_t, std::size_t>> out;
    for (const auto& c : checks) {
        auto& slot = out[c.suite];
        (c.passed ? slot.first : slot.second)++;
    }
    return out;
}

nlohmann::json ValidationReport::to_json() const {
    nlohmann::json j;
    j["level"] = level == ValidationLevel::Quick ? "quick" : "full";
    j["ok"] = ok();
    j["seconds"] = seconds;
    if (auto f = first_failure()) {
        j["first_failure"] = f->property;
    } else {
        j["first_failure"] = nullptr;
    }
    nlohmann::json suites = nlohmann::json::object();
    for (const auto& [name, counts] : suite_counts()) {
        suites[name] = {{"passed", counts.first}, {"failed", counts.second}};
    }
    j["suites"] = suites;
    nlohmann::json list = nlohmann::json::array();
    for (const auto& c : checks) {
        list.push_back({{"suite", c.suite}, {"property", c.property}, {"passed", c.passed},
                        {"detail", c.detail}});
    }
    j["checks"] = list;
    return j;
}

ValidationReport run_validation(ValidationLevel level, Fault fault) {
    const auto start = std::chrono::steady_clock::now();
    ValidationReport report;
    report.level = level;
    Runner run(report);
    const bool full = level == ValidationLevel::Full;
    chain_suite(run, full);
    charpoly_suite(run, full);
    decay_suite(run, full, fault);
    sis_suite(run, full);
    oracle_suite(run, full);
    special_suite(run, full);
    report.seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return report;
}

}  // namespace sisdecay
