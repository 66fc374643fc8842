#include "sisdecay/sis.hpp"

#include "sisdecay/errors.hpp"
#include "sisdecay/special.hpp"

#include <boost/math/constants/constants.hpp>

#include <algorithm>
#include <cmath>

namespace sisdecay {

namespace {

// a! / b! for a >= b >= 0.
Integer fact_ratio(long a, long b) {
    Integer r = 1;
    for (long i = b + 1; i <= a; ++i) r *= i;
    return r;
}

Integer binomial(long n, long k) {
    if (k < 0 || k > n) return 0;
    k = std::min(k, n - k);
    Integer r = 1;
    for (long i = 1; i <= k; ++i) r = r * (n - k + i) / i;
    return r;
}

// prod_{i=from}^{to} (eps* + tau i); empty product is 1.
Rational shifted_product(const Rational& eps_star, const Rational& tau, long from, long to) {
    Rational r = 1;
    for (long i = from; i <= to; ++i) r *= eps_star + tau * i;
    return r;
}

Rational power(const Rational& base, long e) {
    Rational r = 1;
    for (long i = 0; i < e; ++i) r *= base;
    return r;
}

void require_positive_delta(const Rational& delta) {
    if (delta <= 0) throw Error(ErrorKind::InvalidParameter, "delta must be > 0");
}

}  // namespace

Rational f0_eps(const EpsSisParams& params) {
    const long n = params.n;
    const Rational tau = params.tau();
    const Rational es = params.eps_star();
    Rational total = 0;
    Rational rising = 1;  // tau^k (eps*/tau)_k
    for (long k = 0; k <= n; ++k) {
        if (k > 0) rising *= es + tau * (k - 1);
        total += Rational(binomial(n, k)) * rising;
    }
    return total;
}

Rational f1_eps(const EpsSisParams& params) {
    const long n = params.n;
    const Rational tau = params.tau();
    const Rational es = params.eps_star();
    Rational total = 0;
    for (long j = 1; j <= n; ++j) {
        Rational inner = 0;
        for (long r = 0; r <= j - 1; ++r) {
            const Rational upper = shifted_product(es, tau, j - r, j - 1);
            const Rational weight(binomial(n - j + r, r), binomial(j - 1, r));
            for (long k = 0; k <= j - 1 - r; ++k) {
                inner += weight * Rational(binomial(n, j - 1 - r - k)) * upper *
                         shifted_product(es, tau, 0, j - 2 - r - k);
            }
        }
        total += inner / j;
    }
    return total / params.delta;
}

Rational f2_eps0(const EpsSisParams& params) {
    const long n = params.n;
    if (n < 2) return 0;
    const Rational tau = params.tau();
    const Rational d2 = params.delta * params.delta;

    Rational t2 = 0;
    for (long j = 3; j <= n; ++j) {
        t2 += Rational(fact_ratio(n - 2, n - j)) * power(tau, j - 2) / j;
    }

    Rational t3 = 0;
    for (long j = 3; j <= n; ++j) {
        for (long k = 3; k <= j; ++k) {
            t3 += Rational(fact_ratio(n - k, n - j)) * power(tau, j - k) / j;
        }
    }

    Rational t4 = 0;
    for (long j = 3; j <= n; ++j) {
        for (long k = 3; k <= j; ++k) {
            for (long s = 1; s <= k - 3; ++s) {
                for (long m = 0; m <= k - s - 1; ++m) {
                    const Rational num(fact_ratio(n - (k - s - m), n - (k - s)) *
                                       fact_ratio(n - k, n - j));
                    t4 += num * power(tau, j - k + m) / (j * (k - s));
                }
            }
        }
    }

    const Rational t3_scale = (tau * (n - 1) + 3) / 2;
    return (Rational(1, 2) + t2 + t3_scale * t3 + t4) / d2;
}

Rational F_direct(unsigned n, const Rational& tau, const Rational& delta) {
    require_positive_delta(delta);
    if (n < 1 || tau < 0) throw Error(ErrorKind::InvalidParameter, "need N >= 1 and tau >= 0");
    Rational x = 1;
    Rational total = 0;
    for (unsigned j = 1; j <= n; ++j) {
        total += x / j;
        x = x * Rational(n - j) * tau + 1;
    }
    return total / delta;
}

Rational F_double_sum(unsigned n, const Rational& tau, const Rational& delta) {
    require_positive_delta(delta);
    const long nn = n;
    Rational total = 0;
    for (long j = 1; j <= nn; ++j) {
        for (long r = 0; r <= j - 1; ++r) {
            total += Rational(fact_ratio(nn - j + r, nn - j)) * power(tau, r) / j;
        }
    }
    return total / delta;
}

TaylorCoeffs taylor_coeffs(unsigned n) {
    if (n < 1) throw Error(ErrorKind::InvalidParameter, "N must be >= 1");
    const long nn = n;
    TaylorCoeffs out;
    for (long j = 1; j <= nn; ++j) {
        Rational b = 0;
        for (long k = j; k <= nn; ++k) b += Rational(fact_ratio(nn - k + j - 1, nn - k)) / k;
        out.B.push_back(b);
    }
    return out;
}

TaylorCoeffs taylor_coeffs_alternating(unsigned n) {
    if (n < 1) throw Error(ErrorKind::InvalidParameter, "N must be >= 1");
    const long nn = n;
    TaylorCoeffs out;
    for (long j = 1; j <= nn; ++j) {
        Rational c = 0;
        for (long k = j; k <= nn; ++k) {
            Rational term(binomial(nn, k) * fact_ratio(k - j, 0), fact_ratio(k, 0));
            c += (k - j) % 2 == 0 ? term : Rational(-term);
        }
        const Rational g(fact_ratio(j - 1, 0));
        out.B.push_back(g * g * c);
    }
    return out;
}

TaylorCoeffs taylor_coeffs_recursive(unsigned n) {
    if (n < 1) throw Error(ErrorKind::InvalidParameter, "N must be >= 1");
    std::vector<Rational> prev;  // B_j(M-1), j = 1..M-1
    std::vector<Rational> cur;
    for (long m = 1; m <= static_cast<long>(n); ++m) {
        cur.assign(static_cast<std::size_t>(m), 0);
        cur[0] = harmonic(static_cast<unsigned>(m));
        for (long j = 1; j <= m - 1; ++j) {
            const auto idx = static_cast<std::size_t>(j);
            const Rational older = idx < prev.size() ? prev[idx] : Rational(0);
            cur[idx] = older + j * cur[idx - 1] - Rational(fact_ratio(m - 1, m - j));
        }
        prev = cur;
    }
    return {cur};
}

Rational F_taylor(unsigned n, const Rational& tau, const Rational& delta) {
    require_positive_delta(delta);
    const auto coeffs = taylor_coeffs(n);
    Rational acc = 0;
    for (auto it = coeffs.B.rbegin(); it != coeffs.B.rend(); ++it) acc = acc * tau + *it;
    return acc / delta;
}

double L_k(double tau, unsigned k) {
    if (!(tau > 0)) throw Error(ErrorKind::DomainError, "L_k needs tau > 0");
    if (k < 1) throw Error(ErrorKind::InvalidParameter, "L_k needs k >= 1");
    if (k == 1) {
        auto ratio = [](double u) {
            const double d = u - 1;
            if (std::fabs(d) < 1e-4) return 1 - d / 2 + d * d / 3 - d * d * d / 4;
            return std::log(u) / d;
        };
        // log u at the origin: tanh-sinh copes with it directly.
        auto head = [&](double u) { return ratio(u) * std::exp(-u / tau); };
        auto tail = [&](double u) { return ratio(u) * std::exp(-u / tau); };
        return integrate_endpoint_singular(head, 0.0, 1.0).value + integrate_to_infinity(tail, 1.0).value;
    }
    const double shift = 1 / tau;
    auto f = [&](double w) {
        return exp_integral_scaled<double>(k, w) / std::pow(w + shift, static_cast<double>(k));
    };
    return integrate_to_infinity(f, 0.0).value;
}

double F_expint(unsigned n, double tau, double beta) {
    if (n < 1 || !(beta > 0)) throw Error(ErrorKind::InvalidParameter, "need N >= 1 and beta > 0");
    if (!(tau * n > 1)) throw Error(ErrorKind::DomainError, "the exponential-integral form needs tau > 1/N");
    if (n > 100) {
        throw Error(ErrorKind::PrecisionExhausted, "N!/(N+1-k)! weights overflow the double range");
    }
    double sum = 0;
    for (unsigned k = 1; k <= n + 1; ++k) {
        double weight = 1;  // N!/(N+1-k)!
        for (unsigned i = n + 2 - k; i <= n; ++i) weight *= i;
        sum += weight * L_k(tau, k);
    }
    const double shift = 1 / tau;
    auto g = [&](double w) { return exp_integral_scaled<double>(n + 1, w) / (w + shift); };
    const double tail = integrate_to_infinity(g, 0.0).value;
    const double value = (sum - tail) / beta;
    if (!std::isfinite(value)) {
        throw Error(ErrorKind::PrecisionExhausted, "exponential-integral form overflowed");
    }
    return value;
}

Real F_asymptotic(unsigned n, double x, double delta) {
    if (!(x > 1)) throw Error(ErrorKind::DomainError, "the asymptotic form needs x > 1");
    if (n < 1 || !(delta > 0)) throw Error(ErrorKind::InvalidParameter, "need N >= 1 and delta > 0");
    const Real rx(x);
    const Real nn(n);
    const Real two_pi = 2 * boost::math::constants::pi<Real>();
    const Real expo = nn * (bmp::log(rx) + 1 / rx - 1);
    return rx * bmp::sqrt(two_pi) / ((rx - 1) * (rx - 1)) * bmp::exp(expo) / bmp::sqrt(nn) /
           Real(delta);
}

const char* to_string(Regime regime) {
    switch (regime) {
        case Regime::Below: return "below";
        case Regime::At: return "at";
        case Regime::Above: return "above";
    }
    return "unknown";
}

namespace {

Regime classify(const Rational& x, double band) {
    const Rational d(band);
    if (x > 1 + d) return Regime::Above;
    if (abs_value(Rational(x - 1)) <= d) return Regime::At;
    return Regime::Below;
}

}  // namespace

RegimeReport decay_regime(unsigned n, const Rational& x, const Rational& delta, double band) {
    if (n < 2 || x <= 0) throw Error(ErrorKind::InvalidParameter, "need N >= 2 and x > 0");
    require_positive_delta(delta);
    RegimeReport out;
    out.regime = classify(x, band);
    switch (out.regime) {
        case Regime::Above:
            out.leading_estimate = Real(Rational(1 / F_direct(n, x / n, delta)));
            out.order = "1/F(tau)";
            break;
        case Regime::At:
            out.leading_estimate = Real(Rational(5 * delta / (4 * Rational(n))));
            out.order = "5 delta/(4N)";
            break;
        case Regime::Below:
            out.order = "1/log N";
            break;
    }
    return out;
}

LifetimeReport mean_absorption_time(const EpsSisParams& params) {
    if (params.eps != 0) {
        throw Error(ErrorKind::InvalidParameter, "the absorption time needs eps = 0");
    }
    const unsigned n = params.n;
    const Rational tau = params.tau();
    LifetimeReport out;
    out.F_direct = F_direct(n, tau, params.delta);
    out.F_taylor = F_taylor(n, tau, params.delta);
    out.E_T = out.F_direct;
    out.regime = classify(params.x(), 1e-6);

    const double tau_d = tau.convert_to<double>();
    const double x_d = params.x().convert_to<double>();
    const double delta_d = params.delta.convert_to<double>();
    if (tau_d * n > 1 && n <= 40) {
        try {
            out.F_expint = F_expint(n, tau_d, params.beta.convert_to<double>());
        } catch (const Error& e) {
            out.notes.emplace_back(std::string("F_expint unavailable: ") + e.what());
        }
    } else {
        out.notes.emplace_back("F_expint needs tau > 1/N and N <= 40");
    }
    if (x_d > 1) {
        const double v = F_asymptotic(n, x_d, delta_d).convert_to<double>();
        if (std::isfinite(v)) {
            out.F_asymptotic = v;
        } else {
            out.notes.emplace_back("F_asymptotic outside the double range");
        }
    } else {
        out.notes.emplace_back("F_asymptotic needs x > 1");
    }

    std::vector<double> values{out.F_direct.convert_to<double>(), out.F_taylor.convert_to<double>()};
    if (out.F_expint) values.push_back(*out.F_expint);
    if (out.F_asymptotic) values.push_back(*out.F_asymptotic);
    for (std::size_t a = 0; a < values.size(); ++a) {
        for (std::size_t b = a + 1; b < values.size(); ++b) {
            const double gap = std::fabs(values[a] - values[b]) /
                               std::max(std::fabs(values[a]), std::fabs(values[b]));
            out.max_pairwise_relative_gap = std::max(out.max_pairwise_relative_gap, gap);
        }
    }
    return out;
}

}  // namespace sisdecay
