#include "sisdecay/decay.hpp"

#include "sisdecay/sturm.hpp"

#include <algorithm>
#include <cmath>

namespace sisdecay {

namespace {

struct Target {
    std::size_t index;   // ascending, 0-based
    Rational first;      // f0/f1 > 0, so zeta <= -first
    Rational norm;       // 2 max(p_j + q_j), bounds |eigenvalue|
};

Target locate(const RateLadder& ladder) {
    if (!ladder.is_restricted() && !ladder.is_irreducible()) {
        throw Error(ErrorKind::ReducibleChain,
                    "exact zeta needs an irreducible ladder or a transient restriction");
    }
    const auto coeffs = char_coeffs<Rational>(ladder, 1);
    const Rational f0 = coeffs.get(0);
    const Rational f1 = coeffs.get(1);
    if (f0 <= 0 || f1 <= 0) {
        throw Error(ErrorKind::DegenerateCoefficients, "f_0 or f_1 is not positive");
    }
    const std::size_t n_eig = ladder.n_states();
    if (!ladder.is_restricted() && n_eig < 2) {
        throw Error(ErrorKind::InvalidParameter, "a single state has no decay parameter");
    }
    return {ladder.is_restricted() ? n_eig - 1 : n_eig - 2, f0 / f1, 2 * ladder.max_exit_rate()};
}

template <Scalar T>
Bracket<T> bisect_zeta(const RateLadder& ladder, const Target& target, const T& rel_tol,
                       const T& abs_floor) {
    // Counts only need the products p_{j-1} q_j, so zero rates inside a
    // restricted ladder (pure death) are fine.
    const auto sym = sturm_matrix<T>(ladder);
    const T pivmin = sturm_pivmin(sym);
    T lo = -from_rational<T>(target.norm) - T(1);
    // Stay a relative 2^-20 inside the first-order bound so the bracket end is
    // strictly above zeta even after rounding.
    T hi = -from_rational<T>(target.first) * (T(1) - T(1) / T(1 << 20));
    if (sym.count_below(lo, pivmin) != 0 || sym.count_below(hi, pivmin) != target.index + 1) {
        throw Error(ErrorKind::PrecisionExhausted,
                    "Sturm counts at the bracket ends are inconsistent at this precision");
    }
    return bisect_eigenvalue(sym, target.index, lo, hi, rel_tol, abs_floor);
}

}  // namespace

Real newton_bound(const Rational& f0, const Rational& f1, const Rational& f2) {
    if (f0 <= 0 || f1 <= 0) {
        throw Error(ErrorKind::DegenerateCoefficients, "Newton bound needs f_0, f_1 > 0");
    }
    const Rational a = f0 / f1;
    const Rational radicand = 1 - 2 * f2 / f0 * a * a;
    if (radicand <= 0) {
        throw Error(ErrorKind::InconsistentCoefficients,
                    "Newton radicand is not positive; the coefficients cannot come from a real spectrum");
    }
    return -Real(a) / bmp::sqrt(Real(radicand));
}

Real newton_bound(const CharCoeffs<Rational>& coeffs) {
    return newton_bound(coeffs.get(0), coeffs.get(1), coeffs.get(2));
}

unsigned required_precision(unsigned n, double x) {
    if (n < 1 || !(x > 0)) throw Error(ErrorKind::InvalidParameter, "need N >= 1 and x > 0");
    const double bits = std::ceil(n * std::log2(std::max(x, 2.0))) + 96;
    return std::max(128u, static_cast<unsigned>(bits));
}

ZetaResult exact_zeta_bracket(const RateLadder& ladder, const PrecisionCtx& ctx, const Real& tol) {
    const Target target = locate(ladder);
    const unsigned bits = ctx.mantissa_bits;
    ScopedPrecision guard(bits);
    if (tol < 0) throw Error(ErrorKind::InvalidParameter, "tolerance must be positive");
    const Real rel_tol = tol > 0 ? Real(tol) : ctx.default_tol();

    ZetaResult out;
    out.precision_bits = bits;
    if (ctx.mode == PrecisionMode::RationalExact) {
        const Rational rtol(rel_tol.convert_to<double>());
        const auto b = bisect_zeta<Rational>(ladder, target, rtol, Rational(0));
        out.lo = Real(b.lo);
        out.hi = Real(b.hi);
        out.value = Real(Rational((b.lo + b.hi) / 2));
        out.iterations = b.iterations;
        return out;
    }

    // Sturm counts are exact for a matrix within ~u |T| (N+1) of the input,
    // which is the absolute resolution of every located eigenvalue.
    const Real unit = bmp::ldexp(Real(1), 1 - static_cast<int>(bits));
    const Real floor = 8 * unit * Real(target.norm) * Real(ladder.n_states());
    if (floor >= Real(target.first) * bmp::ldexp(Real(1), -10)) {
        throw Error(ErrorKind::PrecisionExhausted,
                    "working precision of " + std::to_string(bits) +
                        " bits cannot separate zeta from the top of the spectrum");
    }
    const auto b = bisect_zeta<Real>(ladder, target, rel_tol, floor);
    out.lo = b.lo;
    out.hi = b.hi;
    out.value = (b.lo + b.hi) / 2;
    out.iterations = b.iterations;
    return out;
}

Real exact_zeta(const RateLadder& ladder, const PrecisionCtx& ctx, const Real& tol) {
    return exact_zeta_bracket(ladder, ctx, tol).value;
}

bool bound_ordering_holds(const Real& zeta_lo, const Real& newton, const Real& first) {
    return zeta_lo <= newton && newton <= first && first < 0;
}

DecayReport decay_report(const RateLadder& ladder, const PrecisionCtx& ctx) {
    DecayReport report;
    report.coeffs = char_coeffs<Rational>(ladder, 3);
    const auto zeta = exact_zeta_bracket(ladder, ctx);

    ScopedPrecision guard(ctx.mantissa_bits);
    report.precision_bits = ctx.mantissa_bits;
    report.zeta_exact = zeta.value;
    report.zeta_lo = zeta.lo;
    report.zeta_hi = zeta.hi;
    for (int order = 1; order <= 3; ++order) {
        const auto i = static_cast<std::size_t>(order - 1);
        report.zeta_lagrange_exact[i] = lagrange_zeta(report.coeffs, order);
        report.zeta_lagrange[i] = Real(report.zeta_lagrange_exact[i]);
    }
    report.zeta_first_bound = report.zeta_lagrange[0];
    report.zeta_newton_bound = newton_bound(report.coeffs);
    report.bound_ordering_ok =
        bound_ordering_holds(report.zeta_lo, report.zeta_newton_bound, report.zeta_first_bound);
    report.lagrange_ordering_ok = report.zeta_lagrange_exact[1] <= report.zeta_lagrange_exact[0];
    if (!report.bound_ordering_ok) report.warnings.emplace_back("bound ordering violated");

    const Rational l1 = report.zeta_lagrange_exact[0];
    const Rational step = report.zeta_lagrange_exact[1] - l1;
    if (abs_value(step) * 10 > abs_value(l1)) {
        report.warnings.emplace_back(
            "second-order Lagrange term exceeds 10% of the first; the series converges slowly here");
    }
    return report;
}

}  // namespace sisdecay
