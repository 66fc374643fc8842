#pragma once

// Decay parameter zeta: Lagrange approximations, the two analytic upper
// bounds and the exact value by Sturm bisection.

#include "sisdecay/chain.hpp"
#include "sisdecay/charpoly.hpp"
#include "sisdecay/errors.hpp"
#include "sisdecay/numeric.hpp"

#include <array>
#include <string>
#include <vector>

namespace sisdecay {

/// zeta by power-series inversion of sum f_k xi^k around xi = 0.
template <Scalar T>
T lagrange_zeta(const CharCoeffs<T>& coeffs, int order) {
    if (order < 1 || order > 3) {
        throw Error(ErrorKind::InvalidParameter, "Lagrange order must be 1, 2 or 3");
    }
    const T f0 = coeffs.get(0);
    const T f1 = coeffs.get(1);
    if (!(f0 > T(0)) || !(f1 > T(0))) {
        throw Error(ErrorKind::DegenerateCoefficients, "Lagrange series needs f_0, f_1 > 0");
    }
    const T a = f0 / f1;
    T zeta = -a;
    if (order >= 2) {
        const T b = coeffs.get(2) / f1;
        zeta -= b * a * a;
        if (order == 3) {
            const T c = coeffs.get(3) / f1;
            zeta += (c - 2 * b * b) * a * a * a;
        }
    }
    return zeta;
}

/// -(f0/f1) / sqrt(1 - (2 f2/f0)(f0/f1)^2).
Real newton_bound(const Rational& f0, const Rational& f1, const Rational& f2);
Real newton_bound(const CharCoeffs<Rational>& coeffs);

/// ceil(N log2(max(x, 2))) + 96, at least 128.
unsigned required_precision(unsigned n, double x);

struct ZetaResult {
    Real value;  // bracket midpoint
    Real lo;
    Real hi;
    unsigned precision_bits = 0;
    std::size_t iterations = 0;
};

/// Second-largest eigenvalue of the generator (or of P - I), or the largest
/// eigenvalue of a restricted sub-generator.
///
/// `tol` is a relative width target; zero selects 2^(-bits/2). Throws
/// PrecisionExhausted when the working precision cannot resolve zeta, using
/// |zeta| >= f0/f1 as the a-priori magnitude.
ZetaResult exact_zeta_bracket(const RateLadder& ladder, const PrecisionCtx& ctx,
                              const Real& tol = Real(0));
Real exact_zeta(const RateLadder& ladder, const PrecisionCtx& ctx, const Real& tol = Real(0));

/// ζ <= newton <= first < 0, judged on the certified lower end of the bracket.
bool bound_ordering_holds(const Real& zeta_lo, const Real& newton, const Real& first);

struct DecayReport {
    Real zeta_exact;
    Real zeta_lo;
    Real zeta_hi;
    std::array<Rational, 3> zeta_lagrange_exact;
    std::array<Real, 3> zeta_lagrange;
    Real zeta_first_bound;
    Real zeta_newton_bound;
    bool bound_ordering_ok = false;
    bool lagrange_ordering_ok = false;
    unsigned precision_bits = 0;
    CharCoeffs<Rational> coeffs;
    std::vector<std::string> warnings;
};

/// Computes f_0..f_3 exactly, then every estimator at ctx precision.
DecayReport decay_report(const RateLadder& ladder, const PrecisionCtx& ctx);

}  // namespace sisdecay
