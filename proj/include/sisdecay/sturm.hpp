#pragma once

// Index-based bisection on a symmetric tridiagonal matrix.

#include "sisdecay/chain.hpp"
#include "sisdecay/numeric.hpp"

#include <cstddef>
#include <limits>

namespace sisdecay {

template <Scalar T>
struct Bracket {
    T lo;
    T hi;
    std::size_t iterations = 0;
};

/// Pivot guard for the Sturm recurrence at scalar T.
template <Scalar T>
T sturm_pivmin(const SymTridiag<T>& sym) {
    T big(1);
    for (const auto& e : sym.offdiag_sq) {
        if (e > big) big = e;
    }
    if constexpr (std::floating_point<T>) {
        return std::numeric_limits<T>::min() * big;
    } else if constexpr (is_real_v<T>) {
        const auto bits = static_cast<long>(current_precision_bits());
        return bmp::ldexp(Real(1), static_cast<int>(-4 * bits)) * big;
    } else {
        Rational tiny(Integer(1), Integer(1) << 400);
        return tiny * big;
    }
}

/// Generator-form Sturm matrix of any ladder: diag -(p_j + q_j) and
/// offdiag_sq p_{i-1} q_i. Needs no irreducibility; the square-root fields
/// stay empty.
template <Scalar T>
SymTridiag<T> sturm_matrix(const RateLadder& ladder) {
    SymTridiag<T> out;
    const std::size_t n = ladder.last_state();
    for (std::size_t j = 0; j <= n; ++j) {
        const auto sj = static_cast<std::ptrdiff_t>(j);
        out.diag.push_back(from_rational<T>(-(ladder.p(sj) + ladder.q(sj))));
        if (j > 0) out.offdiag_sq.push_back(from_rational<T>(ladder.p(sj - 1) * ladder.q(sj)));
    }
    return out;
}

/// Midpoint of a bracket with lo < hi. When both ends share a sign and are
/// more than a factor 4 apart the geometric mean is used, so brackets that
/// span many decades shrink in O(log log) steps.
template <Scalar T>
T bracket_midpoint(const T& lo, const T& hi) {
    if constexpr (FloatingScalar<T>) {
        if (hi < T(0) && lo < 4 * hi) return -sqrt_value(T(lo * hi));
        if (lo > T(0) && hi > 4 * lo) return sqrt_value(T(lo * hi));
    }
    return (lo + hi) / 2;
}

/// Narrows [lo, hi] onto the eigenvalue with ascending index `index` (0-based).
/// Requires count_below(lo) <= index < count_below(hi). Stops when the width
/// is at most max(rel_tol * min(|lo|,|hi|), abs_floor) or after max_iter steps.
template <Scalar T>
Bracket<T> bisect_eigenvalue(const SymTridiag<T>& sym, std::size_t index, T lo, T hi,
                             const T& rel_tol, const T& abs_floor, std::size_t max_iter = 4096) {
    const T pivmin = sturm_pivmin(sym);
    Bracket<T> out{lo, hi, 0};
    while (out.iterations < max_iter) {
        T scale = abs_value(out.lo) < abs_value(out.hi) ? abs_value(out.lo) : abs_value(out.hi);
        T width = out.hi - out.lo;
        if (width <= abs_floor || width <= rel_tol * scale) break;
        T mid = bracket_midpoint(out.lo, out.hi);
        if (!(mid > out.lo && mid < out.hi)) break;
        if (sym.count_below(mid, pivmin) > index) {
            out.hi = mid;
        } else {
            out.lo = mid;
        }
        ++out.iterations;
    }
    return out;
}

}  // namespace sisdecay
