#pragma once

// Exponential integrals E_n(x) and adaptive quadrature helpers.

#include "sisdecay/errors.hpp"
#include "sisdecay/numeric.hpp"

#include <boost/math/constants/constants.hpp>

#include <cmath>
#include <functional>
#include <limits>

namespace sisdecay {

namespace detail {

template <FloatingScalar T>
T epsilon_of() {
    if constexpr (std::floating_point<T>) {
        return std::numeric_limits<T>::epsilon();
    } else {
        return bmp::ldexp(T(1), 1 - static_cast<int>(current_precision_bits()));
    }
}

// Power series, valid for 0 < x <= 1.
template <FloatingScalar T>
T expint_series(unsigned n, const T& x) {
    using std::log;
    const T eps = epsilon_of<T>();
    const T euler = boost::math::constants::euler<T>();
    T ans = n == 1 ? T(-log(x) - euler) : T(T(1) / T(n - 1));
    T fact(1);
    for (unsigned i = 1;; ++i) {
        fact *= -x / T(i);
        T del;
        if (i != n - 1) {
            del = -fact / T(static_cast<int>(i) - static_cast<int>(n - 1));
        } else {
            T psi = -euler;
            for (unsigned ii = 1; ii < n; ++ii) psi += T(1) / T(ii);
            del = fact * (-log(x) + psi);
        }
        ans += del;
        if (abs_value(del) < abs_value(ans) * eps) break;
        if (i > 100000) throw Error(ErrorKind::QuadratureFailure, "E_n series did not converge");
    }
    return ans;
}

// Modified Lentz continued fraction for e^x E_n(x), valid for x > 1.
template <FloatingScalar T>
T expint_scaled_cf(unsigned n, const T& x) {
    const T eps = epsilon_of<T>();
    const T tiny = eps * eps * eps;
    T b = x + T(n);
    T c = T(1) / tiny;
    T d = T(1) / b;
    T h = d;
    for (unsigned i = 1;; ++i) {
        const T a = -T(i) * T(n - 1 + i);
        b += T(2);
        d = T(1) / (a * d + b);
        c = b + a / c;
        const T del = c * d;
        h *= del;
        if (abs_value(T(del - T(1))) <= eps) break;
        if (i > 100000) {
            throw Error(ErrorKind::QuadratureFailure, "E_n continued fraction did not converge");
        }
    }
    return h;
}

}  // namespace detail

/// E_n(x) = int_1^inf e^{-xt} t^{-n} dt for n >= 1, x >= 0 (x = 0 needs n >= 2).
///
/// Each order is evaluated directly (series below x = 1, continued fraction
/// above); upward recursion in n multiplies errors by x/k per step, so it
/// breaks down for large x.
template <FloatingScalar T>
T exp_integral(unsigned n, const T& x) {
    using std::exp;
    if (n < 1) throw Error(ErrorKind::InvalidParameter, "E_n needs n >= 1");
    if (x < T(0)) throw Error(ErrorKind::DomainError, "E_n needs x >= 0");
    if (x == T(0)) {
        if (n == 1) throw Error(ErrorKind::DivergentIntegral, "E_1(0) diverges");
        return T(1) / T(n - 1);
    }
    if (x > T(1)) return exp(-x) * detail::expint_scaled_cf(n, x);
    return detail::expint_series(n, x);
}

/// e^x E_n(x), finite for every x > 0 without overflow.
template <FloatingScalar T>
T exp_integral_scaled(unsigned n, const T& x) {
    using std::exp;
    if (x > T(1)) {
        if (n < 1) throw Error(ErrorKind::InvalidParameter, "E_n needs n >= 1");
        return detail::expint_scaled_cf(n, x);
    }
    return exp(x) * exp_integral(n, x);
}

struct QuadResult {
    double value = 0;
    double error = 0;
};

/// Adaptive 15-point Gauss-Kronrod on [a, b]. Throws QuadratureError when
/// the error estimate exceeds tol * max(1e-300, |integral|) (or tol when
/// absolute is set).
QuadResult integrate(const std::function<double(double)>& f, double a, double b,
                     double tol = 1e-10, bool absolute = false);

/// Tanh-sinh on [a, b] for integrands with integrable endpoint singularities.
QuadResult integrate_endpoint_singular(const std::function<double(double)>& f, double a, double b,
                                      double tol = 1e-10);

/// Same as integrate on [a, inf) through u = a + t/(1 - t), t in [0, 1).
QuadResult integrate_to_infinity(const std::function<double(double)>& f, double a,
                                 double tol = 1e-10, bool absolute = false);

}  // namespace sisdecay
