#pragma once

// Number types shared by every module.
//
// Rates enter as exact rationals. Anything that needs square roots, logs or
// bisection runs on Real, an MPFR float whose precision is chosen at run time
// through PrecisionCtx / ScopedPrecision. Most algorithms are templates over
// the scalar so the same code runs on Rational, Real and double.

#include <boost/multiprecision/gmp.hpp>
#include <boost/multiprecision/mpfr.hpp>

#include <cmath>
#include <concepts>
#include <cstdint>
#include <string>
#include <string_view>
#include <type_traits>

namespace sisdecay {

namespace bmp = boost::multiprecision;

using Rational = bmp::number<bmp::gmp_rational, bmp::et_off>;
using Integer = bmp::number<bmp::gmp_int, bmp::et_off>;
using Real = bmp::number<bmp::mpfr_float_backend<0>, bmp::et_off>;

template <class T>
inline constexpr bool is_rational_v = std::is_same_v<T, Rational>;

template <class T>
inline constexpr bool is_real_v = std::is_same_v<T, Real>;

/// Scalars that support sqrt/log/exp (everything but Rational).
template <class T>
concept FloatingScalar = std::floating_point<T> || is_real_v<T>;

template <class T>
concept Scalar = FloatingScalar<T> || is_rational_v<T>;

enum class PrecisionMode { RationalExact, Float };

struct PrecisionCtx {
    PrecisionMode mode = PrecisionMode::Float;
    unsigned mantissa_bits = 128;

    static PrecisionCtx exact() { return {PrecisionMode::RationalExact, 128}; }
    static PrecisionCtx bits(unsigned b);

    /// Default bisection tolerance, 2^(-mantissa_bits/2).
    [[nodiscard]] Real default_tol() const;
};

/// Sets the MPFR default precision for the lifetime of the guard.
///
/// The default is process-global, so concurrent work must share a single
/// precision (sweeps select it once before spawning workers).
class ScopedPrecision {
public:
    explicit ScopedPrecision(unsigned bits);
    ~ScopedPrecision();
    ScopedPrecision(const ScopedPrecision&) = delete;
    ScopedPrecision& operator=(const ScopedPrecision&) = delete;

private:
    unsigned saved_digits10_;
};

/// Current MPFR working precision in bits.
unsigned current_precision_bits();

template <class T>
T from_rational(const Rational& q) {
    if constexpr (is_rational_v<T>) {
        return q;
    } else if constexpr (is_real_v<T>) {
        return Real(q);
    } else {
        return q.template convert_to<T>();
    }
}

template <class T>
double to_double(const T& v) {
    if constexpr (std::is_arithmetic_v<T>) {
        return static_cast<double>(v);
    } else {
        return v.template convert_to<double>();
    }
}

template <class T>
T abs_value(const T& v) {
    return v < T(0) ? T(-v) : v;
}

template <FloatingScalar T>
T sqrt_value(const T& v) {
    using std::sqrt;
    return sqrt(v);
}

/// Parses "3", "-0.25", "1e-5", "2/3" into an exact rational.
/// Throws InvalidParameter on malformed input.
Rational parse_rational(std::string_view text);

/// Harmonic number H_n as an exact rational.
Rational harmonic(unsigned n);

/// Decimal with `digits` significant digits ("%.17g" style for values in
/// double range, MPFR scientific otherwise).
std::string format_decimal(const Real& v, int digits = 17);
std::string format_decimal(double v, int digits = 17);

/// "p/q" (or "p" for integers).
std::string format_rational(const Rational& q);

}  // namespace sisdecay
