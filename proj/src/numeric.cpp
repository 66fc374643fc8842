#include "sisdecay/numeric.hpp"

#include "sisdecay/errors.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cctype>
#include <cmath>
#include <limits>

namespace sisdecay {

const char* to_string(ErrorKind kind) {
    switch (kind) {
        case ErrorKind::InvalidParameter: return "invalid-parameter";
        case ErrorKind::ReducibleChain: return "reducible-chain";
        case ErrorKind::UnsupportedStructure: return "unsupported-structure";
        case ErrorKind::DegenerateCoefficients: return "degenerate-coefficients";
        case ErrorKind::InsufficientCoefficients: return "insufficient-coefficients";
        case ErrorKind::InconsistentCoefficients: return "inconsistent-coefficients";
        case ErrorKind::PrecisionExhausted: return "precision-exhausted";
        case ErrorKind::DivergentIntegral: return "divergent-integral";
        case ErrorKind::DomainError: return "domain-error";
        case ErrorKind::QuadratureFailure: return "quadrature-failure";
        case ErrorKind::FitUnreliable: return "fit-unreliable";
    }
    return "unknown";
}

namespace {

unsigned bits_to_digits10(unsigned bits) {
    // Boost sizes MPFR mantissas from decimal digits; round up so the
    // allocated mantissa is never narrower than requested.
    return static_cast<unsigned>(std::ceil(bits * 0.30102999566398120)) + 1;
}

}  // namespace

PrecisionCtx PrecisionCtx::bits(unsigned b) {
    if (b < 64) {
        throw Error(ErrorKind::InvalidParameter, "mantissa_bits must be >= 64");
    }
    return {PrecisionMode::Float, b};
}

Real PrecisionCtx::default_tol() const {
    ScopedPrecision guard(mantissa_bits);
    return bmp::ldexp(Real(1), -static_cast<int>(mantissa_bits / 2));
}

ScopedPrecision::ScopedPrecision(unsigned bits) : saved_digits10_(Real::default_precision()) {
    Real::default_precision(bits_to_digits10(bits));
}

ScopedPrecision::~ScopedPrecision() { Real::default_precision(saved_digits10_); }

unsigned current_precision_bits() {
    Real probe(0);
    return static_cast<unsigned>(mpfr_get_prec(probe.backend().data()));
}

Rational parse_rational(std::string_view text) {
    auto fail = [&]() -> Rational {
        throw Error(ErrorKind::InvalidParameter, "not a number: '" + std::string(text) + "'");
    };
    std::string s(text);
    s.erase(std::remove_if(s.begin(), s.end(), [](unsigned char c) { return std::isspace(c); }),
            s.end());
    if (s.empty()) return fail();

    if (auto slash = s.find('/'); slash != std::string::npos) {
        Rational num = parse_rational(s.substr(0, slash));
        Rational den = parse_rational(s.substr(slash + 1));
        if (den == 0) return fail();
        return num / den;
    }

    std::size_t pos = 0;
    bool negative = false;
    if (s[pos] == '+' || s[pos] == '-') {
        negative = s[pos] == '-';
        ++pos;
    }
    std::string digits;
    int frac_digits = 0;
    bool seen_point = false;
    bool any_digit = false;
    for (; pos < s.size(); ++pos) {
        char c = s[pos];
        if (std::isdigit(static_cast<unsigned char>(c))) {
            digits.push_back(c);
            any_digit = true;
            if (seen_point) ++frac_digits;
        } else if (c == '.' && !seen_point) {
            seen_point = true;
        } else {
            break;
        }
    }
    if (!any_digit) return fail();

    long exponent = 0;
    if (pos < s.size()) {
        if (s[pos] != 'e' && s[pos] != 'E') return fail();
        ++pos;
        std::string exp_text = s.substr(pos);
        if (exp_text.empty()) return fail();
        std::size_t used = 0;
        try {
            exponent = std::stol(exp_text, &used);
        } catch (const std::exception&) {
            return fail();
        }
        if (used != exp_text.size() || std::abs(exponent) > 100000) return fail();
    }

    // Integer("025") would read octal.
    digits.erase(0, std::min(digits.find_first_not_of('0'), digits.size() - 1));
    Integer mantissa(digits);
    long scale = exponent - frac_digits;
    Integer ten_pow = bmp::pow(Integer(10), static_cast<unsigned>(std::abs(scale)));
    Rational value = scale >= 0 ? Rational(mantissa * ten_pow) : Rational(mantissa, ten_pow);
    return negative ? Rational(-value) : value;
}

Rational harmonic(unsigned n) {
    Rational h = 0;
    for (unsigned k = 1; k <= n; ++k) h += Rational(1, k);
    return h;
}

std::string format_decimal(double v, int digits) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    return fmt::format("{:.{}g}", v, digits);
}

std::string format_decimal(const Real& v, int digits) {
    double d = v.convert_to<double>();
    if (std::isfinite(d) && (d == 0 ? v == 0 : std::fabs(d) >= std::numeric_limits<double>::min())) {
        return format_decimal(d, digits);
    }
    return v.str(digits, std::ios_base::scientific);
}

std::string format_rational(const Rational& q) { return q.str(); }

}  // namespace sisdecay
