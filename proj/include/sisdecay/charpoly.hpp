#pragma once

// Coefficients c_k(j) of the polynomials rho_j(xi) = sum_k c_k(j) xi^k that
// generate the eigenvector components of a ladder, and the characteristic
// coefficients f_k derived from them.
//
// rho_j(xi) = det(xi I - G_j), with G_j the leading j x j block of the
// generator (or of P - I). The three-term recursion is
//   rho_{j+1} = (p_j + q_j + xi) rho_j - q_j p_{j-1} rho_{j-1}.

#include "sisdecay/chain.hpp"
#include "sisdecay/errors.hpp"
#include "sisdecay/numeric.hpp"

#include <algorithm>
#include <cstddef>
#include <limits>
#include <vector>

namespace sisdecay {

inline constexpr std::size_t kAllCoefficients = std::numeric_limits<std::size_t>::max();

/// c_k(j) for 0 <= j <= N+1 and k <= min(j, kmax).
template <Scalar T>
class CoeffTable {
public:
    CoeffTable(std::vector<std::vector<T>> rows, std::size_t kmax)
        : rows_(std::move(rows)), kmax_(kmax) {}

    [[nodiscard]] std::size_t max_j() const { return rows_.size() - 1; }
    [[nodiscard]] std::size_t kmax() const { return kmax_; }

    /// c_k(j); zero for k > j. Throws InsufficientCoefficients past kmax.
    [[nodiscard]] T at(std::size_t k, std::size_t j) const {
        if (j >= rows_.size()) {
            throw Error(ErrorKind::InvalidParameter, "row index beyond N+1");
        }
        if (k > j) return T(0);
        if (k > kmax_) {
            throw Error(ErrorKind::InsufficientCoefficients, "coefficient beyond kmax");
        }
        return rows_[j][k];
    }

    [[nodiscard]] const std::vector<T>& row(std::size_t j) const { return rows_.at(j); }

private:
    std::vector<std::vector<T>> rows_;
    std::size_t kmax_;
};

/// Fills the table with the b/c split of the recursion:
///   b_k(j+1) = q_j b_k(j) + c_{k-1}(j),  c_k(j+1) = p_j c_k(j) + b_k(j+1).
template <Scalar T>
CoeffTable<T> coefficient_table(const RateLadder& ladder, std::size_t kmax = kAllCoefficients);

/// Same table from the second-order recursion; used as a cross-check.
template <Scalar T>
CoeffTable<T> coefficient_table_second_order(const RateLadder& ladder,
                                             std::size_t kmax = kAllCoefficients);

/// Closed-form c_1(j), 1 <= j <= N+1. Needs q_0 = 0 (an unrestricted ladder).
Rational c1_explicit(const RateLadder& ladder, std::size_t j);
/// Closed-form c_2(j), 2 <= j <= N+1. Needs q_0 = 0.
Rational c2_explicit(const RateLadder& ladder, std::size_t j);

/// The band t_m(j) = c_{j-m}(j) for j = m..N+1, built by the summed
/// difference equation from t_0 = 1 and t_1(j) = sum_{l<j}(p_l + q_l).
std::vector<Rational> diag_band_coeffs(const RateLadder& ladder, std::size_t m);

template <Scalar T>
struct CharCoeffs {
    std::vector<T> f;          // f_0..f_kmax (or f_0..f_N when complete)
    std::size_t n = 0;         // degree N
    bool complete = false;
    bool restricted = false;

    /// f_k, zero for k > N; throws InsufficientCoefficients when k was not computed.
    [[nodiscard]] T get(std::size_t k) const {
        if (k > n) return T(0);
        if (k >= f.size()) {
            throw Error(ErrorKind::InsufficientCoefficients, "f_k beyond the computed range");
        }
        return f[k];
    }

    /// c_{k+1}(N+1) = f_k / f_N.
    [[nodiscard]] T top_coefficient(std::size_t k) const { return get(k) / get(n); }
};

/// f_k = sum_{j=k}^{N} c_k(j) / prod_{m<j} q_{m+1}.
///
/// A transient-restricted ladder is evaluated on its augmented form, whose
/// f_0 is exactly 1; the polynomial sum f_k xi^k then vanishes exactly on
/// the sub-generator spectrum.
template <Scalar T>
CharCoeffs<T> char_coeffs(const RateLadder& ladder, std::size_t kmax = kAllCoefficients);

/// Horner evaluation of rho_j(xi).
template <Scalar T>
T rho_eval(const CoeffTable<T>& table, std::size_t j, const T& xi) {
    if (j > table.max_j()) throw Error(ErrorKind::InvalidParameter, "rho index beyond N+1");
    if (table.kmax() < j) {
        throw Error(ErrorKind::InsufficientCoefficients, "rho_j needs the table filled to k = j");
    }
    const auto& r = table.row(j);
    T acc = r.back();
    for (std::size_t k = r.size() - 1; k-- > 0;) acc = acc * xi + r[k];
    return acc;
}

/// rho_0..rho_{N+1} at xi by the three-term recursion, without a table.
template <Scalar T>
std::vector<T> rho_sequence(const RateLadder& ladder, const T& xi);

template <Scalar T>
struct NewtonSums {
    T sum_z;
    T sum_z2;
    T sum_inv_z;
    T sum_inv_z2;
    T prod_neg_z;
};

template <Scalar T>
NewtonSums<T> newton_sums(const CharCoeffs<T>& coeffs);

// ---------------------------------------------------------------------------

template <Scalar T>
CoeffTable<T> coefficient_table(const RateLadder& ladder, std::size_t kmax) {
    const std::size_t top = ladder.last_state() + 1;
    kmax = std::min(kmax, top);
    std::vector<std::vector<T>> c(top + 1);
    c[0] = {T(1)};
    std::vector<T> b = {T(1)};
    for (std::size_t j = 0; j < top; ++j) {
        const T p = from_rational<T>(ladder.p(static_cast<std::ptrdiff_t>(j)));
        const T q = from_rational<T>(ladder.q(static_cast<std::ptrdiff_t>(j)));
        const std::size_t width = std::min(j + 1, kmax) + 1;
        std::vector<T> b_next(width, T(0));
        std::vector<T> c_next(width, T(0));
        for (std::size_t k = 0; k < width; ++k) {
            T bk = k < b.size() && k <= j ? T(q * b[k]) : T(0);
            if (k >= 1 && k - 1 < c[j].size()) bk += c[j][k - 1];
            b_next[k] = bk;
            T ck = k < c[j].size() ? T(p * c[j][k]) : T(0);
            c_next[k] = ck + bk;
        }
        b = std::move(b_next);
        c[j + 1] = std::move(c_next);
    }
    return CoeffTable<T>(std::move(c), kmax);
}

template <Scalar T>
CoeffTable<T> coefficient_table_second_order(const RateLadder& ladder, std::size_t kmax) {
    const std::size_t top = ladder.last_state() + 1;
    kmax = std::min(kmax, top);
    std::vector<std::vector<T>> c(top + 1);
    c[0] = {T(1)};
    for (std::size_t j = 0; j < top; ++j) {
        const auto sj = static_cast<std::ptrdiff_t>(j);
        const T sum = from_rational<T>(ladder.p(sj) + ladder.q(sj));
        const T cross = from_rational<T>(ladder.q(sj) * ladder.p(sj - 1));
        const std::size_t width = std::min(j + 1, kmax) + 1;
        std::vector<T> next(width, T(0));
        for (std::size_t k = 0; k < width; ++k) {
            T v(0);
            if (k < c[j].size() && k <= j) v += sum * c[j][k];
            if (j >= 1 && k < c[j - 1].size() && k <= j - 1) v -= cross * c[j - 1][k];
            if (k >= 1 && k - 1 < c[j].size()) v += c[j][k - 1];
            next[k] = v;
        }
        c[j + 1] = std::move(next);
    }
    return CoeffTable<T>(std::move(c), kmax);
}

template <Scalar T>
CharCoeffs<T> char_coeffs(const RateLadder& ladder, std::size_t kmax) {
    if (!ladder.is_restricted() && !ladder.is_irreducible()) {
        throw Error(ErrorKind::ReducibleChain,
                    "characteristic coefficients need an irreducible or restricted ladder");
    }
    const RateLadder full = ladder.augmented();
    const std::size_t n = full.last_state();
    const std::size_t kk = std::min(kmax, n);
    const auto table = coefficient_table<T>(full, kk);

    // inv_q[j] = 1 / prod_{m<j} q_{m+1}
    std::vector<T> inv_q(n + 1);
    Rational prod = 1;
    inv_q[0] = T(1);
    for (std::size_t j = 1; j <= n; ++j) {
        prod *= full.q(static_cast<std::ptrdiff_t>(j));
        inv_q[j] = from_rational<T>(Rational(1) / prod);
    }

    CharCoeffs<T> out;
    out.n = n;
    out.complete = kk == n;
    out.restricted = ladder.is_restricted();
    out.f.assign(kk + 1, T(0));
    for (std::size_t k = 0; k <= kk; ++k) {
        T acc(0);
        for (std::size_t j = k; j <= n; ++j) acc += table.at(k, j) * inv_q[j];
        out.f[k] = acc;
    }
    return out;
}

template <Scalar T>
std::vector<T> rho_sequence(const RateLadder& ladder, const T& xi) {
    const std::size_t top = ladder.last_state() + 1;
    std::vector<T> rho(top + 1);
    rho[0] = T(1);
    for (std::size_t j = 0; j < top; ++j) {
        const auto sj = static_cast<std::ptrdiff_t>(j);
        T next = (from_rational<T>(ladder.p(sj) + ladder.q(sj)) + xi) * rho[j];
        if (j >= 1) next -= from_rational<T>(ladder.q(sj) * ladder.p(sj - 1)) * rho[j - 1];
        rho[j + 1] = next;
    }
    return rho;
}

template <Scalar T>
NewtonSums<T> newton_sums(const CharCoeffs<T>& coeffs) {
    if (!coeffs.complete) {
        throw Error(ErrorKind::InsufficientCoefficients, "newton_sums needs f_0..f_N");
    }
    const std::size_t n = coeffs.n;
    const T f0 = coeffs.get(0);
    const T fn = coeffs.get(n);
    if (f0 == T(0) || fn == T(0)) {
        throw Error(ErrorKind::DegenerateCoefficients, "f_0 or f_N vanishes");
    }
    const T fn1 = n >= 1 ? coeffs.get(n - 1) : T(0);
    const T fn2 = n >= 2 ? coeffs.get(n - 2) : T(0);
    const T r = fn1 / fn;
    const T s = coeffs.get(1) / f0;
    NewtonSums<T> out;
    out.sum_z = -r;
    out.sum_z2 = r * r - 2 * fn2 / fn;
    out.sum_inv_z = -s;
    out.sum_inv_z2 = s * s - 2 * coeffs.get(2) / f0;
    out.prod_neg_z = f0 / fn;
    return out;
}

}  // namespace sisdecay
