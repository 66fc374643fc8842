#pragma once

// Closed forms for the epsilon-SIS process on the complete graph K_N.
//
// F(tau) is the mean time to absorption from the all-infected state when
// eps = 0. It is available four ways: the streaming double sum (exact), its
// Taylor series in tau (exact), a combination of exponential-integral
// quadratures (double, tau > 1/N) and a large-N asymptotic (x = N tau > 1).

#include "sisdecay/params.hpp"
#include "sisdecay/numeric.hpp"

#include <optional>
#include <string>
#include <vector>

namespace sisdecay {

/// 1/pi_0 = sum_k C(N,k) prod_{m<k}(tau m + eps*). Equals 1 when eps = 0.
Rational f0_eps(const EpsSisParams& params);

/// The triple-sum closed form for f_1; the Gamma ratios become the products
/// prod (eps* + tau i), so tau = 0 and eps = 0 need no special casing.
Rational f1_eps(const EpsSisParams& params);

/// The eps -> 0 limit of f_2 from its four-term closed form.
Rational f2_eps0(const EpsSisParams& params);

/// F(tau) through x_1 = 1, x_{j+1} = x_j (N-j) tau + 1, F = (1/delta) sum x_j/j.
Rational F_direct(unsigned n, const Rational& tau, const Rational& delta);

/// The literal double sum (1/delta) sum_j sum_{r<j} (N-j+r)!/(j (N-j)!) tau^r.
Rational F_double_sum(unsigned n, const Rational& tau, const Rational& delta);

struct TaylorCoeffs {
    std::vector<Rational> B;  // B[0] = B_1 ... B[N-1] = B_N
};

/// B_j = sum_{k=j}^N (N-k+j-1)! / ((N-k)! k).
TaylorCoeffs taylor_coeffs(unsigned n);
/// B_j = ((j-1)!)^2 sum_{k=j}^N C(N,k) (-1)^{k-j} (k-j)!/k!.
TaylorCoeffs taylor_coeffs_alternating(unsigned n);
/// Tables B_j(M) for M = 1..N from B_1(M) = H_M and
/// B_{j+1}(M) = B_{j+1}(M-1) + j B_j(M) - (M-1)!/(M-j)!.
TaylorCoeffs taylor_coeffs_recursive(unsigned n);

/// (1/delta) sum_j B_j tau^{j-1}; valid at tau = 0.
Rational F_taylor(unsigned n, const Rational& tau, const Rational& delta);

/// L_k(tau) = int_0^inf e^w E_k(w) / (w + 1/tau)^k dw.
double L_k(double tau, unsigned k);

/// The exponential-integral representation; needs tau > 1/N.
double F_expint(unsigned n, double tau, double beta);

/// (1/delta) x sqrt(2 pi) / (x-1)^2 exp(N (ln x + 1/x - 1)) / sqrt(N); x > 1.
Real F_asymptotic(unsigned n, double x, double delta);

enum class Regime { Below, At, Above };
const char* to_string(Regime regime);

struct RegimeReport {
    Regime regime = Regime::Below;
    /// -zeta estimate: 1/F_direct above, 5 delta/(4N) at threshold, none below.
    std::optional<Real> leading_estimate;
    std::string order;
};

RegimeReport decay_regime(unsigned n, const Rational& x, const Rational& delta,
                          double band = 1e-6);

struct LifetimeReport {
    Rational F_direct;
    Rational F_taylor;
    std::optional<double> F_expint;
    std::optional<double> F_asymptotic;
    Rational E_T;
    Regime regime = Regime::Below;
    double max_pairwise_relative_gap = 0;
    std::vector<std::string> notes;
};

/// All four F values on their domains; eps must be 0.
LifetimeReport mean_absorption_time(const EpsSisParams& params);

}  // namespace sisdecay
