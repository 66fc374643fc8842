#pragma once

#include "sisdecay/numeric.hpp"

namespace sisdecay {

/// Parameters of the epsilon-SIS process on the complete graph K_N.
///
/// beta is the per-link infection rate, delta the curing rate and eps the
/// nodal self-infection rate, all in 1/time. beta = 0 is accepted here (the
/// pure-death limit is meaningful for lifetimes) but not by the ladder
/// builder.
struct EpsSisParams {
    unsigned n = 1;
    Rational beta = 1;
    Rational delta = 1;
    Rational eps = 0;

    /// Validates and returns the parameters; throws InvalidParameter.
    static EpsSisParams make(unsigned n, Rational beta, Rational delta, Rational eps);
    /// Same, parameterised by tau = beta/delta.
    static EpsSisParams from_tau(unsigned n, const Rational& tau, Rational delta, Rational eps);
    /// Same, parameterised by x = N tau.
    static EpsSisParams from_x(unsigned n, const Rational& x, Rational delta, Rational eps);

    [[nodiscard]] Rational tau() const { return beta / delta; }
    [[nodiscard]] Rational eps_star() const { return eps / delta; }
    [[nodiscard]] Rational x() const { return Rational(n) * tau(); }
};

}  // namespace sisdecay
