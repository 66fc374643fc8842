#pragma once

// Generalised birth-death chains on states 0..N.
//
// A ladder stores the up rates p_0..p_{N-1} and the down rates q_1..q_N. The
// boundary conventions p_N = 0 and q_0 = 0 are implicit, except for a
// transient-restricted ladder, where q_0 is the rate of leaving the ladder
// into an absorbing state that has been cut away ("loss").

#include "sisdecay/errors.hpp"
#include "sisdecay/numeric.hpp"
#include "sisdecay/params.hpp"

#include <cstddef>
#include <vector>

namespace sisdecay {

enum class LadderMode { DiscreteStochastic, ContinuousGenerator };

class RateLadder {
public:
    /// Continuous-time generator ladder; rates must be >= 0.
    static RateLadder generator(std::vector<Rational> up, std::vector<Rational> down);
    /// Discrete-time stochastic ladder; additionally p_j + q_j <= 1.
    static RateLadder stochastic(std::vector<Rational> up, std::vector<Rational> down);
    /// Sub-generator on N+1 transient states with absorption from state 0 at
    /// rate `loss`. N = 0 (a single transient state) is allowed.
    static RateLadder with_loss(std::vector<Rational> up, std::vector<Rational> down,
                                Rational loss);

    /// N; states are 0..N.
    [[nodiscard]] std::size_t last_state() const { return up_.size(); }
    [[nodiscard]] std::size_t n_states() const { return up_.size() + 1; }
    [[nodiscard]] LadderMode mode() const { return mode_; }

    /// p_j for 0 <= j <= N (p_N = 0). Out-of-range indices read as 0.
    [[nodiscard]] const Rational& p(std::ptrdiff_t j) const;
    /// q_j for 0 <= j <= N; q_0 is the loss rate (0 unless restricted).
    [[nodiscard]] const Rational& q(std::ptrdiff_t j) const;

    [[nodiscard]] const std::vector<Rational>& up() const { return up_; }
    [[nodiscard]] const std::vector<Rational>& down() const { return down_; }
    [[nodiscard]] const Rational& loss() const { return loss_; }

    /// True for ladders produced by restrict_transient / with_loss.
    [[nodiscard]] bool is_restricted() const { return restricted_; }
    /// All interior rates p_0..p_{N-1}, q_1..q_N strictly positive.
    [[nodiscard]] bool is_irreducible() const;

    /// For a restricted ladder, the equivalent full ladder with the absorbing
    /// state re-inserted as state 0 (p_0 = 0, q_1 = loss). Identity otherwise.
    [[nodiscard]] RateLadder augmented() const;

    /// Dense P (stochastic mode) or Q (generator mode), row-major.
    [[nodiscard]] std::vector<std::vector<Rational>> dense_matrix() const;

    /// Largest p_j + q_j over all states.
    [[nodiscard]] Rational max_exit_rate() const;

private:
    RateLadder(std::vector<Rational> up, std::vector<Rational> down, Rational loss,
               LadderMode mode, bool restricted);

    std::vector<Rational> up_;
    std::vector<Rational> down_;
    Rational loss_;
    LadderMode mode_;
    bool restricted_;
};

/// Symmetrised form H P H^{-1} of a ladder.
///
/// offdiag_sq holds p_{i-1} q_i exactly; offdiag and h are filled only for
/// floating scalars (they need square roots).
template <Scalar T>
struct SymTridiag {
    std::vector<T> diag;        // r_0..r_N
    std::vector<T> offdiag_sq;  // i = 1..N
    std::vector<T> offdiag;
    std::vector<T> h_sq;        // h_1^2..h_{N+1}^2
    std::vector<T> h;

    [[nodiscard]] std::size_t size() const { return diag.size(); }

    /// Number of eigenvalues strictly below x (Sturm sign count of the LDL^T
    /// pivots of T - xI). Zero pivots are nudged to -pivmin.
    [[nodiscard]] std::size_t count_below(const T& x, const T& pivmin) const;
};

template <Scalar T>
struct SteadyState {
    std::vector<T> pi;
};

RateLadder build_eps_sis_ladder(const EpsSisParams& params);

/// Product-form stationary distribution; requires an irreducible ladder.
template <Scalar T>
SteadyState<T> steady_state(const RateLadder& ladder);

template <Scalar T>
SymTridiag<T> symmetrize(const RateLadder& ladder);

/// Drops the absorbing state 0 of a ladder whose only reducibility is
/// p_0 = 0; the former q_1 becomes the loss rate of the new state 0.
RateLadder restrict_transient(const RateLadder& ladder);

// ---------------------------------------------------------------------------

template <Scalar T>
std::size_t SymTridiag<T>::count_below(const T& x, const T& pivmin) const {
    std::size_t count = 0;
    T d = diag.empty() ? T(0) : T(diag[0] - x);
    for (std::size_t i = 0; i < diag.size(); ++i) {
        if (i > 0) d = diag[i] - x - offdiag_sq[i - 1] / d;
        if (abs_value(d) <= pivmin) d = -pivmin;
        if (d < T(0)) ++count;
    }
    return count;
}

template <Scalar T>
SteadyState<T> steady_state(const RateLadder& ladder) {
    if (ladder.is_restricted() || !ladder.is_irreducible()) {
        throw Error(ErrorKind::ReducibleChain, "steady state needs an irreducible ladder");
    }
    const std::size_t n = ladder.last_state();
    // Unnormalised weights prod_{m<j} p_m / q_{m+1}, accumulated exactly.
    std::vector<Rational> weight(n + 1);
    weight[0] = 1;
    Rational total = 1;
    for (std::size_t j = 1; j <= n; ++j) {
        weight[j] = weight[j - 1] * ladder.p(j - 1) / ladder.q(j);
        total += weight[j];
    }
    SteadyState<T> out;
    out.pi.reserve(n + 1);
    for (const auto& w : weight) out.pi.push_back(from_rational<T>(w / total));
    return out;
}

template <Scalar T>
SymTridiag<T> symmetrize(const RateLadder& ladder) {
    if (!ladder.is_irreducible()) {
        throw Error(ErrorKind::ReducibleChain,
                    "symmetrize needs positive interior rates; restrict the ladder first");
    }
    const std::size_t n = ladder.last_state();
    const bool generator = ladder.mode() == LadderMode::ContinuousGenerator;
    SymTridiag<T> out;
    out.diag.reserve(n + 1);
    out.offdiag_sq.reserve(n);
    out.h_sq.reserve(n + 1);
    Rational h_sq = 1;
    for (std::size_t j = 0; j <= n; ++j) {
        Rational exit = ladder.p(j) + ladder.q(j);
        out.diag.push_back(from_rational<T>(generator ? Rational(-exit) : Rational(1 - exit)));
        if (j > 0) {
            out.offdiag_sq.push_back(from_rational<T>(ladder.p(j - 1) * ladder.q(j)));
            h_sq *= ladder.p(j - 1) / ladder.q(j);
        }
        out.h_sq.push_back(from_rational<T>(h_sq));
    }
    if constexpr (FloatingScalar<T>) {
        for (const auto& v : out.offdiag_sq) out.offdiag.push_back(sqrt_value(v));
        for (const auto& v : out.h_sq) out.h.push_back(sqrt_value(v));
    }
    return out;
}

}  // namespace sisdecay
