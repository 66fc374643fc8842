#pragma once

// Independent reference computations used by tests and `validate`.

#include "sisdecay/chain.hpp"
#include "sisdecay/numeric.hpp"
#include "sisdecay/params.hpp"

#include <chrono>
#include <cstdint>
#include <string>
#include <vector>

namespace sisdecay {

/// All eigenvalues of Q (P - I in the discrete mode), descending.
///
/// Each eigenvalue is isolated by Sturm counts and then polished by sign
/// bisection on rho_{N+1}. Zero products p_{i-1} q_i are allowed, so
/// reducible ladders (pure death, for instance) work too.
std::vector<Real> dense_spectrum(const RateLadder& ladder, const PrecisionCtx& ctx);

/// E[T | start = j] for j = 0..N, where T is the hitting time of state 0.
/// Accepts a ladder with p_0 = 0 or a restricted one (its loss leads to the
/// absorbing state). h[0] = 0.
std::vector<Rational> hitting_time_solve(const RateLadder& ladder);

struct AbsorptionSample {
    double t = 0;
    unsigned start_state = 0;
    std::uint64_t seed = 0;
    std::uint64_t run = 0;
};

struct SimulationResult {
    std::vector<AbsorptionSample> samples;  // ordered by run index
    double mean = 0;
    double stderr_mean = 0;
    std::uint64_t runs_requested = 0;
    bool complete = true;  // false when the wall-clock budget ran out
    std::string rng = "mt19937_64 seeded by splitmix64(splitmix64(seed) ^ run), v1";
};

struct SimulationOptions {
    std::chrono::milliseconds budget{60000};
    unsigned threads = 0;  // 0: hardware concurrency
};

/// splitmix64 finaliser; also the per-run seed derivation.
std::uint64_t splitmix64(std::uint64_t x);
std::uint64_t run_seed(std::uint64_t seed, std::uint64_t run);

/// Event-driven simulation of the eps = 0 process until absorption.
SimulationResult gillespie_simulate(const EpsSisParams& params, unsigned start, std::uint64_t runs,
                                    std::uint64_t seed, const SimulationOptions& options = {});

/// Least-squares slope of log Pr[T > t] over the empirical tail between the
/// survival levels s_hi and s_lo.
double survival_tail_slope(const std::vector<AbsorptionSample>& samples, double s_hi = 0.3,
                           double s_lo = 3e-3);

struct DecayFit {
    Real rate;  // fitted slope of log ||s(t) - pi||, negative
    bool reliable = true;
    std::string reason;
    std::vector<Real> log_distance;  // per grid point
};

/// s(t) = e_N e^{Qt} by uniformization; fits the tail half of t_grid.
DecayFit transient_decay_fit(const RateLadder& ladder, const PrecisionCtx& ctx,
                             const std::vector<double>& t_grid);

}  // namespace sisdecay
