#include "sisdecay/oracle.hpp"

#include "sisdecay/charpoly.hpp"
#include "sisdecay/errors.hpp"
#include "sisdecay/sturm.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <optional>
#include <random>
#include <thread>

namespace sisdecay {

namespace {

template <class T>
int sign_of(const T& v) {
    if (v > 0) return 1;
    if (v < 0) return -1;
    return 0;
}

Real rho_top(const RateLadder& ladder, const Real& xi) {
    return rho_sequence<Real>(ladder, xi).back();
}

// Least-squares slope of y against x.
template <class T>
T ls_slope(const std::vector<T>& x, const std::vector<T>& y) {
    const auto n = static_cast<double>(x.size());
    T mx(0), my(0);
    for (std::size_t i = 0; i < x.size(); ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= n;
    my /= n;
    T sxy(0), sxx(0);
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxy += (x[i] - mx) * (y[i] - my);
        sxx += (x[i] - mx) * (x[i] - mx);
    }
    return sxy / sxx;
}

}  // namespace

std::vector<Real> dense_spectrum(const RateLadder& ladder, const PrecisionCtx& ctx) {
    ScopedPrecision guard(ctx.mantissa_bits);
    const auto sym = sturm_matrix<Real>(ladder);
    const std::size_t n = sym.size();
    const Real pivmin = sturm_pivmin(sym);
    const Real norm = from_rational<Real>(2 * ladder.max_exit_rate() + 1);
    const Real lo0 = -norm;
    const Real hi0(1);
    if (sym.count_below(lo0, pivmin) != 0 || sym.count_below(hi0, pivmin) != n) {
        throw Error(ErrorKind::PrecisionExhausted, "Gershgorin bracket miscounted");
    }
    const Real rel_tol = ctx.default_tol();
    const Real polish_tol = bmp::ldexp(Real(1), -static_cast<int>(ctx.mantissa_bits) + 6);
    const Real abs_floor = bmp::ldexp(norm, -static_cast<int>(ctx.mantissa_bits) + 4);
    const Real coarse(std::ldexp(1.0, -20));

    std::vector<Real> out;
    out.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        // Coarse Sturm isolation, then keep halving until the bracket holds
        // exactly one eigenvalue or is already at full tolerance.
        auto br = bisect_eigenvalue<Real>(sym, i, lo0, hi0, coarse, abs_floor);
        std::size_t guard_steps = 0;
        while (!(sym.count_below(br.lo, pivmin) == i && sym.count_below(br.hi, pivmin) == i + 1)) {
            const Real width = br.hi - br.lo;
            if (width <= abs_floor || ++guard_steps > 4 * ctx.mantissa_bits) break;
            const Real mid = (br.lo + br.hi) / 2;
            if (sym.count_below(mid, pivmin) > i) {
                br.hi = mid;
            } else {
                br.lo = mid;
            }
        }
        Real lo = br.lo;
        Real hi = br.hi;
        int s_lo = sign_of(rho_top(ladder, lo));
        const int s_hi = sign_of(rho_top(ladder, hi));
        if (s_lo != 0 && s_hi != 0 && s_lo != s_hi) {
            // Simple root: sign bisection on rho_{N+1}, to full precision.
            for (std::size_t it = 0; it < 8 * ctx.mantissa_bits; ++it) {
                const Real scale = std::min(abs_value(lo), abs_value(hi));
                if (hi - lo <= abs_floor || hi - lo <= polish_tol * scale) break;
                const Real mid = bracket_midpoint(lo, hi);
                if (!(mid > lo && mid < hi)) break;
                const int s = sign_of(rho_top(ladder, mid));
                if (s == 0) {
                    lo = hi = mid;
                    break;
                }
                if (s == s_lo) {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
        } else if (s_lo == 0) {
            hi = lo;
        } else if (s_hi == 0) {
            lo = hi;
        } else {
            // Repeated root (reducible ladder): finish on Sturm counts.
            auto fine = bisect_eigenvalue<Real>(sym, i, lo, hi, rel_tol, abs_floor);
            lo = fine.lo;
            hi = fine.hi;
        }
        out.push_back((lo + hi) / 2);
    }
    std::sort(out.begin(), out.end(), [](const Real& a, const Real& b) { return a > b; });
    return out;
}

std::vector<Rational> hitting_time_solve(const RateLadder& ladder) {
    const RateLadder full = ladder.is_restricted() ? ladder.augmented() : ladder;
    if (full.p(0) != 0) {
        throw Error(ErrorKind::UnsupportedStructure, "state 0 must be absorbing (p_0 = 0)");
    }
    const std::size_t n = full.last_state();
    std::vector<Rational> h(n + 1, Rational(0));
    if (n == 0) return h;
    // Rows j = 1..N of Q h = -1 with h_0 = 0; Thomas elimination.
    std::vector<Rational> cp(n + 1), dp(n + 1);
    for (std::size_t j = 1; j <= n; ++j) {
        const Rational a = full.q(j);
        const Rational b = -(full.p(j) + full.q(j));
        const Rational c = full.p(j);
        Rational pivot = b;
        Rational rhs = -1;
        if (j > 1) {
            pivot -= a * cp[j - 1];
            rhs -= a * dp[j - 1];
        }
        if (pivot == 0) {
            throw Error(ErrorKind::UnsupportedStructure,
                        fmt::format("singular hitting-time system at state {}", j));
        }
        cp[j] = c / pivot;
        dp[j] = rhs / pivot;
    }
    h[n] = dp[n];
    for (std::size_t j = n - 1; j >= 1; --j) h[j] = dp[j] - cp[j] * h[j + 1];
    return h;
}

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

std::uint64_t run_seed(std::uint64_t seed, std::uint64_t run) {
    return splitmix64(splitmix64(seed) ^ run);
}

SimulationResult gillespie_simulate(const EpsSisParams& params, unsigned start, std::uint64_t runs,
                                    std::uint64_t seed, const SimulationOptions& options) {
    if (params.eps != 0) {
        throw Error(ErrorKind::InvalidParameter, "simulation needs eps = 0 (absorbing state)");
    }
    if (runs == 0) throw Error(ErrorKind::InvalidParameter, "runs must be >= 1");
    if (start == 0 || start > params.n) {
        throw Error(ErrorKind::InvalidParameter, fmt::format("start state must lie in 1..{}", params.n));
    }
    const unsigned n = params.n;
    std::vector<double> up(n + 1), total(n + 1);
    const double beta = to_double(params.beta);
    const double delta = to_double(params.delta);
    for (unsigned j = 0; j <= n; ++j) {
        up[j] = beta * j * (n - j);
        total[j] = up[j] + delta * j;
    }

    const auto deadline = std::chrono::steady_clock::now() + options.budget;
    std::vector<std::optional<AbsorptionSample>> slots(runs);
    std::atomic<std::uint64_t> next{0};
    std::atomic<bool> expired{false};
    constexpr std::uint64_t kChunk = 256;

    auto worker = [&] {
        while (!expired.load(std::memory_order_relaxed)) {
            const std::uint64_t begin = next.fetch_add(kChunk);
            if (begin >= runs) return;
            const std::uint64_t end = std::min<std::uint64_t>(runs, begin + kChunk);
            if (std::chrono::steady_clock::now() > deadline) {
                expired = true;
                return;
            }
            for (std::uint64_t r = begin; r < end; ++r) {
                const std::uint64_t s = run_seed(seed, r);
                std::mt19937_64 gen(s);
                auto uniform = [&gen] { return static_cast<double>(gen() >> 11) * 0x1.0p-53; };
                unsigned state = start;
                double t = 0;
                std::uint64_t events = 0;
                bool aborted = false;
                while (state > 0) {
                    t -= std::log1p(-uniform()) / total[state];
                    if (uniform() * total[state] < up[state]) {
                        ++state;
                    } else {
                        --state;
                    }
                    if ((++events & 0xFFFFF) == 0 && std::chrono::steady_clock::now() > deadline) {
                        expired = true;
                        aborted = true;
                        break;
                    }
                }
                if (aborted) return;
                slots[r] = AbsorptionSample{t, start, s, r};
            }
        }
    };

    unsigned threads = options.threads ? options.threads : std::thread::hardware_concurrency();
    threads = static_cast<unsigned>(std::clamp<std::uint64_t>(threads, 1, (runs + kChunk - 1) / kChunk));
    std::vector<std::thread> pool;
    for (unsigned i = 1; i < threads; ++i) pool.emplace_back(worker);
    worker();
    for (auto& th : pool) th.join();

    SimulationResult out;
    out.runs_requested = runs;
    for (auto& slot : slots) {
        if (slot) out.samples.push_back(*slot);
    }
    out.complete = out.samples.size() == runs;
    const auto m = static_cast<double>(out.samples.size());
    if (m > 0) {
        double sum = 0;
        for (const auto& s : out.samples) sum += s.t;
        out.mean = sum / m;
        double ss = 0;
        for (const auto& s : out.samples) ss += (s.t - out.mean) * (s.t - out.mean);
        out.stderr_mean = m > 1 ? std::sqrt(ss / (m - 1) / m) : 0.0;
    }
    return out;
}

double survival_tail_slope(const std::vector<AbsorptionSample>& samples, double s_hi, double s_lo) {
    const std::size_t n = samples.size();
    if (!(s_hi > s_lo && s_lo > 0 && s_hi < 1)) {
        throw Error(ErrorKind::InvalidParameter, "need 0 < s_lo < s_hi < 1");
    }
    if (static_cast<double>(n) * s_lo < 10) {
        throw Error(ErrorKind::FitUnreliable, "too few samples in the survival tail");
    }
    std::vector<double> t;
    t.reserve(n);
    for (const auto& s : samples) t.push_back(s.t);
    std::sort(t.begin(), t.end());
    constexpr int kPoints = 40;
    std::vector<double> xs, ys;
    for (int i = 0; i < kPoints; ++i) {
        const double level = s_hi * std::pow(s_lo / s_hi, static_cast<double>(i) / (kPoints - 1));
        // Pr[T > t_(k)] = (n - k - 1) / n for the 0-based k-th order statistic.
        const auto survivors = static_cast<std::size_t>(std::llround(level * static_cast<double>(n)));
        const std::size_t k = n - survivors - 1;
        xs.push_back(t[k]);
        ys.push_back(std::log(static_cast<double>(survivors) / static_cast<double>(n)));
    }
    return ls_slope(xs, ys);
}

DecayFit transient_decay_fit(const RateLadder& ladder, const PrecisionCtx& ctx,
                             const std::vector<double>& t_grid) {
    if (ladder.is_restricted() || !ladder.is_irreducible()) {
        throw Error(ErrorKind::ReducibleChain, "transient fit needs an irreducible ladder");
    }
    if (t_grid.size() < 4) throw Error(ErrorKind::InvalidParameter, "t_grid needs at least 4 points");
    if (t_grid.front() < 0 || !std::is_sorted(t_grid.begin(), t_grid.end())) {
        throw Error(ErrorKind::InvalidParameter, "t_grid must be ascending and non-negative");
    }
    ScopedPrecision guard(ctx.mantissa_bits);
    const std::size_t n = ladder.last_state();
    const auto pi = steady_state<Real>(ladder).pi;
    const Real lambda = from_rational<Real>(ladder.max_exit_rate());
    std::vector<Real> up(n + 1), down(n + 1), stay(n + 1);
    for (std::size_t j = 0; j <= n; ++j) {
        const auto sj = static_cast<std::ptrdiff_t>(j);
        up[j] = from_rational<Real>(ladder.p(sj)) / lambda;
        down[j] = from_rational<Real>(ladder.q(sj)) / lambda;
        stay[j] = 1 - up[j] - down[j];
    }
    auto apply_p = [&](const std::vector<Real>& v) {
        std::vector<Real> w(n + 1);
        for (std::size_t j = 0; j <= n; ++j) {
            Real acc = v[j] * stay[j];
            if (j > 0) acc += v[j - 1] * up[j - 1];
            if (j < n) acc += v[j + 1] * down[j + 1];
            w[j] = acc;
        }
        return w;
    };
    const Real tail_target = bmp::ldexp(Real(1), -static_cast<int>(ctx.mantissa_bits) - 8);
    auto advance = [&](std::vector<Real>& s, double dt) {
        if (dt <= 0) return;
        const double big = to_double(lambda) * dt;
        const auto steps = static_cast<std::size_t>(std::ceil(big / 10.0));
        const Real a = lambda * Real(dt) / Real(steps);
        for (std::size_t st = 0; st < steps; ++st) {
            Real weight = bmp::exp(-a);
            std::vector<Real> term = s;
            std::vector<Real> acc(n + 1);
            for (std::size_t j = 0; j <= n; ++j) acc[j] = weight * term[j];
            // Past k = 2a the Poisson tail is below twice the last weight.
            for (std::size_t k = 1; Real(k) <= 2 * a || weight > tail_target; ++k) {
                term = apply_p(term);
                weight *= a / Real(k);
                for (std::size_t j = 0; j <= n; ++j) acc[j] += weight * term[j];
            }
            s = std::move(acc);
        }
    };

    std::vector<Real> s(n + 1, Real(0));
    s[n] = 1;
    double t_now = 0;
    DecayFit fit;
    const Real floor = bmp::ldexp(Real(1), -static_cast<int>(ctx.mantissa_bits * 3 / 4));
    bool hit_floor = false;
    for (double t : t_grid) {
        advance(s, t - t_now);
        t_now = t;
        Real d2(0);
        for (std::size_t j = 0; j <= n; ++j) d2 += (s[j] - pi[j]) * (s[j] - pi[j]);
        const Real dist = bmp::sqrt(d2);
        if (dist <= floor) hit_floor = true;
        fit.log_distance.push_back(dist > 0 ? Real(bmp::log(dist)) : Real(-1e300));
    }

    const std::size_t m = t_grid.size();
    const std::size_t first = m / 2;
    auto slope_over = [&](std::size_t b, std::size_t e) {
        std::vector<Real> xs, ys;
        for (std::size_t i = b; i < e; ++i) {
            xs.emplace_back(t_grid[i]);
            ys.push_back(fit.log_distance[i]);
        }
        return ls_slope(xs, ys);
    };
    fit.rate = slope_over(first, m);
    const std::size_t split = first + (m - first) / 2;
    if (hit_floor) {
        fit.reliable = false;
        fit.reason = "tail reaches the numerical floor";
    } else if (split - first >= 2 && m - split >= 2) {
        const Real s1 = slope_over(first, split);
        const Real s2 = slope_over(split, m);
        const Real scale = std::max(abs_value(s1), abs_value(s2));
        if (abs_value(Real(s1 - s2)) > Real(0.05) * scale) {
            fit.reliable = false;
            fit.reason = fmt::format("tail not log-linear (slopes {:.6g} and {:.6g})", to_double(s1),
                                     to_double(s2));
        }
    }
    return fit;
}

}  // namespace sisdecay
