#include "sisdecay/chain.hpp"

#include <algorithm>
#include <utility>

namespace sisdecay {

namespace {

const Rational kZero = 0;

void require_nonnegative(const std::vector<Rational>& rates, const char* name) {
    for (const auto& r : rates) {
        if (r < 0) throw Error(ErrorKind::InvalidParameter, std::string(name) + " rate is negative");
    }
}

}  // namespace

EpsSisParams EpsSisParams::make(unsigned n, Rational beta, Rational delta, Rational eps) {
    if (n < 1) throw Error(ErrorKind::InvalidParameter, "N must be >= 1");
    if (delta <= 0) throw Error(ErrorKind::InvalidParameter, "delta must be > 0");
    if (beta < 0) throw Error(ErrorKind::InvalidParameter, "beta must be >= 0");
    if (eps < 0) throw Error(ErrorKind::InvalidParameter, "eps must be >= 0");
    return {n, std::move(beta), std::move(delta), std::move(eps)};
}

EpsSisParams EpsSisParams::from_tau(unsigned n, const Rational& tau, Rational delta, Rational eps) {
    if (tau < 0) throw Error(ErrorKind::InvalidParameter, "tau must be >= 0");
    Rational beta = tau * delta;
    return make(n, std::move(beta), std::move(delta), std::move(eps));
}

EpsSisParams EpsSisParams::from_x(unsigned n, const Rational& x, Rational delta, Rational eps) {
    if (n < 1) throw Error(ErrorKind::InvalidParameter, "N must be >= 1");
    return from_tau(n, x / Rational(n), std::move(delta), std::move(eps));
}

RateLadder::RateLadder(std::vector<Rational> up, std::vector<Rational> down, Rational loss,
                       LadderMode mode, bool restricted)
    : up_(std::move(up)), down_(std::move(down)), loss_(std::move(loss)), mode_(mode),
      restricted_(restricted) {
    if (up_.size() != down_.size()) {
        throw Error(ErrorKind::InvalidParameter, "up and down rate lists differ in length");
    }
    require_nonnegative(up_, "up");
    require_nonnegative(down_, "down");
    if (loss_ < 0) throw Error(ErrorKind::InvalidParameter, "loss rate is negative");
}

RateLadder RateLadder::generator(std::vector<Rational> up, std::vector<Rational> down) {
    if (up.empty()) throw Error(ErrorKind::InvalidParameter, "ladder needs at least two states");
    return {std::move(up), std::move(down), 0, LadderMode::ContinuousGenerator, false};
}

RateLadder RateLadder::stochastic(std::vector<Rational> up, std::vector<Rational> down) {
    if (up.empty()) throw Error(ErrorKind::InvalidParameter, "ladder needs at least two states");
    RateLadder ladder(std::move(up), std::move(down), 0, LadderMode::DiscreteStochastic, false);
    for (std::size_t j = 0; j <= ladder.last_state(); ++j) {
        if (ladder.p(j) + ladder.q(j) > 1) {
            throw Error(ErrorKind::InvalidParameter, "p_j + q_j exceeds 1 in a stochastic ladder");
        }
    }
    return ladder;
}

RateLadder RateLadder::with_loss(std::vector<Rational> up, std::vector<Rational> down,
                                 Rational loss) {
    return {std::move(up), std::move(down), std::move(loss), LadderMode::ContinuousGenerator, true};
}

const Rational& RateLadder::p(std::ptrdiff_t j) const {
    if (j < 0 || static_cast<std::size_t>(j) >= up_.size()) return kZero;
    return up_[static_cast<std::size_t>(j)];
}

const Rational& RateLadder::q(std::ptrdiff_t j) const {
    if (j == 0) return loss_;
    if (j < 0 || static_cast<std::size_t>(j) > down_.size()) return kZero;
    return down_[static_cast<std::size_t>(j) - 1];
}

bool RateLadder::is_irreducible() const {
    auto positive = [](const Rational& r) { return r > 0; };
    return std::all_of(up_.begin(), up_.end(), positive) &&
           std::all_of(down_.begin(), down_.end(), positive);
}

RateLadder RateLadder::augmented() const {
    if (!restricted_) return *this;
    std::vector<Rational> up{0};
    up.insert(up.end(), up_.begin(), up_.end());
    std::vector<Rational> down{loss_};
    down.insert(down.end(), down_.begin(), down_.end());
    return generator(std::move(up), std::move(down));
}

std::vector<std::vector<Rational>> RateLadder::dense_matrix() const {
    const std::size_t n = n_states();
    const bool gen = mode_ == LadderMode::ContinuousGenerator;
    std::vector<std::vector<Rational>> m(n, std::vector<Rational>(n, 0));
    for (std::size_t j = 0; j < n; ++j) {
        Rational exit = p(j) + q(j);
        m[j][j] = gen ? Rational(-exit) : Rational(1 - exit);
        if (j + 1 < n) m[j][j + 1] = p(j);
        if (j > 0) m[j][j - 1] = q(j);
    }
    return m;
}

Rational RateLadder::max_exit_rate() const {
    Rational best = 0;
    for (std::size_t j = 0; j <= last_state(); ++j) best = std::max(best, Rational(p(j) + q(j)));
    return best;
}

RateLadder build_eps_sis_ladder(const EpsSisParams& params) {
    if (params.n < 1) throw Error(ErrorKind::InvalidParameter, "N must be >= 1");
    if (params.beta <= 0) throw Error(ErrorKind::InvalidParameter, "beta must be > 0");
    if (params.delta <= 0) throw Error(ErrorKind::InvalidParameter, "delta must be > 0");
    if (params.eps < 0) throw Error(ErrorKind::InvalidParameter, "eps must be >= 0");
    const unsigned n = params.n;
    std::vector<Rational> up;
    std::vector<Rational> down;
    up.reserve(n);
    down.reserve(n);
    for (unsigned j = 0; j < n; ++j) {
        up.push_back((params.beta * j + params.eps) * Rational(n - j));
        down.push_back(params.delta * (j + 1));
    }
    return RateLadder::generator(std::move(up), std::move(down));
}

RateLadder restrict_transient(const RateLadder& ladder) {
    if (ladder.is_restricted()) {
        throw Error(ErrorKind::UnsupportedStructure, "ladder is already restricted");
    }
    if (ladder.is_irreducible()) {
        throw Error(ErrorKind::UnsupportedStructure, "ladder is irreducible; nothing to restrict");
    }
    if (ladder.p(0) != 0) {
        throw Error(ErrorKind::UnsupportedStructure, "reducible away from state 0");
    }
    const auto& up = ladder.up();
    const auto& down = ladder.down();
    for (std::size_t j = 1; j < up.size(); ++j) {
        if (up[j] == 0) throw Error(ErrorKind::UnsupportedStructure, "reducible away from state 0");
    }
    for (const auto& q : down) {
        if (q == 0) throw Error(ErrorKind::UnsupportedStructure, "reducible away from state 0");
    }
    std::vector<Rational> new_up(up.begin() + 1, up.end());
    std::vector<Rational> new_down(down.begin() + 1, down.end());
    return RateLadder::with_loss(std::move(new_up), std::move(new_down), down.front());
}

}  // namespace sisdecay
