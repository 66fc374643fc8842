#include "sisdecay/charpoly.hpp"

namespace sisdecay {

namespace {

using Index = std::ptrdiff_t;

Rational prod_p(const RateLadder& ladder, Index a, Index b) {
    Rational r = 1;
    for (Index m = a; m <= b; ++m) r *= ladder.p(m);
    return r;
}

Rational prod_q(const RateLadder& ladder, Index a, Index b) {
    Rational r = 1;
    for (Index m = a; m <= b; ++m) r *= ladder.q(m);
    return r;
}

void require_unrestricted(const RateLadder& ladder) {
    if (ladder.q(0) != 0) {
        throw Error(ErrorKind::UnsupportedStructure, "closed forms assume q_0 = 0");
    }
}

void require_row(const RateLadder& ladder, std::size_t j, std::size_t lowest) {
    if (j < lowest || j > ladder.last_state() + 1) {
        throw Error(ErrorKind::InvalidParameter, "row index out of range");
    }
}

Rational c1_at(const RateLadder& ladder, Index j) {
    Rational total = 0;
    for (Index l = 0; l <= j - 1; ++l) {
        for (Index s = 0; s <= j - 1 - l; ++s) {
            total += prod_p(ladder, 0, j - 2 - l - s) * prod_q(ladder, j - l - s, j - 1 - l) *
                     prod_p(ladder, j - l, j - 1);
        }
    }
    return total;
}

}  // namespace

Rational c1_explicit(const RateLadder& ladder, std::size_t j) {
    require_unrestricted(ladder);
    require_row(ladder, j, 1);
    return c1_at(ladder, static_cast<Index>(j));
}

Rational c2_explicit(const RateLadder& ladder, std::size_t j) {
    require_unrestricted(ladder);
    require_row(ladder, j, 2);
    const auto J = static_cast<Index>(j);
    Rational total = prod_p(ladder, 2, J - 1);

    Rational head = ladder.p(0) + ladder.p(1) + ladder.q(1) + ladder.q(2);
    Rational second = 0;
    for (Index l = 0; l <= J - 3; ++l) {
        second += prod_q(ladder, 3, J - l - 1) * prod_p(ladder, J - l, J - 1);
    }
    total += head * second;

    for (Index l = 0; l <= J - 3; ++l) {
        const Rational tail = prod_p(ladder, J - l, J - 1);
        for (Index s = 1; s <= J - l - 3; ++s) {
            const Index r = J - l - s;
            Rational inner = 0;
            for (Index l1 = 0; l1 <= r - 1; ++l1) {
                for (Index l2 = 0; l2 <= r - l1 - 1; ++l2) {
                    inner += prod_p(ladder, 0, r - 2 - l1 - l2) *
                             prod_q(ladder, r - l1 - l2, r - 1 - l1) *
                             prod_p(ladder, r - l1, r - 1);
                }
            }
            total += inner * prod_q(ladder, J - l + 1 - s, J - l - 1) * tail;
        }
    }
    return total;
}

std::vector<Rational> diag_band_coeffs(const RateLadder& ladder, std::size_t m) {
    const std::size_t top = ladder.last_state() + 1;
    if (m > top) throw Error(ErrorKind::InvalidParameter, "band index beyond N+1");

    std::vector<Rational> exit(top + 1);
    std::vector<Rational> cross(top + 1);
    for (std::size_t l = 0; l <= top; ++l) {
        const auto sl = static_cast<Index>(l);
        exit[l] = ladder.p(sl) + ladder.q(sl);
        cross[l] = ladder.q(sl) * ladder.p(sl - 1);
    }

    // bands[i][j] = t_i(j) for j = 0..top; t_i(j) = 0 for j < i.
    std::vector<Rational> older(top + 1, 0);
    std::vector<Rational> prev(top + 1, 1);
    for (std::size_t i = 1; i <= m; ++i) {
        std::vector<Rational> cur(top + 1, 0);
        Rational acc = 0;
        for (std::size_t j = 1; j <= top; ++j) {
            const std::size_t l = j - 1;
            acc += exit[l] * prev[l];
            if (l >= 1) acc -= cross[l] * older[l - 1];
            cur[j] = acc;
        }
        older = std::move(prev);
        prev = std::move(cur);
    }
    return {prev.begin() + static_cast<Index>(m), prev.end()};
}

}  // namespace sisdecay
