#pragma once

// Brute-force references. Nothing here shares code with the builder or the
// stores except PointSeq, Pla and the pairwise feasibility test.

#include <algorithm>
#include <cstdint>
#include <functional>
#include <limits>
#include <string>
#include <vector>

#include <gmpxx.h>

#include "bounds.hpp"
#include "errors.hpp"
#include "pla_builder.hpp"
#include "point_seq.hpp"

namespace plastore {

inline constexpr uint64_t default_enum_budget = 100'000'000;

struct EnumSpec {
    uint64_t ell = 1;
    uint64_t epsilon = 1;
    uint64_t u = 1;
    uint64_t n = 1;
    std::vector<uint64_t> fixed;  // y_1..y_ℓ (compression) or x_1..x_ℓ (indexing)
    uint64_t budget = default_enum_budget;
};

namespace detail {

/// Depth-first count over integer variables, each drawn from a box and
/// checked by its own predicate once assigned. Every value tried costs one
/// unit of budget.
class TupleCounter {
public:
    struct Var {
        int64_t lo, hi;
        std::function<bool(const std::vector<int64_t> &)> ok;  // sees vars [0, this]
    };

    explicit TupleCounter(uint64_t budget) : budget_(budget) {}

    uint64_t count(const std::vector<Var> &vars) {
        vals_.assign(vars.size(), 0);
        leaves_ = 0;
        dfs(vars, 0);
        return leaves_;
    }

private:
    void dfs(const std::vector<Var> &vars, size_t depth) {
        if (depth == vars.size()) {
            ++leaves_;
            return;
        }
        const Var &v = vars[depth];
        for (int64_t a = v.lo; a <= v.hi; ++a) {
            if (++nodes_ > budget_)
                throw resource_error("enumeration exceeded budget of " + std::to_string(budget_) + " nodes");
            vals_[depth] = a;
            if (v.ok(vals_))
                dfs(vars, depth + 1);
        }
    }

    uint64_t budget_;
    uint64_t nodes_ = 0;
    uint64_t leaves_ = 0;
    std::vector<int64_t> vals_;
};

} // namespace detail

/// Counts (x_2..x_ℓ, y'_1..y'_{ℓ−1}, β_1..β_ℓ, γ_1..γ_ℓ) with y fixed under:
/// x_1 = 1, x_{i+1} − x_i ≥ 2, x_ℓ ≤ n − 1; y'_i ∈ [y_i, y_{i+1}], y'_ℓ = u;
/// |β_i − y_i| ≤ ε; |γ_i − y'_i| ≤ ε.
inline BigCount enumerate_pla_c(const EnumSpec &s) {
    if (s.fixed.size() != s.ell || s.ell == 0)
        throw validation_error("fixed y must have ell >= 1 entries");
    const auto L = static_cast<int64_t>(s.ell), n = static_cast<int64_t>(s.n), u = static_cast<int64_t>(s.u),
               e = static_cast<int64_t>(s.epsilon);
    std::vector<int64_t> y(s.fixed.begin(), s.fixed.end());

    // Layout of the assignment vector.
    const int64_t ox = 0;          // x_2..x_ℓ at ox + i − 2
    const int64_t oy = L - 1;      // y'_1..y'_{ℓ−1} at oy + i − 1
    const int64_t ob = oy + L - 1;  // β_1..β_ℓ at ob + i − 1
    const int64_t og = ob + L;      // γ_1..γ_ℓ at og + i − 1
    auto xi = [&](const std::vector<int64_t> &v, int64_t i) { return i == 1 ? int64_t{1} : v[ox + i - 2]; };
    auto ypi = [&](const std::vector<int64_t> &v, int64_t i) { return i == L ? u : v[oy + i - 1]; };

    std::vector<detail::TupleCounter::Var> vars;
    for (int64_t i = 2; i <= L; ++i)
        vars.push_back({1, n, [=](const std::vector<int64_t> &v) {
                            const int64_t x = xi(v, i);
                            return x - xi(v, i - 1) >= 2 && (i < L || x <= n - 1);
                        }});
    if (L == 1 && !(1 <= n - 1))  // x_ℓ = x_1 = 1
        return BigCount(0);
    for (int64_t i = 1; i < L; ++i)
        vars.push_back({1, u, [=](const std::vector<int64_t> &v) {
                            const int64_t yp = ypi(v, i);
                            return y[i - 1] <= yp && yp <= y[i];
                        }});
    for (int64_t i = 1; i <= L; ++i)
        vars.push_back({1 - e, u + e, [=](const std::vector<int64_t> &v) {
                            const int64_t b = v[ob + i - 1];
                            return y[i - 1] - e <= b && b <= y[i - 1] + e;
                        }});
    for (int64_t i = 1; i <= L; ++i)
        vars.push_back({1 - e, u + e, [=](const std::vector<int64_t> &v) {
                            const int64_t g = v[og + i - 1], yp = ypi(v, i);
                            return yp - e <= g && g <= yp + e;
                        }});
    detail::TupleCounter counter(s.budget);
    return BigCount(counter.count(vars));
}

/// Counts (y_2..y_ℓ, x'_1..x'_{ℓ−1}, β_1..β_ℓ, γ_1..γ_ℓ) with x fixed under:
/// y_1 = 1, y_{i+1} − y_i ≥ 2ε, y_ℓ ≤ n − 2ε + 1; x'_i ∈ [x_i + 1, x_{i+1} − 1],
/// x'_ℓ = u; |β_i − y_i| ≤ ε; |γ_i − (y_{i+1} − 1)| ≤ ε with y_{ℓ+1} = n + 1.
inline BigCount enumerate_pla_i(const EnumSpec &s) {
    if (s.fixed.size() != s.ell || s.ell == 0)
        throw validation_error("fixed x must have ell >= 1 entries");
    const auto L = static_cast<int64_t>(s.ell), n = static_cast<int64_t>(s.n), e = static_cast<int64_t>(s.epsilon);
    const auto u = static_cast<int64_t>(s.u);
    std::vector<int64_t> x(s.fixed.begin(), s.fixed.end());

    const int64_t oy = 0;          // y_2..y_ℓ at oy + i − 2
    const int64_t ox = L - 1;      // x'_1..x'_{ℓ−1} at ox + i − 1
    const int64_t ob = ox + L - 1;  // β
    const int64_t og = ob + L;      // γ
    auto yi = [&](const std::vector<int64_t> &v, int64_t i) {
        return i == 1 ? int64_t{1} : i == L + 1 ? n + 1 : v[oy + i - 2];
    };

    if (L == 1 && !(1 <= n - 2 * e + 1))
        return BigCount(0);
    std::vector<detail::TupleCounter::Var> vars;
    for (int64_t i = 2; i <= L; ++i)
        vars.push_back({1, n, [=](const std::vector<int64_t> &v) {
                            const int64_t y = yi(v, i);
                            return y - yi(v, i - 1) >= 2 * e && (i < L || y <= n - 2 * e + 1);
                        }});
    for (int64_t i = 1; i < L; ++i)
        vars.push_back({1, u, [=](const std::vector<int64_t> &v) {
                            const int64_t xp = v[ox + i - 1];
                            return x[i - 1] + 1 <= xp && xp <= x[i] - 1;
                        }});
    for (int64_t i = 1; i <= L; ++i)
        vars.push_back({1 - e, n + e, [=](const std::vector<int64_t> &v) {
                            const int64_t b = v[ob + i - 1], y = yi(v, i);
                            return y - e <= b && b <= y + e;
                        }});
    for (int64_t i = 1; i <= L; ++i)
        vars.push_back({1 - e, n + e, [=](const std::vector<int64_t> &v) {
                            const int64_t g = v[og + i - 1], last = yi(v, i + 1) - 1;
                            return last - e <= g && g <= last + e;
                        }});
    detail::TupleCounter counter(s.budget);
    return BigCount(counter.count(vars));
}

inline constexpr uint64_t bruteforce_max_n = 14;

/// Minimum number of contiguous blocks each admitting one real ε-line, by
/// trying every split set.
inline uint64_t min_segments_bruteforce(const PointSeq &pts, uint64_t epsilon) {
    const uint64_t n = pts.n();
    if (n > bruteforce_max_n)
        throw resource_error("partition search limited to n <= " + std::to_string(bruteforce_max_n));
    uint64_t best = n;
    for (uint64_t mask = 0; mask < (uint64_t{1} << (n - 1)); ++mask) {
        // bit j set: a block ends after point j + 1
        const auto blocks = static_cast<uint64_t>(std::popcount(mask)) + 1;
        if (blocks >= best)
            continue;
        bool ok = true;
        uint64_t first = 1;
        for (uint64_t j = 1; j <= n && ok; ++j)
            if (j == n || ((mask >> (j - 1)) & 1)) {
                ok = segment_feasible(pts, first, j, epsilon);
                first = j + 1;
            }
        if (ok)
            best = blocks;
    }
    return best;
}

/// The same minimum by dynamic programming over an interval-feasibility table.
inline uint64_t min_segments_dp(const PointSeq &pts, uint64_t epsilon) {
    const uint64_t n = pts.n();
    std::vector<uint64_t> cover(n + 1, std::numeric_limits<uint64_t>::max());
    cover[0] = 0;
    for (uint64_t j = 1; j <= n; ++j)
        for (uint64_t i = 1; i <= j; ++i)
            if (cover[i - 1] != std::numeric_limits<uint64_t>::max() && segment_feasible(pts, i, j, epsilon))
                cover[j] = std::min(cover[j], cover[i - 1] + 1);
    return cover[n];
}

/// Floor interpolation between the covering segment's integer endpoints, in
/// arbitrary precision. Compression segments end where the next one starts.
inline int64_t predict_reference(const Pla &pla, int64_t x) {
    const auto &segs = pla.segments;
    if (segs.empty() || x < segs.front().first_x || x > pla.covered_end(segs.size() - 1))
        throw coverage_error("x = " + std::to_string(x) + " is not covered");
    size_t i = 0;
    while (i + 1 < segs.size() && segs[i + 1].first_x <= x)
        ++i;
    const Segment &s = segs[i];
    const int64_t last = pla.setting == Setting::compression ? pla.covered_end(i) : s.last_x;
    if (last == s.first_x)
        return s.intercept;
    const mpz_class num = (mpz_class(static_cast<long>(x)) - static_cast<long>(s.first_x)) *
                          (mpz_class(static_cast<long>(s.final_y)) - static_cast<long>(s.intercept));
    const mpz_class den = mpz_class(static_cast<long>(last)) - static_cast<long>(s.first_x);
    mpz_class q;
    mpz_fdiv_q(q.get_mpz_t(), num.get_mpz_t(), den.get_mpz_t());
    q += static_cast<long>(s.intercept);
    return q.get_si();
}

} // namespace plastore
