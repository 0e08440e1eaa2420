#pragma once

#include <algorithm>
#include <array>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include <gmpxx.h>

#include "bits.hpp"
#include "errors.hpp"
#include "point_seq.hpp"

namespace plastore {

/// One PLA segment with integer endpoints.
///
/// Compression: x is a position, last_x is the last covered position and
/// last_y the value there. Indexing: x is a key, last_x is the last key of the
/// segment (u for the final one) and first_y/last_y are the covered ranks.
struct Segment {
    int64_t first_x = 0;
    int64_t last_x = 0;
    int64_t intercept = 0;  // β, value at first_x
    int64_t final_y = 0;    // γ, value at last_x
    int64_t first_y = 0;
    int64_t last_y = 0;

    friend bool operator==(const Segment &, const Segment &) = default;
};

struct Pla {
    Setting setting = Setting::compression;
    uint64_t n = 0;
    uint64_t u = 0;
    uint64_t epsilon = 0;
    uint64_t epsilon_eff = 0;
    std::vector<Segment> segments;

    [[nodiscard]] uint64_t size() const noexcept { return segments.size(); }

    /// Last abscissa attributed to segment i (0-based): up to the next segment's start, or n / u.
    [[nodiscard]] int64_t covered_end(size_t i) const noexcept {
        if (i + 1 < segments.size())
            return segments[i + 1].first_x - 1;
        return static_cast<int64_t>(setting == Setting::compression ? n : u);
    }

    friend bool operator==(const Pla &, const Pla &) = default;
};

/// ⌊(x − first_x)(γ − β) / (last_x − first_x)⌋ + β, or β on a zero-length segment.
inline int64_t predict_segment(const Segment &s, int64_t x) noexcept {
    const __int128 den = static_cast<__int128>(s.last_x) - s.first_x;
    if (den == 0)
        return s.intercept;
    const __int128 num = (static_cast<__int128>(x) - s.first_x) * (static_cast<__int128>(s.final_y) - s.intercept);
    return static_cast<int64_t>(bits::floor_div(num, den) + s.intercept);
}

namespace detail {

struct Slope {
    __int128 dx = 0;  // nonzero; compared slopes share its sign
    __int128 dy = 0;

    friend bool operator<(const Slope &a, const Slope &b) noexcept { return a.dy * b.dx < b.dy * a.dx; }
    friend bool operator>(const Slope &a, const Slope &b) noexcept { return a.dy * b.dx > b.dy * a.dx; }
    friend bool operator==(const Slope &a, const Slope &b) noexcept { return a.dy * b.dx == b.dy * a.dx; }

    [[nodiscard]] mpq_class to_mpq() const {
        mpq_class q(to_mpz(dy), to_mpz(dx));
        q.canonicalize();
        return q;
    }

    static mpz_class to_mpz(__int128 v) {
        const bool neg = v < 0;
        unsigned __int128 m = neg ? -static_cast<unsigned __int128>(v) : static_cast<unsigned __int128>(v);
        mpz_class z(static_cast<unsigned long>(m >> 64));
        z <<= 64;
        z += static_cast<unsigned long>(static_cast<uint64_t>(m));
        return neg ? mpz_class(-z) : z;
    }
};

struct HullPoint {
    int64_t x = 0;
    int64_t y = 0;

    friend Slope operator-(const HullPoint &a, const HullPoint &b) noexcept {
        return {static_cast<__int128>(a.x) - b.x, static_cast<__int128>(a.y) - b.y};
    }
};

inline __int128 cross(const HullPoint &o, const HullPoint &a, const HullPoint &b) noexcept {
    const Slope oa = a - o, ob = b - o;
    return oa.dx * ob.dy - oa.dy * ob.dx;
}

} // namespace detail

/// The family of real lines fitting one maximal block of points within ε,
/// described by the extreme lines through `rect` (rect[0]→rect[2] has the
/// smallest feasible slope, rect[1]→rect[3] the largest).
struct FeasibleSegment {
    uint64_t first = 0;  // 1-based index of the first point
    uint64_t last = 0;   // 1-based index of the last point
    std::array<detail::HullPoint, 4> rect{};
    bool single = false;

    /// Representative line: through the crossing of the two extreme lines, with
    /// the mean of their slopes. Parallel extremes give their midline; a single
    /// point gives the horizontal line through it.
    [[nodiscard]] mpq_class value_at(int64_t x) const {
        const mpq_class qx(static_cast<long>(x));
        if (single)
            return mpq_class(mpz_class(static_cast<long>(rect[0].y)) + static_cast<long>(rect[1].y), 2);
        const mpq_class s_min = (rect[2] - rect[0]).to_mpq();
        const mpq_class s_max = (rect[3] - rect[1]).to_mpq();
        const mpq_class x0(static_cast<long>(rect[0].x)), y0(static_cast<long>(rect[0].y));
        const mpq_class x1(static_cast<long>(rect[1].x)), y1(static_cast<long>(rect[1].y));
        if (s_min == s_max) {
            mpq_class v = (y0 + s_min * (qx - x0) + y1 + s_min * (qx - x1)) / 2;
            v.canonicalize();
            return v;
        }
        const mpq_class ix = (y1 - y0 + s_min * x0 - s_max * x1) / (s_min - s_max);
        const mpq_class iy = y0 + s_min * (ix - x0);
        mpq_class v = iy + (s_min + s_max) / 2 * (qx - ix);
        v.canonicalize();
        return v;
    }
};

/// Streaming maximal-segment fitter: keeps the upper and lower convex hulls of
/// the points shifted by ±ε and the two extreme feasible lines. Linear total work.
class StreamingFitter {
public:
    explicit StreamingFitter(int64_t epsilon) : eps_(epsilon) {}

    /// Extends the current block with (x, y); false means the block is closed and
    /// the point was not absorbed.
    bool add_point(int64_t x, int64_t y) {
        using detail::cross;
        using detail::HullPoint;
        const HullPoint p1{x, y + eps_};
        const HullPoint p2{x, y - eps_};
        if (count_ == 0) {
            rect_[0] = p1;
            rect_[1] = p2;
            upper_.assign(1, p1);
            lower_.assign(1, p2);
            upper_start_ = lower_start_ = 0;
            ++count_;
            last_x_ = x;
            return true;
        }
        if (x <= last_x_)
            throw validation_error("abscissae must increase");
        if (count_ == 1) {
            rect_[2] = p2;
            rect_[3] = p1;
            upper_.push_back(p1);
            lower_.push_back(p2);
            ++count_;
            last_x_ = x;
            return true;
        }
        const auto slope1 = rect_[2] - rect_[0];
        const auto slope2 = rect_[3] - rect_[1];
        if ((p1 - rect_[2]) < slope1 || (p2 - rect_[3]) > slope2)
            return false;

        if ((p1 - rect_[1]) < slope2) {
            auto best = lower_[lower_start_] - p1;
            size_t best_i = lower_start_;
            for (size_t i = lower_start_ + 1; i < lower_.size(); ++i) {
                const auto v = lower_[i] - p1;
                if (v > best)
                    break;
                best = v;
                best_i = i;
            }
            rect_[1] = lower_[best_i];
            rect_[3] = p1;
            lower_start_ = best_i;
            size_t end = upper_.size();
            while (end >= upper_start_ + 2 && cross(upper_[end - 2], upper_[end - 1], p1) <= 0)
                --end;
            upper_.resize(end);
            upper_.push_back(p1);
        }
        if ((p2 - rect_[0]) > slope1) {
            auto best = upper_[upper_start_] - p2;
            size_t best_i = upper_start_;
            for (size_t i = upper_start_ + 1; i < upper_.size(); ++i) {
                const auto v = upper_[i] - p2;
                if (v < best)
                    break;
                best = v;
                best_i = i;
            }
            rect_[0] = upper_[best_i];
            rect_[2] = p2;
            upper_start_ = best_i;
            size_t end = lower_.size();
            while (end >= lower_start_ + 2 && cross(lower_[end - 2], lower_[end - 1], p2) >= 0)
                --end;
            lower_.resize(end);
            lower_.push_back(p2);
        }
        ++count_;
        last_x_ = x;
        return true;
    }

    [[nodiscard]] size_t count() const noexcept { return count_; }
    void reset() noexcept { count_ = 0; }

    [[nodiscard]] FeasibleSegment segment(uint64_t first, uint64_t last) const {
        return {first, last, rect_, count_ == 1};
    }

private:
    int64_t eps_;
    int64_t last_x_ = 0;
    size_t count_ = 0;
    std::array<detail::HullPoint, 4> rect_{};
    std::vector<detail::HullPoint> upper_, lower_;
    size_t upper_start_ = 0, lower_start_ = 0;
};

/// Greedy maximal blocks over all points; the number of blocks is the minimum
/// possible for a contiguous ε-cover.
inline std::vector<FeasibleSegment> fit_segments(const PointSeq &pts, uint64_t epsilon) {
    if (epsilon < 1)
        throw validation_error("epsilon must be at least 1");
    StreamingFitter fit(static_cast<int64_t>(epsilon));
    std::vector<FeasibleSegment> out;
    uint64_t first = 1;
    for (uint64_t i = 1; i <= pts.n(); ++i) {
        if (!fit.add_point(pts.x(i), pts.y(i))) {
            out.push_back(fit.segment(first, i - 1));
            fit.reset();
            first = i;
            fit.add_point(pts.x(i), pts.y(i));
        }
    }
    out.push_back(fit.segment(first, pts.n()));
    return out;
}

/// Nearest integer, halves rounded up.
inline int64_t round_nearest(const mpq_class &v) {
    mpz_class r;
    const mpq_class h = v + mpq_class(1, 2);
    mpz_fdiv_q(r.get_mpz_t(), h.get_num_mpz_t(), h.get_den_mpz_t());
    if (!r.fits_slong_p())
        throw validation_error("segment endpoint overflows 64 bits");
    return r.get_si();
}

inline uint64_t verify_error(const Pla &pla, const PointSeq &pts);

/// Turns each block's line family into a segment with integer β and γ and
/// records the verified effective error.
inline Pla round_to_integer_endpoints(const std::vector<FeasibleSegment> &family, const PointSeq &pts,
                                      uint64_t epsilon) {
    Pla pla;
    pla.setting = pts.setting();
    pla.n = pts.n();
    pla.u = pts.setting() == Setting::compression ? pts.value(pts.n()) : pts.u();
    pla.epsilon = epsilon;
    pla.segments.reserve(family.size());
    for (size_t i = 0; i < family.size(); ++i) {
        const FeasibleSegment &f = family[i];
        Segment s;
        s.first_x = pts.x(f.first);
        s.first_y = pts.y(f.first);
        s.last_y = pts.y(f.last);
        if (pts.setting() == Setting::indexing && i + 1 == family.size())
            s.last_x = static_cast<int64_t>(pla.u);
        else
            s.last_x = pts.x(f.last);
        s.intercept = round_nearest(f.value_at(s.first_x));
        s.final_y = round_nearest(f.value_at(s.last_x));
        pla.segments.push_back(s);
    }
    const uint64_t measured = verify_error(pla, pts);
    pla.epsilon_eff = std::max(epsilon, measured);
    if (pla.epsilon_eff > epsilon + 3)
        throw std::logic_error("rounded PLA error " + std::to_string(measured) + " exceeds epsilon + 3");
    return pla;
}

/// Minimum-segment ε-error PLA with integer endpoints.
inline Pla build_optimal_pla(const PointSeq &pts, uint64_t epsilon) {
    return round_to_integer_endpoints(fit_segments(pts, epsilon), pts, epsilon);
}

/// Maximum |prediction − ordinate| over all points, by direct evaluation.
inline uint64_t verify_error(const Pla &pla, const PointSeq &pts) {
    if (pla.segments.empty())
        throw coverage_error("PLA has no segments");
    uint64_t worst = 0;
    size_t seg = 0;
    for (uint64_t i = 1; i <= pts.n(); ++i) {
        const int64_t x = pts.x(i);
        while (seg < pla.segments.size() && x > pla.covered_end(seg))
            ++seg;
        if (seg == pla.segments.size() || x < pla.segments[seg].first_x)
            throw coverage_error("point " + std::to_string(i) + " (x = " + std::to_string(x) +
                                 ") is not covered by any segment");
        const __int128 diff = static_cast<__int128>(predict_segment(pla.segments[seg], x)) - pts.y(i);
        const auto err = static_cast<uint64_t>(diff < 0 ? -diff : diff);
        worst = std::max(worst, err);
    }
    return worst;
}

/// Exact test whether points first..last (1-based, inclusive) admit one real
/// line within ε: some slope must satisfy every pairwise constraint
/// |(y_k − y_j) − s(x_k − x_j)| ≤ 2ε.
inline bool segment_feasible(const PointSeq &pts, uint64_t first, uint64_t last, uint64_t epsilon) {
    using detail::Slope;
    bool have = false;
    Slope lo{}, hi{};
    const auto two_eps = static_cast<__int128>(2 * epsilon);
    for (uint64_t j = first; j <= last; ++j)
        for (uint64_t k = j + 1; k <= last; ++k) {
            const __int128 dx = static_cast<__int128>(pts.x(k)) - pts.x(j);
            const __int128 dy = static_cast<__int128>(pts.y(k)) - pts.y(j);
            const Slope a{dx, dy - two_eps}, b{dx, dy + two_eps};
            if (!have || a > lo)
                lo = a;
            if (!have || b < hi)
                hi = b;
            have = true;
        }
    return !have || !(hi < lo);
}

} // namespace plastore
