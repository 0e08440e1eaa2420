#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "bit_vector.hpp"
#include "bits.hpp"
#include "budget.hpp"
#include "elias_fano.hpp"
#include "errors.hpp"
#include "pla_builder.hpp"
#include "point_seq.hpp"
#include "rank_select.hpp"
#include "serialize.hpp"
#include "store_common.hpp"

namespace plastore {

/// Succinct container for an indexing-setting PLA. With s = 2ε − 1:
///
/// X  first keys: in ef mode Elias-Fano over x_i − (i−1)s − 1, the one
///    positions of the code 0^{x_1−1} 1 0^{x_2−x_1−2ε} 1 …; in rs mode a
///    length-u bit vector with a one at x_i − 1.
/// Y  Elias-Fano over y_{i+1} − i·s − 2 for i < ℓ (y_1 = 1).
/// B  x'_i − x_i − 1 in ⌈log2(x_{i+1} − x_i − 1)⌉ bits for i < ℓ; x'_ℓ = u.
/// P  Elias-Fano of the field offsets in B, closed by |B|.
/// Δβ  zig-zag β_i − y_i (ℓ entries); Δγ  zig-zag γ_i − (y_{i+1} − 1) (ℓ − 1 entries).
/// γ_ℓ is stored verbatim.
class CompressedPlaI {
public:
    static constexpr std::string_view magic = "PLAI";

    CompressedPlaI() = default;

    [[nodiscard]] Mode mode() const noexcept { return mode_; }
    [[nodiscard]] const StoreHeader &header() const noexcept { return h_; }
    [[nodiscard]] uint64_t size() const noexcept { return h_.ell; }
    [[nodiscard]] int64_t gamma_last() const noexcept { return gamma_last_; }

    /// x_i for 1 ≤ i ≤ ℓ.
    [[nodiscard]] int64_t first_x(uint64_t i, QueryTrace *trace = nullptr) const {
        count_probe(trace);
        if (mode_ == Mode::ef)
            return static_cast<int64_t>(x_ef_.select_unchecked(i) + (i - 1) * shift() + 1);
        return static_cast<int64_t>(x_rs_.select1_unchecked(i) + 1);
    }

    /// y_i for 1 ≤ i ≤ ℓ + 1, where y_{ℓ+1} = n + 1.
    [[nodiscard]] int64_t first_y(uint64_t i, QueryTrace *trace = nullptr) const {
        if (i == 1)
            return 1;
        if (i == h_.ell + 1)
            return static_cast<int64_t>(h_.n + 1);
        count_probe(trace);
        return static_cast<int64_t>(y_.select_unchecked(i - 1) + (i - 1) * shift() + 2);
    }

    /// Largest i with x_i ≤ x.
    [[nodiscard]] uint64_t segment_of(int64_t x, QueryTrace *trace = nullptr) const {
        if (x < first_x(1) || x > static_cast<int64_t>(h_.u))
            throw range_error("key " + std::to_string(x) + " out of range [" + std::to_string(first_x(1)) + ", " +
                              std::to_string(h_.u) + "]");
        if (mode_ == Mode::rs) {
            count_probe(trace);
            return x_rs_.rank1_unchecked(static_cast<uint64_t>(x));
        }
        return detail::search_last_leq(
            h_.ell, x, [&](uint64_t i) { return first_x(i, trace); }, trace);
    }

    [[nodiscard]] Segment decode_segment(uint64_t i, QueryTrace *trace = nullptr) const {
        if (i < 1 || i > h_.ell)
            throw range_error("segment " + std::to_string(i) + " out of range [1, " + std::to_string(h_.ell) + "]");
        Segment s;
        s.first_x = first_x(i, trace);
        s.first_y = first_y(i, trace);
        s.last_y = first_y(i + 1, trace) - 1;
        count_probe(trace);
        s.intercept = s.first_y + bits::zigzag_decode(db_[i - 1]);
        if (i < h_.ell) {
            count_probe(trace, 3);
            const uint64_t off = p_.select_unchecked(i);
            const uint64_t end = p_.select_unchecked(i + 1);
            s.last_x = s.first_x + 1 + static_cast<int64_t>(b_.get_bits(off, static_cast<unsigned>(end - off)));
            s.final_y = s.last_y + bits::zigzag_decode(dg_[i - 1]);
        } else {
            s.last_x = static_cast<int64_t>(h_.u);
            s.final_y = gamma_last_;
        }
        return s;
    }

    [[nodiscard]] int64_t predict(int64_t x, QueryTrace *trace = nullptr) const {
        return predict_segment(decode_segment(segment_of(x, trace), trace), x);
    }

    [[nodiscard]] BitBudget size_bits() const {
        BitBudget b;
        b.header = StoreHeader::bits;
        b.framing = detail::preamble_bits;
        if (mode_ == Mode::ef)
            detail::account(b, b.x, x_ef_.size_parts());
        else
            detail::account(b, b.x, x_rs_.size_parts());
        detail::account(b, b.y, y_.size_parts());
        detail::account(b, b.b, b_.size_parts());
        detail::account(b, b.p, p_.size_parts());
        detail::account(b, b.delta_beta, db_.size_parts());
        detail::account(b, b.delta_gamma, dg_.size_parts());
        b.gamma_last = 64;
        b.framing += 64;
        return b;
    }

    [[nodiscard]] std::vector<uint8_t> serialize() const {
        ByteWriter out;
        detail::write_preamble(out, magic, mode_, h_);
        if (mode_ == Mode::ef)
            detail::write_component(out, x_ef_);
        else
            detail::write_component(out, x_rs_);
        detail::write_component(out, y_);
        detail::write_component(out, b_);
        detail::write_component(out, p_);
        detail::write_component(out, db_);
        detail::write_component(out, dg_);
        ByteWriter g;
        g.u64(static_cast<uint64_t>(gamma_last_));
        out.block(g);
        return std::move(out).take();
    }

    static CompressedPlaI deserialize(std::span<const uint8_t> bytes) {
        ByteReader in(bytes);
        CompressedPlaI c;
        c.mode_ = detail::read_preamble(in, magic, c.h_);
        if (c.mode_ == Mode::ef)
            c.x_ef_ = detail::read_component<EliasFano>(in);
        else
            c.x_rs_ = detail::read_component<RankSelectIndex>(in);
        c.y_ = detail::read_component<EliasFano>(in);
        c.b_ = detail::read_component<BitVector>(in);
        c.p_ = detail::read_component<EliasFano>(in);
        c.db_ = detail::read_component<PackedArray>(in);
        c.dg_ = detail::read_component<PackedArray>(in);
        ByteReader g = in.block();
        c.gamma_last_ = static_cast<int64_t>(g.u64());
        g.expect_end();
        in.expect_end();
        c.validate();
        return c;
    }

    friend CompressedPlaI encode_i(const Pla &pla, const PointSeq &pts, Mode mode);

private:
    [[nodiscard]] uint64_t shift() const noexcept { return 2 * h_.epsilon - 1; }

    void validate() const {
        const uint64_t ell = h_.ell;
        const bool x_ok = mode_ == Mode::ef ? x_ef_.size() == ell
                                            : x_rs_.size() == h_.u && x_rs_.ones() == ell &&
                                                  x_rs_.kind() == RankSelectIndex::Kind::rank_select;
        if (!x_ok || y_.size() != ell - 1 || p_.size() != ell || p_.select(ell) != b_.size() ||
            db_.size() != ell || dg_.size() != ell - 1 || db_.width() != h_.w_delta || dg_.width() != h_.w_delta)
            throw format_error("PLAI components disagree with the header");
        if (first_x(ell) > static_cast<int64_t>(h_.u) || first_y(ell) > static_cast<int64_t>(h_.n))
            throw format_error("PLAI segment starts out of range");
        for (uint64_t i = 1; i < ell; ++i) {
            const int64_t gap = first_x(i + 1) - first_x(i);
            if (p_.select_unchecked(i + 1) - p_.select_unchecked(i) != bits::ceil_log2(static_cast<uint64_t>(gap - 1)))
                throw format_error("PLAI field widths disagree with X");
        }
    }

    Mode mode_ = Mode::ef;
    StoreHeader h_;
    EliasFano x_ef_;
    RankSelectIndex x_rs_;
    EliasFano y_;
    BitVector b_;
    EliasFano p_;
    PackedArray db_, dg_;
    int64_t gamma_last_ = 0;
};

inline CompressedPlaI encode_i(const Pla &pla, const PointSeq &pts, Mode mode) {
    if (pla.setting != Setting::indexing || pts.setting() != Setting::indexing)
        throw validation_error("indexing container needs an indexing-setting PLA and sequence");
    const auto &segs = pla.segments;
    const uint64_t ell = segs.size();
    if (ell == 0 || pla.n != pts.n() || pla.u != pts.u() || pla.epsilon == 0 || pla.epsilon_eff < pla.epsilon)
        throw validation_error("PLA does not match the sequence");
    const auto eps = static_cast<int64_t>(pla.epsilon);
    const int64_t s = 2 * eps - 1;
    const auto n = static_cast<int64_t>(pla.n), u = static_cast<int64_t>(pla.u);
    for (uint64_t i = 0; i < ell; ++i) {
        const Segment &g = segs[i];
        const int64_t next_y = i + 1 < ell ? segs[i + 1].first_y : n + 1;
        if (g.first_y != (i == 0 ? 1 : segs[i - 1].last_y + 1) || g.last_y != next_y - 1 ||
            g.first_x != static_cast<int64_t>(pts.value(static_cast<uint64_t>(g.first_y))))
            throw validation_error("segment " + std::to_string(i + 1) + " does not tile the ranks");
        if (i + 1 < ell) {
            const int64_t nx = segs[i + 1].first_x;
            if (nx - g.first_x < 2 * eps || next_y - g.first_y < 2 * eps)
                throw validation_error("segment " + std::to_string(i + 1) +
                                       " is narrower than 2*epsilon; not an indexing-setting PLA");
            if (g.last_x < g.first_x + 1 || g.last_x > nx - 1)
                throw validation_error("segment " + std::to_string(i + 1) + " last key outside [x_i+1, x_{i+1}-1]");
        } else if (g.last_x != u) {
            throw validation_error("last segment must end at the universe");
        }
    }

    CompressedPlaI c;
    c.mode_ = mode;
    c.h_ = {pla.n, pla.u, ell, pla.epsilon, pla.epsilon_eff, 0};
    c.gamma_last_ = segs.back().final_y;

    if (mode == Mode::ef) {
        std::vector<uint64_t> xs;
        for (uint64_t i = 0; i < ell; ++i)  // x_i − (i−1)s − 1, i 1-based
            xs.push_back(static_cast<uint64_t>(segs[i].first_x - static_cast<int64_t>(i) * s - 1));
        c.x_ef_ = EliasFano(xs, xs.back() + 1);
    } else {
        BitVector xb(pla.u);
        for (const Segment &g : segs)
            xb.set(static_cast<uint64_t>(g.first_x - 1), true);
        c.x_rs_ = RankSelectIndex(std::move(xb));
    }

    std::vector<uint64_t> ys, offsets;
    std::vector<int64_t> dbeta, dgamma;
    for (uint64_t i = 0; i < ell; ++i) {
        const Segment &g = segs[i];
        dbeta.push_back(g.intercept - g.first_y);
        if (i + 1 < ell) {
            const Segment &nx = segs[i + 1];
            ys.push_back(static_cast<uint64_t>(nx.first_y - static_cast<int64_t>(i + 1) * s - 2));
            dgamma.push_back(g.final_y - g.last_y);
            offsets.push_back(c.b_.size());
            c.b_.append_bits(static_cast<uint64_t>(g.last_x - g.first_x - 1),
                             bits::ceil_log2(static_cast<uint64_t>(nx.first_x - g.first_x - 1)));
        }
    }
    offsets.push_back(c.b_.size());
    c.y_ = EliasFano(ys, ys.empty() ? 0 : ys.back() + 1);
    c.p_ = EliasFano(offsets, c.b_.size() + 1);

    const unsigned wd = std::max(detail::delta_width(dbeta), detail::delta_width(dgamma));
    c.h_.w_delta = wd;
    c.db_ = PackedArray(wd);
    c.dg_ = PackedArray(wd);
    for (int64_t d : dbeta)
        c.db_.push_back(bits::zigzag_encode(d));
    for (int64_t d : dgamma)
        c.dg_.push_back(bits::zigzag_encode(d));
    return c;
}

inline uint64_t segment_of_i(const CompressedPlaI &c, int64_t x, QueryTrace *t = nullptr) {
    return c.segment_of(x, t);
}
inline Segment decode_segment_i(const CompressedPlaI &c, uint64_t i, QueryTrace *t = nullptr) {
    return c.decode_segment(i, t);
}
inline int64_t predict_i(const CompressedPlaI &c, int64_t x, QueryTrace *t = nullptr) { return c.predict(x, t); }
inline BitBudget size_bits_i(const CompressedPlaI &c) { return c.size_bits(); }

} // namespace plastore
