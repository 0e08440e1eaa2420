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

/// Succinct container for a compression-setting PLA.
///
/// X  segment starts: in ef mode Elias-Fano over x_{i+1} − i − 2 (the one
///    positions of the unary gap code); in rs mode a length n−1 bit vector
///    with a one at x_i − 2 for every i ≥ 2.
/// Y  Elias-Fano of y_i − 1.
/// B  y'_i − y_i in ⌈log2(y_{i+1} − y_i + 1)⌉ bits for i < ℓ; y'_ℓ = u.
/// P  Elias-Fano of the field offsets in B, closed by |B|.
/// Δβ, Δγ  zig-zag β_i − y_i and γ_i − y'_i in w_delta bits.
class CompressedPlaC {
public:
    static constexpr std::string_view magic = "PLAC";

    CompressedPlaC() = default;

    [[nodiscard]] Mode mode() const noexcept { return mode_; }
    [[nodiscard]] const StoreHeader &header() const noexcept { return h_; }
    [[nodiscard]] uint64_t size() const noexcept { return h_.ell; }

    /// x_i for 1 ≤ i ≤ ℓ + 1, where x_{ℓ+1} = n + 1.
    [[nodiscard]] int64_t first_x(uint64_t i, QueryTrace *trace = nullptr) const {
        if (i == 1)
            return 1;
        if (i == h_.ell + 1)
            return static_cast<int64_t>(h_.n + 1);
        count_probe(trace);
        if (mode_ == Mode::ef)
            return static_cast<int64_t>(x_ef_.select_unchecked(i - 1) + i + 1);
        return static_cast<int64_t>(x_rs_.select1_unchecked(i - 1) + 2);
    }

    /// Index of the segment covering position x.
    [[nodiscard]] uint64_t segment_of(int64_t x, QueryTrace *trace = nullptr) const {
        if (x < 1 || static_cast<uint64_t>(x) > h_.n)
            throw range_error("position " + std::to_string(x) + " out of range [1, " + std::to_string(h_.n) + "]");
        if (mode_ == Mode::rs) {
            count_probe(trace);
            return 1 + x_rs_.rank1_unchecked(static_cast<uint64_t>(x - 1));
        }
        return detail::search_last_leq(
            h_.ell, x, [&](uint64_t i) { return first_x(i, trace); }, trace);
    }

    [[nodiscard]] Segment decode_segment(uint64_t i, QueryTrace *trace = nullptr) const {
        if (i < 1 || i > h_.ell)
            throw range_error("segment " + std::to_string(i) + " out of range [1, " + std::to_string(h_.ell) + "]");
        Segment s;
        s.first_x = first_x(i, trace);
        s.last_x = first_x(i + 1, trace) - 1;
        count_probe(trace, 3);
        s.first_y = static_cast<int64_t>(y_.select_unchecked(i) + 1);
        s.intercept = s.first_y + bits::zigzag_decode(db_[i - 1]);
        if (i < h_.ell) {
            count_probe(trace, 3);
            const uint64_t off = p_.select_unchecked(i);
            const uint64_t end = p_.select_unchecked(i + 1);
            s.last_y = s.first_y + static_cast<int64_t>(b_.get_bits(off, static_cast<unsigned>(end - off)));
        } else {
            s.last_y = static_cast<int64_t>(h_.u);
        }
        s.final_y = s.last_y + bits::zigzag_decode(dg_[i - 1]);
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
        return std::move(out).take();
    }

    static CompressedPlaC deserialize(std::span<const uint8_t> bytes) {
        ByteReader in(bytes);
        CompressedPlaC c;
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
        in.expect_end();
        c.validate();
        return c;
    }

    friend CompressedPlaC encode_c(const Pla &pla, const PointSeq &pts, Mode mode);

private:
    void validate() const {
        const uint64_t ell = h_.ell;
        const bool x_ok = mode_ == Mode::ef
                              ? x_ef_.size() == ell - 1
                              : x_rs_.size() == h_.n - 1 && x_rs_.ones() == ell - 1 &&
                                    x_rs_.kind() == RankSelectIndex::Kind::rank_select;
        if (!x_ok || y_.size() != ell || y_.universe() != h_.u || p_.size() != ell ||
            p_.select(ell) != b_.size() || db_.size() != ell || dg_.size() != ell || db_.width() != h_.w_delta ||
            dg_.width() != h_.w_delta)
            throw format_error("PLAC components disagree with the header");
        if (ell > 1 && (first_x(2) < 3 || first_x(ell) > static_cast<int64_t>(h_.n)))
            throw format_error("PLAC segment starts out of range");
        for (uint64_t i = 1; i < ell; ++i) {
            const uint64_t gap = y_.select_unchecked(i + 1) - y_.select_unchecked(i);
            if (p_.select_unchecked(i + 1) - p_.select_unchecked(i) != bits::ceil_log2(gap + 1))
                throw format_error("PLAC field widths disagree with Y");
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
};

inline CompressedPlaC encode_c(const Pla &pla, const PointSeq &pts, Mode mode) {
    if (pla.setting != Setting::compression || pts.setting() != Setting::compression)
        throw validation_error("compression container needs a compression-setting PLA and sequence");
    const auto &segs = pla.segments;
    const uint64_t ell = segs.size();
    if (ell == 0 || pla.n != pts.n() || pla.u != pts.value(pts.n()) || pla.epsilon == 0 ||
        pla.epsilon_eff < pla.epsilon)
        throw validation_error("PLA does not match the sequence");
    const auto n = static_cast<int64_t>(pla.n);
    for (uint64_t i = 0; i < ell; ++i) {
        const Segment &s = segs[i];
        const int64_t end = i + 1 < ell ? segs[i + 1].first_x - 1 : n;
        if ((i == 0 && s.first_x != 1) || s.last_x != end || s.first_x > end)
            throw validation_error("segment " + std::to_string(i + 1) + " does not tile the positions");
        if (i + 1 < ell && end - s.first_x < 1)
            throw validation_error("segment " + std::to_string(i + 1) + " covers fewer than two positions");
        if (s.first_y != static_cast<int64_t>(pts.value(static_cast<uint64_t>(s.first_x))) ||
            s.last_y != static_cast<int64_t>(pts.value(static_cast<uint64_t>(end))))
            throw validation_error("segment " + std::to_string(i + 1) + " covered values disagree with the sequence");
    }

    CompressedPlaC c;
    c.mode_ = mode;
    c.h_ = {pla.n, pla.u, ell, pla.epsilon, pla.epsilon_eff, 0};

    if (mode == Mode::ef) {
        std::vector<uint64_t> xs;
        for (uint64_t i = 1; i < ell; ++i)  // x_{i+1} − i − 2
            xs.push_back(static_cast<uint64_t>(segs[i].first_x) - i - 2);
        c.x_ef_ = EliasFano(xs, xs.empty() ? 0 : xs.back() + 1);
    } else {
        BitVector xb(pla.n - 1);
        for (uint64_t i = 1; i < ell; ++i)
            xb.set(static_cast<uint64_t>(segs[i].first_x) - 2, true);
        c.x_rs_ = RankSelectIndex(std::move(xb));
    }

    std::vector<uint64_t> ys, offsets;
    std::vector<int64_t> dbeta, dgamma;
    for (uint64_t i = 0; i < ell; ++i) {
        const Segment &s = segs[i];
        ys.push_back(static_cast<uint64_t>(s.first_y) - 1);
        dbeta.push_back(s.intercept - s.first_y);
        dgamma.push_back(s.final_y - s.last_y);
        if (i + 1 < ell) {
            const int64_t next_y = segs[i + 1].first_y;
            if (s.last_y < s.first_y || s.last_y > next_y)
                throw validation_error("segment " + std::to_string(i + 1) + " last value outside [y_i, y_{i+1}]");
            const auto width = bits::ceil_log2(static_cast<uint64_t>(next_y - s.first_y + 1));
            offsets.push_back(c.b_.size());
            c.b_.append_bits(static_cast<uint64_t>(s.last_y - s.first_y), width);
        }
    }
    offsets.push_back(c.b_.size());
    c.y_ = EliasFano(ys, pla.u);
    c.p_ = EliasFano(offsets, c.b_.size() + 1);

    const unsigned w = detail::delta_width(dbeta);
    const unsigned wd = std::max(w, detail::delta_width(dgamma));
    c.h_.w_delta = wd;
    c.db_ = PackedArray(wd);
    c.dg_ = PackedArray(wd);
    for (uint64_t i = 0; i < ell; ++i) {
        c.db_.push_back(bits::zigzag_encode(dbeta[i]));
        c.dg_.push_back(bits::zigzag_encode(dgamma[i]));
    }
    return c;
}

inline uint64_t segment_of_c(const CompressedPlaC &c, int64_t x, QueryTrace *t = nullptr) {
    return c.segment_of(x, t);
}
inline Segment decode_segment_c(const CompressedPlaC &c, uint64_t i, QueryTrace *t = nullptr) {
    return c.decode_segment(i, t);
}
inline int64_t predict_c(const CompressedPlaC &c, int64_t x, QueryTrace *t = nullptr) { return c.predict(x, t); }
inline BitBudget size_bits_c(const CompressedPlaC &c) { return c.size_bits(); }

} // namespace plastore
