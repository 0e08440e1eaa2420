#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <utility>

#include "bit_vector.hpp"
#include "bits.hpp"
#include "errors.hpp"
#include "rank_select.hpp"
#include "serialize.hpp"

namespace plastore {

/// Elias-Fano encoding of a non-decreasing sequence of integers in [0, universe).
/// Each value keeps its low `low_width` bits in a packed array; the high part
/// h is written as a one at position h + (index) in the high bit vector.
class EliasFano {
public:
    EliasFano() = default;

    EliasFano(std::span<const uint64_t> values, uint64_t universe) : n_(values.size()), universe_(universe) {
        if (n_ > 0 && universe == 0)
            throw validation_error("nonempty sequence with universe 0");
        for (uint64_t i = 0; i < n_; ++i) {
            if (values[i] >= universe)
                throw validation_error("value " + std::to_string(values[i]) + " at index " + std::to_string(i) +
                                       " not below universe " + std::to_string(universe));
            if (i > 0 && values[i] < values[i - 1])
                throw validation_error("sequence decreases at index " + std::to_string(i));
        }
        if (n_ == 0) {
            universe_ = 0;
            high_ = RankSelectIndex(BitVector(), RankSelectIndex::Kind::select_only);
            return;
        }
        low_width_ = universe / n_ <= 1 ? 0 : bits::floor_log2(universe / n_);
        low_ = PackedArray(low_width_);
        BitVector high(n_ + ((universe - 1) >> low_width_));
        for (uint64_t i = 0; i < n_; ++i) {
            low_.push_back(values[i] & bits::low_mask(low_width_));
            high.set((values[i] >> low_width_) + i, true);
        }
        high_ = RankSelectIndex(std::move(high), RankSelectIndex::Kind::select_only);
    }

    [[nodiscard]] uint64_t size() const noexcept { return n_; }
    [[nodiscard]] uint64_t universe() const noexcept { return universe_; }
    [[nodiscard]] unsigned low_width() const noexcept { return low_width_; }
    [[nodiscard]] bool empty() const noexcept { return n_ == 0; }

    /// k-th value, k 1-indexed.
    [[nodiscard]] uint64_t select(uint64_t k) const {
        if (k < 1 || k > n_)
            throw range_error("Elias-Fano ordinal " + std::to_string(k) + " out of range [1, " +
                              std::to_string(n_) + "]");
        return select_unchecked(k);
    }

    [[nodiscard]] uint64_t select_unchecked(uint64_t k) const noexcept {
        return ((high_.select1_unchecked(k) - (k - 1)) << low_width_) | low_[k - 1];
    }

    /// Largest k with select(k) ≤ x, with that value; nullopt when every value exceeds x.
    /// `steps`, when given, is incremented once per binary-search iteration.
    [[nodiscard]] std::optional<std::pair<uint64_t, uint64_t>> pred(uint64_t x, uint64_t *steps = nullptr) const {
        if (n_ == 0)
            return std::nullopt;
        uint64_t lo = 0, hi = n_;  // answer ordinal in [lo, hi]; 0 means none
        while (lo < hi) {
            if (steps)
                ++*steps;
            const uint64_t mid = lo + (hi - lo + 1) / 2;
            if (select_unchecked(mid) <= x)
                lo = mid;
            else
                hi = mid - 1;
        }
        if (lo == 0)
            return std::nullopt;
        return std::pair{lo, select_unchecked(lo)};
    }

    [[nodiscard]] SizeParts size_parts() const noexcept {
        SizeParts p = low_.size_parts();
        p += high_.size_parts();
        p.framing += 64 + 64;
        return p;
    }

    /// Bits of the low array plus the high bit vector, excluding directories and framing.
    [[nodiscard]] uint64_t payload_bits() const noexcept { return size_parts().payload; }
    [[nodiscard]] uint64_t aux_bits() const noexcept { return size_parts().aux; }

    void serialize(ByteWriter &out) const {
        out.u64(n_);
        out.u64(universe_);
        low_.serialize(out);
        high_.serialize(out);
    }

    static EliasFano deserialize(ByteReader &in) {
        EliasFano ef;
        ef.n_ = in.u64();
        ef.universe_ = in.u64();
        ef.low_ = PackedArray::deserialize(in);
        ef.high_ = RankSelectIndex::deserialize(in);
        ef.low_width_ = ef.low_.width();
        const unsigned expect_width =
            ef.n_ == 0 || ef.universe_ / ef.n_ <= 1 ? 0 : bits::floor_log2(ef.universe_ / ef.n_);
        const uint64_t expect_high = ef.n_ == 0 ? 0 : ef.n_ + ((ef.universe_ - 1) >> ef.low_width_);
        if (ef.low_width_ != expect_width || ef.low_.size() != ef.n_ || ef.high_.size() != expect_high ||
            ef.high_.ones() != ef.n_ || ef.high_.kind() != RankSelectIndex::Kind::select_only ||
            (ef.n_ > 0 && ef.universe_ == 0))
            throw format_error("inconsistent Elias-Fano parameters");
        return ef;
    }

    friend bool operator==(const EliasFano &, const EliasFano &) = default;

private:
    uint64_t n_ = 0;
    uint64_t universe_ = 0;
    unsigned low_width_ = 0;
    PackedArray low_;
    RankSelectIndex high_{BitVector(), RankSelectIndex::Kind::select_only};
};

} // namespace plastore
