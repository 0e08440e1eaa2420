#pragma once

#include <algorithm>
#include <bit>
#include <cstdint>
#include <string>
#include <vector>

#include "bit_vector.hpp"
#include "bits.hpp"
#include "errors.hpp"
#include "serialize.hpp"

namespace plastore {

/// Rank/select over an owned BitVector.
///
/// Layout: absolute 64-bit counts per 4096-bit superblock, 16-bit counts per
/// 512-bit block relative to their superblock, and the position of every
/// 512th one. Entries that are always zero (superblock 0, block 0, the first
/// one) are not stored, so short vectors carry no directory at all.
/// The select_only kind keeps just the samples and scans words from them; it
/// suits dense vectors such as Elias-Fano high bits.
class RankSelectIndex {
public:
    enum class Kind : uint8_t { rank_select = 0, select_only = 1 };

    static constexpr uint64_t superblock_bits = 4096;
    static constexpr uint64_t block_bits = 512;
    static constexpr uint64_t select_sample = 512;

    RankSelectIndex() = default;

    explicit RankSelectIndex(BitVector bv, Kind kind = Kind::rank_select) : bv_(std::move(bv)), kind_(kind) {
        build();
    }

    [[nodiscard]] const BitVector &bits() const noexcept { return bv_; }
    [[nodiscard]] uint64_t size() const noexcept { return bv_.size(); }
    [[nodiscard]] uint64_t ones() const noexcept { return ones_; }
    [[nodiscard]] Kind kind() const noexcept { return kind_; }

    /// Number of ones in [0, pos).
    [[nodiscard]] uint64_t rank1(uint64_t pos) const {
        if (pos > bv_.size())
            throw range_error("rank position " + std::to_string(pos) + " exceeds length " +
                              std::to_string(bv_.size()));
        if (kind_ == Kind::select_only)
            throw validation_error("rank1 on a select-only index");
        return rank1_unchecked(pos);
    }

    [[nodiscard]] uint64_t rank0(uint64_t pos) const { return pos - rank1(pos); }

    /// Position of the k-th one, k 1-indexed.
    [[nodiscard]] uint64_t select1(uint64_t k) const {
        if (k < 1 || k > ones_)
            throw range_error("select ordinal " + std::to_string(k) + " out of range [1, " +
                              std::to_string(ones_) + "]");
        return select1_unchecked(k);
    }

    [[nodiscard]] uint64_t rank1_unchecked(uint64_t pos) const noexcept {
        const uint64_t sb = pos / superblock_bits;
        const uint64_t blk = pos / block_bits;
        uint64_t r = (sb == 0 ? 0 : super_[sb - 1]) + (blk == 0 ? 0 : block_[blk - 1]);
        const auto words = bv_.words();
        const uint64_t w_end = pos / 64;
        for (uint64_t w = blk * (block_bits / 64); w < w_end; ++w)
            r += static_cast<uint64_t>(std::popcount(words[w]));
        if (pos % 64 != 0)
            r += static_cast<uint64_t>(std::popcount(words[w_end] & bits::low_mask(pos % 64)));
        return r;
    }

    [[nodiscard]] uint64_t select1_unchecked(uint64_t k) const noexcept {
        const uint64_t s = (k - 1) / select_sample;
        const uint64_t start = s == 0 ? 0 : samples_[s - 1];
        // ones strictly before `start` equal s * select_sample
        uint64_t w = start / 64;
        uint64_t remaining = k - s * select_sample;  // 1-based ordinal from `start`
        if (kind_ == Kind::rank_select) {
            // Narrow to a block with the directory before scanning words.
            const uint64_t stop = s < samples_.size() ? samples_[s] : bv_.size();
            uint64_t lo = start / block_bits, hi = stop / block_bits;  // target block in [lo, hi]
            while (lo < hi) {
                const uint64_t mid = lo + (hi - lo + 1) / 2;
                if (block_rank(mid) < k)
                    lo = mid;
                else
                    hi = mid - 1;
            }
            const uint64_t base = lo * block_bits;
            if (base > start) {
                w = base / 64;
                remaining = k - block_rank(lo);
            }
        }
        const auto words = bv_.words();
        uint64_t word = words[w];
        if (w == start / 64)
            word &= ~bits::low_mask(start % 64);
        for (;;) {
            const auto c = static_cast<uint64_t>(std::popcount(word));
            if (remaining <= c)
                return w * 64 + bits::select_in_word(word, static_cast<unsigned>(remaining - 1));
            remaining -= c;
            word = words[++w];
        }
    }

    [[nodiscard]] SizeParts size_parts() const noexcept {
        SizeParts p = bv_.size_parts();
        p.aux = 64 * super_.size() + 16 * block_.size() + 64 * samples_.size();
        p.framing += 8 + 3 * 64;
        return p;
    }

    [[nodiscard]] uint64_t aux_bits() const noexcept { return size_parts().aux; }

    void serialize(ByteWriter &out) const {
        bv_.serialize(out);
        out.u8(static_cast<uint8_t>(kind_));
        out.u64(super_.size());
        out.words(super_);
        out.u64(block_.size());
        for (uint16_t b : block_)
            out.u16(b);
        out.u64(samples_.size());
        out.words(samples_);
    }

    /// Reads the stored directories and checks them against a fresh rebuild.
    static RankSelectIndex deserialize(ByteReader &in) {
        BitVector bv = BitVector::deserialize(in);
        const uint8_t kind = in.u8();
        if (kind > 1)
            throw format_error("unknown rank/select kind " + std::to_string(kind));
        RankSelectIndex idx(std::move(bv), static_cast<Kind>(kind));
        std::vector<uint64_t> super = in.words(in.u64());
        const uint64_t nblocks = in.u64();
        if (nblocks > in.remaining() / 2)
            throw format_error("truncated block directory");
        std::vector<uint16_t> block(nblocks);
        for (auto &b : block)
            b = in.u16();
        std::vector<uint64_t> samples = in.words(in.u64());
        if (super != idx.super_ || block != idx.block_ || samples != idx.samples_)
            throw format_error("rank/select directory does not match its bit vector");
        return idx;
    }

    friend bool operator==(const RankSelectIndex &, const RankSelectIndex &) = default;

private:
    [[nodiscard]] uint64_t block_rank(uint64_t blk) const noexcept {
        const uint64_t sb = blk * block_bits / superblock_bits;
        return (sb == 0 ? 0 : super_[sb - 1]) + (blk == 0 ? 0 : block_[blk - 1]);
    }

    void build() {
        const auto words = bv_.words();
        const uint64_t n = bv_.size();
        uint64_t total = 0, in_super = 0;
        for (uint64_t w = 0; w < words.size(); ++w) {
            const uint64_t pos = w * 64;
            if (kind_ == Kind::rank_select && pos > 0) {
                if (pos % superblock_bits == 0) {
                    super_.push_back(total);
                    in_super = 0;
                }
                if (pos % block_bits == 0)
                    block_.push_back(static_cast<uint16_t>(in_super));
            }
            uint64_t word = words[w];
            const auto c = static_cast<uint64_t>(std::popcount(word));
            // samples: position of ones numbered 512*j + 1, j ≥ 1
            const uint64_t next_sample =
                std::max<uint64_t>((total + select_sample - 1) / select_sample, 1) * select_sample + 1;
            if (total + c >= next_sample) {
                uint64_t k = next_sample;
                while (k <= total + c) {
                    samples_.push_back(pos + bits::select_in_word(word, static_cast<unsigned>(k - total - 1)));
                    k += select_sample;
                }
            }
            total += c;
            in_super += c;
        }
        // Directory entries for a final boundary exactly at the end (rank1(size)).
        if (kind_ == Kind::rank_select && n > 0 && n % 64 == 0) {
            if (n % superblock_bits == 0) {
                super_.push_back(total);
                in_super = 0;
            }
            if (n % block_bits == 0)
                block_.push_back(static_cast<uint16_t>(in_super));
        }
        ones_ = total;
    }

    BitVector bv_;
    Kind kind_ = Kind::rank_select;
    std::vector<uint64_t> super_;
    std::vector<uint16_t> block_;
    std::vector<uint64_t> samples_;
    uint64_t ones_ = 0;
};

} // namespace plastore
