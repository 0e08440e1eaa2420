#pragma once

#include <bit>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "bits.hpp"
#include "errors.hpp"
#include "serialize.hpp"

namespace plastore {

/// Append-only packed bit sequence. Bit j lives in word j/64 at offset j%64.
class BitVector {
public:
    BitVector() = default;

    explicit BitVector(uint64_t length, bool value = false)
        : words_(bits::words_for(length), value ? ~uint64_t{0} : 0), size_(length) {
        clear_tail();
    }

    void push_back(bool b) {
        if (size_ % 64 == 0)
            words_.push_back(0);
        if (b)
            words_.back() |= uint64_t{1} << (size_ % 64);
        ++size_;
    }

    /// Appends the low `width` bits of `v`, least significant first.
    void append_bits(uint64_t v, unsigned width) {
        if (width == 0)
            return;
        v &= bits::low_mask(width);
        const unsigned off = size_ % 64;
        if (off == 0)
            words_.push_back(0);
        words_.back() |= v << off;
        if (off + width > 64)
            words_.push_back(v >> (64 - off));
        size_ += width;
    }

    void set(uint64_t pos, bool b) {
        check(pos);
        const uint64_t m = uint64_t{1} << (pos % 64);
        if (b)
            words_[pos / 64] |= m;
        else
            words_[pos / 64] &= ~m;
    }

    [[nodiscard]] bool operator[](uint64_t pos) const noexcept { return (words_[pos / 64] >> (pos % 64)) & 1; }

    [[nodiscard]] bool get(uint64_t pos) const {
        check(pos);
        return (*this)[pos];
    }

    /// Reads `width` bits starting at `pos` (width ≤ 64, pos + width ≤ size).
    [[nodiscard]] uint64_t get_bits(uint64_t pos, unsigned width) const noexcept {
        if (width == 0)
            return 0;
        const uint64_t w = pos / 64;
        const unsigned off = pos % 64;
        uint64_t v = words_[w] >> off;
        if (off + width > 64)
            v |= words_[w + 1] << (64 - off);
        return v & bits::low_mask(width);
    }

    [[nodiscard]] uint64_t size() const noexcept { return size_; }
    [[nodiscard]] bool empty() const noexcept { return size_ == 0; }
    [[nodiscard]] std::span<const uint64_t> words() const noexcept { return words_; }

    [[nodiscard]] uint64_t count_ones() const noexcept {
        uint64_t c = 0;
        for (uint64_t w : words_)
            c += static_cast<uint64_t>(std::popcount(w));
        return c;
    }

    [[nodiscard]] SizeParts size_parts() const noexcept {
        return {.payload = size_, .aux = 0, .framing = 64, .padding = words_.size() * 64 - size_};
    }

    void serialize(ByteWriter &out) const {
        out.u64(size_);
        out.words(words_);
    }

    static BitVector deserialize(ByteReader &in) {
        BitVector bv;
        bv.size_ = in.u64();
        if (bv.size_ > in.remaining() * 8)
            throw format_error("bit vector length exceeds available data");
        bv.words_ = in.words(bits::words_for(bv.size_));
        if (bv.size_ % 64 != 0 && (bv.words_.back() >> (bv.size_ % 64)) != 0)
            throw format_error("nonzero padding bits in bit vector");
        return bv;
    }

    friend bool operator==(const BitVector &, const BitVector &) = default;

private:
    void check(uint64_t pos) const {
        if (pos >= size_)
            throw range_error("bit position " + std::to_string(pos) + " out of range [0, " +
                              std::to_string(size_) + ")");
    }

    void clear_tail() noexcept {
        if (size_ % 64 != 0)
            words_.back() &= bits::low_mask(size_ % 64);
    }

    std::vector<uint64_t> words_;
    uint64_t size_ = 0;
};

/// Fixed-width unsigned fields packed back to back.
class PackedArray {
public:
    PackedArray() = default;

    explicit PackedArray(unsigned width) : width_(width) {
        if (width > 64)
            throw validation_error("packed field width exceeds 64 bits");
    }

    void push_back(uint64_t v) {
        if (width_ < 64 && (v >> width_) != 0)
            throw validation_error("value " + std::to_string(v) + " does not fit in " +
                                   std::to_string(width_) + " bits");
        bits_.append_bits(v, width_);
        ++count_;
    }

    /// Zero-based field read.
    [[nodiscard]] uint64_t operator[](uint64_t i) const noexcept { return bits_.get_bits(i * width_, width_); }

    [[nodiscard]] uint64_t at(uint64_t i) const {
        if (i >= count_)
            throw range_error("packed index " + std::to_string(i) + " out of range [0, " +
                              std::to_string(count_) + ")");
        return (*this)[i];
    }

    [[nodiscard]] uint64_t size() const noexcept { return count_; }
    [[nodiscard]] unsigned width() const noexcept { return width_; }

    [[nodiscard]] SizeParts size_parts() const noexcept {
        SizeParts p = bits_.size_parts();
        p.framing += 8 + 64;
        return p;
    }

    void serialize(ByteWriter &out) const {
        out.u8(static_cast<uint8_t>(width_));
        out.u64(count_);
        bits_.serialize(out);
    }

    static PackedArray deserialize(ByteReader &in) {
        PackedArray a;
        a.width_ = in.u8();
        if (a.width_ > 64)
            throw format_error("packed field width exceeds 64 bits");
        a.count_ = in.u64();
        a.bits_ = BitVector::deserialize(in);
        if (a.width_ == 0 ? a.bits_.size() != 0 : a.bits_.size() / a.width_ != a.count_ ||
                                                      a.bits_.size() % a.width_ != 0)
            throw format_error("packed array length does not match field count");
        return a;
    }

    friend bool operator==(const PackedArray &, const PackedArray &) = default;

private:
    BitVector bits_;
    uint64_t count_ = 0;
    unsigned width_ = 0;
};

} // namespace plastore
