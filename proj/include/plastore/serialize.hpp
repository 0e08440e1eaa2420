#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "errors.hpp"

namespace plastore {

/// Bit accounting of one serialized structure. The four parts always add up to
/// eight times the structure's serialized byte length.
struct SizeParts {
    uint64_t payload = 0;  // information bits (packed fields, unary codes)
    uint64_t aux = 0;      // rank/select directories
    uint64_t framing = 0;  // length prefixes and self-description
    uint64_t padding = 0;  // unused tail bits of the last word

    [[nodiscard]] uint64_t total() const noexcept { return payload + aux + framing + padding; }

    SizeParts &operator+=(const SizeParts &o) noexcept {
        payload += o.payload;
        aux += o.aux;
        framing += o.framing;
        padding += o.padding;
        return *this;
    }
};

/// Little-endian byte sink. All multi-byte integers are written LSB first
/// regardless of host order, so the output is bit-exact across platforms.
class ByteWriter {
public:
    void u8(uint8_t v) { bytes_.push_back(v); }

    void u16(uint16_t v) {
        for (int i = 0; i < 2; ++i)
            bytes_.push_back(static_cast<uint8_t>(v >> (8 * i)));
    }

    void u64(uint64_t v) {
        for (int i = 0; i < 8; ++i)
            bytes_.push_back(static_cast<uint8_t>(v >> (8 * i)));
    }

    void raw(std::string_view s) { bytes_.insert(bytes_.end(), s.begin(), s.end()); }

    void words(std::span<const uint64_t> ws) {
        for (uint64_t w : ws)
            u64(w);
    }

    /// Writes `payload` preceded by its byte length as u64.
    void block(const ByteWriter &payload) {
        u64(payload.size());
        bytes_.insert(bytes_.end(), payload.bytes_.begin(), payload.bytes_.end());
    }

    [[nodiscard]] size_t size() const noexcept { return bytes_.size(); }
    [[nodiscard]] const std::vector<uint8_t> &bytes() const noexcept { return bytes_; }
    std::vector<uint8_t> take() && { return std::move(bytes_); }

private:
    std::vector<uint8_t> bytes_;
};

/// Bounds-checked little-endian byte source; every overrun is a format_error.
class ByteReader {
public:
    explicit ByteReader(std::span<const uint8_t> data) : data_(data) {}

    uint8_t u8() {
        need(1);
        return data_[pos_++];
    }

    uint16_t u16() {
        need(2);
        uint16_t v = static_cast<uint16_t>(data_[pos_] | (data_[pos_ + 1] << 8));
        pos_ += 2;
        return v;
    }

    uint64_t u64() {
        need(8);
        uint64_t v = 0;
        for (int i = 0; i < 8; ++i)
            v |= static_cast<uint64_t>(data_[pos_ + i]) << (8 * i);
        pos_ += 8;
        return v;
    }

    std::string raw(size_t n) {
        need(n);
        std::string s(reinterpret_cast<const char *>(data_.data() + pos_), n);
        pos_ += n;
        return s;
    }

    std::vector<uint64_t> words(size_t count) {
        if (count > remaining() / 8)
            throw format_error("truncated word array");
        std::vector<uint64_t> ws(count);
        for (auto &w : ws)
            w = u64();
        return ws;
    }

    /// Reads a u64 length prefix and returns a reader over exactly that many bytes.
    ByteReader block() {
        uint64_t len = u64();
        if (len > remaining())
            throw format_error("component length exceeds container size");
        ByteReader sub(data_.subspan(pos_, len));
        pos_ += len;
        return sub;
    }

    [[nodiscard]] size_t remaining() const noexcept { return data_.size() - pos_; }

    void expect_end() const {
        if (remaining() != 0)
            throw format_error("trailing bytes after component");
    }

private:
    void need(size_t n) const {
        if (n > remaining())
            throw format_error("unexpected end of data");
    }

    std::span<const uint8_t> data_;
    size_t pos_ = 0;
};

} // namespace plastore
