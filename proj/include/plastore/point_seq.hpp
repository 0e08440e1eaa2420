#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "errors.hpp"

namespace plastore {

enum class Setting : uint8_t { compression = 0, indexing = 1 };

inline std::string_view to_string(Setting s) noexcept {
    return s == Setting::compression ? "compression" : "indexing";
}

inline Setting parse_setting(std::string_view s) {
    if (s == "compression" || s == "c")
        return Setting::compression;
    if (s == "indexing" || s == "i")
        return Setting::indexing;
    throw validation_error("unknown setting '" + std::string(s) + "'");
}

/// Values are capped so that slope cross products stay inside 128-bit arithmetic.
inline constexpr uint64_t max_value = uint64_t{1} << 60;

/// A monotone sequence over [1, u] viewed as a planar point set.
///
/// Compression maps value i to (i, values[i]); indexing maps it to (values[i], i).
/// Indexing needs distinct keys. Compression accepts repeated values, which
/// only ever make segments easier to fit.
class PointSeq {
public:
    PointSeq(std::vector<uint64_t> values, uint64_t u, Setting setting)
        : values_(std::move(values)), u_(u), setting_(setting) {
        if (values_.empty())
            throw degenerate_input_error("empty sequence");
        for (size_t i = 0; i < values_.size(); ++i) {
            const uint64_t v = values_[i];
            if (v < 1 || v > max_value)
                throw validation_error("value " + std::to_string(v) + " at index " + std::to_string(i + 1) +
                                       " outside [1, 2^60]");
            if (i > 0) {
                const uint64_t prev = values_[i - 1];
                if (v < prev || (v == prev && setting == Setting::indexing))
                    throw validation_error("sequence not " +
                                           std::string(setting == Setting::indexing ? "strictly increasing"
                                                                                    : "non-decreasing") +
                                           " at index " + std::to_string(i + 1));
            }
        }
        if (u_ == 0)
            u_ = values_.back();
        if (u_ < values_.back())
            throw validation_error("universe " + std::to_string(u_) + " below maximum value " +
                                   std::to_string(values_.back()));
        if (u_ > max_value)
            throw validation_error("universe exceeds 2^60");
    }

    /// Universe defaults to the largest value.
    PointSeq(std::vector<uint64_t> values, Setting setting) : PointSeq(std::move(values), 0, setting) {}

    [[nodiscard]] uint64_t n() const noexcept { return values_.size(); }
    [[nodiscard]] uint64_t u() const noexcept { return u_; }
    [[nodiscard]] Setting setting() const noexcept { return setting_; }
    [[nodiscard]] const std::vector<uint64_t> &values() const noexcept { return values_; }

    /// 1-indexed value.
    [[nodiscard]] uint64_t value(uint64_t i) const noexcept { return values_[i - 1]; }

    /// Abscissa and ordinate of the i-th point (1-indexed).
    [[nodiscard]] int64_t x(uint64_t i) const noexcept {
        return static_cast<int64_t>(setting_ == Setting::compression ? i : values_[i - 1]);
    }
    [[nodiscard]] int64_t y(uint64_t i) const noexcept {
        return static_cast<int64_t>(setting_ == Setting::compression ? values_[i - 1] : i);
    }

private:
    std::vector<uint64_t> values_;
    uint64_t u_;
    Setting setting_;
};

} // namespace plastore
