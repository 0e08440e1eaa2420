#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "bit_vector.hpp"
#include "bits.hpp"
#include "budget.hpp"
#include "errors.hpp"
#include "serialize.hpp"

namespace plastore {

enum class Mode : uint8_t { ef = 0, rs = 1 };

inline std::string_view to_string(Mode m) noexcept { return m == Mode::ef ? "ef" : "rs"; }

inline Mode parse_mode(std::string_view s) {
    if (s == "ef")
        return Mode::ef;
    if (s == "rs")
        return Mode::rs;
    throw validation_error("unknown mode '" + std::string(s) + "'");
}

/// Work counters filled by queries when a trace is passed in.
struct QueryTrace {
    uint64_t search_steps = 0;  // binary-search iterations locating the segment
    uint64_t probes = 0;        // rank, select and field reads on the components
};

inline void count_probe(QueryTrace *t, uint64_t k = 1) noexcept {
    if (t)
        t->probes += k;
}

inline constexpr uint8_t format_version = 1;

struct StoreHeader {
    uint64_t n = 0;
    uint64_t u = 0;
    uint64_t ell = 0;
    uint64_t epsilon = 0;
    uint64_t epsilon_eff = 0;
    uint64_t w_delta = 0;

    static constexpr uint64_t bits = 6 * 64;

    friend bool operator==(const StoreHeader &, const StoreHeader &) = default;
};

namespace detail {

inline constexpr uint64_t preamble_bits = 32 + 8 + 8;  // magic, version, mode

inline void write_preamble(ByteWriter &out, std::string_view magic, Mode mode, const StoreHeader &h) {
    out.raw(magic);
    out.u8(format_version);
    out.u8(static_cast<uint8_t>(mode));
    for (uint64_t v : {h.n, h.u, h.ell, h.epsilon, h.epsilon_eff, h.w_delta})
        out.u64(v);
}

inline Mode read_preamble(ByteReader &in, std::string_view magic, StoreHeader &h) {
    if (in.remaining() < 4 || in.raw(4) != magic)
        throw format_error("bad magic, expected " + std::string(magic));
    const uint8_t version = in.u8();
    if (version != format_version)
        throw format_error("unsupported format version " + std::to_string(version));
    const uint8_t mode = in.u8();
    if (mode > 1)
        throw format_error("unknown mode byte " + std::to_string(mode));
    h.n = in.u64();
    h.u = in.u64();
    h.ell = in.u64();
    h.epsilon = in.u64();
    h.epsilon_eff = in.u64();
    h.w_delta = in.u64();
    if (h.n == 0 || h.ell == 0 || h.ell > h.n || h.epsilon == 0 || h.epsilon_eff < h.epsilon || h.w_delta > 64)
        throw format_error("inconsistent header fields");
    return static_cast<Mode>(mode);
}

/// Serializes one component into its own length-prefixed block.
template <class T>
void write_component(ByteWriter &out, const T &c) {
    ByteWriter sub;
    c.serialize(sub);
    out.block(sub);
}

template <class T>
T read_component(ByteReader &in) {
    ByteReader sub = in.block();
    T c = T::deserialize(sub);
    sub.expect_end();
    return c;
}

/// Adds one component's accounting to the budget; `slot` receives its payload.
inline void account(BitBudget &b, uint64_t &slot, const SizeParts &p) {
    slot += p.payload;
    b.aux += p.aux;
    b.framing += p.framing + 64;  // plus the block length prefix
    b.padding += p.padding;
}

/// Zig-zag widths: the smallest width holding every folded delta.
inline unsigned delta_width(std::span<const int64_t> deltas) {
    uint64_t m = 0;
    for (int64_t d : deltas)
        m = std::max(m, bits::zigzag_encode(d));
    return static_cast<unsigned>(std::bit_width(m));
}

/// Binary search for the largest i in [1, count] with key(i) ≤ x, given key(1) ≤ x.
template <class Key>
uint64_t search_last_leq(uint64_t count, int64_t x, Key key, QueryTrace *trace) {
    uint64_t lo = 1, hi = count;
    while (lo < hi) {
        if (trace)
            ++trace->search_steps;
        const uint64_t mid = lo + (hi - lo + 1) / 2;
        if (key(mid) <= x)
            lo = mid;
        else
            hi = mid - 1;
    }
    return lo;
}

} // namespace detail

} // namespace plastore
