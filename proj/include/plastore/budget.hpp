#pragma once

#include <cstdint>

namespace plastore {

/// Per-component bit counts of a serialized container.
///
/// Component fields count payload bits only. Directories of every component
/// are summed in `aux`; length prefixes, magic, version and mode bytes and
/// the components' self-description fields go to `framing`; unused word
/// tails go to `padding`.
struct BitBudget {
    uint64_t x = 0;
    uint64_t y = 0;
    uint64_t b = 0;
    uint64_t p = 0;
    uint64_t delta_beta = 0;
    uint64_t delta_gamma = 0;
    uint64_t gamma_last = 0;
    uint64_t aux = 0;
    uint64_t header = 0;
    uint64_t framing = 0;
    uint64_t padding = 0;

    /// Bits that carry the PLA: payloads, directories and the six header fields.
    [[nodiscard]] uint64_t structure_bits() const noexcept {
        return x + y + b + p + delta_beta + delta_gamma + gamma_last + aux + header;
    }

    /// Equals 8 × serialized bytes.
    [[nodiscard]] uint64_t total_bits() const noexcept { return structure_bits() + framing + padding; }
};

} // namespace plastore
