#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>
#include <vector>

#include <plastore/oracle.hpp>
#include <plastore/store_compression.hpp>
#include "support.hpp"

using namespace plastore;

namespace {

std::vector<uint64_t> random_values(std::mt19937_64 &rng, uint64_t n, uint64_t max_step) {
    std::uniform_int_distribution<uint64_t> step(0, max_step);
    std::vector<uint64_t> v;
    uint64_t cur = 1 + step(rng);
    for (uint64_t i = 0; i < n; ++i) {
        v.push_back(cur);
        cur += step(rng);
    }
    return v;
}

// Every query answered by the container must agree with the PLA it was built from.
void check_against_pla(const CompressedPlaC &c, const Pla &pla) {
    REQUIRE(c.size() == pla.size());
    for (uint64_t i = 1; i <= pla.size(); ++i)
        REQUIRE(c.decode_segment(i) == pla.segments[i - 1]);
    size_t seg = 0;
    for (int64_t x = 1; x <= static_cast<int64_t>(pla.n); ++x) {
        while (seg + 1 < pla.size() && pla.segments[seg + 1].first_x <= x)
            ++seg;
        REQUIRE(c.segment_of(x) == seg + 1);
        REQUIRE(c.predict(x) == predict_reference(pla, x));
    }
}

void check_bytes(const CompressedPlaC &c) {
    const auto bytes = c.serialize();
    const BitBudget b = c.size_bits();
    REQUIRE(b.total_bits() == bytes.size() * 8);
    const auto back = CompressedPlaC::deserialize(bytes);
    REQUIRE(back.serialize() == bytes);
    REQUIRE(back.header() == c.header());
    REQUIRE(back.mode() == c.mode());
}

} // namespace

TEST_CASE("two-segment fixture") {
    PointSeq p({1, 2, 3, 10, 11, 12}, Setting::compression);
    const Pla pla = build_optimal_pla(p, 1);
    REQUIRE(pla.size() == 2);
    for (Mode m : {Mode::ef, Mode::rs}) {
        const auto c = encode_c(pla, p, m);
        check_against_pla(c, pla);
        check_bytes(c);
        CHECK(c.first_x(2) == 4);
        const Segment s = c.decode_segment(1);
        CHECK(s.first_y == 1);
        CHECK(s.last_y == 3);
        CHECK(c.decode_segment(2).last_y == 12);
        // B holds one field of ⌈log2(10 − 1 + 1)⌉ bits
        CHECK(c.size_bits().b == 4);
    }
}

TEST_CASE("single segment and single point") {
    for (Mode m : {Mode::ef, Mode::rs}) {
        PointSeq one({5}, Setting::compression);
        const Pla a = build_optimal_pla(one, 2);
        const auto c = encode_c(a, one, m);
        check_against_pla(c, a);
        check_bytes(c);
        CHECK(c.size_bits().x == 0);

        PointSeq flat({4, 4, 4, 4}, Setting::compression);
        const Pla b = build_optimal_pla(flat, 1);
        const auto d = encode_c(b, flat, m);
        check_against_pla(d, b);
        check_bytes(d);
    }
}

TEST_CASE("random sequences round trip in both modes") {
    std::mt19937_64 rng(31337);
    for (int t = 0; t < 1500; ++t) {
        const uint64_t n = 1 + rng() % (t < 1000 ? 60 : 3000);
        const uint64_t eps = uint64_t{1} << (rng() % 6);
        const auto v = random_values(rng, n, 1 + rng() % 200);
        PointSeq p(v, Setting::compression);
        const Pla pla = build_optimal_pla(p, eps);
        const auto ef = encode_c(pla, p, Mode::ef);
        const auto rs = encode_c(pla, p, Mode::rs);
        if (n <= 300) {
            check_against_pla(ef, pla);
            check_against_pla(rs, pla);
        } else {
            for (int q = 0; q < 200; ++q) {
                const auto x = static_cast<int64_t>(1 + rng() % n);
                REQUIRE(ef.predict(x) == rs.predict(x));
                REQUIRE(ef.predict(x) == predict_reference(pla, x));
            }
        }
        check_bytes(ef);
        check_bytes(rs);
        // the decoded predictions stay within ε_eff of the data
        for (uint64_t i = 1; i <= n; i += 1 + n / 50)
            REQUIRE(std::llabs(ef.predict(static_cast<int64_t>(i)) - static_cast<int64_t>(p.value(i))) <=
                    static_cast<int64_t>(pla.epsilon_eff));
    }
}

TEST_CASE("bit accounting") {
    std::mt19937_64 rng(8);
    const auto v = random_values(rng, 20000, 50);
    PointSeq p(v, Setting::compression);
    const Pla pla = build_optimal_pla(p, 4);
    const auto c = encode_c(pla, p, Mode::ef);
    const BitBudget b = c.size_bits();
    CHECK(b.header == 384);
    CHECK(b.gamma_last == 0);
    CHECK(b.structure_bits() + b.framing + b.padding == c.serialize().size() * 8);
    // Y payload: ℓ low parts plus at most ℓ + u / 2^L high bits
    const double ell = static_cast<double>(pla.size());
    CHECK(static_cast<double>(b.y) <= 2 * ell + ell * std::ceil(std::log2(static_cast<double>(pla.u) / ell)));
    CHECK(b.delta_beta == pla.size() * c.header().w_delta);
}

TEST_CASE("query work") {
    std::mt19937_64 rng(4);
    const auto v = random_values(rng, 200000, 30);
    PointSeq p(v, Setting::compression);
    const Pla pla = build_optimal_pla(p, 1);
    const auto ef = encode_c(pla, p, Mode::ef);
    const auto rs = encode_c(pla, p, Mode::rs);
    const double limit = std::log2(static_cast<double>(pla.size())) + 2;
    for (int q = 0; q < 2000; ++q) {
        const auto x = static_cast<int64_t>(1 + rng() % p.n());
        QueryTrace te, tr;
        REQUIRE(ef.predict(x, &te) == rs.predict(x, &tr));
        REQUIRE(static_cast<double>(te.search_steps) <= limit);
        REQUIRE(tr.search_steps == 0);
        REQUIRE(tr.probes <= 9);
    }
}

TEST_CASE("range errors") {
    PointSeq p({1, 2, 3, 10, 11, 12}, Setting::compression);
    const auto c = encode_c(build_optimal_pla(p, 1), p, Mode::ef);
    CHECK_THROWS_AS(c.predict(0), range_error);
    CHECK_THROWS_AS(c.predict(7), range_error);
    CHECK_THROWS_AS(c.decode_segment(0), range_error);
    CHECK_THROWS_AS(c.decode_segment(3), range_error);
}

TEST_CASE("encode rejects mismatched inputs") {
    PointSeq p({1, 2, 3, 10, 11, 12}, Setting::compression);
    Pla pla = build_optimal_pla(p, 1);
    PointSeq other({1, 2, 3, 10, 11, 13}, Setting::compression);
    CHECK_THROWS_AS(encode_c(pla, other, Mode::ef), validation_error);
    PointSeq idx({1, 2, 3, 10, 11, 12}, Setting::indexing);
    CHECK_THROWS_AS(encode_c(pla, idx, Mode::ef), validation_error);

    Pla narrow = pla;  // a one-position segment before the last
    narrow.segments = {Segment{1, 1, 1, 1, 1, 1}, Segment{2, 6, 2, 12, 2, 12}};
    CHECK_THROWS_AS(encode_c(narrow, p, Mode::rs), validation_error);
    Pla gap = pla;
    gap.segments[1].first_x = 5;
    CHECK_THROWS_AS(encode_c(gap, p, Mode::ef), validation_error);
}

TEST_CASE("corrupt images are rejected") {
    std::mt19937_64 rng(12);
    const auto v = random_values(rng, 500, 20);
    PointSeq p(v, Setting::compression);
    const Pla pla = build_optimal_pla(p, 1);
    for (Mode m : {Mode::ef, Mode::rs}) {
        const auto bytes = encode_c(pla, p, m).serialize();
        for (size_t cut = 0; cut < bytes.size(); cut += 1 + cut / 7) {
            std::vector<uint8_t> t(bytes.begin(), bytes.begin() + static_cast<std::ptrdiff_t>(cut));
            CHECK_THROWS_AS(CompressedPlaC::deserialize(t), format_error);
        }
        auto extra = bytes;
        extra.push_back(0);
        CHECK_THROWS_AS(CompressedPlaC::deserialize(extra), format_error);
        auto magic = bytes;
        magic[3] = 'I';
        CHECK_THROWS_AS(CompressedPlaC::deserialize(magic), format_error);
        auto version = bytes;
        version[4] = 9;
        CHECK_THROWS_AS(CompressedPlaC::deserialize(version), format_error);
        auto mode = bytes;
        mode[5] = static_cast<uint8_t>(m == Mode::ef ? 1 : 0);
        CHECK_THROWS_AS(CompressedPlaC::deserialize(mode), format_error);
        auto ell = bytes;
        ell[6 + 16] ^= 1;  // header field ℓ
        CHECK_THROWS_AS(CompressedPlaC::deserialize(ell), format_error);
    }
}
