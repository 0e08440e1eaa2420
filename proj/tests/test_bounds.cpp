#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>
#include <vector>

#include <plastore/bounds.hpp>
#include <plastore/store_compression.hpp>
#include <plastore/store_indexing.hpp>

using namespace plastore;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

// Every non-decreasing y in [1, u]^ℓ.
void for_each_y(uint64_t ell, uint64_t u, const std::function<void(const std::vector<uint64_t> &)> &f) {
    std::vector<uint64_t> y(ell, 1);
    while (true) {
        f(y);
        size_t k = ell;
        while (k > 0 && y[k - 1] == u)
            --k;
        if (k == 0)
            return;
        ++y[k - 1];
        for (size_t j = k; j < ell; ++j)
            y[j] = y[k - 1];
    }
}

// Every x in [1, u]^ℓ with gaps of at least `gap`.
void for_each_x(uint64_t ell, uint64_t u, uint64_t gap, const std::function<void(const std::vector<uint64_t> &)> &f) {
    std::vector<uint64_t> x;
    const std::function<void(uint64_t)> rec = [&](uint64_t from) {
        if (x.size() == ell) {
            f(x);
            return;
        }
        for (uint64_t v = from; v <= u; ++v) {
            x.push_back(v);
            rec(v + gap);
            x.pop_back();
        }
    };
    rec(1);
}

} // namespace

TEST_CASE("log2 binomial") {
    CHECK(log2_binomial(5, 0) == 0.0);
    CHECK_THAT(log2_binomial(4, 2), WithinAbs(2.584962500721156, 1e-12));
    long double sum = 0;  // log-sum oracle: Π (m − k + j) / j
    for (uint64_t j = 1; j <= 37; ++j)
        sum += std::log2(static_cast<long double>(10000 - 37 + j) / static_cast<long double>(j));
    CHECK_THAT(log2_binomial(10000, 37), WithinAbs(static_cast<double>(sum), 1e-9));
    CHECK_THAT(log2_binomial(10000, 37), WithinAbs(348.24537544126844, 1e-9));
    CHECK_THROWS_AS(log2_binomial(3, 4), domain_error);
    CHECK(std::isinf(BigCount(0).log2()));
}

TEST_CASE("count fixtures") {
    CHECK(count_c(1, 1, 5, 4, {3}) == BigCount(45));
    CHECK(count_c(2, 1, 6, 6, {2, 4}) == BigCount(15309));
    CHECK(count_c_given_y(2, 1, 6, 6, {2, 4}) == BigCount(729));
    CHECK(count_i(1, 1, 6, 4, {1}) == BigCount(45));
    CHECK(count_i(2, 1, 10, 8, {1, 4}) == BigCount(22680));
    CHECK(count_i_given_x(2, 1, 10, 8, {1, 4}) == BigCount(810));
    CHECK(count_i_general(2, 1, 10, 8) == BigCount(11340));
    CHECK(count_i_general(1, 2, 30, 9) == count_i(1, 2, 30, 9, {17}));
    CHECK_THAT(lower_bound_c(1, 1, 5, 4, {3}), WithinAbs(5.491853096329675, 1e-9));
    CHECK_THAT(lower_bound_c(2, 1, 6, 6, {2, 4}), WithinAbs(13.902092427105698, 1e-9));
    CHECK_THAT(lower_bound_i(2, 1, 10, 8, {1, 4}), WithinAbs(14.469133019829592, 1e-9));
}

TEST_CASE("domain errors") {
    CHECK_THROWS_AS(count_c(0, 1, 5, 4, {}), domain_error);
    CHECK_THROWS_AS(count_c(1, 0, 5, 4, {3}), domain_error);
    CHECK_THROWS_AS(count_c(2, 1, 6, 3, {2, 4}), domain_error);  // n < 2ℓ
    CHECK_THROWS_AS(count_c(2, 1, 6, 6, {4, 2}), domain_error);
    CHECK_THROWS_AS(count_c(1, 1, 5, 4, {6}), domain_error);
    CHECK_THROWS_AS(count_c(2, 1, 6, 6, {2}), domain_error);
    CHECK_THROWS_AS(count_i(2, 1, 10, 8, {1, 2}), domain_error);  // gap below 2ε
    CHECK_THROWS_AS(count_i(2, 2, 7, 8, {1, 5}), domain_error);   // u < ℓ(2ε−1) + ℓ
    CHECK_THROWS_AS(count_i_general(3, 2, 100, 9), domain_error);  // n < ℓ(2ε−1) + 1
    CHECK_THROWS_AS(lower_bound_i(1, 1, 6, 4, {7}), domain_error);
}

TEST_CASE("bounds equal log2 of the exact counts on the small grid") {
    for (uint64_t ell = 1; ell <= 3; ++ell)
        for (uint64_t eps = 1; eps <= 2; ++eps)
            for (uint64_t u = 1; u <= 10; ++u)
                for (uint64_t n = 2 * ell; n <= 8; ++n)
                    for_each_y(ell, u, [&](const std::vector<uint64_t> &y) {
                        REQUIRE_THAT(lower_bound_c(ell, eps, u, n, y),
                                     WithinAbs(count_c(ell, eps, u, n, y).log2(), 1e-9));
                    });
    for (uint64_t ell = 1; ell <= 3; ++ell)
        for (uint64_t eps = 1; eps <= 2; ++eps)
            for (uint64_t u = ell * 2 * eps; u <= 12; ++u)
                for (uint64_t n = ell * (2 * eps - 1) + 1; n <= 9; ++n)
                    for_each_x(ell, u, 2 * eps, [&](const std::vector<uint64_t> &x) {
                        const BigCount exact = count_i(ell, eps, u, n, x);
                        if (exact.is_zero())
                            REQUIRE_THROWS_AS(lower_bound_i(ell, eps, u, n, x), domain_error);
                        else
                            REQUIRE_THAT(lower_bound_i(ell, eps, u, n, x), WithinAbs(exact.log2(), 1e-9));
                        REQUIRE(count_i_general(ell, eps, u, n) <= count_i(ell, eps, u, n, x));
                    });
}

TEST_CASE("lower bounds grow with the universe") {
    std::mt19937_64 rng(6);
    for (int t = 0; t < 300; ++t) {
        const uint64_t ell = 1 + rng() % 20, eps = 1 + rng() % 10;
        const uint64_t n = 2 * ell * (2 * eps) + rng() % 1000;
        std::vector<uint64_t> y(ell), x(ell);
        uint64_t cy = 1 + rng() % 5, cx = 1 + rng() % 5;
        for (uint64_t i = 0; i < ell; ++i) {
            y[i] = cy;
            x[i] = cx;
            cy += rng() % 50;
            cx += 2 * eps + rng() % 50;
        }
        double prev_c = -1, prev_i = -1;
        for (uint64_t u = std::max(cy, cx); u < std::max(cy, cx) + 2000; u += 97) {
            const double c = lower_bound_c(ell, eps, u, n, y);
            const double i = lower_bound_i(ell, eps, u, n, x);
            REQUIRE(c >= prev_c);
            REQUIRE(i >= prev_i);
            prev_c = c;
            prev_i = i;
        }
    }
}

TEST_CASE("order of the compression bound") {
    std::mt19937_64 rng(17);
    for (int t = 0; t < 500; ++t) {
        const uint64_t ell = 2 + rng() % 200;
        const uint64_t n = ell * (20 + rng() % 100);  // ℓ well below n
        const uint64_t u = ell * (4 + rng() % 100000);
        const uint64_t eps = 1 + rng() % 64;
        std::vector<uint64_t> y(ell);
        std::uniform_int_distribution<uint64_t> d(1, u);
        for (auto &v : y)
            v = d(rng);
        std::sort(y.begin(), y.end());
        const double lb = lower_bound_c(ell, eps, u, n, y);
        const double base = static_cast<double>(ell) * std::log2(static_cast<double>(u) / static_cast<double>(ell));
        REQUIRE(base <= lb);
        REQUIRE(lb <= 8 * base + 4.0 * static_cast<double>(ell) * std::log2(2.0 * eps + 1) + 64);
    }
}

TEST_CASE("baseline formulas") {
    using V = BaselineVariant;
    CHECK_THAT(baseline_la_bits(4, 1, 64, 32, V::binary_search), WithinAbs(80.67970000576925, 1e-9));
    CHECK_THAT(baseline_la_bits(4, 1, 64, 32, V::constant_time), WithinAbs(77.09380540617106, 1e-9));
    CHECK_THAT(baseline_la_bits(8, 4, 1000, 100, V::binary_search), WithinAbs(239.32219809586817, 1e-9));
    CHECK_THAT(baseline_pgm_bits(4, 1, 64, 32, V::binary_search), WithinAbs(87.68, 1e-9));
    CHECK_THAT(baseline_pgm_bits(4, 1, 64, 32, V::constant_time), WithinAbs(84.73502884850629, 1e-9));
    CHECK(baseline_la_bits(4, 1, 64, 32, V::constant_time, 3.0) < baseline_la_bits(4, 1, 64, 32, V::constant_time));

    std::mt19937_64 rng(23);
    for (int t = 0; t < 1000; ++t) {
        const uint64_t ell = 1 + rng() % 100, eps = 1 + rng() % 32;
        const uint64_t n = ell * (2 * eps) + rng() % 100000;
        const uint64_t u = n + rng() % 1'000'000;
        std::vector<uint64_t> y(ell), x(ell);
        uint64_t cx = 1;
        for (uint64_t i = 0; i < ell; ++i) {
            y[i] = 1 + rng() % u;
            x[i] = cx;
            cx += 2 * eps + rng() % ((u - ell * 2 * eps) / ell + 1);
        }
        std::sort(y.begin(), y.end());
        REQUIRE(baseline_la_bits(ell, eps, u, n, V::binary_search) >= lower_bound_c(ell, eps, u, n, y));
        if (x.back() <= u)
            REQUIRE(baseline_pgm_bits(ell, eps, u, n, V::binary_search) >= lower_bound_i(ell, eps, u, n, x));
    }
}

TEST_CASE("redundancy report on a compression fixture") {
    PointSeq p({1, 2, 3, 10, 11, 12}, Setting::compression);
    const Pla pla = build_optimal_pla(p, 1);
    const auto c = encode_c(pla, p, Mode::ef);
    const BitBudget b = c.size_bits();
    const BoundParams params{2, 1, 1, 12, 6, {1, 10}};
    const BoundReport r = redundancy_report(b, params, Setting::compression);
    REQUIRE(r.bound_defined);
    CHECK(r.bound_epsilon == 1);
    // binom(3,1)·binom(13,2)·(10−1+1)·3^4 = 189540 and the conditional factor 3·10·81
    CHECK_THAT(r.lower_bound_bits, WithinAbs(17.532142817355393, 1e-9));
    CHECK_THAT(r.conditional_bound_bits, WithinAbs(11.246740598493144, 1e-9));
    CHECK(r.measured_bits == static_cast<double>(b.structure_bits()));
    CHECK(r.measured_bits ==
          static_cast<double>(b.x + b.y + b.b + b.p + b.delta_beta + b.delta_gamma + b.gamma_last + b.aux + b.header));
    CHECK_THAT(r.redundancy_bits, WithinAbs(r.measured_bits - r.lower_bound_bits, 1e-9));
    CHECK(r.redundancy_bits > 0);
    CHECK_THAT(r.redundancy_per_segment, WithinAbs(r.redundancy_bits / 2, 1e-9));
    CHECK_THAT(r.allowance_bits, WithinAbs(6 * std::log2(std::log2(6.0)) + 512, 1e-12));
    CHECK(redundancy_allowance(5, 10) == 512.0);
    CHECK_THAT(r.baseline_bits, WithinAbs(baseline_la_bits(2, 1, 12, 6, BaselineVariant::binary_search), 1e-12));

    const auto j = to_json(r);
    CHECK(j["setting"] == "compression");
    CHECK(j["bits"]["total"] == c.serialize().size() * 8);
    CHECK(j.contains("baseline_la_bits"));
    const std::string text = to_text(r);
    CHECK(text.find("bits.structure=") != std::string::npos);
    CHECK(text.find("setting=compression\n") == 0);
}

TEST_CASE("redundancy report falls back and flags undefined bounds") {
    BitBudget b;
    b.header = 384;
    // ε_eff = 3 needs u ≥ ℓ·5 + ℓ; the construction ε = 1 fits
    const BoundReport fb = redundancy_report(b, BoundParams{2, 1, 3, 10, 8, {1, 4}}, Setting::indexing);
    REQUIRE(fb.bound_defined);
    CHECK(fb.bound_epsilon == 1);
    CHECK(fb.note == "bound evaluated with construction epsilon");
    CHECK_THAT(fb.lower_bound_bits, WithinAbs(14.469133019829592, 1e-9));

    const BoundReport un = redundancy_report(b, BoundParams{2, 1, 1, 10, 8, {1, 2}}, Setting::indexing);
    CHECK_FALSE(un.bound_defined);
    CHECK(std::isnan(un.redundancy_bits));
    CHECK(un.note.rfind("lower bound undefined", 0) == 0);
    const auto j = to_json(un);
    CHECK(j["lower_bound_bits"].is_null());
    CHECK(j.contains("baseline_pgm_bits"));
}
