#include <catch2/catch_amalgamated.hpp>

#include <random>
#include <vector>

#include <plastore/oracle.hpp>
#include <plastore/pla_builder.hpp>
#include "support.hpp"

using namespace plastore;

namespace {

std::vector<uint64_t> random_monotone(std::mt19937_64 &rng, uint64_t n, uint64_t max_step, bool strict) {
    std::uniform_int_distribution<uint64_t> step(strict ? 1 : 0, max_step);
    std::vector<uint64_t> v;
    uint64_t cur = 1 + step(rng);
    for (uint64_t i = 0; i < n; ++i) {
        v.push_back(cur);
        cur += std::max<uint64_t>(step(rng), strict ? 1 : 0);
    }
    return v;
}

void check_structure(const Pla &pla, const PointSeq &pts) {
    REQUIRE(pla.size() >= 1);
    REQUIRE(pla.segments.front().first_x == pts.x(1));
    for (size_t i = 0; i < pla.size(); ++i) {
        const Segment &s = pla.segments[i];
        if (i + 1 < pla.size())
            CHECK(s.last_x < pla.segments[i + 1].first_x);
        CHECK(s.first_x <= s.last_x);
    }
    if (pla.setting == Setting::indexing)
        CHECK(pla.segments.back().last_x == static_cast<int64_t>(pla.u));
    else
        CHECK(pla.segments.back().last_x == static_cast<int64_t>(pla.n));
}

} // namespace

TEST_CASE("fixtures") {
    SECTION("three collinear points need one segment") {
        PointSeq p({1, 2, 3}, Setting::compression);
        const Pla pla = build_optimal_pla(p, 1);
        REQUIRE(pla.size() == 1);
        CHECK(pla.segments[0].intercept == 1);
        CHECK(pla.segments[0].final_y == 3);
        CHECK(pla.epsilon_eff == 1);
        CHECK(verify_error(pla, p) == 0);
    }
    SECTION("a jump forces a second segment") {
        PointSeq p({1, 2, 3, 10, 11, 12}, Setting::compression);
        const Pla pla = build_optimal_pla(p, 1);
        REQUIRE(pla.size() == 2);
        CHECK(pla.segments[0].first_x == 1);
        CHECK(pla.segments[0].last_x == 3);
        CHECK(pla.segments[1].first_x == 4);
        CHECK(pla.segments[1].last_x == 6);
        CHECK(pla.u == 12);
    }
    SECTION("indexing the same keys") {
        PointSeq p({1, 2, 3, 10, 11, 12}, 20, Setting::indexing);
        const Pla pla = build_optimal_pla(p, 1);
        CHECK(pla.size() == min_segments_dp(p, 1));
        CHECK(pla.segments.back().last_x == 20);
        CHECK(verify_error(pla, p) <= pla.epsilon_eff);
    }
    SECTION("single point") {
        PointSeq p({7}, Setting::compression);
        const Pla pla = build_optimal_pla(p, 1);
        REQUIRE(pla.size() == 1);
        CHECK(pla.segments[0].intercept == 7);
        CHECK(predict_segment(pla.segments[0], 1) == 7);
    }
}

TEST_CASE("input rejection") {
    CHECK_THROWS_AS(PointSeq({}, Setting::compression), degenerate_input_error);
    CHECK_THROWS_AS(PointSeq({3, 2}, Setting::compression), validation_error);
    CHECK_THROWS_AS(PointSeq({2, 2}, Setting::indexing), validation_error);
    CHECK_THROWS_AS(PointSeq({0, 2}, Setting::indexing), validation_error);
    CHECK_THROWS_AS(PointSeq({2, 5}, 4, Setting::indexing), validation_error);
    CHECK_NOTHROW(PointSeq({2, 2}, Setting::compression));
    PointSeq p({1, 2}, Setting::compression);
    CHECK_THROWS_AS(build_optimal_pla(p, 0), validation_error);
}

TEST_CASE("prediction floor matches the arbitrary precision reference") {
    std::mt19937_64 rng(11);
    std::uniform_int_distribution<int64_t> d(-1'000'000'000'000, 1'000'000'000'000);
    for (int t = 0; t < 20000; ++t) {
        Segment s;
        s.first_x = d(rng) / 1000;
        s.last_x = s.first_x + std::abs(d(rng)) % 100000;
        s.intercept = d(rng);
        s.final_y = d(rng);
        const int64_t x = s.first_x + (s.last_x > s.first_x ? std::abs(d(rng)) % (s.last_x - s.first_x + 1) : 0);
        Pla pla;
        pla.setting = Setting::indexing;
        pla.u = static_cast<uint64_t>(std::max<int64_t>(s.last_x, 1));
        pla.segments = {s};
        if (s.first_x < 1)
            continue;
        REQUIRE(predict_segment(s, x) == predict_reference(pla, x));
    }
    Segment neg{0, 3, 0, -1, 0, 0};
    CHECK(predict_segment(neg, 1) == -1);  // floor(-1/3)
    CHECK(predict_segment(neg, 0) == 0);
}

TEST_CASE("segment count is minimal and every point is within epsilon_eff") {
    std::mt19937_64 rng(2024);
    for (Setting st : {Setting::compression, Setting::indexing}) {
        for (int t = 0; t < 3000; ++t) {
            const uint64_t n = 1 + rng() % 40;
            const uint64_t eps = 1 + rng() % 4;
            const auto v = random_monotone(rng, n, 1 + rng() % 12, st == Setting::indexing);
            PointSeq p(v, v.back() + rng() % 5, st);
            const Pla pla = build_optimal_pla(p, eps);
            check_structure(pla, p);
            REQUIRE(pla.size() == min_segments_dp(p, eps));
            const uint64_t err = verify_error(pla, p);
            REQUIRE(err <= pla.epsilon_eff);
            REQUIRE(pla.epsilon_eff <= eps + 3);
            REQUIRE(pla.epsilon_eff >= eps);
        }
    }
}

TEST_CASE("blocks are feasible and maximal") {
    std::mt19937_64 rng(77);
    for (int t = 0; t < 2000; ++t) {
        const uint64_t n = 2 + rng() % 30;
        const uint64_t eps = 1 + rng() % 3;
        const auto v = random_monotone(rng, n, 1 + rng() % 20, true);
        PointSeq p(v, Setting::indexing);
        const auto fam = fit_segments(p, eps);
        for (const auto &f : fam) {
            REQUIRE(segment_feasible(p, f.first, f.last, eps));
            if (f.last < n)
                REQUIRE_FALSE(segment_feasible(p, f.first, f.last + 1, eps));
            // the representative line is inside every ε-window of its block
            for (uint64_t k = f.first; k <= f.last; ++k) {
                const mpq_class y = f.value_at(p.x(k));
                REQUIRE(abs(y - p.y(k)) <= mpq_class(static_cast<long>(eps)));
            }
        }
    }
}

TEST_CASE("indexing blocks span at least 2 epsilon + 1 ranks except the last") {
    std::mt19937_64 rng(5);
    for (int t = 0; t < 500; ++t) {
        const uint64_t eps = 1 + rng() % 8;
        const auto v = support::distinct_sorted(rng, 50 + rng() % 500, 100000);
        PointSeq p(v, Setting::indexing);
        const Pla pla = build_optimal_pla(p, eps);
        for (size_t i = 0; i + 1 < pla.size(); ++i)
            REQUIRE(pla.segments[i + 1].first_y - pla.segments[i].first_y >= static_cast<int64_t>(2 * eps + 1));
    }
}

TEST_CASE("large inputs keep the error bound") {
    std::mt19937_64 rng(99);
    for (uint64_t eps : {1, 4, 32, 64}) {
        const auto v = support::distinct_sorted(rng, 100000, 10'000'000);
        PointSeq pi(v, Setting::indexing);
        const Pla a = build_optimal_pla(pi, eps);
        CHECK(verify_error(a, pi) <= a.epsilon_eff);
        PointSeq pc(v, Setting::compression);
        const Pla b = build_optimal_pla(pc, eps);
        CHECK(verify_error(b, pc) <= b.epsilon_eff);
        CHECK(b.u == v.back());
    }
}

TEST_CASE("uncovered points are reported") {
    PointSeq p({1, 5, 9}, Setting::indexing);
    Pla pla;
    pla.setting = Setting::indexing;
    pla.n = 3;
    pla.u = 9;
    pla.segments = {Segment{5, 9, 2, 3, 2, 3}};
    CHECK_THROWS_AS(verify_error(pla, p), coverage_error);
    pla.segments.clear();
    CHECK_THROWS_AS(verify_error(pla, p), coverage_error);
}
