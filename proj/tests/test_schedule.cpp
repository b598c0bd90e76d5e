#include <doctest.h>

#include <cmath>
#include <map>

#include "eflh/schedule.hpp"

using namespace eflh;

namespace {

ProblemConstants horizon_pc(long t, double eps = 0.3) {
    ProblemConstants pc;
    pc.horizon = t;
    pc.tower_epsilon = eps;
    return pc;
}

// Literal reading of the pruning rule: lifespan 2^(2^k+1) for the largest
// k >= 1 with 2^(2^k-1) | t and 2^(2^k+1) not | t; 4 for odd t; nothing
// otherwise. Used as the oracle for basic_lifespan where it is defined.
long literal_rule(long t) {
    if (t % 2 == 1) return 4;
    long best = 0;
    for (int k = 1; k <= 6; ++k) {
        const long lo = 1L << ((1L << k) - 1);
        const long hi = 1L << ((1L << k) + 1);
        if (t % lo == 0 && t % hi != 0) best = hi;
    }
    return best; // 0 when the rule assigns nothing
}

} // namespace

TEST_CASE("basic lifespans for small rounds") {
    CHECK(basic_lifespan(1) == 4);
    CHECK(basic_lifespan(2) == 8);  // k=1: 2|2, 8 does not divide 2
    CHECK(basic_lifespan(8) == 32); // k=2 wins; k=1 fails since 8|8
}

TEST_CASE("basic lifespan matches the literal rule wherever that is defined") {
    for (long t = 1; t <= 4096; ++t) {
        const long lit = literal_rule(t);
        if (lit != 0) {
            CHECK(basic_lifespan(t) == lit);
        } else {
            // valuation gap (t = 32, 64, 96, ...): largest k with 2^(2^k-1) | t
            long span = 4;
            for (int k = 1; k <= 6; ++k)
                if (t % (1L << ((1L << k) - 1)) == 0) span = 1L << ((1L << k) + 1);
            CHECK(basic_lifespan(t) == span);
        }
    }
}

TEST_CASE("tower class spans") {
    CHECK(class_span(1, 1.0) == 3); // floor(2^2/2)+1, lifespan 12
    CHECK(class_span(2, 1.0) == 9); // floor(2^4/2)+1, lifespan 36
    CHECK(class_span(1, 0.5) == 2); // floor(2^1.5/2)+1 = floor(1.414)+1
    CHECK_THROWS_AS(class_span(0, 0.3), ScheduleRangeError);
}

TEST_CASE("class admissibility is capped by the horizon") {
    const auto ks = admissible_classes(36, 1.0);
    REQUIRE(ks.size() == 2); // 2^2/2=2 <= 36, 2^4/2=8 <= 36, 2^8/2=128 > 36
    CHECK(class_span_checked(2, 1.0, 36) == 9);
    CHECK_THROWS_AS(class_span_checked(3, 1.0, 36), ScheduleRangeError);
}

TEST_CASE("spawns: full tower opens every class at round one") {
    const auto pc = horizon_pc(36);
    const auto born = spawns_at(1, ScheduleKind::full(1.0), pc);
    REQUIRE(born.size() == 2);
    CHECK(born[0].cls == 1);
    CHECK(born[0].lifespan == 12);
    CHECK(born[1].cls == 2);
    CHECK(born[1].lifespan == 36);
}

TEST_CASE("spawns: largest-only tower") {
    const auto pc = horizon_pc(64);
    const auto at4 = spawns_at(4, ScheduleKind::largest_only(1.0), pc);
    REQUIRE(at4.size() == 1); // l_1=3 divides 3, l_2=9 does not
    CHECK(at4[0].cls == 1);
    CHECK(at4[0].lifespan == 12);
    CHECK(spawns_at(2, ScheduleKind::largest_only(1.0), pc).empty()); // nothing divides 1
}

TEST_CASE("prune removes deceased entries and keeps order") {
    const auto pc = horizon_pc(16);
    ActiveSetIndex s;
    for (long t = 1; t <= 4; ++t) prune(s, t, ScheduleKind::basic(), pc);
    const ScheduleEntry first{1, 0, 4};
    CHECK(std::find(s.entries.begin(), s.entries.end(), first) != s.entries.end());
    prune(s, 5, ScheduleKind::basic(), pc); // death(1,4) = 4 < 5
    CHECK(std::find(s.entries.begin(), s.entries.end(), first) == s.entries.end());
    for (size_t i = 1; i < s.entries.size(); ++i)
        CHECK(s.entries[i - 1].birth <= s.entries[i].birth);
}

TEST_CASE("active-set replay matches incremental pruning") {
    const auto pc = horizon_pc(16);
    ActiveSetIndex s;
    ScheduleReplay replay(ScheduleKind::basic(), pc);
    for (long t = 1; t <= 16; ++t) {
        prune(s, t, ScheduleKind::basic(), pc);
        long brute = 0; // independent count straight off the replayed spawns
        for (long b = 1; b <= t; ++b)
            for (const auto& e : replay.born_at(b)) brute += e.alive_at(t) ? 1 : 0;
        CHECK(static_cast<long>(s.entries.size()) == brute);
    }
}

TEST_CASE("full tower births sit on the class grid") {
    const auto pc = horizon_pc(36);
    ActiveSetIndex s;
    for (long t = 1; t <= 36; ++t) {
        prune(s, t, ScheduleKind::full(1.0), pc);
        for (const auto& e : s.entries)
            CHECK((e.birth - 1) % class_span(e.cls, 1.0) == 0);
    }
}

TEST_CASE("coverage witnesses exist exhaustively at small horizons") {
    SUBCASE("basic tower") {
        const auto pc = horizon_pc(128);
        ScheduleReplay replay(ScheduleKind::basic(), pc);
        for (long t = 8; t <= 128; ++t) {
            for (long s = 1; s + 7 <= t; ++s) {
                const auto w = replay.witness(s, t);
                REQUIRE(w.has_value());
                CHECK(w->birth >= s);
                CHECK(static_cast<double>(w->birth) <=
                      static_cast<double>(t) - std::sqrt(static_cast<double>(t - s)) / 2.0);
                CHECK(w->death() >= t);
                // tightness: the witness is at least a quarter through its life
                CHECK(4 * (t - w->birth) >= w->lifespan);
                CHECK(t - w->birth <= w->lifespan);
            }
        }
    }
    SUBCASE("full tower, eps=0.3") {
        const auto pc = horizon_pc(128, 0.3);
        ScheduleReplay replay(ScheduleKind::full(0.3), pc);
        for (long t = 8; t <= 128; ++t) {
            for (long s = 1; s + 7 <= t; ++s) {
                const auto w = replay.witness(s, t);
                REQUIRE(w.has_value());
                CHECK(static_cast<double>(w->birth) <=
                      static_cast<double>(t) -
                          std::pow(static_cast<double>(t - s), 0.7) / 2.0);
            }
        }
    }
}

TEST_CASE("witness bracket arithmetic on [1, 9]") {
    const auto pc = horizon_pc(16);
    const auto w = coverage_witness(1, 9, ScheduleKind::basic(), pc);
    REQUIRE(w.has_value());
    CHECK(w->birth <= 7); // 9 - sqrt(8)/2 = 7.58
}

TEST_CASE("active-set size bounds at T = 2^16") {
    const auto pc = horizon_pc(1L << 16);
    const auto basic = replay_stats(ScheduleKind::basic(), pc);
    CHECK(basic.max_per_class <= 4);
    CHECK(basic.max_active <= static_cast<long>(active_set_bound(ScheduleKind::basic(), pc.horizon)));
    for (double eps : {0.1, 0.3, 0.49}) {
        auto pce = horizon_pc(1L << 16, eps);
        const auto full = replay_stats(ScheduleKind::full(eps), pce);
        CHECK(full.max_per_class <= 4);
        CHECK(static_cast<double>(full.max_active) <=
              active_set_bound(ScheduleKind::full(eps), pce.horizon));
    }
}

TEST_CASE("dyadic baseline needs logarithmically many experts") {
    const auto pc = horizon_pc(1L << 16);
    const auto dyadic = replay_stats(ScheduleKind::dyadic(), pc);
    CHECK(dyadic.max_active == 17); // one alive expert per class, log2(T)+1 classes
    const auto basic = replay_stats(ScheduleKind::basic(), pc);
    CHECK(basic.max_active < dyadic.max_active);
}
