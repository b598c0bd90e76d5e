#include <doctest.h>

#include <cmath>
#include <set>
#include <sstream>

#include "eflh/evaluation.hpp"
#include "eflh/meta.hpp"

using namespace eflh;

namespace {

ProblemConstants gd_pc(double g, double d, long t) {
    ProblemConstants pc;
    pc.lipschitz = g;
    pc.diameter = d;
    pc.horizon = t;
    return pc;
}

Vec v1(double a) {
    Vec v(1);
    v << a;
    return v;
}

LossStream quad_stream(long horizon, int n_segments, std::uint64_t seed, int dim = 2) {
    ScenarioConfig cfg;
    cfg.kind = ScenarioKind::PiecewiseQuadratic;
    cfg.horizon = horizon;
    cfg.dim = dim;
    cfg.radius = 1.0;
    cfg.n_segments = n_segments;
    cfg.seed = seed;
    return gen_piecewise_quadratic(cfg);
}

LossStream lin_stream(long horizon, int n_segments, std::uint64_t seed, int dim = 2) {
    ScenarioConfig cfg;
    cfg.kind = ScenarioKind::PiecewiseLinear;
    cfg.horizon = horizon;
    cfg.dim = dim;
    cfg.radius = 1.0;
    cfg.n_segments = n_segments;
    cfg.seed = seed;
    return gen_piecewise_linear(cfg);
}

} // namespace

TEST_CASE("clamped learning rate and initial weights") {
    // ln T large enough that the 1/2 clamp binds for l = 4
    auto pc = gd_pc(1, 1, 8886111); // ln T ~= 16
    CHECK(eta_clamp(4, pc) == 0.5); // min(1/2, sqrt(16/4)) = 1/2, GD = 1
    CHECK(init_weight({1, 0, 4}, pc, MetaVariant::SignedMW, 1) == 0.5);

    // unclamped branch: sqrt(ln T / l)/GD with GD = 2, l = 16 ln T -> 1/8
    auto pc2 = gd_pc(1, 2, 2981); // ln T ~= 8.0
    const long l = static_cast<long>(std::lround(16.0 * std::log(2981.0)));
    CHECK(eta_clamp(l, pc2) ==
          doctest::Approx(0.5 * std::sqrt(std::log(2981.0) / static_cast<double>(l))));
    CHECK(eta_clamp(l, pc2) == doctest::Approx(0.125).epsilon(1e-3));

    CHECK(init_weight({10, 0, 8}, pc2, MetaVariant::Hedge, 10) == doctest::Approx(0.1));
}

TEST_CASE("prediction mixing") {
    const Vec a = v1(0.0), b = v1(4.0);
    CHECK(predict_mix({0.3}, {b}, MetaVariant::SignedMW)(0) == doctest::Approx(4.0));
    Vec p0(2), p1(2);
    p0 << 0, 0;
    p1 << 1, 0;
    const Vec mid = predict_mix({1.0, 1.0}, {p0, p1}, MetaVariant::SignedMW);
    CHECK(mid(0) == doctest::Approx(0.5));
    CHECK(mid(1) == doctest::Approx(0.0));
    CHECK(predict_mix({0.75, 0.25}, {a, b}, MetaVariant::Hedge)(0) == doctest::Approx(1.0));
    CHECK_THROWS_AS(predict_mix({}, {}, MetaVariant::SignedMW), LifecycleError);
}

TEST_CASE("signed multiplicative-weights update") {
    SUBCASE("zero gap leaves weights alone") {
        std::vector<double> w{0.7};
        signed_mw_update(w, 0.4, {0.4}, {0.5}, 1.0);
        CHECK(w[0] == 0.7);
    }
    SUBCASE("positive gap at the clamp") {
        std::vector<double> w{1.0};
        signed_mw_update(w, 0.6, {0.2}, {0.5}, 1.0);
        CHECK(w[0] == doctest::Approx(1.2));
    }
    SUBCASE("full negative gap hits the exact lower multiplier edge") {
        std::vector<double> w{1.0};
        signed_mw_update(w, 0.0, {1.0}, {0.5}, 1.0);
        CHECK(w[0] == doctest::Approx(0.5));
    }
    SUBCASE("gap beyond G*D aborts") {
        std::vector<double> w{1.0};
        CHECK_THROWS_AS(signed_mw_update(w, 2.0, {0.0}, {0.5}, 1.0), ContractViolation);
    }
}

TEST_CASE("hedge update") {
    SUBCASE("equal losses cancel") {
        std::vector<double> w{0.25, 0.75};
        hedge_update(w, {3.0, 3.0}, 1.0);
        CHECK(w[0] == doctest::Approx(0.25));
        CHECK(w[1] == doctest::Approx(0.75));
    }
    SUBCASE("hand-computed exponential reweighting") {
        std::vector<double> w{0.5, 0.5};
        hedge_update(w, {0.0, std::log(2.0)}, 1.0);
        CHECK(w[0] == doctest::Approx(2.0 / 3.0));
        CHECK(w[1] == doctest::Approx(1.0 / 3.0));
    }
    SUBCASE("single expert renormalizes to one") {
        std::vector<double> w{0.2};
        hedge_update(w, {5.0}, 2.0);
        CHECK(w[0] == doctest::Approx(1.0));
    }
}

TEST_CASE("mixing in a newborn") {
    SUBCASE("survivors scale by 1 - 1/round") {
        std::vector<double> w{2.0 / 3.0, 1.0 / 3.0};
        mix_new_expert(w, 1, 4);
        REQUIRE(w.size() == 3);
        CHECK(w[0] == doctest::Approx(0.5));
        CHECK(w[1] == doctest::Approx(0.25));
        CHECK(w[2] == doctest::Approx(0.25));
    }
    SUBCASE("no newborn passes weights through") {
        std::vector<double> w{1.0};
        mix_new_expert(w, 0, 4);
        REQUIRE(w.size() == 1);
        CHECK(w[0] == 1.0);
    }
    SUBCASE("round two splits evenly with one survivor") {
        std::vector<double> w{1.0};
        mix_new_expert(w, 1, 2);
        CHECK(w[0] == doctest::Approx(0.5));
        CHECK(w[1] == doctest::Approx(0.5));
    }
    SUBCASE("two newborns violate the schedule contract") {
        std::vector<double> w{1.0};
        CHECK_THROWS_AS(mix_new_expert(w, 2, 4), ContractViolation);
    }
}

TEST_CASE("pseudo-weight total") {
    CHECK(pseudo_weight_total({0.5}, {0.5}) == doctest::Approx(1.0));
    CHECK(pseudo_weight_total({0.5, 0.25}, {0.5, 0.25}) == doctest::Approx(2.0));
}

TEST_CASE("a fresh run opens with pseudo-weight one; equal losses give two") {
    // constant loss: every expert suffers the same value, weights never move
    ScenarioConfig cfg;
    cfg.kind = ScenarioKind::PiecewiseQuadratic;
    cfg.horizon = 4;
    cfg.dim = 1;
    cfg.radius = 1.0;
    SegmentSpec seg;
    seg.length = 4;
    seg.center = Vec::Zero(1);
    seg.has_center = true;
    cfg.segments = {seg};
    const LossStream stream = gen_piecewise_quadratic(cfg);
    const GameTrace trace = run_game(make_algo("eflh-basic", 0.0, stream), stream);
    CHECK(trace.rounds[0].pseudo_weight == doctest::Approx(1.0));
    // everyone starts at the center, so all losses are equal at round 1
    CHECK(trace.rounds[1].pseudo_weight == doctest::Approx(2.0));
}

TEST_CASE("one-round game predicts the domain center") {
    for (const char* algo : {"eflh-basic", "ogd", "flh-baseline"}) {
        auto stream = quad_stream(1, 1, 3);
        const GameTrace trace = run_game(make_algo(algo, 0.0, stream), stream);
        REQUIRE(trace.horizon() == 1);
        CHECK(trace.rounds[0].prediction.isZero());
    }
    auto stream = quad_stream(1, 1, 3);
    const GameTrace t2 = run_game(make_algo("eflh-exp", 0.3, stream), stream);
    CHECK(t2.rounds[0].prediction.isZero());
}

TEST_CASE("identical configuration replays to an identical digest") {
    const auto s1 = lin_stream(128, 4, 99);
    const auto s2 = lin_stream(128, 4, 99);
    CHECK(s1.digest() == s2.digest());
    const auto t1 = run_game(make_algo("eflh-full", 0.3, s1), s1);
    const auto t2 = run_game(make_algo("eflh-full", 0.3, s2), s2);
    CHECK(t1.digest() == t2.digest());
    std::ostringstream c1, c2;
    t1.write_csv(c1);
    t2.write_csv(c2);
    CHECK(c1.str() == c2.str());
}

TEST_CASE("tower meta loss stays within the theorem margin of plain ogd") {
    // constant quadratic |x|^2 on ball(0,1): both algorithms decay to the
    // minimizer; the tower pays at most the interval bound extra
    ScenarioConfig cfg;
    cfg.kind = ScenarioKind::PiecewiseQuadratic;
    cfg.horizon = 64;
    cfg.dim = 1;
    cfg.radius = 1.0;
    SegmentSpec seg;
    seg.length = 64;
    seg.center = Vec::Zero(1);
    seg.has_center = true;
    cfg.segments = {seg};
    const LossStream stream = gen_piecewise_quadratic(cfg);
    const auto basic = run_game(make_algo("eflh-basic", 0.0, stream), stream);
    const auto ogd = run_game(make_algo("ogd", 0.0, stream), stream);
    const double margin = basic_interval_bound(stream.lipschitz, stream.diameter, 64, 64);
    CHECK(basic.rounds.back().cum_loss <= ogd.rounds.back().cum_loss + margin);
}

TEST_CASE("run invariants: feasibility, simplex, pseudo-weight ceiling") {
    const auto quad = quad_stream(256, 4, 21);
    const auto lin = lin_stream(256, 4, 22);
    const Ball domain = quad.domain();

    for (const char* algo : {"eflh-basic", "eflh-full", "flh-baseline", "ogd"}) {
        const auto& stream = lin;
        const GameTrace trace = run_game(make_algo(algo, 0.25, stream), stream);
        const double ceiling = pseudo_weight_factor(make_algo(algo, 0.25, stream).schedule, 256);
        for (const auto& r : trace.rounds) {
            CHECK(domain.contains(r.prediction, 1e-9));
            REQUIRE(r.has_pseudo);
            CHECK(r.pseudo_weight <= ceiling * static_cast<double>(r.t) + 1e-6);
        }
    }
    // hedge on the strongly convex stream (alpha = lambda / G^2 internally)
    const GameTrace trace = run_game(make_algo("eflh-exp", 0.3, quad), quad);
    for (const auto& r : trace.rounds) {
        CHECK(domain.contains(r.prediction, 1e-9));
        CHECK_FALSE(r.has_pseudo);
    }
}

TEST_CASE("eflh-exp rejects plain convex streams") {
    const auto lin = lin_stream(64, 2, 1);
    CHECK_THROWS_AS(make_algo("eflh-exp", 0.3, lin), ConfigError);
    CHECK_THROWS_AS(make_algo("no-such-algo", 0.3, lin), ConfigError);
}

TEST_CASE("signed-MW meta regret against covered experts obeys the witness bound") {
    const auto stream = lin_stream(512, 6, 31);
    const auto pc = problem_constants(stream, 0.0);
    const GameTrace trace = run_game(make_algo("eflh-basic", 0.0, stream), stream);
    const ExpertLossIndex idx(trace);
    const ScheduleReplay replay(ScheduleKind::basic(), pc);
    const double gd = loss_gap_bound(pc);
    std::set<std::pair<long, long>> seen;
    for (long t = 8; t <= 512; ++t) {
        for (long s = 1; s + 7 <= t; ++s) {
            const auto w = replay.witness(s, t);
            REQUIRE(w.has_value());
            if (!seen.insert({w->birth, t}).second) continue;
            const double meta_regret =
                idx.player_interval_loss(w->birth, t) - idx.expert_interval_loss(*w, w->birth, t);
            const long span = t - w->birth;
            // meta part of the witness-interval bound
            CHECK(meta_regret <=
                  3.0 * gd * std::sqrt(std::log(512.0) * static_cast<double>(span)));
        }
    }
}

TEST_CASE("hedge meta regret against covered experts obeys the log bound") {
    ScenarioConfig cfg;
    cfg.kind = ScenarioKind::ExpConcave;
    cfg.horizon = 512;
    cfg.dim = 2;
    cfg.radius = 1.0;
    cfg.n_segments = 4;
    cfg.seed = 17;
    const LossStream stream = gen_exp_concave(cfg);
    const double eps = 0.3;
    const auto algo = make_algo("eflh-exp", eps, stream);
    const auto pc = problem_constants(stream, eps);
    const GameTrace trace = run_game(algo, stream);
    const ExpertLossIndex idx(trace);
    const ScheduleReplay replay(ScheduleKind::largest_only(eps), pc);
    std::set<std::pair<long, long>> seen;
    for (long t = 8; t <= 512; ++t) {
        for (long s = 1; s + 7 <= t; ++s) {
            const auto w = replay.witness(s, t);
            REQUIRE(w.has_value());
            if (!seen.insert({w->birth, t}).second) continue;
            const double meta_regret =
                idx.player_interval_loss(w->birth, t) - idx.expert_interval_loss(*w, w->birth, t);
            CHECK(meta_regret <= hedge_witness_bound(algo.hedge_alpha, 512, t - w->birth + 1));
        }
    }
}

TEST_CASE("trace csv carries the fixed column order") {
    const auto stream = quad_stream(4, 1, 9, 2);
    const GameTrace trace = run_game(make_algo("eflh-exp", 0.3, stream), stream);
    std::ostringstream out;
    trace.write_csv(out);
    const std::string text = out.str();
    CHECK(text.rfind("t,algo,prediction,loss,cum_loss,n_active,pseudo_weight_total,spawn_count\n",
                     0) == 0);
    // hedge leaves the pseudo-weight column empty
    CHECK(text.find(",,") != std::string::npos);
}
