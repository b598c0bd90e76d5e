#include "eflh/schedule.hpp"

#include <algorithm>
#include <cmath>

#include "eflh/errors.hpp"

namespace eflh {

void ScheduleKind::validate() const {
    // the schedule itself is well-defined for any epsilon up to 1; the
    // regret analysis (and the CLI) restrict runs to (0, 1/2)
    if (needs_epsilon() && !(epsilon > 0.0 && epsilon <= 1.0))
        throw ConfigError("tower schedule requires epsilon in (0, 1]");
}

std::string ScheduleKind::name() const {
    switch (family) {
        case ScheduleFamily::BasicTower: return "basic";
        case ScheduleFamily::FullTower: return "full";
        case ScheduleFamily::LargestOnlyTower: return "largest";
        case ScheduleFamily::DyadicBaseline: return "dyadic";
        case ScheduleFamily::SingleSpan: return "single";
    }
    return "?";
}

namespace {

int valuation2(long t) {
    int v = 0;
    while ((t & 1) == 0) {
        t >>= 1;
        ++v;
    }
    return v;
}

} // namespace

int basic_class(long t) {
    if (t < 1) throw ConfigError("round index must be >= 1");
    // largest k with 2^k - 1 <= v2(t); the rule's two divisibility conditions
    // pin v2(t) in {2^k - 1, 2^k} and this extension covers the valuations
    // between consecutive classes, keeping exactly one spawn per round.
    const int v = valuation2(t);
    int k = 0;
    while ((1L << (k + 1)) - 1 <= v) ++k;
    return k;
}

long basic_lifespan(long t) {
    return 1L << ((1L << basic_class(t)) + 1);
}

long class_span(int k, double epsilon) {
    if (k < 1) throw ScheduleRangeError("class index must be >= 1");
    const long double e = 1.0L + static_cast<long double>(epsilon);
    const long double expo = powl(e, k);
    if (expo > 62.0L) throw ScheduleRangeError("class span overflows 64-bit range");
    long double half = powl(2.0L, expo) / 2.0L;
    // Snap values a few ulps away from an integer before flooring.
    const long double nearest = roundl(half);
    if (fabsl(half - nearest) <= half * 1e-15L) half = nearest;
    return static_cast<long>(floorl(half)) + 1;
}

std::vector<int> admissible_classes(long horizon, double epsilon) {
    std::vector<int> ks;
    for (int k = 1;; ++k) {
        const long double expo = powl(1.0L + static_cast<long double>(epsilon), k);
        if (expo > 62.0L) break;
        long double half = powl(2.0L, expo) / 2.0L;
        const long double nearest = roundl(half);
        if (fabsl(half - nearest) <= half * 1e-15L) half = nearest;
        if (half > static_cast<long double>(horizon)) break;
        ks.push_back(k);
    }
    if (ks.empty()) ks.push_back(1); // keep S_1 nonempty at degenerate horizons
    return ks;
}

long class_span_checked(int k, double epsilon, long horizon) {
    const auto ks = admissible_classes(horizon, epsilon);
    if (k < 1 || (!ks.empty() && k > ks.back()) || ks.empty())
        throw ScheduleRangeError("class " + std::to_string(k) +
                                 " not admissible at horizon " + std::to_string(horizon));
    return class_span(k, epsilon);
}

std::vector<ScheduleEntry> spawns_at(long t, const ScheduleKind& kind,
                                     const ProblemConstants& pc) {
    if (t < 1 || t > pc.horizon) throw ConfigError("spawn round outside [1, horizon]");
    kind.validate();
    std::vector<ScheduleEntry> out;
    switch (kind.family) {
        case ScheduleFamily::BasicTower:
            out.push_back({t, basic_class(t), basic_lifespan(t)});
            break;
        case ScheduleFamily::FullTower:
        case ScheduleFamily::LargestOnlyTower: {
            int best = -1;
            for (int k : admissible_classes(pc.horizon, kind.epsilon)) {
                const long l = class_span(k, kind.epsilon);
                if ((t - 1) % l != 0) continue;
                if (kind.family == ScheduleFamily::FullTower)
                    out.push_back({t, k, 4 * l});
                else
                    best = k;
            }
            if (best >= 1)
                out.push_back({t, best, 4 * class_span(best, kind.epsilon)});
            break;
        }
        case ScheduleFamily::DyadicBaseline:
            for (int j = 0; (1L << j) <= pc.horizon; ++j) {
                const long len = 1L << j;
                if ((t - 1) % len == 0) out.push_back({t, j, len});
            }
            break;
        case ScheduleFamily::SingleSpan:
            if (t == 1) out.push_back({1, 0, pc.horizon});
            break;
    }
    return out;
}

void prune(ActiveSetIndex& s, long t, const ScheduleKind& kind, const ProblemConstants& pc) {
    std::erase_if(s.entries, [t](const ScheduleEntry& e) { return e.death() < t; });
    auto born = spawns_at(t, kind, pc);
    s.entries.insert(s.entries.end(), born.begin(), born.end());
    std::sort(s.entries.begin(), s.entries.end(), [](const auto& a, const auto& b) {
        return a.birth != b.birth ? a.birth < b.birth : a.cls < b.cls;
    });
    s.round = t;
}

const std::vector<ScheduleEntry> ScheduleReplay::empty_;

ScheduleReplay::ScheduleReplay(const ScheduleKind& kind, const ProblemConstants& pc)
    : kind_(kind), horizon_(pc.horizon) {
    kind.validate();
    by_birth_.resize(static_cast<size_t>(horizon_) + 1);
    for (long t = 1; t <= horizon_; ++t) {
        auto born = spawns_at(t, kind, pc);
        for (const auto& e : born) all_.push_back(e);
        by_birth_[static_cast<size_t>(t)] = std::move(born);
    }
}

const std::vector<ScheduleEntry>& ScheduleReplay::born_at(long t) const {
    if (t < 1 || t > horizon_) return empty_;
    return by_birth_[static_cast<size_t>(t)];
}

double ScheduleReplay::bracket(long interval_span) const {
    const double n = static_cast<double>(interval_span);
    switch (kind_.family) {
        case ScheduleFamily::FullTower:
        case ScheduleFamily::LargestOnlyTower:
            return std::pow(n, 1.0 - kind_.epsilon) / 2.0;
        default:
            return std::sqrt(n) / 2.0;
    }
}

std::optional<ScheduleEntry> ScheduleReplay::witness(long s, long t) const {
    if (!(1 <= s && s < t && t <= horizon_))
        throw ConfigError("witness interval must satisfy 1 <= s < t <= horizon");
    const long hi = static_cast<long>(std::floor(static_cast<double>(t) - bracket(t - s)));
    std::optional<ScheduleEntry> covering;
    for (long i = std::min(hi, t); i >= s; --i) {
        for (const auto& e : born_at(i)) {
            if (e.death() < t) continue;
            if (!covering) covering = e;
            const long span = t - e.birth;
            if (4 * span >= e.lifespan && span <= e.lifespan) return e; // tight
        }
    }
    return covering;
}

std::optional<ScheduleEntry> coverage_witness(long s, long t, const ScheduleKind& kind,
                                              const ProblemConstants& pc) {
    return ScheduleReplay(kind, pc).witness(s, t);
}

ReplayStats replay_stats(const ScheduleKind& kind, const ProblemConstants& pc) {
    kind.validate();
    pc.validate();
    const long T = pc.horizon;
    ReplayStats st;
    // Deaths bucketed by the round an entry leaves the set; per-class alive
    // counters keyed by lifespan class.
    std::vector<std::vector<std::pair<int, long>>> leaving(static_cast<size_t>(T) + 2);
    std::vector<long> per_class;
    long active = 0;
    for (long t = 1; t <= T; ++t) {
        for (auto [cls, n] : leaving[static_cast<size_t>(t)]) {
            per_class[static_cast<size_t>(cls)] -= n;
            active -= n;
        }
        const auto born = spawns_at(t, kind, pc);
        st.max_spawns_per_round = std::max<long>(st.max_spawns_per_round, born.size());
        st.total_spawned += static_cast<long>(born.size());
        for (const auto& e : born) {
            if (e.cls >= static_cast<int>(per_class.size())) per_class.resize(e.cls + 1, 0);
            ++per_class[static_cast<size_t>(e.cls)];
            ++active;
            const long leave = std::min(e.death() + 1, T + 1);
            auto& bucket = leaving[static_cast<size_t>(leave)];
            if (!bucket.empty() && bucket.back().first == e.cls)
                ++bucket.back().second;
            else
                bucket.emplace_back(e.cls, 1);
            st.max_per_class = std::max(st.max_per_class, per_class[static_cast<size_t>(e.cls)]);
        }
        st.max_active = std::max(st.max_active, active);
    }
    return st;
}

double active_set_bound(const ScheduleKind& kind, long horizon) {
    const double T = static_cast<double>(horizon);
    switch (kind.family) {
        case ScheduleFamily::BasicTower:
            return 4.0 * (std::ceil(std::log2(std::log2(T))) + 2.0);
        case ScheduleFamily::FullTower:
        case ScheduleFamily::LargestOnlyTower:
            return 4.0 * (std::log(std::log2(2.0 * T)) / std::log1p(kind.epsilon) + 1.0);
        case ScheduleFamily::DyadicBaseline:
            return std::floor(std::log2(T)) + 1.0;
        case ScheduleFamily::SingleSpan:
            return 1.0;
    }
    return 0.0;
}

}  // namespace eflh
