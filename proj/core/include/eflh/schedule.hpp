#pragma once

#include <optional>
#include <string>
#include <vector>

#include "eflh/geometry.hpp"

namespace eflh {

enum class ScheduleFamily {
    BasicTower,       // lifespans 2^(2^k+1), one spawn per round
    FullTower,        // lifespans 4*l_k, every class k with l_k | (t-1)
    LargestOnlyTower, // ditto, but only the largest dividing class
    DyadicBaseline,   // lifespans 2^j for every j with 2^j | (t-1)
    SingleSpan,       // one expert alive for the whole horizon (plain OGD)
};

struct ScheduleKind {
    ScheduleFamily family = ScheduleFamily::BasicTower;
    double epsilon = 0.0; // towers with a class parameter only

    static ScheduleKind basic() { return {ScheduleFamily::BasicTower, 0.0}; }
    static ScheduleKind full(double eps) { return {ScheduleFamily::FullTower, eps}; }
    static ScheduleKind largest_only(double eps) { return {ScheduleFamily::LargestOnlyTower, eps}; }
    static ScheduleKind dyadic() { return {ScheduleFamily::DyadicBaseline, 0.0}; }
    static ScheduleKind single_span() { return {ScheduleFamily::SingleSpan, 0.0}; }

    bool needs_epsilon() const {
        return family == ScheduleFamily::FullTower || family == ScheduleFamily::LargestOnlyTower;
    }
    void validate() const;
    std::string name() const;
};

/// One scheduled expert slot: born at `birth`, alive on rounds
/// birth .. birth+lifespan-1 inclusive, deceased strictly after death().
struct ScheduleEntry {
    long birth = 1;
    int cls = 0; // tower level k / dyadic exponent j; 0 for single-span
    long lifespan = 1;

    long death() const { return birth + lifespan - 1; }
    bool alive_at(long t) const { return birth <= t && t <= death(); }

    friend bool operator==(const ScheduleEntry&, const ScheduleEntry&) = default;
};

/// Lifespan assigned to the expert born at round t by the basic tower:
/// 2^(2^k+1) for the largest k >= 0 with 2^(2^k - 1) | t (k=0 gives 4 for
/// odd t). Depends on t only through its 2-adic valuation.
long basic_lifespan(long t);

/// Tower level k of basic_lifespan(t) (lifespan = 2^(2^k + 1)).
int basic_class(long t);

/// l_k = floor(2^((1+eps)^k) / 2) + 1, evaluated in 80-bit extended
/// precision with a snap-to-integer guard so the floor cannot misround
/// when 2^((1+eps)^k)/2 lands (numerically) on an integer.
long class_span(int k, double epsilon);

/// Class indices k >= 1 admissible at horizon T: 2^((1+eps)^k)/2 <= T.
std::vector<int> admissible_classes(long horizon, double epsilon);

/// class_span with the admissibility check; ScheduleRangeError outside it.
long class_span_checked(int k, double epsilon, long horizon);

/// Experts born at round t under the given schedule, sorted by class.
std::vector<ScheduleEntry> spawns_at(long t, const ScheduleKind& kind,
                                     const ProblemConstants& pc);

/// The alive set S_t, maintained round by round.
struct ActiveSetIndex {
    long round = 0; // last round advanced to; 0 = empty, not started
    std::vector<ScheduleEntry> entries; // sorted by (birth, cls)
};

/// Remove entries deceased before round t, then add spawns_at(t).
void prune(ActiveSetIndex& s, long t, const ScheduleKind& kind, const ProblemConstants& pc);

/// Every entry the schedule ever spawns up to the horizon, indexed by birth;
/// the oracle all coverage and counting checks replay against.
class ScheduleReplay {
public:
    ScheduleReplay(const ScheduleKind& kind, const ProblemConstants& pc);

    const std::vector<ScheduleEntry>& all() const { return all_; }
    const std::vector<ScheduleEntry>& born_at(long t) const;
    long horizon() const { return horizon_; }

    /// Witness for the coverage lemma on [s, t]: an entry alive throughout
    /// [birth, t] with birth in [s, t - bracket(t-s)], where bracket(n) is
    /// sqrt(n)/2 for the basic tower and n^(1-eps)/2 for the (1+eps) towers.
    /// Prefers (latest-born) witnesses with lifespan/4 <= t-birth <= lifespan;
    /// absence of any witness signals a coverage violation.
    std::optional<ScheduleEntry> witness(long s, long t) const;

    double bracket(long interval_span) const;

private:
    ScheduleKind kind_;
    long horizon_;
    std::vector<ScheduleEntry> all_;
    std::vector<std::vector<ScheduleEntry>> by_birth_; // index = birth
    static const std::vector<ScheduleEntry> empty_;
};

/// One-off form of ScheduleReplay::witness for small horizons.
std::optional<ScheduleEntry> coverage_witness(long s, long t, const ScheduleKind& kind,
                                              const ProblemConstants& pc);

/// Active-set statistics over a full replay (no game loop).
struct ReplayStats {
    long max_active = 0;      // max_t |S_t|
    long max_per_class = 0;   // max over (t, class) of alive entries of that class
    long max_spawns_per_round = 0;
    long total_spawned = 0;
};
ReplayStats replay_stats(const ScheduleKind& kind, const ProblemConstants& pc);

/// Upper bound on |S_t| asserted for each family: 4*(ceil(log2 log2 T) + 2)
/// for the basic tower, 4*(log_{1+eps} log2(2T) + 1) for (1+eps) towers,
/// floor(log2 T)+1 for the dyadic baseline.
double active_set_bound(const ScheduleKind& kind, long horizon);

}  // namespace eflh
