#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "eflh/experts.hpp"
#include "eflh/scenarios.hpp"
#include "eflh/schedule.hpp"

namespace eflh {

enum class MetaVariant { SignedMW, Hedge };

/// Per-entry learning rate of the signed multiplicative-weights engine:
/// (1/(G D)) * min(1/2, sqrt(ln T / l)). The clamp keeps every weight
/// multiplier inside [1/2, 3/2] given the G*D loss-gap bound.
double eta_clamp(long lifespan, const ProblemConstants& pc);

/// Initial weight for a freshly spawned entry. Signed-MW uses the clamped
/// rate itself (so its pseudo-weight starts at exactly 1); hedge gives the
/// newcomer 1/round.
double init_weight(const ScheduleEntry& entry, const ProblemConstants& pc, MetaVariant variant,
                   long round);

/// Weighted prediction: weights/sum for signed-MW, weights as-is for hedge
/// (already a distribution). Stays in the domain by convexity.
Vec predict_mix(const std::vector<double>& weights, const std::vector<Vec>& points,
                MetaVariant variant);

/// w_j *= 1 + eta_j * (meta_loss - expert_loss_j). Aborts with a
/// ContractViolation when a loss gap exceeds gap_bound + 1e-9.
void signed_mw_update(std::vector<double>& weights, double meta_loss,
                      const std::vector<double>& expert_losses, const std::vector<double>& etas,
                      double gap_bound);

/// Exponential reweighting normalized to sum 1; log-space core behind it.
void hedge_update(std::vector<double>& weights, const std::vector<double>& expert_losses,
                  double alpha);

/// Survivors scaled by (1 - 1/round), each newcomer gets 1/round / n_new
/// (the schedule promises n_new <= 1). With no newcomer the weights pass
/// through unchanged (they are already renormalized after pruning).
void mix_new_expert(std::vector<double>& weights, int n_new, long round);

/// Pseudo-weight total: sum_j w_j / eta_j over the live set.
double pseudo_weight_total(const std::vector<double>& weights, const std::vector<double>& etas);

/// Ceiling factor c such that the pseudo-weight monitor asserts W~_t <= c*t:
/// 1 for the basic tower and single-span, the active-set class bound for
/// the (1+eps) towers, log2(T)+1 for the dyadic baseline.
double pseudo_weight_factor(const ScheduleKind& kind, long horizon);

struct AlgoSpec {
    std::string name; // selector string, reproduced in the trace CSV
    ScheduleKind schedule;
    MetaVariant meta = MetaVariant::SignedMW;
    LearnerKind learner = LearnerKind::OgdConvex;
    double hedge_alpha = 0.0; // effective alpha when meta == Hedge
};

/// Map a CLI selector (eflh-basic | eflh-full | eflh-exp | flh-baseline |
/// ogd) onto schedule + meta + learner for the given stream. eflh-exp picks
/// Newton-step experts on exp-concave streams and strongly-convex OGD with
/// alpha = lambda/G^2 on strongly-convex streams.
AlgoSpec make_algo(const std::string& selector, double epsilon, const LossStream& stream);

ProblemConstants problem_constants(const LossStream& stream, double epsilon);

struct RoundRecord {
    long t = 0;
    Vec prediction;
    double loss = 0.0;
    double cum_loss = 0.0;
    int n_active = 0;
    int spawn_count = 0;
    bool has_pseudo = false;
    double pseudo_weight = 0.0;
    std::uint64_t weight_digest = 0;
    // (entry, loss) pairs for the alive set, recorded when requested
    std::vector<std::pair<ScheduleEntry, double>> expert_losses;
};

struct GameTrace {
    std::string algo;
    std::vector<RoundRecord> rounds;
    std::vector<ScheduleEntry> spawned; // every entry that ever lived
    long horizon() const { return static_cast<long>(rounds.size()); }
    std::uint64_t digest() const;
    void write_csv(std::ostream& out) const;
};

struct RunOptions {
    bool record_expert_losses = true;
};

/// The main game loop. Per round: collect expert predictions -> predict ->
/// observe loss -> step each alive expert with its own gradient at its own
/// point -> meta weight update -> prune/spawn -> init new weights.
/// The pseudo-weight monitor runs every round on signed-MW variants.
GameTrace run_game(const AlgoSpec& algo, const LossStream& stream, const RunOptions& opts = {});

}  // namespace eflh
