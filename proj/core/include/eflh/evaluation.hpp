#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "eflh/meta.hpp"

namespace eflh {

enum class OracleQuality { Analytic, Iterative, IterativeWarning };

std::string oracle_quality_name(OracleQuality q);

struct BestFixedPoint {
    Vec point;
    double total_loss = 0.0;
    OracleQuality quality = OracleQuality::Analytic;
};

/// Offline comparator for s..t (1-based, inclusive): the fixed feasible
/// point minimizing the summed loss. Analytic for all-quadratic (projected
/// mean of centers) and all-linear (ball support point) windows; projected
/// gradient descent with 10 seeded restarts otherwise, gradient-map residual
/// tolerance 1e-8, non-convergence downgraded to a quality warning.
class OfflineOracle {
public:
    OfflineOracle(const LossStream& stream, const Ball& domain);
    BestFixedPoint best_on(long s, long t) const;
    double player_interval_loss(const GameTrace& trace, long s, long t) const;

private:
    const LossStream& stream_;
    Ball domain_;
    enum class Mode { Quadratic, Linear, Mixed } mode_;
    // prefix sums: quadratic -> centers and |c|^2; linear -> slopes and offsets
    std::vector<Vec> pre_vec_;
    std::vector<double> pre_sq_;
};

BestFixedPoint best_fixed_point(const LossStream& stream, const Ball& domain, long s, long t);

struct SaRow {
    long k = 0;              // interval length in rounds
    double max_regret = 0.0;
    std::optional<double> bound; // algorithm's interval bound, when one exists
    std::optional<double> ratio; // regret / (GD sqrt(ln T) k^pow) for towers
    long argmax_start = 0;
};

struct SweepPolicy {
    long exhaustive_up_to = 1024; // exhaustive start coverage for T <= this
    long sample_starts = 256;     // stratified starts above it
    std::uint64_t seed = 2718281828ULL;
};

/// Max interval regret per requested length, vs the offline oracle.
std::vector<SaRow> adaptive_regret_sweep(const GameTrace& trace, const LossStream& stream,
                                         const std::vector<long>& lengths,
                                         const SweepPolicy& policy = {});

double static_regret(const GameTrace& trace, const LossStream& stream);

/// sum_t l_t(x_t) - sum_t l_t(x*_t) against a supplied comparator path.
double dynamic_regret(const GameTrace& trace, const LossStream& stream,
                      const ComparatorPath& path);

/// Theorem-style interval bounds used by tests and reports.
double basic_interval_bound(double g, double d, long horizon, long len);          // 36 GD sqrt(ln T) k^(3/4)
double full_interval_bound(double g, double d, long horizon, long len, double eps); // 48 GD sqrt(ln T) k^((1+e)/2), c=1
double mw_witness_bound(double g, double d, long horizon, long span);             // 3GD sqrt(span) + 3GD sqrt(ln T span)
double hedge_witness_bound(double alpha, long horizon, long len);                 // (2/alpha)(ln len + ln T)

// --- technical inequality checkers -------------------------------------------
// Each returns the slack (lhs - rhs); the boolean form accepts slack >= -1e-12.

double lemma_tech_slack(double x);               // 6x^(3/4) vs 6(x - sqrt(x)/2)^(3/4) + (sqrt(x)/2)^(1/2)
bool check_lemma_tech(double x);

double lemma_tech_new_slack(double x, double eps); // 8x^((1+e)/2) vs 8(x - x^(1-e)/2)^((1+e)/2) + (x/2)^((1-e)/2)
bool check_lemma_tech_new(double x, double eps);

double lookback_shrink_slack(double x, double eps); // x^(e(1+e)) - (x^(1+e) - x)^e vs e/2
bool check_lookback_shrink(double x, double eps);

double rate_tradeoff_slack(double y, double alpha, double beta);
// y^b - (y - y^((1-b)/(1-a)))^b vs (b/2) y^(a(1-b)/(1-a)); also used with the
// 2/beta form r(x(y)) <= (2/b)[R(y) - R(y - x(y))]
bool check_rate_tradeoff(double y, double alpha, double beta);

/// Minimal R satisfying R(y) = R(y - x(y)) + C1*sqrt(x(y)) by dynamic
/// programming over integer y, with x(y) = max(1, floor(min(C2 y^(1/n), y/2)))
/// and R(1) = C1; checked against the lower bound (C1/(2 sqrt(C2))) y^(1-1/(2n)).
struct RecursionReport {
    std::vector<double> dp;       // R(1..y_max)
    double min_slack = 0.0;       // min over y of R(y) - lower_bound(y)
    long argmin = 1;
    bool dominated = false;       // min_slack >= -1e-12
};
RecursionReport check_recursion_bounds(int n, double c1, double c2, long y_max);

// --- reports ------------------------------------------------------------------

struct RegretReport {
    std::string algo;
    double static_regret = 0.0;
    std::vector<SaRow> sa_table;
    double dynamic = 0.0;
    double path_len = 0.0;
    OracleQuality oracle_quality = OracleQuality::Analytic;
    std::vector<std::string> violations;
};

RegretReport build_report(const GameTrace& trace, const LossStream& stream, double epsilon,
                          const std::vector<long>& sa_lengths, const SweepPolicy& policy = {});

std::string report_to_json(const RegretReport& report, const LossStream& stream, double epsilon,
                           std::uint64_t seed);

/// Per-expert cumulative-loss prefix sums extracted from a trace; lets
/// witness-interval meta-regret queries run in O(1) per interval.
class ExpertLossIndex {
public:
    explicit ExpertLossIndex(const GameTrace& trace);
    /// sum over tau in [a, b] of l_tau(x_tau^(e)) for rounds the expert lived
    double expert_interval_loss(const ScheduleEntry& e, long a, long b) const;
    double player_interval_loss(long a, long b) const;

private:
    std::map<std::pair<long, int>, std::pair<long, std::vector<double>>> prefix_;
    std::vector<double> player_prefix_;
};

}  // namespace eflh
