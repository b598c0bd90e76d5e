#include "eflh/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include <json.hpp>

#include "eflh/errors.hpp"

namespace eflh {

using nlohmann::json;

std::string oracle_quality_name(OracleQuality q) {
    switch (q) {
        case OracleQuality::Analytic: return "analytic";
        case OracleQuality::Iterative: return "iterative";
        case OracleQuality::IterativeWarning: return "iterative-warning";
    }
    return "?";
}

OfflineOracle::OfflineOracle(const LossStream& stream, const Ball& domain)
    : stream_(stream), domain_(domain) {
    bool all_quad = true, all_lin = true;
    for (const auto& s : stream.steps) {
        all_quad &= std::holds_alternative<QuadraticLoss>(s.fn);
        all_lin &= std::holds_alternative<LinearLoss>(s.fn);
    }
    mode_ = all_quad ? Mode::Quadratic : (all_lin ? Mode::Linear : Mode::Mixed);
    const long T = stream.horizon();
    if (mode_ != Mode::Mixed) {
        pre_vec_.assign(static_cast<size_t>(T) + 1, Vec::Zero(domain.dim()));
        pre_sq_.assign(static_cast<size_t>(T) + 1, 0.0);
        for (long t = 1; t <= T; ++t) {
            const auto& s = stream.steps[static_cast<size_t>(t - 1)];
            if (mode_ == Mode::Quadratic) {
                const auto& q = std::get<QuadraticLoss>(s.fn);
                pre_vec_[t] = pre_vec_[t - 1] + q.center;
                pre_sq_[t] = pre_sq_[t - 1] + q.center.squaredNorm();
            } else {
                const auto& l = std::get<LinearLoss>(s.fn);
                pre_vec_[t] = pre_vec_[t - 1] + l.slope;
                pre_sq_[t] = pre_sq_[t - 1] + l.offset;
            }
        }
    }
}

namespace {

// Projected gradient descent on the summed loss; residual of the projected
// gradient map decides convergence so boundary minima terminate too.
BestFixedPoint pgd_minimize(const LossStream& stream, const Ball& domain, long s, long t) {
    const auto objective = [&](const Vec& x) {
        double acc = 0.0;
        for (long tau = s; tau <= t; ++tau)
            acc += stream.steps[static_cast<size_t>(tau - 1)].value(x);
        return acc;
    };
    const auto grad = [&](const Vec& x) {
        Vec g = Vec::Zero(domain.dim());
        for (long tau = s; tau <= t; ++tau)
            g += stream.steps[static_cast<size_t>(tau - 1)].gradient(x);
        return g;
    };

    const long n = t - s + 1;
    PortableRng rng(0x0fflu ^ static_cast<std::uint64_t>(s * 2654435761ULL + t));
    BestFixedPoint best;
    best.total_loss = std::numeric_limits<double>::infinity();
    bool converged_once = false;
    for (int restart = 0; restart < 10; ++restart) {
        Vec x = restart == 0 ? domain.center()
                             : Vec(domain.center() + rng.in_ball(domain.dim(), domain.radius()));
        double step = 1.0 / (2.0 * static_cast<double>(n)); // 1/L for quadratic sums
        bool converged = false;
        for (int it = 0; it < 5000; ++it) {
            const Vec g = grad(x);
            Vec x_next = domain.project(x - step * g);
            // backtracking on the summed objective
            double f = objective(x), f_next = objective(x_next);
            int shrink = 0;
            while (f_next > f && shrink < 40) {
                step *= 0.5;
                x_next = domain.project(x - step * g);
                f_next = objective(x_next);
                ++shrink;
            }
            const double residual = (x - x_next).norm() / std::max(step, 1e-300);
            x = x_next;
            if (residual < 1e-8) {
                converged = true;
                break;
            }
            if (shrink == 0) step *= 1.2;
        }
        converged_once |= converged;
        const double f = objective(x);
        if (f < best.total_loss) {
            best.total_loss = f;
            best.point = x;
        }
    }
    best.quality = converged_once ? OracleQuality::Iterative : OracleQuality::IterativeWarning;
    return best;
}

} // namespace

BestFixedPoint OfflineOracle::best_on(long s, long t) const {
    if (!(1 <= s && s <= t && t <= stream_.horizon()))
        throw ConfigError("oracle interval out of range");
    BestFixedPoint out;
    const double n = static_cast<double>(t - s + 1);
    if (mode_ == Mode::Quadratic) {
        const Vec sum_c = pre_vec_[static_cast<size_t>(t)] - pre_vec_[static_cast<size_t>(s - 1)];
        const double sum_c2 =
            pre_sq_[static_cast<size_t>(t)] - pre_sq_[static_cast<size_t>(s - 1)];
        out.point = domain_.project(sum_c / n);
        out.total_loss = n * out.point.squaredNorm() - 2.0 * out.point.dot(sum_c) + sum_c2;
        out.quality = OracleQuality::Analytic;
        return out;
    }
    if (mode_ == Mode::Linear) {
        const Vec g = pre_vec_[static_cast<size_t>(t)] - pre_vec_[static_cast<size_t>(s - 1)];
        const double b = pre_sq_[static_cast<size_t>(t)] - pre_sq_[static_cast<size_t>(s - 1)];
        const double gn = g.norm();
        out.point = gn > 0 ? Vec(domain_.center() - domain_.radius() * g / gn) : domain_.center();
        out.total_loss = g.dot(out.point) + b;
        out.quality = OracleQuality::Analytic;
        return out;
    }
    return pgd_minimize(stream_, domain_, s, t);
}

double OfflineOracle::player_interval_loss(const GameTrace& trace, long s, long t) const {
    double acc = 0.0;
    for (long tau = s; tau <= t; ++tau)
        acc += trace.rounds[static_cast<size_t>(tau - 1)].loss;
    return acc;
}

BestFixedPoint best_fixed_point(const LossStream& stream, const Ball& domain, long s, long t) {
    return OfflineOracle(stream, domain).best_on(s, t);
}

std::vector<SaRow> adaptive_regret_sweep(const GameTrace& trace, const LossStream& stream,
                                         const std::vector<long>& lengths,
                                         const SweepPolicy& policy) {
    const long T = trace.horizon();
    OfflineOracle oracle(stream, stream.domain());
    std::vector<double> player(static_cast<size_t>(T) + 1, 0.0);
    for (long t = 1; t <= T; ++t)
        player[static_cast<size_t>(t)] =
            player[static_cast<size_t>(t - 1)] + trace.rounds[static_cast<size_t>(t - 1)].loss;

    std::vector<SaRow> table;
    for (long k : lengths) {
        if (k < 1 || k > T) throw ConfigError("sweep length out of range");
        SaRow row;
        row.k = k;
        row.max_regret = -std::numeric_limits<double>::infinity();
        const long n_starts = T - k + 1;
        std::vector<long> starts;
        if (T <= policy.exhaustive_up_to || n_starts <= policy.sample_starts) {
            starts.resize(static_cast<size_t>(n_starts));
            for (long s = 1; s <= n_starts; ++s) starts[static_cast<size_t>(s - 1)] = s;
        } else {
            // stratified: one seeded draw per stratum of the start range
            PortableRng rng(policy.seed ^ static_cast<std::uint64_t>(k));
            const double width = static_cast<double>(n_starts) / policy.sample_starts;
            for (long i = 0; i < policy.sample_starts; ++i) {
                const double lo = 1.0 + i * width;
                long s = static_cast<long>(lo + rng.uniform01() * width);
                starts.push_back(std::clamp(s, 1L, n_starts));
            }
        }
        for (long s : starts) {
            const long e = s + k - 1;
            const double regret =
                (player[static_cast<size_t>(e)] - player[static_cast<size_t>(s - 1)]) -
                oracle.best_on(s, e).total_loss;
            if (regret > row.max_regret) {
                row.max_regret = regret;
                row.argmax_start = s;
            }
        }
        table.push_back(row);
    }
    return table;
}

double static_regret(const GameTrace& trace, const LossStream& stream) {
    const long T = trace.horizon();
    return trace.rounds.back().cum_loss -
           best_fixed_point(stream, stream.domain(), 1, T).total_loss;
}

double dynamic_regret(const GameTrace& trace, const LossStream& stream,
                      const ComparatorPath& path) {
    const long T = trace.horizon();
    if (static_cast<long>(path.points.size()) != T)
        throw ConfigError("comparator path length must equal the horizon");
    double acc = 0.0;
    for (long t = 1; t <= T; ++t) {
        const auto& step = stream.steps[static_cast<size_t>(t - 1)];
        acc += trace.rounds[static_cast<size_t>(t - 1)].loss -
               step.value(path.points[static_cast<size_t>(t - 1)]);
    }
    return acc;
}

double basic_interval_bound(double g, double d, long horizon, long len) {
    return 36.0 * g * d * std::sqrt(std::log(static_cast<double>(horizon))) *
           std::pow(static_cast<double>(len), 0.75);
}

double full_interval_bound(double g, double d, long horizon, long len, double eps) {
    return 48.0 * g * d * std::sqrt(std::log(static_cast<double>(horizon))) *
           std::pow(static_cast<double>(len), (1.0 + eps) / 2.0);
}

double mw_witness_bound(double g, double d, long horizon, long span) {
    const double s = static_cast<double>(span);
    const double ln_t = std::log(static_cast<double>(horizon));
    return 3.0 * g * d * std::sqrt(s) + 3.0 * g * d * std::sqrt(ln_t * s);
}

double hedge_witness_bound(double alpha, long horizon, long len) {
    return 2.0 / alpha *
           (std::log(static_cast<double>(len)) + std::log(static_cast<double>(horizon)));
}

// --- inequality checkers -------------------------------------------------------

double lemma_tech_slack(double x) {
    if (x < 1.0) throw ConfigError("lemma requires x >= 1");
    const double rx = std::sqrt(x) / 2.0;
    return 6.0 * std::pow(x, 0.75) - (6.0 * std::pow(x - rx, 0.75) + std::sqrt(rx));
}

bool check_lemma_tech(double x) { return lemma_tech_slack(x) >= -1e-12; }

double lemma_tech_new_slack(double x, double eps) {
    if (x < 1.0) throw ConfigError("lemma requires x >= 1");
    if (!(eps > 0.0 && eps < 0.5)) throw ConfigError("lemma requires epsilon in (0, 1/2)");
    const double h = (1.0 + eps) / 2.0;
    return 8.0 * std::pow(x, h) -
           (8.0 * std::pow(x - std::pow(x, 1.0 - eps) / 2.0, h) +
            std::pow(x / 2.0, (1.0 - eps) / 2.0));
}

bool check_lemma_tech_new(double x, double eps) { return lemma_tech_new_slack(x, eps) >= -1e-12; }

double lookback_shrink_slack(double x, double eps) {
    if (x < 1.0) throw ConfigError("requires x >= 1");
    if (!(eps > 0.0 && eps < 1.0)) throw ConfigError("requires epsilon in (0, 1)");
    return std::pow(x, eps * (1.0 + eps)) - std::pow(std::pow(x, 1.0 + eps) - x, eps) -
           eps / 2.0;
}

bool check_lookback_shrink(double x, double eps) {
    return lookback_shrink_slack(x, eps) >= -1e-12;
}

double rate_tradeoff_slack(double y, double alpha, double beta) {
    if (y < 1.0) throw ConfigError("requires y >= 1");
    if (!(alpha >= 0.0 && alpha <= 0.5 && alpha < beta && beta < 1.0))
        throw ConfigError("requires 0 <= alpha <= 1/2 and alpha < beta < 1");
    const double x = std::pow(y, (1.0 - beta) / (1.0 - alpha));
    const double gain = std::pow(y, beta) - std::pow(y - x, beta);
    return gain - beta / 2.0 * std::pow(y, alpha * (1.0 - beta) / (1.0 - alpha));
}

bool check_rate_tradeoff(double y, double alpha, double beta) {
    return rate_tradeoff_slack(y, alpha, beta) >= -1e-12;
}

RecursionReport check_recursion_bounds(int n, double c1, double c2, long y_max) {
    if (y_max < 16) throw ConfigError("recursion grid must reach at least 16");
    if (n < 1 || !(c1 > 0.0) || !(c2 >= 1.0)) throw ConfigError("bad recursion parameters");
    RecursionReport rep;
    rep.dp.assign(static_cast<size_t>(y_max) + 1, 0.0);
    rep.dp[1] = c1;
    rep.min_slack = std::numeric_limits<double>::infinity();
    const double exponent = 1.0 - 1.0 / (2.0 * n);
    for (long y = 1; y <= y_max; ++y) {
        if (y >= 2) {
            const double xr =
                std::min(c2 * std::pow(static_cast<double>(y), 1.0 / n), y / 2.0);
            const long x = std::max(1L, static_cast<long>(std::floor(xr)));
            rep.dp[static_cast<size_t>(y)] =
                rep.dp[static_cast<size_t>(y - x)] + c1 * std::sqrt(static_cast<double>(x));
        }
        const double lb =
            c1 / (2.0 * std::sqrt(c2)) * std::pow(static_cast<double>(y), exponent);
        const double slack = rep.dp[static_cast<size_t>(y)] - lb;
        if (slack < rep.min_slack) {
            rep.min_slack = slack;
            rep.argmin = y;
        }
    }
    rep.dominated = rep.min_slack >= -1e-12;
    return rep;
}

// --- reports --------------------------------------------------------------------

RegretReport build_report(const GameTrace& trace, const LossStream& stream, double epsilon,
                          const std::vector<long>& sa_lengths, const SweepPolicy& policy) {
    RegretReport rep;
    rep.algo = trace.algo;
    rep.static_regret = static_regret(trace, stream);
    rep.sa_table = adaptive_regret_sweep(trace, stream, sa_lengths, policy);
    rep.dynamic = dynamic_regret(trace, stream, stream.path);
    rep.path_len = path_length(stream.path);
    OfflineOracle probe(stream, stream.domain());
    rep.oracle_quality = probe.best_on(1, stream.horizon()).quality;

    const double g = stream.lipschitz, d = stream.diameter;
    const long T = stream.horizon();
    for (auto& row : rep.sa_table) {
        if (trace.algo == "eflh-basic") {
            row.bound = basic_interval_bound(g, d, T, row.k);
            const double denom = g * d * std::sqrt(std::log(static_cast<double>(T))) *
                                 std::pow(static_cast<double>(row.k), 0.75);
            row.ratio = row.max_regret / denom;
            if (*row.ratio > 36.0)
                rep.violations.push_back("sa_ratio@k=" + std::to_string(row.k));
        } else if (trace.algo == "eflh-full") {
            row.bound = full_interval_bound(g, d, T, row.k, epsilon);
            const double denom = g * d * std::sqrt(std::log(static_cast<double>(T))) *
                                 std::pow(static_cast<double>(row.k), (1.0 + epsilon) / 2.0);
            row.ratio = row.max_regret / denom;
            if (*row.ratio > 48.0)
                rep.violations.push_back("sa_ratio@k=" + std::to_string(row.k));
        }
    }
    return rep;
}

std::string report_to_json(const RegretReport& report, const LossStream& stream, double epsilon,
                           std::uint64_t seed) {
    json j;
    json cfg;
    cfg["algo"] = report.algo;
    cfg["scenario_kind"] = scenario_kind_name(stream.config.kind);
    cfg["T"] = stream.horizon();
    cfg["dim"] = stream.config.dim;
    cfg["radius"] = stream.config.radius;
    cfg["lipschitz"] = stream.lipschitz;
    cfg["diameter"] = stream.diameter;
    cfg["seed"] = seed;
    if (epsilon > 0.0) cfg["epsilon"] = epsilon;
    if (stream.strong_convexity) cfg["lambda"] = *stream.strong_convexity;
    if (stream.exp_concavity) cfg["alpha"] = *stream.exp_concavity;
    j["config"] = std::move(cfg);
    j["static_regret"] = report.static_regret;
    json table = json::array();
    for (const auto& row : report.sa_table) {
        json r;
        r["k"] = row.k;
        r["max_regret"] = row.max_regret;
        r["bound"] = row.bound ? json(*row.bound) : json(nullptr);
        r["ratio"] = row.ratio ? json(*row.ratio) : json(nullptr);
        table.push_back(std::move(r));
    }
    j["sa_table"] = std::move(table);
    j["dynamic"] = {{"regret", report.dynamic}, {"path_length", report.path_len}};
    j["oracle_quality"] = oracle_quality_name(report.oracle_quality);
    j["violations"] = report.violations;
    return j.dump(2);
}

ExpertLossIndex::ExpertLossIndex(const GameTrace& trace) {
    player_prefix_.assign(trace.rounds.size() + 1, 0.0);
    for (size_t i = 0; i < trace.rounds.size(); ++i) {
        player_prefix_[i + 1] = player_prefix_[i] + trace.rounds[i].loss;
        for (const auto& [entry, loss] : trace.rounds[i].expert_losses) {
            auto& slot = prefix_[{entry.birth, entry.cls}];
            if (slot.second.empty()) {
                slot.first = entry.birth;
                slot.second.push_back(0.0);
            }
            slot.second.push_back(slot.second.back() + loss);
        }
    }
}

double ExpertLossIndex::expert_interval_loss(const ScheduleEntry& e, long a, long b) const {
    const auto it = prefix_.find({e.birth, e.cls});
    if (it == prefix_.end()) throw ConfigError("no recorded losses for that expert");
    const auto& [birth, pre] = it->second;
    const long lo = a - birth, hi = b - birth + 1;
    if (lo < 0 || hi > static_cast<long>(pre.size()) - 1 || lo >= hi)
        throw ConfigError("expert interval outside its recorded life");
    return pre[static_cast<size_t>(hi)] - pre[static_cast<size_t>(lo)];
}

double ExpertLossIndex::player_interval_loss(long a, long b) const {
    return player_prefix_[static_cast<size_t>(b)] - player_prefix_[static_cast<size_t>(a - 1)];
}

}  // namespace eflh
