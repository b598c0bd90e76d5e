// Benchmark CLI: run a meta-algorithm on a scenario, verify the schedule
// coverage guarantees and technical inequalities exhaustively, or compare
// several algorithms on one scenario.
//
// Exit codes: 0 success, 1 usage error, 2 detected contract/coverage
// violation.

#include <atomic>
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <thread>
#include <vector>

#include <CLI11.hpp>

#include "eflh/evaluation.hpp"
#include "eflh/meta.hpp"

namespace fs = std::filesystem;
using namespace eflh;

namespace {

struct RunArgs {
    std::string algo;
    std::string scenario_path;
    double epsilon = 0.0;
    std::uint64_t seed = 0;
    bool seed_set = false;
    long horizon_override = 0;
    std::string out_dir;
    std::vector<long> sa_lengths = {64, 256};
};

LossStream load_stream(const RunArgs& a) {
    ScenarioConfig cfg = ScenarioConfig::load(a.scenario_path);
    if (a.seed_set) cfg.seed = a.seed;
    if (a.horizon_override > 0) {
        if (!cfg.segments.empty() && a.horizon_override != cfg.horizon)
            throw ConfigError("--T cannot override a scenario with explicit segments");
        cfg.horizon = a.horizon_override;
    }
    return generate(cfg);
}

void require_epsilon(const std::string& algo, double epsilon) {
    if ((algo == "eflh-full" || algo == "eflh-exp") && !(epsilon > 0.0 && epsilon < 0.5))
        throw CLI::ValidationError("--epsilon in (0, 1/2) is required for " + algo);
}

struct RunOutcome {
    RegretReport report;
    long max_active = 0;
    double wall_ms = 0.0;
};

RunOutcome run_one(const std::string& algo_name, const LossStream& stream, double epsilon,
                   const std::vector<long>& sa_lengths, std::uint64_t seed,
                   const fs::path& dir) {
    const auto t0 = std::chrono::steady_clock::now();
    const AlgoSpec algo = make_algo(algo_name, epsilon, stream);
    RunOptions opts;
    opts.record_expert_losses = stream.horizon() <= (1L << 16);
    const GameTrace trace = run_game(algo, stream, opts);
    std::vector<long> lengths;
    for (long k : sa_lengths)
        if (k <= stream.horizon()) lengths.push_back(k);
    if (lengths.empty()) lengths.push_back(stream.horizon());
    RunOutcome out;
    out.report = build_report(trace, stream, epsilon, lengths);
    const auto t1 = std::chrono::steady_clock::now();
    out.wall_ms = std::chrono::duration<double, std::milli>(t1 - t0).count();
    for (const auto& r : trace.rounds) out.max_active = std::max<long>(out.max_active, r.n_active);

    fs::create_directories(dir);
    {
        std::ofstream csv(dir / "trace.csv", std::ios::binary);
        trace.write_csv(csv);
    }
    {
        std::ofstream js(dir / "report.json", std::ios::binary);
        js << report_to_json(out.report, stream, epsilon, seed) << "\n";
    }
    return out;
}

int cmd_run(const RunArgs& a) {
    require_epsilon(a.algo, a.epsilon);
    const LossStream stream = load_stream(a);
    const std::uint64_t seed = a.seed_set ? a.seed : stream.config.seed;
    const auto outcome = run_one(a.algo, stream, a.epsilon, a.sa_lengths, seed, a.out_dir);
    std::cout << "wrote " << (fs::path(a.out_dir) / "trace.csv").string() << " and report.json"
              << " (static_regret=" << outcome.report.static_regret
              << ", max_active=" << outcome.max_active << ")\n";
    return 0;
}

int cmd_check_coverage(const std::string& schedule, long horizon, double epsilon) {
    ScheduleKind kind;
    if (schedule == "basic")
        kind = ScheduleKind::basic();
    else if (schedule == "full")
        kind = ScheduleKind::full(epsilon);
    else if (schedule == "largest")
        kind = ScheduleKind::largest_only(epsilon);
    else if (schedule == "dyadic")
        kind = ScheduleKind::dyadic();
    else
        throw CLI::ValidationError("unknown schedule kind: " + schedule);
    if (kind.needs_epsilon() && !(epsilon > 0.0 && epsilon < 0.5))
        throw CLI::ValidationError("--epsilon in (0, 1/2) is required for tower schedules");

    ProblemConstants pc;
    pc.horizon = horizon;
    if (kind.needs_epsilon()) pc.tower_epsilon = epsilon;
    const ScheduleReplay replay(kind, pc);
    long checked = 0;
    for (long t = 8; t <= horizon; ++t) {
        for (long s = 1; s + 7 <= t; ++s) {
            ++checked;
            if (!replay.witness(s, t)) {
                std::cout << "coverage violation: no witness for [" << s << ", " << t << "]\n";
                return 2;
            }
        }
    }
    const auto stats = replay_stats(kind, pc);
    std::cout << "coverage ok: schedule=" << kind.name() << " T=" << horizon
              << " intervals_checked=" << checked << " max_active=" << stats.max_active
              << " max_per_class=" << stats.max_per_class << "\n";
    return 0;
}

int cmd_check_inequalities() {
    long grid = 0;
    double worst = std::numeric_limits<double>::infinity();
    for (long i = 0; i < 100000; ++i) {
        const double x = std::pow(10.0, 9.0 * static_cast<double>(i) / 99999.0);
        const double s = lemma_tech_slack(x);
        worst = std::min(worst, s);
        ++grid;
        if (s < -1e-12) {
            std::cout << "regret-recursion inequality fails at x=" << x << "\n";
            return 2;
        }
    }
    std::cout << "tower recursion inequality: " << grid << " points, min slack " << worst << "\n";

    for (double eps : {0.1, 0.2, 0.3, 0.4, 0.49}) {
        grid = 0;
        worst = std::numeric_limits<double>::infinity();
        for (long i = 0; i < 10000; ++i) {
            const double x = std::pow(10.0, 9.0 * static_cast<double>(i) / 9999.0);
            const double s = lemma_tech_new_slack(x, eps);
            worst = std::min(worst, s);
            ++grid;
            if (s < -1e-12) {
                std::cout << "generalized recursion inequality fails at x=" << x
                          << " eps=" << eps << "\n";
                return 2;
            }
        }
        std::cout << "generalized recursion (eps=" << eps << "): " << grid
                  << " points, min slack " << worst << "\n";
    }

    for (double eps : {0.1, 0.2, 0.3, 0.4, 0.49, 0.9}) {
        for (long i = 0; i < 10000; ++i) {
            const double x = std::pow(10.0, 6.0 * static_cast<double>(i) / 9999.0);
            if (lookback_shrink_slack(x, eps) < -1e-12) {
                std::cout << "lookback shrink inequality fails at x=" << x << " eps=" << eps
                          << "\n";
                return 2;
            }
        }
    }
    std::cout << "lookback shrink inequality: 6x10000 points ok\n";

    for (auto [a, b] : {std::pair{0.5, 0.75}, std::pair{0.0, 0.5}, std::pair{0.25, 0.6}}) {
        for (long i = 0; i < 10000; ++i) {
            const double y = std::pow(10.0, 6.0 * static_cast<double>(i) / 9999.0);
            if (rate_tradeoff_slack(y, a, b) < -1e-12) {
                std::cout << "rate tradeoff inequality fails at y=" << y << "\n";
                return 2;
            }
        }
    }
    std::cout << "rate tradeoff inequality: 3x10000 points ok\n";

    for (int n : {2, 3}) {
        const auto rep = check_recursion_bounds(n, 1.0, 1.0, 10000);
        std::cout << "recursion lower bound (n=" << n << "): min slack " << rep.min_slack
                  << " at y=" << rep.argmin << "\n";
        if (!rep.dominated) {
            std::cout << "recursion lower bound violated\n";
            return 2;
        }
    }
    return 0;
}

int cmd_compare(const std::vector<std::string>& algos, const RunArgs& base) {
    const LossStream stream = load_stream(base);
    const std::uint64_t seed = base.seed_set ? base.seed : stream.config.seed;
    for (const auto& a : algos) require_epsilon(a, base.epsilon);

    std::vector<RunOutcome> outcomes(algos.size());
    long threads = 1;
    if (const char* env = std::getenv("EFLH_THREADS")) threads = std::max(1L, std::atol(env));
    std::atomic<size_t> next{0};
    auto worker = [&]() {
        for (size_t i = next.fetch_add(1); i < algos.size(); i = next.fetch_add(1))
            outcomes[i] = run_one(algos[i], stream, base.epsilon, base.sa_lengths, seed,
                                  fs::path(base.out_dir) / algos[i]);
    };
    if (threads <= 1 || algos.size() <= 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (long i = 0; i < std::min<long>(threads, algos.size()); ++i)
            pool.emplace_back(worker);
        for (auto& th : pool) th.join();
    }

    std::vector<long> lengths;
    for (long k : base.sa_lengths)
        if (k <= stream.horizon()) lengths.push_back(k);
    if (lengths.empty()) lengths.push_back(stream.horizon());

    fs::create_directories(base.out_dir);
    std::ofstream csv(fs::path(base.out_dir) / "summary.csv", std::ios::binary);
    csv << "algo,max_active_experts,static_regret";
    for (long k : lengths) csv << ",sa_max@" << k;
    csv << ",dynamic_regret,wall_time_ms\n";
    char buf[64];
    const auto fmt = [&buf](double v) {
        std::snprintf(buf, sizeof(buf), "%.17g", v);
        return std::string(buf);
    };
    for (size_t i = 0; i < algos.size(); ++i) {
        const auto& o = outcomes[i];
        csv << algos[i] << ',' << o.max_active << ',' << fmt(o.report.static_regret);
        for (const auto& row : o.report.sa_table) csv << ',' << fmt(row.max_regret);
        csv << ',' << fmt(o.report.dynamic) << ',' << fmt(o.wall_ms) << '\n';
    }
    std::cout << "wrote " << (fs::path(base.out_dir) / "summary.csv").string() << "\n";
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"adaptive/dynamic regret meta-algorithms with doubly-logarithmic expert counts"};
    app.require_subcommand(1);

    RunArgs run_args;
    auto* run = app.add_subcommand("run", "run one algorithm on a scenario");
    run->add_option("--algo", run_args.algo, "eflh-basic|eflh-full|eflh-exp|flh-baseline|ogd")
        ->required();
    run->add_option("--scenario", run_args.scenario_path, "scenario JSON file")->required();
    run->add_option("--epsilon", run_args.epsilon, "tower parameter in (0, 1/2)");
    auto* seed_opt = run->add_option("--seed", run_args.seed, "override the scenario seed");
    run->add_option("--T", run_args.horizon_override, "override the scenario horizon");
    run->add_option("--out", run_args.out_dir, "output directory")->required();
    run->add_option("--sa-lengths", run_args.sa_lengths, "interval lengths for the SA table");

    auto* check = app.add_subcommand("check", "exhaustive verifiers");
    check->require_subcommand(1);
    std::string cov_schedule;
    long cov_horizon = 256;
    double cov_eps = 0.0;
    auto* cov = check->add_subcommand("coverage", "interval coverage witnesses");
    cov->add_option("--schedule", cov_schedule, "basic|full|largest|dyadic")->required();
    cov->add_option("--T", cov_horizon, "horizon")->required();
    cov->add_option("--epsilon", cov_eps, "tower parameter");
    auto* ineq = check->add_subcommand("inequalities", "technical inequality sweeps");

    RunArgs cmp_args;
    std::vector<std::string> cmp_algos;
    auto* cmp = app.add_subcommand("compare", "run several algorithms on one scenario");
    cmp->add_option("--algos", cmp_algos, "comma-separated selectors")
        ->required()
        ->delimiter(',');
    cmp->add_option("--scenario", cmp_args.scenario_path, "scenario JSON file")->required();
    cmp->add_option("--epsilon", cmp_args.epsilon, "tower parameter");
    auto* cmp_seed = cmp->add_option("--seed", cmp_args.seed, "override the scenario seed");
    cmp->add_option("--T", cmp_args.horizon_override, "override the scenario horizon");
    cmp->add_option("--out", cmp_args.out_dir, "output directory")->required();
    cmp->add_option("--sa-lengths", cmp_args.sa_lengths, "interval lengths for the SA table");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 1;
    }

    try {
        if (run->parsed()) {
            run_args.seed_set = seed_opt->count() > 0;
            return cmd_run(run_args);
        }
        if (cov->parsed()) return cmd_check_coverage(cov_schedule, cov_horizon, cov_eps);
        if (ineq->parsed()) return cmd_check_inequalities();
        if (cmp->parsed()) {
            cmp_args.seed_set = cmp_seed->count() > 0;
            return cmd_compare(cmp_algos, cmp_args);
        }
    } catch (const CLI::ValidationError& e) {
        std::cerr << "usage error: " << e.what() << "\n";
        return 1;
    } catch (const ConfigError& e) {
        std::cerr << "usage error: " << e.what() << "\n";
        return 1;
    } catch (const ContractViolation& e) {
        std::cerr << "contract violation: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 1;
}
