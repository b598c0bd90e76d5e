#include "eflh/meta.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>

namespace eflh {

double eta_clamp(long lifespan, const ProblemConstants& pc) {
    // horizon floored at 2: ln(1) = 0 would zero every weight at T = 1
    const double ln_t = std::log(static_cast<double>(std::max(pc.horizon, 2L)));
    const double root = std::sqrt(ln_t / static_cast<double>(lifespan));
    return std::min(0.5, root) / loss_gap_bound(pc);
}

double init_weight(const ScheduleEntry& entry, const ProblemConstants& pc, MetaVariant variant,
                   long round) {
    if (variant == MetaVariant::SignedMW) return eta_clamp(entry.lifespan, pc);
    return 1.0 / static_cast<double>(round);
}

Vec predict_mix(const std::vector<double>& weights, const std::vector<Vec>& points,
                MetaVariant variant) {
    if (weights.empty() || weights.size() != points.size())
        throw LifecycleError("prediction over an empty or misaligned active set");
    double total = 1.0;
    if (variant == MetaVariant::SignedMW) {
        total = 0.0;
        for (double w : weights) total += w;
        if (!(total > 0.0)) throw ContractViolation("nonpositive signed-MW weight total");
    }
    Vec x = Vec::Zero(points.front().size());
    for (size_t i = 0; i < weights.size(); ++i) x += (weights[i] / total) * points[i];
    return x;
}

void signed_mw_update(std::vector<double>& weights, double meta_loss,
                      const std::vector<double>& expert_losses, const std::vector<double>& etas,
                      double gap_bound) {
    for (size_t i = 0; i < weights.size(); ++i) {
        const double gap = meta_loss - expert_losses[i];
        if (std::abs(gap) > gap_bound + 1e-9)
            throw ContractViolation("loss gap " + std::to_string(std::abs(gap)) +
                                    " exceeds G*D = " + std::to_string(gap_bound));
        const double mult = 1.0 + etas[i] * gap;
        if (mult < 0.5 - 1e-12 || mult > 1.5 + 1e-12)
            throw ContractViolation("signed-MW multiplier " + std::to_string(mult) +
                                    " left [1/2, 3/2]");
        weights[i] *= mult;
    }
}

namespace {

double log_sum_exp(const std::vector<double>& v) {
    double mx = -std::numeric_limits<double>::infinity();
    for (double x : v) mx = std::max(mx, x);
    if (!std::isfinite(mx)) return mx;
    double acc = 0.0;
    for (double x : v) acc += std::exp(x - mx);
    return mx + std::log(acc);
}

void normalize_log(std::vector<double>& lw) {
    const double z = log_sum_exp(lw);
    if (!std::isfinite(z)) throw ContractViolation("hedge weights vanished entirely");
    for (double& x : lw) x -= z;
}

} // namespace

void hedge_update(std::vector<double>& weights, const std::vector<double>& expert_losses,
                  double alpha) {
    if (!(alpha > 0.0)) throw ConfigError("hedge requires alpha > 0");
    std::vector<double> lw(weights.size());
    for (size_t i = 0; i < weights.size(); ++i)
        lw[i] = (weights[i] > 0.0 ? std::log(weights[i])
                                  : -std::numeric_limits<double>::infinity()) -
                alpha * expert_losses[i];
    normalize_log(lw);
    for (size_t i = 0; i < weights.size(); ++i) weights[i] = std::exp(lw[i]);
}

void mix_new_expert(std::vector<double>& weights, int n_new, long round) {
    if (n_new == 0) return;
    if (n_new > 1) throw ContractViolation("schedule spawned more than one expert for hedge");
    const double share = 1.0 / static_cast<double>(round);
    for (double& w : weights) w *= 1.0 - share;
    weights.push_back(share);
}

double pseudo_weight_total(const std::vector<double>& weights, const std::vector<double>& etas) {
    double acc = 0.0;
    for (size_t i = 0; i < weights.size(); ++i) acc += weights[i] / etas[i];
    return acc;
}

double pseudo_weight_factor(const ScheduleKind& kind, long horizon) {
    switch (kind.family) {
        case ScheduleFamily::BasicTower:
        case ScheduleFamily::SingleSpan:
            return 1.0;
        case ScheduleFamily::FullTower:
        case ScheduleFamily::LargestOnlyTower:
            return active_set_bound(kind, horizon);
        case ScheduleFamily::DyadicBaseline:
            return std::floor(std::log2(static_cast<double>(horizon))) + 1.0;
    }
    return 1.0;
}

ProblemConstants problem_constants(const LossStream& stream, double epsilon) {
    ProblemConstants pc;
    pc.lipschitz = stream.lipschitz;
    pc.diameter = stream.diameter;
    pc.horizon = stream.horizon();
    pc.exp_concavity = stream.exp_concavity;
    pc.strong_convexity = stream.strong_convexity;
    if (epsilon > 0.0) pc.tower_epsilon = epsilon;
    pc.validate();
    return pc;
}

AlgoSpec make_algo(const std::string& selector, double epsilon, const LossStream& stream) {
    AlgoSpec a;
    a.name = selector;
    if (selector == "eflh-basic") {
        a.schedule = ScheduleKind::basic();
    } else if (selector == "eflh-full") {
        a.schedule = ScheduleKind::full(epsilon);
    } else if (selector == "eflh-exp") {
        a.schedule = ScheduleKind::largest_only(epsilon);
        a.meta = MetaVariant::Hedge;
        if (stream.exp_concavity) {
            a.learner = LearnerKind::NewtonStep;
            a.hedge_alpha = *stream.exp_concavity;
        } else if (stream.strong_convexity) {
            // lambda-strongly-convex losses are lambda/G^2 exp-concave
            a.learner = LearnerKind::OgdStronglyConvex;
            a.hedge_alpha = *stream.strong_convexity / (stream.lipschitz * stream.lipschitz);
        } else {
            throw ConfigError("eflh-exp needs an exp-concave or strongly-convex stream");
        }
    } else if (selector == "flh-baseline") {
        a.schedule = ScheduleKind::dyadic();
    } else if (selector == "ogd") {
        a.schedule = ScheduleKind::single_span();
    } else {
        throw ConfigError("unknown algorithm selector: " + selector);
    }
    a.schedule.validate();
    return a;
}

namespace {

struct LiveExpert {
    ScheduleEntry entry;
    Expert learner;
    double weight = 0.0;     // signed-MW
    double log_weight = 0.0; // hedge
    double eta = 0.0;        // signed-MW clamped rate
};

std::uint64_t fnv_mix(std::uint64_t h, const void* p, size_t n) {
    const auto* b = static_cast<const unsigned char*>(p);
    for (size_t i = 0; i < n; ++i) {
        h ^= b[i];
        h *= 1099511628211ULL;
    }
    return h;
}

} // namespace

GameTrace run_game(const AlgoSpec& algo, const LossStream& stream, const RunOptions& opts) {
    const ProblemConstants pc = problem_constants(stream, algo.schedule.epsilon);
    const Ball domain = stream.domain();
    const long T = pc.horizon;
    const double gd = loss_gap_bound(pc);
    const bool hedge = algo.meta == MetaVariant::Hedge;
    if (hedge && algo.schedule.family != ScheduleFamily::LargestOnlyTower)
        throw ConfigError("the hedge engine runs on the largest-only tower schedule");
    if (hedge && !(algo.hedge_alpha > 0.0)) throw ConfigError("hedge requires alpha > 0");
    if (algo.learner == LearnerKind::NewtonStep && stream.steps.front().cls != LossClass::ExpConcave)
        throw ConfigError("newton-step experts require an exp-concave stream");
    const double pw_ceiling = pseudo_weight_factor(algo.schedule, T);

    GameTrace trace;
    trace.algo = algo.name;
    trace.rounds.reserve(static_cast<size_t>(T));

    std::vector<LiveExpert> live;
    auto spawn = [&](const ScheduleEntry& e, long round, size_t n_round_spawns) {
        LiveExpert le;
        le.entry = e;
        le.learner = spawn_expert(e.birth, e.lifespan, algo.learner, domain, pc);
        le.eta = eta_clamp(e.lifespan, pc);
        if (hedge) {
            // 1/|S_1| at the opening round, 1/round afterwards (identical when
            // a single expert opens, which the largest-only schedule gives)
            le.log_weight = round == 1 ? -std::log(static_cast<double>(n_round_spawns))
                                       : -std::log(static_cast<double>(round));
        } else {
            le.weight = init_weight(e, pc, MetaVariant::SignedMW, round);
        }
        live.push_back(std::move(le));
        trace.spawned.push_back(e);
    };

    {
        const auto born = spawns_at(1, algo.schedule, pc);
        if (hedge && born.size() > 1)
            throw ContractViolation("largest-only schedule spawned more than one opening expert");
        for (const auto& e : born) spawn(e, 1, born.size());
    }

    double cum_loss = 0.0;
    for (long t = 1; t <= T; ++t) {
        if (live.empty()) throw LifecycleError("active set empty at round " + std::to_string(t));

        std::vector<double> weights(live.size());
        std::vector<Vec> points(live.size());
        for (size_t i = 0; i < live.size(); ++i) {
            weights[i] = hedge ? std::exp(live[i].log_weight) : live[i].weight;
            points[i] = live[i].learner.point;
        }
        const Vec x = predict_mix(weights, points, algo.meta);
        if (!domain.contains(x, 1e-9))
            throw ContractViolation("prediction left the domain at round " + std::to_string(t));

        RoundRecord rec;
        rec.t = t;
        rec.prediction = x;
        rec.n_active = static_cast<int>(live.size());
        for (const auto& le : live) rec.spawn_count += le.entry.birth == t ? 1 : 0;
        if (!hedge) {
            std::vector<double> etas(live.size());
            for (size_t i = 0; i < live.size(); ++i) etas[i] = live[i].eta;
            rec.has_pseudo = true;
            rec.pseudo_weight = pseudo_weight_total(weights, etas);
            if (rec.pseudo_weight > pw_ceiling * static_cast<double>(t) + 1e-6)
                throw ContractViolation("pseudo-weight " + std::to_string(rec.pseudo_weight) +
                                        " above its ceiling at round " + std::to_string(t));
        }
        std::uint64_t digest = 1469598103934665603ULL;
        for (size_t i = 0; i < live.size(); ++i) {
            digest = fnv_mix(digest, &live[i].entry.birth, sizeof(long));
            digest = fnv_mix(digest, &live[i].entry.cls, sizeof(int));
            digest = fnv_mix(digest, &weights[i], sizeof(double));
        }
        rec.weight_digest = digest;

        const LossStep& step = stream.steps[static_cast<size_t>(t - 1)];
        const double meta_loss = step.value(x);
        std::vector<double> expert_losses(live.size());
        for (size_t i = 0; i < live.size(); ++i) {
            expert_losses[i] = step.value(points[i]);
            if (std::abs(meta_loss - expert_losses[i]) > gd + 1e-9)
                throw ContractViolation("loss gap above G*D at round " + std::to_string(t));
        }
        cum_loss += meta_loss;
        rec.loss = meta_loss;
        rec.cum_loss = cum_loss;
        if (opts.record_expert_losses) {
            rec.expert_losses.reserve(live.size());
            for (size_t i = 0; i < live.size(); ++i)
                rec.expert_losses.emplace_back(live[i].entry, expert_losses[i]);
        }
        trace.rounds.push_back(std::move(rec));

        // expert updates, each with the gradient at its own prediction
        for (auto& le : live) le.learner.step(step.gradient(le.learner.point), domain, pc);

        // meta weight update
        if (hedge) {
            for (size_t i = 0; i < live.size(); ++i)
                live[i].log_weight -= algo.hedge_alpha * expert_losses[i];
            double z = -std::numeric_limits<double>::infinity();
            {
                std::vector<double> lw(live.size());
                for (size_t i = 0; i < live.size(); ++i) lw[i] = live[i].log_weight;
                z = log_sum_exp(lw);
            }
            for (auto& le : live) le.log_weight -= z;
        } else {
            std::vector<double> w(live.size()), etas(live.size());
            for (size_t i = 0; i < live.size(); ++i) {
                w[i] = live[i].weight;
                etas[i] = live[i].eta;
            }
            signed_mw_update(w, meta_loss, expert_losses, etas, gd);
            for (size_t i = 0; i < live.size(); ++i) live[i].weight = w[i];
        }

        // prune, then spawn for round t+1
        if (t < T) {
            const bool pruned =
                std::erase_if(live, [&](const LiveExpert& le) { return le.entry.death() < t + 1; }) >
                0;
            if (hedge && pruned && !live.empty()) {
                std::vector<double> lw(live.size());
                for (size_t i = 0; i < live.size(); ++i) lw[i] = live[i].log_weight;
                const double z = log_sum_exp(lw);
                for (auto& le : live) le.log_weight -= z;
            }
            const auto born = spawns_at(t + 1, algo.schedule, pc);
            if (hedge) {
                if (born.size() > 1)
                    throw ContractViolation("more than one spawn under the hedge engine");
                if (born.size() == 1) {
                    const double share = std::log1p(-1.0 / static_cast<double>(t + 1));
                    for (auto& le : live) le.log_weight += share;
                }
            }
            for (const auto& e : born) spawn(e, t + 1, born.size());
            if (hedge && !live.empty()) {
                // simplex invariant check
                double total = 0.0;
                for (const auto& le : live) total += std::exp(le.log_weight);
                if (std::abs(total - 1.0) > 1e-9)
                    throw ContractViolation("hedge weights sum to " + std::to_string(total));
            }
        }
    }
    return trace;
}

std::uint64_t GameTrace::digest() const {
    std::uint64_t h = 1469598103934665603ULL;
    for (const auto& r : rounds) {
        h = fnv_mix(h, &r.t, sizeof(r.t));
        h = fnv_mix(h, r.prediction.data(), sizeof(double) * r.prediction.size());
        h = fnv_mix(h, &r.loss, sizeof(r.loss));
        h = fnv_mix(h, &r.weight_digest, sizeof(r.weight_digest));
        h = fnv_mix(h, &r.pseudo_weight, sizeof(r.pseudo_weight));
    }
    return h;
}

void GameTrace::write_csv(std::ostream& out) const {
    out << "t,algo,prediction,loss,cum_loss,n_active,pseudo_weight_total,spawn_count\n";
    char buf[64];
    const auto fmt = [&buf](double v) {
        std::snprintf(buf, sizeof(buf), "%.17g", v);
        return std::string(buf);
    };
    for (const auto& r : rounds) {
        out << r.t << ',' << algo << ',';
        for (long i = 0; i < r.prediction.size(); ++i) {
            if (i) out << ';';
            out << fmt(r.prediction(i));
        }
        out << ',' << fmt(r.loss) << ',' << fmt(r.cum_loss) << ',' << r.n_active << ',';
        if (r.has_pseudo) out << fmt(r.pseudo_weight);
        out << ',' << r.spawn_count << '\n';
    }
}

}  // namespace eflh
