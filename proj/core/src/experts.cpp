#include "eflh/experts.hpp"

#include <cmath>

namespace eflh {

std::string learner_name(LearnerKind k) {
    switch (k) {
        case LearnerKind::OgdConvex: return "ogd-convex";
        case LearnerKind::OgdStronglyConvex: return "ogd-strongly-convex";
        case LearnerKind::NewtonStep: return "ons";
    }
    return "?";
}

Expert spawn_expert(long birth, long lifespan, LearnerKind kind, const Ball& domain,
                    const ProblemConstants& pc) {
    if (lifespan < 1) throw ConfigError("expert lifespan must be >= 1");
    if (birth < 1) throw ConfigError("expert birth must be >= 1");
    Expert e;
    e.birth = birth;
    e.lifespan = lifespan;
    e.kind = kind;
    e.point = domain.center();
    e.age = 0;
    if (kind == LearnerKind::OgdStronglyConvex && !pc.strong_convexity)
        throw ConfigError("strongly-convex learner requires a declared lambda");
    if (kind == LearnerKind::NewtonStep) {
        if (!pc.exp_concavity)
            throw ConfigError("newton-step learner requires a declared exp-concavity alpha");
        OnsState s;
        s.gamma = 0.5 * std::min(1.0 / (4.0 * loss_gap_bound(pc)), *pc.exp_concavity);
        s.eps0 = 1.0 / (s.gamma * s.gamma * pc.diameter * pc.diameter);
        s.a_matrix = s.eps0 * Mat::Identity(domain.dim(), domain.dim());
        e.ons = std::move(s);
    }
    return e;
}

namespace {

void check_alive(const Expert& e) {
    if (e.age >= e.lifespan)
        throw LifecycleError("step on a deceased expert (born " + std::to_string(e.birth) +
                             ", lifespan " + std::to_string(e.lifespan) + ")");
}

} // namespace

void ogd_step(Expert& e, const Vec& grad, const Ball& domain, const ProblemConstants& pc) {
    check_alive(e);
    if (grad.norm() > pc.lipschitz + 1e-9)
        throw ContractViolation("gradient norm " + std::to_string(grad.norm()) +
                                " exceeds the declared Lipschitz constant " +
                                std::to_string(pc.lipschitz));
    ++e.age;
    double rate = 0.0;
    if (e.kind == LearnerKind::OgdConvex) {
        rate = pc.diameter / (pc.lipschitz * std::sqrt(static_cast<double>(e.lifespan)));
    } else if (e.kind == LearnerKind::OgdStronglyConvex) {
        rate = 1.0 / (*pc.strong_convexity * static_cast<double>(e.age));
    } else {
        throw ConfigError("ogd_step on a non-OGD learner");
    }
    e.point = domain.project(e.point - rate * grad);
}

void ons_step(Expert& e, const Vec& grad, const Ball& domain, const ProblemConstants&) {
    check_alive(e);
    if (e.kind != LearnerKind::NewtonStep || !e.ons)
        throw ConfigError("ons_step on a non-Newton learner");
    ++e.age;
    OnsState& s = *e.ons;
    s.a_matrix.noalias() += grad * grad.transpose();
    const Vec dir = s.a_matrix.ldlt().solve(grad);
    e.point = project_in_metric(domain, s.a_matrix, e.point - dir / s.gamma);
}

void Expert::step(const Vec& grad, const Ball& domain, const ProblemConstants& pc) {
    if (kind == LearnerKind::NewtonStep)
        ons_step(*this, grad, domain, pc);
    else
        ogd_step(*this, grad, domain, pc);
}

double expert_regret_bound(LearnerKind kind, long n, const ProblemConstants& pc, int dim) {
    if (n < 1) throw ConfigError("interval length must be >= 1");
    const double gd = loss_gap_bound(pc);
    const double dn = static_cast<double>(n);
    switch (kind) {
        case LearnerKind::OgdConvex:
            return 1.5 * gd * std::sqrt(dn);
        case LearnerKind::OgdStronglyConvex: {
            if (!pc.strong_convexity) throw ConfigError("bound requires lambda");
            return pc.lipschitz * pc.lipschitz / *pc.strong_convexity * (1.0 + std::log(dn));
        }
        case LearnerKind::NewtonStep: {
            if (!pc.exp_concavity) throw ConfigError("bound requires alpha");
            return std::max(gd, 5.0 * (1.0 / *pc.exp_concavity + gd) * dim * std::log(dn));
        }
    }
    return 0.0;
}

}  // namespace eflh
