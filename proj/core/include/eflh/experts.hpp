#pragma once

#include <optional>
#include <string>

#include "eflh/geometry.hpp"
#include "eflh/loss.hpp"

namespace eflh {

enum class LearnerKind { OgdConvex, OgdStronglyConvex, NewtonStep };

std::string learner_name(LearnerKind k);

/// Accumulator state of the online Newton-step learner. The matrix starts
/// at eps0*I and only grows by rank-one gradient outer products, so it
/// stays symmetric positive definite with eigenvalues >= eps0.
struct OnsState {
    Mat a_matrix;
    double gamma = 0.0;
    double eps0 = 0.0;
};

/// One base learner instance: alive on rounds birth .. birth+lifespan-1.
/// age counts processed gradient steps (1 after the first update); the run
/// loop steps an expert exactly once per alive round, so age at round t is
/// t - birth + 1.
struct Expert {
    long birth = 1;
    long lifespan = 1;
    LearnerKind kind = LearnerKind::OgdConvex;
    Vec point;
    long age = 0;
    std::optional<OnsState> ons;

    long death() const { return birth + lifespan - 1; }
    bool alive_at(long t) const { return birth <= t && t <= death(); }

    /// Dispatch to the learner-specific update with the observed gradient.
    void step(const Vec& grad, const Ball& domain, const ProblemConstants& pc);
};

/// Fresh expert at the domain center, age 0; Newton-step learners get
/// A = eps0*I with gamma = min{1/(4GD), alpha}/2 and eps0 = 1/(gamma^2 D^2).
Expert spawn_expert(long birth, long lifespan, LearnerKind kind, const Ball& domain,
                    const ProblemConstants& pc);

/// Projected gradient step. Convex variant uses the constant lifespan-tuned
/// rate D/(G*sqrt(lifespan)); strongly-convex uses 1/(lambda*age).
void ogd_step(Expert& e, const Vec& grad, const Ball& domain, const ProblemConstants& pc);

/// A += g g'; x <- project_A(x - (1/gamma) A^{-1} g).
void ons_step(Expert& e, const Vec& grad, const Ball& domain, const ProblemConstants& pc);

/// Upper bound on the learner's regret over an interval of n rounds, used
/// as the assertion target in tests:
///   OGD convex:          1.5 * G * D * sqrt(n)
///   OGD strongly convex: (G^2 / lambda) * (1 + ln n)
///   Newton step:         max(G*D, 5 * (1/alpha + G*D) * d * ln n)
/// The log-regret constants are deliberately conservative upper bounds; the
/// G*D floor covers one-round tails where the ln n term vanishes.
double expert_regret_bound(LearnerKind kind, long n, const ProblemConstants& pc, int dim);

}  // namespace eflh
