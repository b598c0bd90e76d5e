#pragma once

#include <Eigen/Dense>
#include <optional>

#include "eflh/errors.hpp"

namespace eflh {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

/// Global problem constants shared by every algorithm in a run.
///
/// lipschitz (G) and diameter (D) bound the per-round loss gap by G*D;
/// horizon (T) is known up front; exp_concavity / strong_convexity are set
/// only when the loss stream declares the corresponding class;
/// tower_epsilon parameterizes the (1+eps)-tower schedules and must stay
/// below 1/2 for the regret recursion to close.
struct ProblemConstants {
    double lipschitz = 1.0;
    double diameter = 1.0;
    long horizon = 1;
    std::optional<double> exp_concavity;    // alpha > 0
    std::optional<double> strong_convexity; // lambda > 0
    double tower_epsilon = 0.3;

    void validate() const {
        if (!(lipschitz > 0.0)) throw ConfigError("lipschitz constant must be > 0");
        if (!(diameter > 0.0)) throw ConfigError("diameter must be > 0");
        if (horizon < 1) throw ConfigError("horizon must be >= 1");
        if (exp_concavity && !(*exp_concavity > 0.0))
            throw ConfigError("exp-concavity parameter must be > 0");
        if (strong_convexity && !(*strong_convexity > 0.0))
            throw ConfigError("strong-convexity parameter must be > 0");
        if (!(tower_epsilon > 0.0 && tower_epsilon < 0.5))
            throw ConfigError("tower epsilon must lie in (0, 1/2)");
    }
};

/// Largest possible per-round loss difference between two feasible points:
/// |l(x) - l(y)| <= G * ||x - y|| <= G * D.
inline double loss_gap_bound(const ProblemConstants& pc) {
    return pc.lipschitz * pc.diameter;
}

/// Euclidean ball { x : ||x - center|| <= radius }. The only domain shape
/// implemented; projection is exact, which keeps every feasibility check
/// testable. Other domains would slot in behind the same project() surface.
class Ball {
public:
    Ball(Vec center, double radius) : center_(std::move(center)), radius_(radius) {
        if (radius_ < 0.0) throw ConfigError("ball radius must be >= 0");
    }

    static Ball unit(int dim, double radius = 1.0) { return Ball(Vec::Zero(dim), radius); }

    int dim() const { return static_cast<int>(center_.size()); }
    const Vec& center() const { return center_; }
    double radius() const { return radius_; }
    double diameter() const { return 2.0 * radius_; }

    void check_dim(const Vec& p) const {
        if (p.size() != center_.size())
            throw DimensionError("point dimension " + std::to_string(p.size()) +
                                 " does not match domain dimension " +
                                 std::to_string(center_.size()));
    }

    /// Nearest point of the ball; interior points come back unchanged.
    /// Re-scales until the result lands inside, so projecting a second time
    /// returns the same bits (idempotence is exact, not approximate).
    Vec project(const Vec& p) const {
        check_dim(p);
        Vec q = p;
        for (int i = 0; i < 4; ++i) {
            const Vec d = q - center_;
            const double n = d.norm();
            if (n <= radius_) return q;
            q = center_ + d * (radius_ / n);
        }
        return q;
    }

    bool contains(const Vec& p, double tol = 1e-9) const {
        check_dim(p);
        return (p - center_).norm() <= radius_ + tol;
    }

private:
    Vec center_;
    double radius_;
};

/// Projection onto the ball in the metric ||v||_A = sqrt(v' A v), A spd.
/// Used by the Newton-step expert, whose update lives in the A-geometry.
Vec project_in_metric(const Ball& domain, const Mat& metric, const Vec& p);

}  // namespace eflh
