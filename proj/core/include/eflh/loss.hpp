#pragma once

#include <functional>
#include <variant>

#include "eflh/geometry.hpp"

namespace eflh {

enum class LossClass { Convex, StronglyConvex, ExpConcave };

/// l(x) = ||x - center||^2. Nonnegative by construction, 2-strongly-convex.
struct QuadraticLoss {
    Vec center;
};

/// l(x) = slope . x + offset, with offset chosen by the generators so the
/// minimum over the domain is exactly 0.
struct LinearLoss {
    Vec slope;
    double offset = 0.0;
};

/// Arbitrary pure oracles, for tests and ad-hoc streams. Evaluation falls
/// back to the iterative offline oracle for these.
struct CustomLoss {
    std::function<double(const Vec&)> value;
    std::function<Vec(const Vec&)> grad;
};

/// One round's loss: value + gradient oracles plus the declared convexity
/// class. Oracles must be pure functions of (t, x); the adversary is
/// oblivious.
struct LossStep {
    long round = 1;
    LossClass cls = LossClass::Convex;
    std::variant<QuadraticLoss, LinearLoss, CustomLoss> fn;

    double value(const Vec& x) const {
        if (const auto* q = std::get_if<QuadraticLoss>(&fn)) return (x - q->center).squaredNorm();
        if (const auto* l = std::get_if<LinearLoss>(&fn)) return l->slope.dot(x) + l->offset;
        return std::get<CustomLoss>(fn).value(x);
    }

    Vec gradient(const Vec& x) const {
        if (const auto* q = std::get_if<QuadraticLoss>(&fn)) return 2.0 * (x - q->center);
        if (const auto* l = std::get_if<LinearLoss>(&fn)) return l->slope;
        return std::get<CustomLoss>(fn).grad(x);
    }
};

}  // namespace eflh
