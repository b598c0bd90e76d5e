#include "eflh/geometry.hpp"

#include <cmath>

namespace eflh {

// Projection in the A-norm onto a ball reduces to a one-dimensional root
// find: the KKT point is y(mu) = (A + mu I)^{-1} (A p + mu c) with mu >= 0
// chosen so ||y - c|| = r. In the eigenbasis of A the constraint norm
// phi(mu) = sum_i (lambda_i z_i / (lambda_i + mu))^2 is strictly decreasing,
// so bisection converges unconditionally.
Vec project_in_metric(const Ball& domain, const Mat& metric, const Vec& p) {
    domain.check_dim(p);
    const double r = domain.radius();
    const Vec d = p - domain.center();
    if (d.norm() <= r) return p;
    if (domain.dim() == 1) {
        // any spd metric agrees with plain clamping on an interval
        const double lo = domain.center()(0) - r, hi = domain.center()(0) + r;
        Vec out(1);
        out(0) = std::min(std::max(p(0), lo), hi);
        return out;
    }

    Eigen::SelfAdjointEigenSolver<Mat> eig(metric);
    const Vec lam = eig.eigenvalues();
    const Vec z = eig.eigenvectors().transpose() * d;
    const auto phi = [&](double mu) {
        double acc = 0.0;
        for (int i = 0; i < lam.size(); ++i) {
            const double v = lam(i) * z(i) / (lam(i) + mu);
            acc += v * v;
        }
        return acc;
    };

    const double target = r * r;
    double lo = 0.0, hi = 1.0;
    while (phi(hi) > target) hi *= 2.0;
    for (int it = 0; it < 200 && hi - lo > 1e-10 * (1.0 + hi); ++it) {
        const double mid = 0.5 * (lo + hi);
        (phi(mid) > target ? lo : hi) = mid;
    }
    const double mu = hi;
    Vec scaled(z.size());
    for (int i = 0; i < z.size(); ++i) scaled(i) = lam(i) * z(i) / (lam(i) + mu);
    return domain.center() + eig.eigenvectors() * scaled;
}

}  // namespace eflh
