#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "eflh/loss.hpp"

namespace eflh {

enum class PathNorm { L1, L2 };

/// A time-varying comparator x*_1..x*_T; on the generated streams it is the
/// exact per-round minimizer, so its cumulative loss oracles dynamic regret.
struct ComparatorPath {
    std::vector<Vec> points;
    PathNorm norm = PathNorm::L1;
};

double path_length(const ComparatorPath& path);

enum class ScenarioKind { PiecewiseQuadratic, PiecewiseLinear, ExpConcave, DriftingQuadratic };

std::string scenario_kind_name(ScenarioKind k);
ScenarioKind scenario_kind_from_name(const std::string& s);

/// One stationary segment. Quadratic kinds use `center`; the linear kind
/// uses `slope`. Either may be left empty for seeded generation.
struct SegmentSpec {
    long length = 0;
    Vec center; // quadratic kinds
    Vec slope;  // linear kind
    bool has_center = false;
    bool has_slope = false;
};

struct ScenarioConfig {
    ScenarioKind kind = ScenarioKind::PiecewiseQuadratic;
    long horizon = 1;
    int dim = 1;
    double radius = 1.0;
    std::vector<SegmentSpec> segments; // explicit; or empty with n_segments set
    int n_segments = 0;                // seeded generation when segments empty
    std::uint64_t seed = 0;
    double drift_step = 0.0;           // drifting kind; 0 = default 0.02*radius
    double alpha_override = 0.0;       // exp-concave kind; 0 = derived default

    void validate() const;

    static ScenarioConfig from_json_text(const std::string& text);
    static ScenarioConfig load(const std::string& path);
    std::string to_json_text() const;
};

/// A full generated loss sequence with its comparator and the declared
/// constants (valid bounds for every step by construction).
struct LossStream {
    ScenarioConfig config;
    std::vector<LossStep> steps;
    ComparatorPath path;
    double lipschitz = 0.0; // G
    double diameter = 0.0;  // D
    std::optional<double> strong_convexity;
    std::optional<double> exp_concavity;
    std::vector<long> segment_lengths;

    long horizon() const { return static_cast<long>(steps.size()); }
    Ball domain() const { return Ball(Vec::Zero(config.dim), config.radius); }
    std::uint64_t digest() const;
};

LossStream gen_piecewise_quadratic(const ScenarioConfig& cfg);
LossStream gen_piecewise_linear(const ScenarioConfig& cfg);
LossStream gen_exp_concave(const ScenarioConfig& cfg);
LossStream gen_drifting_quadratic(const ScenarioConfig& cfg);

/// Dispatch on cfg.kind.
LossStream generate(const ScenarioConfig& cfg);

/// Deterministic, implementation-portable draws on top of mt19937_64
/// (std distributions are not pinned across standard libraries).
class PortableRng {
public:
    explicit PortableRng(std::uint64_t seed) : state_(seed) {}
    double uniform01();                       // [0, 1)
    double uniform(double lo, double hi);
    Vec in_ball(int dim, double radius);      // rejection sampling in the cube
    Vec on_sphere(int dim);                   // Box-Muller + normalize

private:
    std::uint64_t next_raw();
    std::uint64_t state_;
};

}  // namespace eflh
