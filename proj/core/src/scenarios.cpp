#include "eflh/scenarios.hpp"

#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>

#include <json.hpp>

#include "eflh/errors.hpp"

namespace eflh {

using nlohmann::json;

double path_length(const ComparatorPath& path) {
    if (path.points.empty()) throw ConfigError("path must be nonempty");
    double acc = 0.0;
    for (size_t i = 0; i + 1 < path.points.size(); ++i) {
        const Vec d = path.points[i + 1] - path.points[i];
        acc += path.norm == PathNorm::L1 ? d.lpNorm<1>() : d.norm();
    }
    return acc;
}

std::string scenario_kind_name(ScenarioKind k) {
    switch (k) {
        case ScenarioKind::PiecewiseQuadratic: return "piecewise-quadratic";
        case ScenarioKind::PiecewiseLinear: return "piecewise-linear";
        case ScenarioKind::ExpConcave: return "exp-concave";
        case ScenarioKind::DriftingQuadratic: return "drifting-quadratic";
    }
    return "?";
}

ScenarioKind scenario_kind_from_name(const std::string& s) {
    if (s == "piecewise-quadratic") return ScenarioKind::PiecewiseQuadratic;
    if (s == "piecewise-linear") return ScenarioKind::PiecewiseLinear;
    if (s == "exp-concave") return ScenarioKind::ExpConcave;
    if (s == "drifting-quadratic") return ScenarioKind::DriftingQuadratic;
    throw ConfigError("unknown scenario kind: " + s);
}

void ScenarioConfig::validate() const {
    if (horizon < 1) throw ConfigError("scenario horizon must be >= 1");
    if (dim < 1) throw ConfigError("scenario dimension must be >= 1");
    if (!(radius > 0.0)) throw ConfigError("scenario radius must be > 0");
    if (kind != ScenarioKind::DriftingQuadratic) {
        if (segments.empty() && n_segments < 1)
            throw ConfigError("scenario needs explicit segments or n_segments >= 1");
        if (!segments.empty()) {
            long total = 0;
            for (const auto& s : segments) {
                if (s.length < 1) throw ConfigError("segment length must be >= 1");
                total += s.length;
                if (s.has_center && s.center.size() != dim)
                    throw DimensionError("segment center dimension mismatch");
                if (s.has_slope && s.slope.size() != dim)
                    throw DimensionError("segment slope dimension mismatch");
                if (s.has_center && s.center.norm() > radius + 1e-12)
                    throw ConfigError("segment center outside the domain");
            }
            if (total != horizon)
                throw ConfigError("segment lengths sum to " + std::to_string(total) +
                                  ", horizon is " + std::to_string(horizon));
        }
    }
    if (alpha_override < 0.0) throw ConfigError("alpha must be > 0 when given");
    if (drift_step < 0.0) throw ConfigError("drift_step must be >= 0");
}

// --- portable rng -----------------------------------------------------------

std::uint64_t PortableRng::next_raw() {
    // splitmix64; tiny, seedable, stable across platforms
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

double PortableRng::uniform01() {
    return static_cast<double>(next_raw() >> 11) * 0x1.0p-53;
}

double PortableRng::uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

Vec PortableRng::in_ball(int dim, double radius) {
    while (true) {
        Vec v(dim);
        for (int i = 0; i < dim; ++i) v(i) = uniform(-1.0, 1.0);
        if (v.squaredNorm() <= 1.0) return radius * v;
    }
}

Vec PortableRng::on_sphere(int dim) {
    Vec v(dim);
    int i = 0;
    while (i < dim) {
        const double u1 = std::max(uniform01(), 1e-300);
        const double u2 = uniform01();
        const double r = std::sqrt(-2.0 * std::log(u1));
        v(i++) = r * std::cos(2.0 * M_PI * u2);
        if (i < dim) v(i++) = r * std::sin(2.0 * M_PI * u2);
    }
    const double n = v.norm();
    return n > 0 ? Vec(v / n) : on_sphere(dim);
}

// --- generators --------------------------------------------------------------

namespace {

std::vector<long> split_lengths(long horizon, int n) {
    std::vector<long> lens(n, horizon / n);
    for (long r = horizon % n, i = 0; i < r; ++i) ++lens[static_cast<size_t>(i)];
    return lens;
}

struct ResolvedSegments {
    std::vector<long> lengths;
    std::vector<Vec> payload; // centers or slopes
};

ResolvedSegments resolve_segments(const ScenarioConfig& cfg, bool want_center) {
    ResolvedSegments out;
    PortableRng rng(cfg.seed);
    if (!cfg.segments.empty()) {
        for (const auto& s : cfg.segments) {
            out.lengths.push_back(s.length);
            if (want_center) {
                out.payload.push_back(s.has_center ? s.center
                                                   : rng.in_ball(cfg.dim, 0.8 * cfg.radius));
            } else {
                out.payload.push_back(s.has_slope
                                          ? s.slope
                                          : Vec(rng.uniform(0.5, 1.0) * rng.on_sphere(cfg.dim)));
            }
        }
    } else {
        out.lengths = split_lengths(cfg.horizon, cfg.n_segments);
        for (int i = 0; i < cfg.n_segments; ++i) {
            if (want_center)
                out.payload.push_back(rng.in_ball(cfg.dim, 0.8 * cfg.radius));
            else
                out.payload.push_back(Vec(rng.uniform(0.5, 1.0) * rng.on_sphere(cfg.dim)));
        }
    }
    return out;
}

LossStream quadratic_stream(const ScenarioConfig& cfg, bool exp_concave_tag) {
    cfg.validate();
    LossStream st;
    st.config = cfg;
    const auto seg = resolve_segments(cfg, /*want_center=*/true);
    st.segment_lengths = seg.lengths;
    st.diameter = 2.0 * cfg.radius;
    st.lipschitz = 2.0 * st.diameter;
    st.strong_convexity = 2.0;
    const double derived_alpha = 2.0 / (1.0 + 2.0 * st.lipschitz * st.diameter);
    if (exp_concave_tag)
        st.exp_concavity = cfg.alpha_override > 0.0 ? cfg.alpha_override : derived_alpha;
    st.path.norm = PathNorm::L1;
    long t = 1;
    for (size_t i = 0; i < seg.lengths.size(); ++i) {
        for (long j = 0; j < seg.lengths[i]; ++j, ++t) {
            LossStep step;
            step.round = t;
            step.cls = exp_concave_tag ? LossClass::ExpConcave : LossClass::StronglyConvex;
            step.fn = QuadraticLoss{seg.payload[i]};
            st.steps.push_back(std::move(step));
            st.path.points.push_back(seg.payload[i]);
        }
    }
    return st;
}

} // namespace

LossStream gen_piecewise_quadratic(const ScenarioConfig& cfg) {
    if (cfg.kind != ScenarioKind::PiecewiseQuadratic)
        throw ConfigError("config kind is not piecewise-quadratic");
    return quadratic_stream(cfg, false);
}

LossStream gen_exp_concave(const ScenarioConfig& cfg) {
    if (cfg.kind != ScenarioKind::ExpConcave)
        throw ConfigError("config kind is not exp-concave");
    return quadratic_stream(cfg, true);
}

LossStream gen_piecewise_linear(const ScenarioConfig& cfg) {
    if (cfg.kind != ScenarioKind::PiecewiseLinear)
        throw ConfigError("config kind is not piecewise-linear");
    cfg.validate();
    LossStream st;
    st.config = cfg;
    const auto seg = resolve_segments(cfg, /*want_center=*/false);
    st.segment_lengths = seg.lengths;
    st.diameter = 2.0 * cfg.radius;
    double g_max = 0.0;
    for (const auto& g : seg.payload) g_max = std::max(g_max, g.norm());
    st.lipschitz = g_max > 0.0 ? g_max : 1.0;
    st.path.norm = PathNorm::L1;
    long t = 1;
    for (size_t i = 0; i < seg.lengths.size(); ++i) {
        const Vec& g = seg.payload[i];
        const double gn = g.norm();
        // offset makes min over the (origin-centered) ball exactly 0
        const double offset = gn * cfg.radius;
        const Vec minimizer = gn > 0 ? Vec(-cfg.radius * g / gn) : Vec(Vec::Zero(cfg.dim));
        for (long j = 0; j < seg.lengths[i]; ++j, ++t) {
            LossStep step;
            step.round = t;
            step.cls = LossClass::Convex;
            step.fn = LinearLoss{g, offset};
            st.steps.push_back(std::move(step));
            st.path.points.push_back(minimizer);
        }
    }
    return st;
}

LossStream gen_drifting_quadratic(const ScenarioConfig& cfg) {
    if (cfg.kind != ScenarioKind::DriftingQuadratic)
        throw ConfigError("config kind is not drifting-quadratic");
    cfg.validate();
    LossStream st;
    st.config = cfg;
    st.diameter = 2.0 * cfg.radius;
    st.lipschitz = 2.0 * st.diameter;
    st.strong_convexity = 2.0;
    st.path.norm = PathNorm::L1;
    st.segment_lengths = {cfg.horizon};
    PortableRng rng(cfg.seed);
    const double step_size = cfg.drift_step > 0.0 ? cfg.drift_step : 0.02 * cfg.radius;
    const Ball inner(Vec::Zero(cfg.dim), 0.8 * cfg.radius);
    Vec c = rng.in_ball(cfg.dim, 0.8 * cfg.radius);
    for (long t = 1; t <= cfg.horizon; ++t) {
        LossStep step;
        step.round = t;
        step.cls = LossClass::StronglyConvex;
        step.fn = QuadraticLoss{c};
        st.steps.push_back(std::move(step));
        st.path.points.push_back(c);
        c = inner.project(c + step_size * rng.on_sphere(cfg.dim));
    }
    return st;
}

LossStream generate(const ScenarioConfig& cfg) {
    switch (cfg.kind) {
        case ScenarioKind::PiecewiseQuadratic: return gen_piecewise_quadratic(cfg);
        case ScenarioKind::PiecewiseLinear: return gen_piecewise_linear(cfg);
        case ScenarioKind::ExpConcave: return gen_exp_concave(cfg);
        case ScenarioKind::DriftingQuadratic: return gen_drifting_quadratic(cfg);
    }
    throw ConfigError("unknown scenario kind");
}

std::uint64_t LossStream::digest() const {
    // FNV-1a over the raw payload bytes; stable because generation is
    // deterministic arithmetic on doubles.
    std::uint64_t h = 1469598103934665603ULL;
    const auto mix = [&h](const void* p, size_t n) {
        const auto* b = static_cast<const unsigned char*>(p);
        for (size_t i = 0; i < n; ++i) {
            h ^= b[i];
            h *= 1099511628211ULL;
        }
    };
    for (const auto& s : steps) {
        mix(&s.round, sizeof(s.round));
        if (const auto* q = std::get_if<QuadraticLoss>(&s.fn))
            mix(q->center.data(), sizeof(double) * q->center.size());
        else if (const auto* l = std::get_if<LinearLoss>(&s.fn)) {
            mix(l->slope.data(), sizeof(double) * l->slope.size());
            mix(&l->offset, sizeof(l->offset));
        }
    }
    for (const auto& p : path.points) mix(p.data(), sizeof(double) * p.size());
    return h;
}

// --- json io ------------------------------------------------------------------

namespace {

Vec vec_from_json(const json& a) {
    Vec v(a.size());
    for (size_t i = 0; i < a.size(); ++i) v(static_cast<long>(i)) = a[i].get<double>();
    return v;
}

json vec_to_json(const Vec& v) {
    json a = json::array();
    for (long i = 0; i < v.size(); ++i) a.push_back(v(i));
    return a;
}

void reject_unknown(const json& obj, std::initializer_list<const char*> allowed,
                    const std::string& where) {
    for (auto it = obj.begin(); it != obj.end(); ++it) {
        bool ok = false;
        for (const char* k : allowed)
            if (it.key() == k) ok = true;
        if (!ok) throw ConfigError("unknown key '" + it.key() + "' in " + where);
    }
}

} // namespace

ScenarioConfig ScenarioConfig::from_json_text(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ConfigError(std::string("scenario JSON parse error: ") + e.what());
    }
    reject_unknown(j,
                   {"kind", "T", "dim", "radius", "segments", "n_segments", "seed", "drift_step",
                    "alpha"},
                   "scenario");
    ScenarioConfig cfg;
    cfg.kind = scenario_kind_from_name(j.at("kind").get<std::string>());
    cfg.horizon = j.at("T").get<long>();
    cfg.dim = j.value("dim", 1);
    cfg.radius = j.value("radius", 1.0);
    cfg.seed = j.value("seed", std::uint64_t{0});
    cfg.drift_step = j.value("drift_step", 0.0);
    cfg.alpha_override = j.value("alpha", 0.0);
    cfg.n_segments = j.value("n_segments", 0);
    if (j.contains("segments")) {
        for (const auto& s : j.at("segments")) {
            reject_unknown(s, {"length", "center", "slope"}, "segment");
            SegmentSpec spec;
            spec.length = s.at("length").get<long>();
            if (s.contains("center")) {
                spec.center = vec_from_json(s.at("center"));
                spec.has_center = true;
            }
            if (s.contains("slope")) {
                spec.slope = vec_from_json(s.at("slope"));
                spec.has_slope = true;
            }
            cfg.segments.push_back(std::move(spec));
        }
    }
    cfg.validate();
    return cfg;
}

ScenarioConfig ScenarioConfig::load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open scenario file: " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return from_json_text(ss.str());
}

std::string ScenarioConfig::to_json_text() const {
    json j;
    j["kind"] = scenario_kind_name(kind);
    j["T"] = horizon;
    j["dim"] = dim;
    j["radius"] = radius;
    j["seed"] = seed;
    if (n_segments > 0) j["n_segments"] = n_segments;
    if (drift_step > 0.0) j["drift_step"] = drift_step;
    if (alpha_override > 0.0) j["alpha"] = alpha_override;
    if (!segments.empty()) {
        json arr = json::array();
        for (const auto& s : segments) {
            json js;
            js["length"] = s.length;
            if (s.has_center) js["center"] = vec_to_json(s.center);
            if (s.has_slope) js["slope"] = vec_to_json(s.slope);
            arr.push_back(std::move(js));
        }
        j["segments"] = std::move(arr);
    }
    return j.dump(2);
}

}  // namespace eflh
