#pragma once

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include "dmet/config.hpp"
#include "dmet/parallel.hpp"
#include "dmet/scale_family.hpp"

namespace dmet {

// A geodesic ray through a scale family: at every stage it knows which stage
// points it passes through and at what radius from the basepoint.
struct RaySample {
    int point = -1;       // stage-local index
    double radius = 0.0;  // distance from the basepoint
};

struct RayDescriptor {
    std::string id;
    std::vector<std::vector<RaySample>> per_stage;  // sorted by radius
};

struct RayFamily {
    std::vector<RayDescriptor> rays;

    int size() const { return static_cast<int>(rays.size()); }
};

enum class RayVerdict { Finite, Divergent };

// Per-ray estimate of f_rho: the tail sup of rho(x, X') over the window
// [f*R, R] at every stage, and the integer bound dominating it when the tail
// settles.
struct FRhoEstimate {
    std::string ray_id;
    std::vector<double> tail_sup;  // per stage
    RayVerdict verdict = RayVerdict::Divergent;
    double bound = std::numeric_limits<double>::infinity();  // finite verdicts only
    int growth_stage = -1;                                   // divergent verdicts only
    double divergence_bound_used = std::numeric_limits<double>::infinity();
};

namespace detail {

inline double rho_to_other_copy(const ScaleStage& st, int x) {
    double best = std::numeric_limits<double>::infinity();
    for (int y = 0; y < st.cross.size(); ++y) best = std::min(best, st.cross.cross(x, y));
    return best;
}

inline FRhoEstimate classify_tail(FRhoEstimate est, double bound, int window) {
    est.divergence_bound_used = bound;
    const int t = static_cast<int>(est.tail_sup.size());
    for (int s = 0; s < t; ++s)
        if (definitely_greater(est.tail_sup[s], bound)) {
            est.verdict = RayVerdict::Divergent;
            est.growth_stage = s;
            return est;
        }
    for (int back = 1; back < window && back < t; ++back)
        if (definitely_greater(est.tail_sup[t - back], est.tail_sup[t - back - 1])) {
            // still growing at the end of the family
            est.verdict = RayVerdict::Divergent;
            est.growth_stage = t - back;
            return est;
        }
    est.verdict = RayVerdict::Finite;
    double top = est.tail_sup.back();
    est.bound = std::ceil(top - tol_for(top, top));
    return est;
}

inline std::vector<double> tail_sups(const ScaleFamily& fam, const RayDescriptor& ray,
                                     double window_fraction) {
    if (static_cast<int>(ray.per_stage.size()) != fam.stage_count())
        throw std::invalid_argument("ray " + ray.id + " does not cover every stage");
    std::vector<double> sups;
    for (int t = 0; t < fam.stage_count(); ++t) {
        const double r = fam.scales[t];
        const double lo = window_fraction * r;
        double sup = -1.0;
        for (const auto& s : ray.per_stage[t])
            if (s.radius >= lo && s.radius <= r)
                sup = std::max(sup, rho_to_other_copy(fam.stages[t], s.point));
        if (sup < 0.0)
            throw std::invalid_argument("ray " + ray.id + " has no samples in the tail window");
        sups.push_back(sup);
    }
    return sups;
}

}  // namespace detail

inline FRhoEstimate estimate_f_rho(const ScaleFamily& fam, const RayDescriptor& ray,
                                   const AnalysisConfig& config = {}) {
    FRhoEstimate est;
    est.ray_id = ray.id;
    est.tail_sup = detail::tail_sups(fam, ray, config.tail_window_fraction);
    double bound = config.divergence_bound > 0.0 ? config.divergence_bound
                                                 : std::numeric_limits<double>::infinity();
    return detail::classify_tail(std::move(est), bound, std::max(2, config.stabilization_window));
}

// The strata A_m = {rays with finite bound <= m}, nested by construction.
struct RayStrata {
    std::vector<FRhoEstimate> estimates;  // parallel to the ray family
    double divergence_bound_used = 0.0;
    std::vector<std::pair<int, std::vector<int>>> levels;  // (m, ray indices)
};

// Two passes when no explicit divergence bound is configured: first classify
// by trend alone, then re-run with 10x the largest finite bound seen so the
// threshold is reported rather than silent.
inline RayStrata strata(const ScaleFamily& fam, const RayFamily& rays,
                        const AnalysisConfig& config = {}) {
    RayStrata out;
    const int window = std::max(2, config.stabilization_window);

    std::vector<FRhoEstimate> raw(rays.size());
    detail::parallel_chunks(rays.size(), [&](int lo, int hi) {
        for (int i = lo; i < hi; ++i) {
            FRhoEstimate est;
            est.ray_id = rays.rays[i].id;
            est.tail_sup = detail::tail_sups(fam, rays.rays[i], config.tail_window_fraction);
            raw[i] = std::move(est);
        }
    });

    double bound = config.divergence_bound;
    if (bound <= 0.0) {
        double largest = 0.0;
        for (const auto& est : raw) {
            auto trial = detail::classify_tail(est, std::numeric_limits<double>::infinity(),
                                               window);
            if (trial.verdict == RayVerdict::Finite) largest = std::max(largest, trial.bound);
        }
        bound = largest > 0.0 ? 10.0 * largest : 10.0;
    }
    out.divergence_bound_used = bound;

    int max_level = 1;
    for (auto& est : raw) {
        out.estimates.push_back(detail::classify_tail(std::move(est), bound, window));
        if (out.estimates.back().verdict == RayVerdict::Finite)
            max_level = std::max(max_level, static_cast<int>(out.estimates.back().bound));
    }
    for (int m = 1; m <= max_level; ++m) {
        std::vector<int> members;
        for (int i = 0; i < static_cast<int>(out.estimates.size()); ++i)
            if (out.estimates[i].verdict == RayVerdict::Finite && out.estimates[i].bound <= m)
                members.push_back(i);
        out.levels.emplace_back(m, std::move(members));
    }
    return out;
}

}  // namespace dmet
