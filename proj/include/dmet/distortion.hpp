#pragma once

#include <algorithm>
#include <mutex>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "dmet/config.hpp"
#include "dmet/parallel.hpp"
#include "dmet/scale_family.hpp"

namespace dmet {

// phi_R(t) = sup { d'(p,q) : d(p,q) <= t } over all pairs of the doubled
// space present at scale R. Computing it in both directions at growing scales
// is our finite proxy for the monotone homeomorphism witnessing coarse
// equivalence.
struct DistortionProfile {
    struct Witness {
        int p = -1, q = -1;      // doubled-space indices (q >= n means primed copy)
        double d = 0.0;          // value in the reference metric
        double dprime = 0.0;     // value attained in the compared metric
    };

    std::vector<double> thresholds;
    std::vector<std::vector<double>> values;      // [stage][threshold]
    std::vector<std::vector<Witness>> witnesses;  // parallel to values

    double at(int stage, int threshold) const { return values[stage][threshold]; }
    const std::vector<double>& envelope() const { return values.back(); }
};

namespace detail {

inline double doubled_value(const ScaleStage& st, int p, int q) {
    const int n = st.space().size();
    const bool pp = p >= n, qp = q >= n;
    const int i = pp ? p - n : p;
    const int j = qp ? q - n : q;
    if (pp == qp) return st.space().d(i, j);
    return pp ? st.cross.cross(j, i) : st.cross.cross(i, j);
}

}  // namespace detail

// Exhaustive pair scan per stage; rows are partitioned across threads and
// merged by max with deterministic tie-breaking.
inline DistortionProfile distortion_profile(const ScaleFamily& ref, const ScaleFamily& other,
                                            std::vector<double> thresholds) {
    if (!same_skeleton(ref, other))
        throw std::invalid_argument("distortion_profile: families live on different skeletons");
    if (thresholds.empty() || !std::is_sorted(thresholds.begin(), thresholds.end()))
        throw std::invalid_argument("distortion_profile: thresholds must be sorted and non-empty");

    DistortionProfile prof;
    prof.thresholds = thresholds;
    const int tk = static_cast<int>(thresholds.size());

    for (int s = 0; s < ref.stage_count(); ++s) {
        const auto& rs = ref.stages[s];
        const auto& os = other.stages[s];
        const int m = 2 * rs.space().size();

        std::vector<double> best(tk, 0.0);
        std::vector<DistortionProfile::Witness> wit(tk);
        std::mutex merge_mu;

        detail::parallel_chunks(m, [&](int lo, int hi) {
            std::vector<double> lbest(tk, 0.0);
            std::vector<DistortionProfile::Witness> lwit(tk);
            for (int p = lo; p < hi; ++p)
                for (int q = p + 1; q < m; ++q) {
                    double d = detail::doubled_value(rs, p, q);
                    double e = detail::doubled_value(os, p, q);
                    auto it = std::lower_bound(thresholds.begin(), thresholds.end(), d);
                    int k = static_cast<int>(it - thresholds.begin());
                    if (k >= tk) continue;
                    if (e > lbest[k] ||
                        (e == lbest[k] && (lwit[k].p < 0 || std::pair(p, q) <
                                                                std::pair(lwit[k].p, lwit[k].q)))) {
                        lbest[k] = e;
                        lwit[k] = {p, q, d, e};
                    }
                }
            std::lock_guard<std::mutex> lock(merge_mu);
            for (int k = 0; k < tk; ++k)
                if (lbest[k] > best[k] ||
                    (lbest[k] == best[k] && lwit[k].p >= 0 &&
                     (wit[k].p < 0 || std::pair(lwit[k].p, lwit[k].q) <
                                          std::pair(wit[k].p, wit[k].q)))) {
                    best[k] = lbest[k];
                    wit[k] = lwit[k];
                }
        });

        // sup over d <= t_k includes every smaller threshold bucket
        for (int k = 1; k < tk; ++k)
            if (best[k - 1] > best[k] || (best[k - 1] == best[k] && wit[k].p < 0)) {
                best[k] = best[k - 1];
                wit[k] = wit[k - 1];
            }
        prof.values.push_back(std::move(best));
        prof.witnesses.push_back(std::move(wit));
    }
    return prof;
}

enum class EquivalenceStatus { EquivalentAtScale, Divergent, Inconclusive };

inline const char* to_string(EquivalenceStatus s) {
    switch (s) {
        case EquivalenceStatus::EquivalentAtScale: return "EQUIVALENT_AT_SCALE";
        case EquivalenceStatus::Divergent: return "DIVERGENT";
        case EquivalenceStatus::Inconclusive: return "INCONCLUSIVE";
    }
    return "?";
}

struct EquivalenceVerdict {
    EquivalenceStatus status = EquivalenceStatus::Inconclusive;
    DistortionProfile forward;    // ref = first family
    DistortionProfile backward;   // ref = second family
    std::optional<int> stabilization_stage;
    std::string note;
};

namespace detail {

inline std::optional<int> stabilization_stage(const DistortionProfile& a,
                                              const DistortionProfile& b) {
    const int t = static_cast<int>(a.values.size());
    int s = t - 1;
    while (s > 0 && a.values[s - 1] == a.values.back() && b.values[s - 1] == b.values.back()) --s;
    if (s == t - 1) return std::nullopt;  // never repeated
    return s;
}

}  // namespace detail

// Three-valued desk-scale verdict; finitely many stages can only ever
// suggest equivalence, not settle it. Divergence wins over stability since
// a blown-up profile can be perfectly stable.
inline EquivalenceVerdict coarse_equivalent(const ScaleFamily& a, const ScaleFamily& b,
                                            std::vector<double> thresholds,
                                            const AnalysisConfig& config = {}) {
    EquivalenceVerdict v;
    v.forward = distortion_profile(a, b, thresholds);
    v.backward = distortion_profile(b, a, thresholds);
    v.stabilization_stage = detail::stabilization_stage(v.forward, v.backward);

    double bound = config.divergence_bound;
    if (bound <= 0.0) {
        // auto: 10x the largest value seen at the top threshold
        double top = 1.0;
        for (const auto& row : v.forward.values) top = std::max(top, row.back());
        for (const auto& row : v.backward.values) top = std::max(top, row.back());
        bound = 10.0 * top + 10.0;
        v.note = "auto divergence bound " + std::to_string(bound);
    }

    for (const DistortionProfile* p : {&v.forward, &v.backward})
        for (size_t s = 0; s < p->values.size(); ++s)
            if (p->values[s].front() > bound) {
                v.status = EquivalenceStatus::Divergent;
                const auto& w = p->witnesses[s].front();
                v.note = "phi(" + std::to_string(p->thresholds.front()) + ") = " +
                         std::to_string(p->values[s].front()) + " at stage " + std::to_string(s) +
                         ", witness pair (" + std::to_string(w.p) + "," + std::to_string(w.q) + ")";
                return v;
            }

    const int t = a.stage_count();
    if (t < 3) {
        v.status = EquivalenceStatus::Inconclusive;
        v.note = "fewer than 3 stages";
        return v;
    }

    int window = std::max(2, config.stabilization_window);
    bool stable = v.stabilization_stage && *v.stabilization_stage <= t - window;
    v.status = stable ? EquivalenceStatus::EquivalentAtScale : EquivalenceStatus::Inconclusive;
    if (!stable) v.note = "profiles still changing at the last stage";
    return v;
}

}  // namespace dmet
