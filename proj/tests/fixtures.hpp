#pragma once

// Named fixtures used by both the unit suites and the acceptance runner.

#include <cmath>
#include <vector>

#include "dmet/scale_family.hpp"

namespace dmet::testing {

// Sparse truncations of the half-line holding 0 and all powers of 2 and 3 up
// to 3^max_exp3, glued along the two power sets. The stage at scale 3^k sees
// exactly the points below that bound.
struct PowerGluings {
    SpacePtr space;                     // final-stage universe
    SubsetSpec powers_of_2, powers_of_3;
    ScaleFamily fam2, fam3;             // doubles glued along each power set
    int witness_index = -1;             // index of 3^max_exp3 in the universe
};

inline PowerGluings make_power_gluings(int max_exp3 = 9, std::vector<int> stage_exps = {5, 6, 7, 8, 9}) {
    const double bound = std::pow(3.0, max_exp3);
    std::vector<double> coords{0.0};
    for (double p = 2.0; p <= bound; p *= 2.0) coords.push_back(p);
    for (double p = 3.0; p <= bound; p *= 3.0) coords.push_back(p);
    std::sort(coords.begin(), coords.end());

    PowerGluings fx;
    fx.space = make_sampled_line_space(coords, 0);
    const int n = fx.space->size();
    for (int i = 0; i < n; ++i) {
        double c = coords[i];
        if (c == 0.0) continue;
        double l2 = std::log2(c);
        double l3 = std::log(c) / std::log(3.0);
        if (std::abs(l2 - std::round(l2)) < 1e-9) fx.powers_of_2.indices.push_back(i);
        else if (std::abs(l3 - std::round(l3)) < 1e-9) fx.powers_of_3.indices.push_back(i);
        if (c == bound) fx.witness_index = i;
    }

    auto rho2 = subset_metric(fx.space, fx.powers_of_2);
    auto rho3 = subset_metric(fx.space, fx.powers_of_3);

    std::vector<std::vector<int>> stage_sets;
    std::vector<double> scales;
    for (int e : stage_exps) {
        double s = std::pow(3.0, e);
        std::vector<int> idx;
        for (int i = 0; i < n; ++i)
            if (coords[i] <= s) idx.push_back(i);
        stage_sets.push_back(std::move(idx));
        scales.push_back(s);
    }
    fx.fam2 = truncate_family(rho2, stage_sets, scales);
    fx.fam3 = truncate_family(rho3, stage_sets, scales);
    return fx;
}

// Integer line truncations glued along two sets a bounded Hausdorff distance
// apart: multiples of 10 and odd multiples of 5.
struct OffsetGluings {
    ScaleFamily fam_a, fam_b;
    double hausdorff = 5.0;
};

inline OffsetGluings make_offset_gluings(std::vector<int> stage_lengths = {60, 120, 180, 240}) {
    const int n = stage_lengths.back() + 1;
    auto space = make_line_space(n);
    SubsetSpec a, b;
    for (int i = 0; i < n; i += 10) a.indices.push_back(i);
    for (int i = 5; i < n; i += 10) b.indices.push_back(i);

    auto rho_a = subset_metric(space, a);
    auto rho_b = subset_metric(space, b);

    std::vector<std::vector<int>> stage_sets;
    std::vector<double> scales;
    for (int len : stage_lengths) {
        std::vector<int> idx(len + 1);
        for (int i = 0; i <= len; ++i) idx[i] = i;
        stage_sets.push_back(std::move(idx));
        scales.push_back(len);
    }
    OffsetGluings fx;
    fx.fam_a = truncate_family(rho_a, stage_sets, scales);
    fx.fam_b = truncate_family(rho_b, stage_sets, scales);
    return fx;
}

}  // namespace dmet::testing
