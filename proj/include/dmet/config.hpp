#pragma once

namespace dmet {

// Knobs shared by the scale-dependent analyses. Defaults are the documented
// conventions; CLI flags and config files override.
struct AnalysisConfig {
    // Tail sup above this value marks a ray or profile as divergent.
    // <= 0 means auto: 10x the largest finite bound seen in the same run.
    double divergence_bound = 0.0;

    // Number of trailing stages that must agree for a profile to count as
    // stabilized.
    int stabilization_window = 2;

    // Fraction of the stage radius that starts the tail window [f*R, R].
    double tail_window_fraction = 0.5;

    // Euclidean direction snapping and orthogonal-fit acceptance.
    double snap_tolerance = 1e-9;
    double angular_tolerance = 1e-2;

    // Length of the basepoint gluing edge used when a boundary map has an
    // empty domain (and always present as the stratum-0 term).
    double glue_length = 1.0;
};

}  // namespace dmet
