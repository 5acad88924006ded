#pragma once

// Reference baselines for the fixed-angle and annealing searches on planted
// match-count objectives: first-local-maximum iteration counts p with their
// success probabilities (k = 1, 2, 3), and the minimal step counts T needed
// to push the k = 3 annealing success past 0.99, for n = 10..20. Comparison
// tolerances live with the comparison code, not here.

#include <array>

namespace klqs::baselines {

inline constexpr int version = 1;

inline constexpr std::array<int, 11> n_values = {10, 11, 12, 13, 14, 15, 16, 17, 18, 19, 20};

// Indexed [k-1][n - 10].
inline constexpr std::array<std::array<int, 11>, 3> first_max_p = {{
    {7, 7, 8, 9, 9, 10, 11, 12, 12, 13, 14},
    {5, 6, 6, 7, 7, 8, 9, 9, 10, 10, 11},
    {5, 6, 7, 7, 8, 8, 9, 10, 10, 11, 11},
}};

inline constexpr std::array<std::array<double, 11>, 3> first_max_prob = {{
    {0.958, 0.981, 1.000, 0.983, 0.971, 0.998, 0.995, 0.968, 0.992, 1.000, 0.985},
    {0.987, 0.982, 0.977, 0.993, 0.964, 0.996, 0.965, 0.994, 0.981, 0.988, 0.991},
    {0.921, 0.958, 0.948, 0.955, 0.962, 0.944, 0.966, 0.958, 0.962, 0.967, 0.952},
}};

// Minimal annealing steps reaching success probability 0.99 at k = 3, and the
// probability attained there. Indexed [n - 10].
inline constexpr std::array<int, 11> threshold_steps_k3 = {98,  116, 129, 143, 163, 178,
                                                           201, 217, 232, 259, 276};

inline constexpr std::array<double, 11> threshold_prob_k3 = {
    0.9908, 0.9904, 0.9906, 0.9902, 0.9900, 0.9904, 0.9900, 0.9904, 0.9900, 0.9901, 0.9904};

} // namespace klqs::baselines
