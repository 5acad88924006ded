#pragma once

// Statevector engine for k-local quantum search:
//   - in-place fast Walsh–Hadamard transform (the exact H^{⊗n}),
//   - diagonal phase evolution e^{-iθH},
//   - the search iteration  FWHT · e^{-iθH_{k,0}} · FWHT · e^{-iθH_cost},
//   - the Trotterized annealing schedule with linearly ramped angles,
//   - first-local-maximum and threshold-crossing searches over the iteration
//     count, success probabilities, and measurement sampling.
//
// The mixer exponential is always applied exactly through FWHT conjugation —
// no per-iteration Trotter error — and the mixer diagonal is built internally
// from (n, k) so a caller cannot pair a cost with the wrong mixer.

#include "hamiltonian.hpp"
#include "rng.hpp"

#include <complex>
#include <map>
#include <numbers>
#include <vector>

namespace klqs {

struct Statevector {
    int n = 0;
    std::vector<std::complex<double>> amp;  // length 2^n; Σ|amp|² = 1 ± 1e-9, asserted
};

inline Statevector plus_state(int n)
{
    if (n < 1 || n > max_qubits)
        throw std::domain_error("plus_state: n out of range");
    const std::size_t size = 1ULL << n;
    const double a = 1.0 / std::sqrt(static_cast<double>(size));
    return {n, std::vector<std::complex<double>>(size, {a, 0.0})};
}

namespace detail {

// Unnormalized in-place butterfly, staged for sequential memory access.
template <typename T>
void fwht_butterfly(std::vector<T>& a)
{
    const std::size_t size = a.size();
    for (std::size_t h = 1; h < size; h <<= 1)
        for (std::size_t base = 0; base < size; base += h << 1)
            for (std::size_t j = base; j < base + h; ++j) {
                const T u = a[j], v = a[j + h];
                a[j] = u + v;
                a[j + h] = u - v;
            }
}

} // namespace detail

// Unitary H^{⊗n}: self-inverse, 1/√(2^n) scaling.
inline void fwht(Statevector& psi)
{
    detail::fwht_butterfly(psi.amp);
    const double scale = 1.0 / std::sqrt(static_cast<double>(psi.amp.size()));
    for (auto& a : psi.amp)
        a *= scale;
}

inline double norm2(const Statevector& psi)
{
    double s = 0;
    for (const auto& a : psi.amp)
        s += std::norm(a);
    return s;
}

// Unit norm is an invariant of every evolution here; drift beyond 1e-9 means
// a genuine bug and fails loudly rather than being renormalized away.
inline void check_norm(const Statevector& psi, double tol = 1e-9)
{
    if (std::abs(norm2(psi) - 1.0) >= tol)
        throw std::runtime_error("statevector norm invariant violated");
}

// amp[x] *= e^{-iθ·H[x]}.
inline void apply_diag_phase(Statevector& psi, const DiagonalHamiltonian& h, double theta)
{
    if (psi.n != h.n || psi.amp.size() != h.values.size())
        throw std::invalid_argument("apply_diag_phase: dimension mismatch");
    for (std::size_t x = 0; x < psi.amp.size(); ++x)
        psi.amp[x] *= std::polar(1.0, -theta * h.values[x]);
}

// One search iteration: phase under the cost, then the mixer exponential via
// Walsh–Hadamard conjugation of the target-0 diagonal.
inline void qs_iterate(Statevector& psi, const DiagonalHamiltonian& cost,
                       const DiagonalHamiltonian& mix0, double theta)
{
    apply_diag_phase(psi, cost, theta);
    fwht(psi);
    apply_diag_phase(psi, mix0, theta);
    fwht(psi);
}

struct SearchParams {
    double theta = std::numbers::pi;  // phase angle in (0, π]
    int p = 0;                        // iteration count
};

struct AdiabaticParams {
    int p = 1;  // step count; plays the role of the evolution time
};

// Two readings of the linear-ramp annealing schedule, differing in step angle
// and endpoint offset. Write s_l = l/(p+1); step l applies the cost phase
// with angle a_l, then the conjugated mixer phase with angle b_l:
//   full_turn:  a_l = 2π·s_l,        b_l = 2π·(1 - s_l)      — the coefficient
//               pair is complementary and scales full turns; this is the
//               convention that reproduces the published iteration baselines.
//   half_turn:  a_l = π·s_l,         b_l = π·(p-l)/(p+1)     — half-turn scale
//               with the mixer coefficient hitting 0 at the last step.
// run_table2 reports which convention its diffs used; see README.
enum class AqsSchedule { full_turn, half_turn };

namespace detail {

struct RampAngles {
    double a0, da;  // cost angle at l = a0 + l·da
    double b0, db;  // mixer angle at l = b0 + l·db
};

inline RampAngles ramp_angles(AqsSchedule schedule, int p)
{
    constexpr double pi = std::numbers::pi;
    const double step = 1.0 / (p + 1);
    if (schedule == AqsSchedule::full_turn)
        return {0.0, 2 * pi * step, 2 * pi, -2 * pi * step};
    return {0.0, pi * step, pi * static_cast<double>(p) * step, -pi * step};
}

} // namespace detail

// Trotterized annealing evolution from |+...+⟩. The per-step phase tables
// advance by a constant factor (the angles ramp linearly in l), so each step
// costs two elementwise multiplies and two FWHTs — no exp re-evaluation.
inline Statevector run_aqs_state(int n, int k, const DiagonalHamiltonian& cost,
                                 AdiabaticParams params,
                                 AqsSchedule schedule = AqsSchedule::full_turn)
{
    if (params.p < 1)
        throw std::invalid_argument("run_aqs_state: p must be >= 1");
    if (cost.n != n)
        throw std::invalid_argument("run_aqs_state: cost dimension mismatch");
    const DiagonalHamiltonian mix0 = build_Hk(n, k, 0);
    const auto [a0, da, b0, db] = detail::ramp_angles(schedule, params.p);
    const std::size_t size = 1ULL << n;
    std::vector<std::complex<double>> cost_acc(size), cost_step(size), mix_acc(size), mix_step(size);
    for (std::size_t x = 0; x < size; ++x) {
        cost_acc[x] = std::polar(1.0, -a0 * cost.values[x]);
        cost_step[x] = std::polar(1.0, -da * cost.values[x]);
        mix_acc[x] = std::polar(1.0, -b0 * mix0.values[x]);
        mix_step[x] = std::polar(1.0, -db * mix0.values[x]);
    }
    Statevector psi = plus_state(n);
    for (int l = 1; l <= params.p; ++l) {
        for (std::size_t x = 0; x < size; ++x)
            psi.amp[x] *= (cost_acc[x] *= cost_step[x]);
        fwht(psi);
        for (std::size_t x = 0; x < size; ++x)
            psi.amp[x] *= (mix_acc[x] *= mix_step[x]);
        fwht(psi);
    }
    check_norm(psi);
    return psi;
}

// Final success probability |⟨t|ψ⟩|² of the annealing circuit.
inline double run_aqs(int n, int k, const DiagonalHamiltonian& cost, AdiabaticParams params,
                      std::uint64_t t, AqsSchedule schedule = AqsSchedule::full_turn)
{
    const Statevector psi = run_aqs_state(n, k, cost, params, schedule);
    return std::norm(psi.amp[t]);
}

namespace detail {

inline void validate_search_params(const SearchParams& params)
{
    if (!(params.theta > 0.0) || params.theta > std::numbers::pi || params.p < 0)
        throw std::invalid_argument("search params: theta must lie in (0, pi], p >= 0");
}

} // namespace detail

// Fixed-angle search evolution, returning the final state after p iterations.
inline Statevector run_qs_state(int n, int k, const DiagonalHamiltonian& cost,
                                SearchParams params)
{
    detail::validate_search_params(params);
    if (cost.n != n)
        throw std::invalid_argument("run_qs_state: cost dimension mismatch");
    const DiagonalHamiltonian mix0 = build_Hk(n, k, 0);
    Statevector psi = plus_state(n);
    for (int i = 0; i < params.p; ++i)
        qs_iterate(psi, cost, mix0, params.theta);
    check_norm(psi);
    return psi;
}

// Success-probability trajectory: p_t after 0, 1, ..., p iterations.
inline std::vector<double> run_qs(int n, int k, const DiagonalHamiltonian& cost,
                                  SearchParams params, std::uint64_t t)
{
    detail::validate_search_params(params);
    if (cost.n != n)
        throw std::invalid_argument("run_qs: cost dimension mismatch");
    const DiagonalHamiltonian mix0 = build_Hk(n, k, 0);
    Statevector psi = plus_state(n);
    std::vector<double> traj;
    traj.reserve(params.p + 1);
    traj.push_back(std::norm(psi.amp[t]));
    for (int i = 0; i < params.p; ++i) {
        qs_iterate(psi, cost, mix0, params.theta);
        traj.push_back(std::norm(psi.amp[t]));
    }
    check_norm(psi);
    return traj;
}

struct IterationResult {
    int p = 0;
    double prob = 0;
};

// Smallest p >= 1 with traj[p] >= traj[p-1] and traj[p] > traj[p+1] (strict
// decrease after; a trajectory that only plateaus up to the cap is reported
// as non-convergence rather than silently picking a plateau point).
inline IterationResult find_first_local_max(int n, int k, const DiagonalHamiltonian& cost,
                                            double theta, std::uint64_t t, int cap = 0)
{
    if (cap <= 0)
        cap = 16 * n;
    detail::validate_search_params({theta, 0});
    const DiagonalHamiltonian mix0 = build_Hk(n, k, 0);
    Statevector psi = plus_state(n);
    double prev2 = 0, prev1 = std::norm(psi.amp[t]);
    for (int i = 1; i <= cap; ++i) {
        qs_iterate(psi, cost, mix0, theta);
        const double cur = std::norm(psi.amp[t]);
        if (i >= 2 && prev1 >= prev2 && prev1 > cur) {
            check_norm(psi);
            return {i - 1, prev1};
        }
        prev2 = prev1;
        prev1 = cur;
    }
    throw std::runtime_error("find_first_local_max: no local maximum within iteration cap");
}

// Minimal p with run_aqs(p) >= threshold: doubling to bracket the crossing,
// bisection inside the bracket, then a downward scan to pin the exact minimum
// against small non-monotone wiggles near the crossing.
inline IterationResult find_min_threshold_steps(int n, int k, const DiagonalHamiltonian& cost,
                                                double threshold, std::uint64_t t,
                                                AqsSchedule schedule = AqsSchedule::full_turn,
                                                int cap = 0)
{
    if (!(threshold > 0.0) || !(threshold < 1.0))
        throw std::invalid_argument("find_min_threshold_steps: threshold must be in (0,1)");
    if (cap <= 0)
        cap = 64 * n * n;  // the published crossings stay below n², with headroom
    std::map<int, double> evaluated;
    const auto probe = [&](int p) {
        auto it = evaluated.find(p);
        if (it == evaluated.end())
            it = evaluated.emplace(p, run_aqs(n, k, cost, {p}, t, schedule)).first;
        return it->second;
    };
    int lo = 0, hi = 1;
    while (probe(hi) < threshold) {
        lo = hi;
        hi *= 2;
        if (hi > cap)
            throw std::runtime_error("find_min_threshold_steps: cap exceeded");
    }
    while (hi - lo > 1) {
        const int mid = lo + (hi - lo) / 2;
        (probe(mid) >= threshold ? hi : lo) = mid;
    }
    while (hi > 1 && probe(hi - 1) >= threshold)
        --hi;
    return {hi, probe(hi)};
}

// Projective measurement in the computational basis.
inline std::uint64_t sample_measurement(const Statevector& psi, SplitRng& rng)
{
    check_norm(psi);
    const double u = rng.uniform01();
    double acc = 0;
    for (std::size_t x = 0; x < psi.amp.size(); ++x) {
        acc += std::norm(psi.amp[x]);
        if (acc > u)
            return x;
    }
    return psi.amp.size() - 1;  // u landed in the rounding slack at the top
}

// Total probability mass on the surviving assignments: the success measure
// for instances without a unique planted target.
inline double survivor_mass(const Statevector& psi, const SurvivorSet& survivors)
{
    if (psi.n != survivors.n())
        throw std::invalid_argument("survivor_mass: dimension mismatch");
    double mass = 0;
    for (std::size_t x = 0; x < psi.amp.size(); ++x)
        if (survivors.test(x))
            mass += std::norm(psi.amp[x]);
    return mass;
}

} // namespace klqs
