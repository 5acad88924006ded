// Matrix-free top-two eigensolver, gap scans and scaling fits, and the two
// dense operator identities (mixing-path exchange, 1-local factorization).
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <numbers>
#include <vector>

#include "klqs/spectral.hpp"
#include "oracles.hpp"

using namespace klqs;

namespace {

constexpr double pi = std::numbers::pi;

DiagonalHamiltonian planted_cost(int n, int m, int k, std::uint64_t seed) {
    const Instance inst = generate_Ff(n, m, k, seed, 0);
    return normalize_HC(build_HC(inst), m, k);
}

}  // namespace

TEST_CASE("top_two_eigen: diagonal-only operator returns the two largest entries") {
    DiagonalHamiltonian d{3, {0.11, 0.92, 0.35, 0.64, 0.27, 0.80, 0.05, 0.49}};
    const OperatorHandle op{3, d, {}, 1.0, 0.0};
    const SpectrumResult r = top_two_eigen(op);
    CHECK(r.lambda1 == doctest::Approx(0.92).epsilon(1e-10));
    CHECK(r.lambda2 == doctest::Approx(0.80).epsilon(1e-10));
    CHECK(r.gap == doctest::Approx(0.12).epsilon(1e-9));
    CHECK_FALSE(r.degenerate);
    CHECK(r.residual < 1e-9);
    CHECK(r.iterations >= 1);
}

TEST_CASE("top_two_eigen: degenerate top pair is reported as gap 0") {
    DiagonalHamiltonian d{2, {1.0, 1.0, 0.5, 0.0}};
    const SpectrumResult r = top_two_eigen({2, d, {}, 1.0, 0.0});
    CHECK(r.degenerate);
    CHECK(r.gap == 0.0);
    CHECK(r.lambda1 == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(r.lambda2 == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("top_two_eigen: operator validation") {
    const DiagonalHamiltonian d = build_Hk(4, 2, 0);
    CHECK_THROWS_AS(top_two_eigen({4, d, d, 0.0, 0.0}), std::invalid_argument);
    CHECK_THROWS_AS(top_two_eigen({4, d, d, 1.0, 1.0}, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(top_two_eigen({5, d, {}, 1.0, 0.0}), std::invalid_argument);
}

TEST_CASE("top_two_eigen: matches dense eigensolve") {
    SUBCASE("pure-objective sum operator at n=6, k=3") {
        const DiagonalHamiltonian hk = build_Hk(6, 3, 0);
        const OperatorHandle op{6, hk, hk, 1.0, 1.0};
        const SpectrumResult fast = top_two_eigen(op);
        const oracle::DenseTopTwo dense = oracle::top_two_dense(op);
        CHECK(std::abs(fast.lambda1 - dense.lambda1) < 1e-9);
        CHECK(std::abs(fast.lambda2 - dense.lambda2) < 1e-9);
    }
    SUBCASE("planted-instance interpolations at n=6 and n=8") {
        for (int n : {6, 8}) {
            const DiagonalHamiltonian cost = planted_cost(n, 4 * n * n, 3, 100 + n);
            const DiagonalHamiltonian mix0 = build_Hk(n, 3, 0);
            for (double s : {0.3, 0.5, 0.9}) {
                const OperatorHandle op{n, cost, mix0, s, 1.0 - s};
                const SpectrumResult fast = top_two_eigen(op);
                const oracle::DenseTopTwo dense = oracle::top_two_dense(op);
                CHECK(std::abs(fast.lambda1 - dense.lambda1) < 1e-9);
                CHECK(std::abs(fast.lambda2 - dense.lambda2) < 1e-9);
            }
        }
    }
}

TEST_CASE("apply_operator: symmetric in the real inner product") {
    const int n = 8;
    const std::size_t size = 1ULL << n;
    const OperatorHandle op{n, planted_cost(n, 200, 3, 9), build_Hk(n, 3, 0), 0.4, 0.6};
    SplitRng rng(77);
    std::vector<double> u(size), v(size), au(size), av(size), scratch(size);
    for (int trial = 0; trial < 5; ++trial) {
        for (auto& x : u) x = rng.uniform01() - 0.5;
        for (auto& x : v) x = rng.uniform01() - 0.5;
        apply_operator(op, u, au, scratch);
        apply_operator(op, v, av, scratch);
        double uav = 0, vau = 0;
        for (std::size_t i = 0; i < size; ++i) {
            uav += u[i] * av[i];
            vau += v[i] * au[i];
        }
        CHECK(std::abs(uav - vau) < 1e-12 * size);
    }
}

TEST_CASE("gap_scan: endpoints carry the diagonal spectra, dip lands mid-schedule") {
    const int n = 12, k = 3;
    const DiagonalHamiltonian hk = build_Hk(n, k, 0);
    std::vector<double> grid(21);
    for (int i = 0; i < 21; ++i) grid[i] = i / 20.0;
    const GapScan scan = gap_scan(n, k, hk, grid);
    REQUIRE(scan.points.size() == 21);

    // s=0 is the conjugated mixing operator: same spectrum as the diagonal,
    // so its gap is the top f_k spacing 1 - f_k(n-1) = k/n; s=1 likewise.
    const double top_spacing = 1.0 - objective_fk(n, k, n - 1);
    CHECK(scan.points.front().gap == doctest::Approx(top_spacing).epsilon(1e-9));
    CHECK(scan.points.back().gap == doctest::Approx(top_spacing).epsilon(1e-9));
    CHECK(*scan.points.front().s == 0.0);
    CHECK(*scan.points.back().s == 1.0);

    const double s_min = *scan.points[scan.argmin].s;
    CHECK(s_min >= 0.4);
    CHECK(s_min <= 0.6);
    for (const SpectrumResult& r : scan.points) {
        CHECK(r.gap > 0.0);
        CHECK(r.lambda1 >= r.lambda2);
    }

    CHECK_THROWS_AS(gap_scan(n, k, hk, {}), std::invalid_argument);
    CHECK_THROWS_AS(gap_scan(n, k, hk, {0.5, 1.5}), std::domain_error);
}

TEST_CASE("width-tracking family: midpoint gap is exactly 2^{-n/2}") {
    double prev_gap = 0;
    for (int n : {6, 8, 10}) {
        const DiagonalHamiltonian hn = build_Hk(n, n, 0);
        const SpectrumResult mid = top_two_eigen({n, hn, hn, 0.5, 0.5});
        const double expect = std::pow(2.0, -0.5 * n);
        CHECK(mid.gap == doctest::Approx(expect).epsilon(1e-6));
        if (prev_gap > 0)  // two more qubits halve the gap
            CHECK(mid.gap / prev_gap == doctest::Approx(0.5).epsilon(1e-4));
        prev_gap = mid.gap;

        // the unit-weight sum form is exactly twice the midpoint operator
        const SpectrumResult sum = top_two_eigen({n, hn, hn, 1.0, 1.0});
        CHECK(sum.gap == doctest::Approx(2.0 * mid.gap).epsilon(1e-7));
    }
}

TEST_CASE("sum-form gap of the 1-local operator is sqrt(2)/n") {
    // H_mix + H_cost for k=1 is a sum of commuting per-qubit terms with
    // eigenvalue spacing sqrt(2)/n between the top two levels.
    for (int n : {6, 10, 14}) {
        const DiagonalHamiltonian h1 = build_Hk(n, 1, 0);
        const SpectrumResult r = top_two_eigen({n, h1, h1, 1.0, 1.0});
        CHECK(r.gap == doctest::Approx(std::numbers::sqrt2 / n).epsilon(1e-7));
    }
}

TEST_CASE("gap_scaling_fit: cubic locality scales like an inverse power of n") {
    const std::vector<int> sizes{8, 10, 12, 14};
    const GapScalingFit sum_fit = gap_scaling_fit(3, sizes, GapMode::sum);
    CHECK(sum_fit.points.size() == 4);
    CHECK(sum_fit.slope <= -0.7);
    CHECK(sum_fit.slope >= -1.3);
    for (const auto& [n, gap] : sum_fit.points) CHECK(gap > 0.0);

    // midpoint gaps are exactly half the sum gaps, so the slopes coincide
    const GapScalingFit mid_fit = gap_scaling_fit(3, sizes, GapMode::midpoint);
    CHECK(std::abs(mid_fit.slope - sum_fit.slope) < 1e-6);
    CHECK(mid_fit.intercept < sum_fit.intercept);

    CHECK_THROWS_AS(gap_scaling_fit(3, {8, 10, 12}, GapMode::sum), std::invalid_argument);
    CHECK_THROWS_AS(gap_scaling_fit(3, {8, 10, 12, 20}, GapMode::sum), std::domain_error);
}

TEST_CASE("gap_scaling_fit: width-tracking family rejects the power law") {
    // k = n at every point: gaps halve per two qubits, so log(gap) is linear
    // in n and visibly curved against log(n).
    const GapScalingFit fit = gap_scaling_fit(0, {6, 8, 10, 12}, GapMode::midpoint);
    for (const auto& [n, gap] : fit.points)
        CHECK(gap == doctest::Approx(std::pow(2.0, -0.5 * n)).epsilon(1e-6));
    CHECK(fit.sse > 1e-3);

    // least squares of log(gap) against n instead: essentially a perfect fit
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (const auto& [n, gap] : fit.points) {
        sx += n;
        sy += std::log(gap);
        sxx += double(n) * n;
        sxy += n * std::log(gap);
    }
    const double cnt = static_cast<double>(fit.points.size());
    const double slope = (cnt * sxy - sx * sy) / (cnt * sxx - sx * sx);
    const double intercept = (sy - slope * sx) / cnt;
    double sse_linear = 0;
    for (const auto& [n, gap] : fit.points) {
        const double e = std::log(gap) - (slope * n + intercept);
        sse_linear += e * e;
    }
    CHECK(sse_linear < 1e-9);
    CHECK(slope == doctest::Approx(-0.5 * std::log(2.0)).epsilon(1e-4));
}

TEST_CASE("perturbation monotonicity: denser instances perturb the midpoint gap less") {
    // The decrease through m = {n, n^2, n^3} is statistical: the sparse cell
    // has enormous variance, so it takes ~50 instances to resolve the first
    // step (measured means 0.0095 / 0.0087 / 0.0029). The solver tolerance is
    // relaxed to 1e-7 because sparse instances can leave the second and third
    // eigenvalues quasi-degenerate, which stalls tighter subspace iteration;
    // the deviations under study are ~1e-3, orders of magnitude above it.
    const int n = 10, k = 3, seeds = 50;
    const DiagonalHamiltonian mix0 = build_Hk(n, k, 0);
    const double gap_ref = top_two_eigen({n, build_Hk(n, k, 0), mix0, 0.5, 0.5}).gap;
    std::vector<double> mean_dev;
    for (int m : {10, 100, 1000}) {
        double acc = 0;
        for (int s = 0; s < seeds; ++s) {
            const DiagonalHamiltonian cost = planted_cost(n, m, k, 7000 + s);
            acc += std::abs(top_two_eigen({n, cost, mix0, 0.5, 0.5}, 1e-7).gap - gap_ref);
        }
        mean_dev.push_back(acc / seeds);
    }
    CHECK(mean_dev[1] < mean_dev[0]);
    CHECK(mean_dev[2] < mean_dev[1]);
    CHECK(mean_dev[2] < 0.5 * mean_dev[0]);  // the n^3 cell is far below the n cell
}

TEST_CASE("verify_exchange_lemma: dense mixing paths coincide") {
    CHECK(verify_exchange_lemma(4, 2) < 1e-12);
    CHECK(verify_exchange_lemma(6, 3) < 1e-12);
    CHECK(verify_exchange_lemma(3, 3) < 1e-14);  // single term, exact up to round-off
    CHECK_THROWS_AS(verify_exchange_lemma(9, 3), std::domain_error);
}

TEST_CASE("one-local factorization: rotation and step are unitary") {
    const Mat2 v = one_local_rotation();
    const Mat2 vt_v = mat2_mul(mat2_transpose(v), v);
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j)
            CHECK(std::abs(vt_v[i][j] - (i == j ? 1.0 : 0.0)) < 1e-15);

    const Mat2 u = one_local_step(8);
    Mat2 u_dag{};
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) u_dag[i][j] = std::conj(u[j][i]);
    const Mat2 uu = mat2_mul(u, u_dag);
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j)
            CHECK(std::abs(uu[i][j] - (i == j ? 1.0 : 0.0)) < 1e-14);

    CHECK(tensor_max_entry_diff(u, u, 6) == 0.0);
}

TEST_CASE("one-local factorization: residual falls off quadratically in n") {
    double prev = 1e9;
    for (int n : {2, 4, 6, 8, 10, 12}) {
        const OneLocalReport rep = verify_1local_decomposition(n);
        CHECK(rep.residual < prev);
        prev = rep.residual;
    }
    const double r4 = verify_1local_decomposition(4).residual;
    const double r8 = verify_1local_decomposition(8).residual;
    CHECK(r8 / r4 <= 0.5);
    CHECK(r8 / r4 >= 0.1);
    CHECK_THROWS_AS(verify_1local_decomposition(0), std::domain_error);
    CHECK_THROWS_AS(verify_1local_decomposition(13), std::domain_error);
}

TEST_CASE("one-local tensor power equals the simulator step up to conjugate evolution") {
    // The search step applies e^{-i pi H}; the per-qubit factorization is
    // stated for e^{+i pi Z/2n} phases, so the tensor power reproduces the
    // conjugate evolution, and the per-qubit offset phases contribute the
    // global factor e^{-i pi} = -1: U^{(n)} = -conj(composite).
    const int n = 4;
    const Eigen::MatrixXcd composite =
        oracle::qs_step_matrix(n, 1, build_Hk(n, 1, 0), pi);
    const Eigen::MatrixXcd tensor = oracle::tensor_pow(one_local_step(n), n);
    double worst = 0;
    for (Eigen::Index r = 0; r < composite.rows(); ++r)
        for (Eigen::Index c = 0; c < composite.cols(); ++c)
            worst = std::max(worst, std::abs(tensor(r, c) + std::conj(composite(r, c))));
    CHECK(worst < 1e-12);
}
