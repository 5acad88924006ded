#pragma once

// Exact combinatorics behind the k-local search objective: cached binomial
// coefficients, match counts, the objective value f_k(d) = C_d^k / C_n^k, and
// the mean/variance of the per-clause satisfaction indicator.

#include <array>
#include <bit>
#include <cstdint>
#include <stdexcept>

namespace klqs {

inline constexpr int max_binom_n = 64;

namespace detail {

constexpr auto build_pascal_table()
{
    std::array<std::array<std::uint64_t, max_binom_n + 1>, max_binom_n + 1> t{};
    for (int a = 0; a <= max_binom_n; ++a) {
        t[a][0] = 1;
        for (int b = 1; b <= a; ++b)
            t[a][b] = t[a - 1][b - 1] + t[a - 1][b];  // t[a-1][a] is value-initialized to 0
    }
    return t;
}

inline constexpr auto pascal_table = build_pascal_table();

} // namespace detail

// C(a, b) as an exact integer, with the total-function convention
// C(a, b) = 0 whenever b > a (used implicitly by f_k for d < k).
// Every value with a <= 64 fits in 64 bits.
constexpr std::uint64_t binom(int a, int b)
{
    if (a < 0 || b < 0 || a > max_binom_n)
        throw std::domain_error("binom: arguments out of range");
    if (b > a)
        return 0;
    return detail::pascal_table[a][b];
}

// Number of variables (low n bits) on which assignments x and t agree.
constexpr int matches(std::uint64_t x, std::uint64_t t, int n)
{
    if (n < 1 || n > max_binom_n)
        throw std::domain_error("matches: invalid n");
    const std::uint64_t mask = n == 64 ? ~0ULL : (1ULL << n) - 1;
    return n - std::popcount((x ^ t) & mask);
}

// f_k(d) = C_d^k / C_n^k: the fraction of k-variable subsets on which an
// assignment with d matching bits agrees with the target on every variable.
// Exact integer ratio converted to double at the end, so the value is
// bit-for-bit reproducible.
inline double objective_fk(int n, int k, int d)
{
    if (k < 1 || k > n || d < 0 || d > n)
        throw std::domain_error("objective_fk: invalid arguments");
    return static_cast<double>(binom(d, k)) / static_cast<double>(binom(n, k));
}

struct ClauseStats {
    double mu;      // mean of the satisfaction indicator for a clause uniform over S_t
    double sigma2;  // its variance
};

// Clauses satisfied by the target t number (2^k - 1)·C_n^k in total (every
// k-variable subset, every sign pattern except the unique violating one).
inline std::uint64_t total_clause_count(int n, int k)
{
    if (k < 1 || k > n || k > 62)
        throw std::domain_error("total_clause_count: invalid arguments");
    const unsigned __int128 total = (unsigned __int128)((1ULL << k) - 1) * binom(n, k);
    if (total > (unsigned __int128)UINT64_MAX)
        throw std::overflow_error("total_clause_count: result exceeds 64 bits");
    return static_cast<std::uint64_t>(total);
}

// Of those, an assignment with d matching bits satisfies
// (2^k - 2)·C_n^k + C_d^k.
inline std::uint64_t satisfied_clause_count(int n, int k, int d)
{
    if (k < 1 || k > n || d < 0 || d > n || k > 62)
        throw std::domain_error("satisfied_clause_count: invalid arguments");
    const unsigned __int128 total =
        (unsigned __int128)((1ULL << k) - 2) * binom(n, k) + binom(d, k);
    if (total > (unsigned __int128)UINT64_MAX)
        throw std::overflow_error("satisfied_clause_count: result exceeds 64 bits");
    return static_cast<std::uint64_t>(total);
}

// Mean and variance of the indicator that a clause drawn uniformly from S_t
// is satisfied by an assignment with d matching bits:
//   mu     = (2^k - 2)/(2^k - 1) + C_d^k / ((2^k - 1)·C_n^k)
//   sigma2 = (1 - mu)²·mu + mu²·(C_n^k - C_d^k)/((2^k - 1)·C_n^k)
// (algebraically sigma2 = mu·(1 - mu), as befits an indicator).
inline ClauseStats clause_stats(int n, int k, int d)
{
    if (k < 1 || k > n || d < 0 || d > n || k > 62)
        throw std::domain_error("clause_stats: invalid arguments");
    const double cn = static_cast<double>(binom(n, k));
    const double cd = static_cast<double>(binom(d, k));
    const double r = static_cast<double>((1ULL << k) - 1);
    const double q = static_cast<double>((1ULL << k) - 2);
    const double mu = q / r + cd / (r * cn);
    const double sigma2 = (1 - mu) * (1 - mu) * mu + mu * mu * (cn - cd) / (r * cn);
    return {mu, sigma2};
}

} // namespace klqs
