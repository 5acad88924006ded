#pragma once

// Diagonal Hamiltonians as eigenvalue arrays indexed by assignment:
//   H_C        satisfied-clause counts of an instance,
//   H̄_C        its affine normalization (2^k-1)·H_C/m - (2^k-2),
//   H_k        the k-local objective f_k around a target t,
//   H_{k,0}    the same with t = 0 (the canonical mixer diagonal).
// Also: deviation statistics H̄_C - H_k, small-n dense mixers built two ways
// for the conjugation-identity check, a gate-count model, and a binary dump
// format for experiment caching.
//
// Sign convention: H_C counts satisfied clauses, so interpretations carry the
// highest eigenvalue and every solver maximizes; no minus signs are kept.

#include "combinatorics.hpp"
#include "instances.hpp"

#include <cmath>
#include <cstring>
#include <fstream>
#include <string>
#include <vector>

namespace klqs {

inline constexpr int max_qubits = 26;

struct DiagonalHamiltonian {
    int n = 0;
    std::vector<double> values;  // length 2^n, indexed by assignment x
};

// values[x] = number of clauses satisfied by x. Accumulated clause-by-clause
// over each clause's violating subcube: O(m·2^{n-k}) instead of O(m·2^n).
inline DiagonalHamiltonian build_HC(const Instance& inst)
{
    if (inst.n < 1 || inst.n > max_qubits)
        throw std::domain_error("build_HC: n out of range");
    const std::size_t size = 1ULL << inst.n;
    std::vector<std::uint32_t> violations(size, 0);
    for (const Clause& c : inst.clauses)
        detail::for_each_violator(c, inst.n, [&](std::uint64_t x) { ++violations[x]; });
    DiagonalHamiltonian h{inst.n, std::vector<double>(size)};
    const double m = inst.m();
    for (std::size_t x = 0; x < size; ++x)
        h.values[x] = m - violations[x];
    return h;
}

// H̄_C = (2^k - 1)·H_C/m - (2^k - 2). Counts are exact integers in double,
// so an interpretation's value lands on exactly 1.
inline DiagonalHamiltonian normalize_HC(const DiagonalHamiltonian& h, int m, int k)
{
    if (m < 1)
        throw std::domain_error("normalize_HC: m must be positive");
    if (k < 1 || k > 62)
        throw std::domain_error("normalize_HC: invalid k");
    const double scale = static_cast<double>((1ULL << k) - 1);
    const double offset = static_cast<double>((1ULL << k) - 2);
    DiagonalHamiltonian out{h.n, std::vector<double>(h.values.size())};
    for (std::size_t x = 0; x < h.values.size(); ++x)
        out.values[x] = scale * h.values[x] / m - offset;
    return out;
}

// values[x] = f_k(matches(x, t)).
inline DiagonalHamiltonian build_Hk(int n, int k, std::uint64_t t)
{
    if (n < 1 || n > max_qubits || k < 1 || k > n)
        throw std::domain_error("build_Hk: invalid arguments");
    std::vector<double> by_d(n + 1);
    for (int d = 0; d <= n; ++d)
        by_d[d] = objective_fk(n, k, d);
    const std::size_t size = 1ULL << n;
    DiagonalHamiltonian h{n, std::vector<double>(size)};
    for (std::size_t x = 0; x < size; ++x)
        h.values[x] = by_d[matches(x, t, n)];
    return h;
}

struct DeviationReport {
    double max_abs = 0;
    double rms = 0;
    std::vector<double> per_d_mean;  // signed mean of A - B over x with matches(x,t) = d
};

// Elementwise statistics of A - B. The per-d grouping needs a reference
// assignment, so the target is an explicit argument (0 groups by popcount).
inline DeviationReport deviation(const DiagonalHamiltonian& a, const DiagonalHamiltonian& b,
                                 std::uint64_t t = 0)
{
    if (a.n != b.n || a.values.size() != b.values.size())
        throw std::invalid_argument("deviation: dimension mismatch");
    const int n = a.n;
    DeviationReport rep;
    rep.per_d_mean.assign(n + 1, 0.0);
    std::vector<std::uint64_t> group_size(n + 1, 0);
    double sum_sq = 0;
    for (std::size_t x = 0; x < a.values.size(); ++x) {
        const double diff = a.values[x] - b.values[x];
        rep.max_abs = std::max(rep.max_abs, std::abs(diff));
        sum_sq += diff * diff;
        const int d = matches(x, t, n);
        rep.per_d_mean[d] += diff;
        ++group_size[d];
    }
    rep.rms = std::sqrt(sum_sq / static_cast<double>(a.values.size()));
    for (int d = 0; d <= n; ++d)
        if (group_size[d])
            rep.per_d_mean[d] /= static_cast<double>(group_size[d]);
    return rep;
}

enum class HBkPath {
    conjugation,  // H^{⊗n}·diag(H_{k,0})·H^{⊗n}, via the Walsh spectrum of the diagonal
    term_sum,     // (1/C_n^k)·Σ_α Π_{i∈α}(I+X_i)/2 over all k-subsets α
};

// Dense mixer H_{B,k} for small-n verification, built along either path; the
// two agree to round-off, which is the conjugation identity being checked.
// Returns a row-major 2^n × 2^n real matrix.
inline std::vector<double> build_dense_HBk(int n, int k, HBkPath path)
{
    if (n < 1 || n > 10 || k < 1 || k > n)
        throw std::domain_error("build_dense_HBk: n limited to dense scale");
    const std::size_t size = 1ULL << n;
    std::vector<double> mat(size * size, 0.0);
    if (path == HBkPath::conjugation) {
        // entry (r,c) of H^{⊗n} D H^{⊗n} is \hat d[r xor c]/2^n where \hat d is
        // the unnormalized Walsh transform of the diagonal
        std::vector<double> spec = build_Hk(n, k, 0).values;
        for (std::size_t h = 1; h < size; h <<= 1)
            for (std::size_t base = 0; base < size; base += h << 1)
                for (std::size_t j = base; j < base + h; ++j) {
                    const double u = spec[j], v = spec[j + h];
                    spec[j] = u + v;
                    spec[j + h] = u - v;
                }
        for (std::size_t r = 0; r < size; ++r)
            for (std::size_t c = 0; c < size; ++c)
                mat[r * size + c] = spec[r ^ c] / static_cast<double>(size);
    } else {
        // Π_{i∈α}(I+X_i)/2 has entry 2^{-k} wherever r and c agree off α
        const double weight = 1.0 / (static_cast<double>(1ULL << k) * static_cast<double>(binom(n, k)));
        std::uint64_t alpha = (1ULL << k) - 1;  // Gosper's hack over k-subsets
        while (alpha < size) {
            for (std::size_t r = 0; r < size; ++r) {
                std::uint64_t sub = alpha;
                for (;;) {
                    mat[r * size + (r ^ sub)] += weight;
                    if (sub == 0)
                        break;
                    sub = (sub - 1) & alpha;
                }
            }
            const std::uint64_t u = alpha & (0 - alpha);
            const std::uint64_t v = alpha + u;
            alpha = v | (((v ^ alpha) / u) >> 2);
        }
    }
    return mat;
}

struct CircuitCostReport {
    std::uint64_t mixer_terms;   // conjugated k-local projectors per iteration: C_n^k
    std::uint64_t clause_terms;  // one multi-controlled phase per clause per iteration
    int locality;                // every term touches k variables, so costs O(k) gates
};

inline CircuitCostReport circuit_cost_report(int n, int k, std::uint64_t m_clauses = 0)
{
    if (k < 1 || k > n)
        throw std::domain_error("circuit_cost_report: invalid arguments");
    return {binom(n, k), m_clauses, k};
}

inline CircuitCostReport circuit_cost_report(const Instance& inst)
{
    return circuit_cost_report(inst.n, inst.k, static_cast<std::uint64_t>(inst.m()));
}

// ---- binary diagonal cache ---------------------------------------------------
// 16-byte header (8-byte magic, 8-byte little-endian qubit count) followed by
// 2^n little-endian doubles. Assumes a little-endian host.

inline constexpr char diagonal_magic[8] = {'K', 'L', 'Q', 'S', 'D', 'I', 'A', '1'};

inline void write_diagonal(const DiagonalHamiltonian& h, const std::string& path)
{
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw std::runtime_error("write_diagonal: cannot open " + path);
    out.write(diagonal_magic, 8);
    const std::uint64_t n = static_cast<std::uint64_t>(h.n);
    out.write(reinterpret_cast<const char*>(&n), 8);
    out.write(reinterpret_cast<const char*>(h.values.data()),
              static_cast<std::streamsize>(h.values.size() * sizeof(double)));
    if (!out)
        throw std::runtime_error("write_diagonal: write failed for " + path);
}

inline DiagonalHamiltonian read_diagonal(const std::string& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw std::runtime_error("read_diagonal: cannot open " + path);
    char magic[8];
    std::uint64_t n = 0;
    in.read(magic, 8);
    in.read(reinterpret_cast<char*>(&n), 8);
    if (!in || std::memcmp(magic, diagonal_magic, 8) != 0 || n < 1 || n > max_qubits)
        throw std::runtime_error("read_diagonal: bad header in " + path);
    DiagonalHamiltonian h{static_cast<int>(n), std::vector<double>(1ULL << n)};
    in.read(reinterpret_cast<char*>(h.values.data()),
            static_cast<std::streamsize>(h.values.size() * sizeof(double)));
    if (!in)
        throw std::runtime_error("read_diagonal: truncated file " + path);
    return h;
}

} // namespace klqs
