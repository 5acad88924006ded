#pragma once

// k-SAT data model and random instance generation:
//   - Clause / Instance types (canonical form: sorted distinct variables),
//   - the uniform model F(n,m,k), the planted model F_f (clauses satisfied by
//     a hidden target t0) and the satisfiable model F_s (per-clause rejection
//     against the exact SurvivorSet oracle),
//   - DIMACS CNF persistence with a "c planted <bitstring>" extension.
//
// Assignments are n-bit integers: bit i-1 holds the value of variable i.

#include "combinatorics.hpp"
#include "rng.hpp"

#include <algorithm>
#include <cstdint>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace klqs {

// 2^26 survivor bits = 8 MiB; beyond this the exact oracle is off the table.
inline constexpr int max_survivor_n = 26;

struct Clause {
    std::vector<int> vars;    // 1-based variable indices, strictly increasing
    std::vector<bool> signs;  // true = positive literal

    bool operator==(const Clause&) const = default;
};

struct Instance {
    int n = 0;
    int k = 0;
    std::vector<Clause> clauses;           // order and repetition preserved
    std::optional<std::uint64_t> planted;  // target t0 for F_f instances

    int m() const { return static_cast<int>(clauses.size()); }
    bool operator==(const Instance&) const = default;
};

// A literal is satisfied when its variable's bit equals its sign; a clause is
// the disjunction of its literals.
inline bool clause_satisfied(const Clause& c, std::uint64_t x)
{
    for (std::size_t j = 0; j < c.vars.size(); ++j) {
        const bool bit = (x >> (c.vars[j] - 1)) & 1;
        if (bit == static_cast<bool>(c.signs[j]))
            return true;
    }
    return false;
}

inline int count_satisfied(const Instance& inst, std::uint64_t x)
{
    int count = 0;
    for (const Clause& c : inst.clauses)
        count += clause_satisfied(c, x);
    return count;
}

namespace detail {

// A width-k clause is violated exactly on the subcube where every clause
// variable is pinned opposite its sign; fn receives each of the 2^{n-k}
// assignments in that subcube.
template <typename Fn>
void for_each_violator(const Clause& c, int n, Fn&& fn)
{
    std::uint64_t var_mask = 0, pinned = 0;
    for (std::size_t j = 0; j < c.vars.size(); ++j) {
        var_mask |= 1ULL << (c.vars[j] - 1);
        if (!c.signs[j])
            pinned |= 1ULL << (c.vars[j] - 1);
    }
    const std::uint64_t full = n == 64 ? ~0ULL : (1ULL << n) - 1;
    const std::uint64_t free_mask = full & ~var_mask;
    std::uint64_t sub = free_mask;
    for (;;) {
        fn(pinned | sub);
        if (sub == 0)
            break;
        sub = (sub - 1) & free_mask;  // next subset of free_mask, descending
    }
}

} // namespace detail

// Exact satisfiability oracle: one bit per assignment, cleared as appended
// clauses rule assignments out.
class SurvivorSet {
public:
    explicit SurvivorSet(int n) : n_(n)
    {
        if (n < 1 || n > max_survivor_n)
            throw std::domain_error("SurvivorSet: n out of range");
        const std::uint64_t size = 1ULL << n;
        words_.assign((size + 63) / 64, ~0ULL);
        if (size < 64)
            words_.back() = (1ULL << size) - 1;
        count_ = size;
    }

    int n() const { return n_; }
    std::uint64_t count() const { return count_; }
    bool test(std::uint64_t x) const { return (words_[x >> 6] >> (x & 63)) & 1; }

    // Clears every assignment violating c; returns how many were removed.
    std::uint64_t remove_violators(const Clause& c)
    {
        std::uint64_t removed = 0;
        detail::for_each_violator(c, n_, [&](std::uint64_t x) {
            const std::uint64_t bit = 1ULL << (x & 63);
            if (words_[x >> 6] & bit) {
                words_[x >> 6] &= ~bit;
                ++removed;
            }
        });
        count_ -= removed;
        return removed;
    }

    // Would appending c leave nothing standing?
    bool clause_would_empty(const Clause& c) const
    {
        const int k = static_cast<int>(c.vars.size());
        if (count_ > (1ULL << (n_ - k)))
            return false;  // more survivors than the violating subcube holds
        std::uint64_t hit = 0;
        detail::for_each_violator(c, n_, [&](std::uint64_t x) { hit += test(x); });
        return hit == count_;
    }

    std::vector<std::uint64_t> to_vector() const
    {
        std::vector<std::uint64_t> out;
        out.reserve(count_);
        const std::uint64_t size = 1ULL << n_;
        for (std::uint64_t x = 0; x < size; ++x)
            if (test(x))
                out.push_back(x);
        return out;
    }

private:
    int n_;
    std::vector<std::uint64_t> words_;
    std::uint64_t count_;
};

namespace detail {

inline void validate_instance_params(int n, int m, int k)
{
    if (k < 1 || k > n || n > max_binom_n || m < 0)
        throw std::domain_error("instance generator: invalid parameters");
}

// k distinct variables uniform over the C_n^k subsets, sorted ascending.
inline std::vector<int> draw_vars(int n, int k, SplitRng& rng)
{
    std::vector<int> vars;
    vars.reserve(k);
    while (static_cast<int>(vars.size()) < k) {
        const int v = 1 + static_cast<int>(rng.bounded(static_cast<std::uint64_t>(n)));
        if (std::find(vars.begin(), vars.end(), v) == vars.end())
            vars.push_back(v);
    }
    std::sort(vars.begin(), vars.end());
    return vars;
}

inline Clause draw_clause(int n, int k, SplitRng& rng)
{
    Clause c;
    c.vars = draw_vars(n, k, rng);
    c.signs.resize(k);
    for (int j = 0; j < k; ++j)
        c.signs[j] = rng.coin();
    return c;
}

} // namespace detail

// F(n,m,k): m clauses drawn uniformly, independently, with replacement from
// all 2^k·C_n^k width-k clauses over distinct variables.
inline Instance generate_F(int n, int m, int k, std::uint64_t seed)
{
    detail::validate_instance_params(n, m, k);
    SplitRng rng(seed);
    Instance inst{n, k, {}, std::nullopt};
    inst.clauses.reserve(m);
    for (int i = 0; i < m; ++i)
        inst.clauses.push_back(detail::draw_clause(n, k, rng));
    return inst;
}

// F_f(n,m,k): clauses uniform over S_{t0}, the (2^k - 1)·C_n^k clauses
// satisfied by the planted target t0 (drawn uniformly when not supplied).
// Per clause, the one violating sign pattern is excised from the draw by
// index shifting, so no rejection loop is needed.
inline Instance generate_Ff(int n, int m, int k, std::uint64_t seed,
                            std::optional<std::uint64_t> t0 = std::nullopt)
{
    detail::validate_instance_params(n, m, k);
    SplitRng rng(seed);
    const std::uint64_t full = n == 64 ? ~0ULL : (1ULL << n) - 1;
    const std::uint64_t t = t0 ? (*t0 & full) : (rng.next() & full);
    Instance inst{n, k, {}, t};
    inst.clauses.reserve(m);
    for (int i = 0; i < m; ++i) {
        Clause c;
        c.vars = detail::draw_vars(n, k, rng);
        // sign pattern code: bit j = sign of literal j; the pattern violating
        // t0 sets every sign opposite t0's bit
        std::uint64_t forbidden = 0;
        for (int j = 0; j < k; ++j)
            if (((t >> (c.vars[j] - 1)) & 1) == 0)
                forbidden |= 1ULL << j;
        std::uint64_t code = rng.bounded((1ULL << k) - 1);
        if (code >= forbidden)
            ++code;
        c.signs.resize(k);
        for (int j = 0; j < k; ++j)
            c.signs[j] = (code >> j) & 1;
        inst.clauses.push_back(std::move(c));
    }
    return inst;
}

struct FsStats {
    std::uint64_t rejected = 0;  // candidate clauses discarded for emptying the set
};

// F_s(n,m,k): clauses appended sequentially; any candidate that would empty
// the SurvivorSet is rejected and redrawn, so the result is satisfiable by
// construction. (Uniform-over-satisfiable whole-instance rejection is
// exponentially slow past the threshold; this per-clause scheme is the
// documented substitute and prunes exactly the unsatisfiable branches.)
inline Instance generate_Fs(int n, int m, int k, std::uint64_t seed, FsStats* stats = nullptr)
{
    detail::validate_instance_params(n, m, k);
    if (n > max_survivor_n)
        throw std::domain_error("generate_Fs: n too large for the exact oracle");
    SplitRng rng(seed);
    SurvivorSet survivors(n);
    Instance inst{n, k, {}, std::nullopt};
    inst.clauses.reserve(m);
    std::uint64_t rejected = 0;
    for (int i = 0; i < m; ++i) {
        for (;;) {
            Clause c = detail::draw_clause(n, k, rng);
            if (!survivors.clause_would_empty(c)) {
                survivors.remove_violators(c);
                inst.clauses.push_back(std::move(c));
                break;
            }
            if (++rejected > 1000000)
                throw std::runtime_error("generate_Fs: rejection budget exhausted");
        }
    }
    if (stats)
        stats->rejected = rejected;
    return inst;
}

inline SurvivorSet surviving_assignments(const Instance& inst)
{
    SurvivorSet s(inst.n);
    for (const Clause& c : inst.clauses)
        s.remove_violators(c);
    return s;
}

// ---- DIMACS CNF ------------------------------------------------------------
// Standard format plus one extension: an F_f instance's planted target rides
// in a comment "c planted <bitstring>" whose j-th character (leftmost = j=1)
// is the value of variable j.

inline void dimacs_write(const Instance& inst, std::ostream& out)
{
    if (inst.planted) {
        out << "c planted ";
        for (int i = 1; i <= inst.n; ++i)
            out << (((*inst.planted >> (i - 1)) & 1) ? '1' : '0');
        out << '\n';
    }
    out << "p cnf " << inst.n << ' ' << inst.m() << '\n';
    for (const Clause& c : inst.clauses) {
        for (std::size_t j = 0; j < c.vars.size(); ++j)
            out << (c.signs[j] ? c.vars[j] : -c.vars[j]) << ' ';
        out << "0\n";
    }
}

inline void dimacs_write(const Instance& inst, const std::string& path)
{
    std::ofstream out(path);
    if (!out)
        throw std::runtime_error("dimacs_write: cannot open " + path);
    dimacs_write(inst, out);
    if (!out)
        throw std::runtime_error("dimacs_write: write failed for " + path);
}

inline Instance dimacs_read(std::istream& in)
{
    std::string line, planted_bits;
    int n = -1, m = -1;
    Instance inst;
    std::vector<int> literals;
    while (std::getline(in, line)) {
        if (line.empty())
            continue;
        if (line[0] == 'c') {
            std::istringstream c(line);
            std::string tag, word;
            c >> tag >> word;
            if (word == "planted")
                c >> planted_bits;
            continue;
        }
        if (line[0] == 'p') {
            std::istringstream p(line);
            std::string tag, fmt;
            if (!(p >> tag >> fmt >> n >> m) || fmt != "cnf" || n < 1 || n > max_binom_n || m < 0)
                throw std::runtime_error("dimacs_read: malformed problem line: " + line);
            inst.n = n;
            continue;
        }
        if (n < 0)
            throw std::runtime_error("dimacs_read: clause before problem line");
        std::istringstream ls(line);
        int lit;
        while (ls >> lit) {
            if (lit == 0) {
                Clause c;
                c.vars.reserve(literals.size());
                c.signs.reserve(literals.size());
                std::sort(literals.begin(), literals.end(),
                          [](int a, int b) { return std::abs(a) < std::abs(b); });
                for (int l : literals) {
                    const int v = std::abs(l);
                    if (v < 1 || v > n)
                        throw std::runtime_error("dimacs_read: literal out of range");
                    if (!c.vars.empty() && c.vars.back() == v)
                        throw std::runtime_error("dimacs_read: repeated variable in clause");
                    c.vars.push_back(v);
                    c.signs.push_back(l > 0);
                }
                if (inst.k == 0)
                    inst.k = static_cast<int>(c.vars.size());
                if (static_cast<int>(c.vars.size()) != inst.k || inst.k == 0)
                    throw std::runtime_error("dimacs_read: clause width mismatch");
                inst.clauses.push_back(std::move(c));
                literals.clear();
            } else {
                literals.push_back(lit);
            }
        }
    }
    if (n < 0)
        throw std::runtime_error("dimacs_read: missing problem line");
    if (!literals.empty())
        throw std::runtime_error("dimacs_read: unterminated clause");
    if (inst.m() != m)
        throw std::runtime_error("dimacs_read: clause count does not match header");
    if (!planted_bits.empty()) {
        if (static_cast<int>(planted_bits.size()) != n)
            throw std::runtime_error("dimacs_read: planted bitstring length mismatch");
        std::uint64_t t = 0;
        for (int i = 0; i < n; ++i) {
            if (planted_bits[i] == '1')
                t |= 1ULL << i;
            else if (planted_bits[i] != '0')
                throw std::runtime_error("dimacs_read: planted bitstring must be 0/1");
        }
        inst.planted = t;
    }
    return inst;
}

inline Instance dimacs_read(const std::string& path)
{
    std::ifstream in(path);
    if (!in)
        throw std::runtime_error("dimacs_read: cannot open " + path);
    return dimacs_read(in);
}

} // namespace klqs
