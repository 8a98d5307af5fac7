#pragma once

// Independent reference computations and random generators shared by the unit
// tests and the acceptance suite. Nothing here calls into the routines it is
// used to check.

#include "ergochain/agent_set.hpp"
#include "ergochain/chain.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <random>
#include <vector>

namespace oracle {

using Dense = std::vector<std::vector<double>>;

inline Dense to_dense(const ergo::StochasticMatrix& a) {
    Dense d(a.size(), std::vector<double>(a.size()));
    for (std::size_t i = 0; i < a.size(); ++i) {
        for (std::size_t j = 0; j < a.size(); ++j) d[i][j] = a(i, j);
    }
    return d;
}

/// Plain triple loop, no Eigen.
inline Dense multiply(const Dense& a, const Dense& b) {
    const std::size_t s = a.size();
    Dense c(s, std::vector<double>(s, 0.0));
    for (std::size_t i = 0; i < s; ++i) {
        for (std::size_t k = 0; k < s; ++k) {
            for (std::size_t j = 0; j < s; ++j) c[i][j] += a[i][k] * b[k][j];
        }
    }
    return c;
}

/// A_{n-1} ... A_k by repeated left multiplication.
inline Dense naive_backward_product(const ergo::Chain& chain, std::size_t k, std::size_t n) {
    const std::size_t s = chain.agents();
    Dense p(s, std::vector<double>(s, 0.0));
    for (std::size_t i = 0; i < s; ++i) p[i][i] = 1.0;
    for (std::size_t m = k; m < n; ++m) p = multiply(to_dense(chain.at(m)), p);
    return p;
}

/// Random row-stochastic matrix, with a random fraction of zeroed entries.
inline ergo::StochasticMatrix random_stochastic(std::size_t s, std::mt19937_64& rng,
                                                double zero_probability = 0.3) {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    ergo::Matrix m(static_cast<Eigen::Index>(s), static_cast<Eigen::Index>(s));
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        double sum = 0.0;
        for (Eigen::Index j = 0; j < m.cols(); ++j) {
            m(i, j) = u(rng) < zero_probability ? 0.0 : u(rng);
            sum += m(i, j);
        }
        if (sum == 0.0) {
            m(i, i) = 1.0;
            sum = 1.0;
        }
        m.row(i) /= sum;
    }
    return ergo::validate_matrix(m);
}

/// Entries are multiples of 2^-bits, so every partial sum is exact in binary
/// floating point regardless of summation order.
inline ergo::StochasticMatrix random_dyadic_stochastic(std::size_t s, std::mt19937_64& rng,
                                                       int bits = 10) {
    const std::uint64_t total = std::uint64_t{1} << bits;
    ergo::Matrix m = ergo::Matrix::Zero(static_cast<Eigen::Index>(s), static_cast<Eigen::Index>(s));
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        // s - 1 sorted cut points in [0, total] split the unit mass.
        std::vector<std::uint64_t> cuts{0, total};
        std::uniform_int_distribution<std::uint64_t> pick(0, total);
        for (std::size_t c = 0; c + 1 < s; ++c) cuts.push_back(pick(rng));
        std::sort(cuts.begin(), cuts.end());
        for (Eigen::Index j = 0; j < m.cols(); ++j) {
            const auto w = cuts[static_cast<std::size_t>(j) + 1] - cuts[static_cast<std::size_t>(j)];
            m(i, j) = std::ldexp(static_cast<double>(w), -bits);
        }
    }
    return ergo::validate_matrix(m);
}

/// Convex combination of random permutation matrices (doubly stochastic).
inline ergo::StochasticMatrix random_doubly_stochastic(std::size_t s, std::mt19937_64& rng,
                                                       std::size_t terms = 4) {
    std::uniform_real_distribution<double> u(0.05, 1.0);
    std::vector<double> w(terms);
    for (auto& x : w) x = u(rng);
    const double total = std::accumulate(w.begin(), w.end(), 0.0);
    ergo::Matrix m = ergo::Matrix::Zero(static_cast<Eigen::Index>(s), static_cast<Eigen::Index>(s));
    std::vector<std::size_t> perm(s);
    for (std::size_t t = 0; t < terms; ++t) {
        std::iota(perm.begin(), perm.end(), 0);
        std::shuffle(perm.begin(), perm.end(), rng);
        for (std::size_t i = 0; i < s; ++i) {
            m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(perm[i])) += w[t] / total;
        }
    }
    return ergo::validate_matrix(m);
}

inline std::vector<std::uint64_t> subsets_with_count(std::size_t s, std::size_t c) {
    std::vector<std::uint64_t> out;
    for (std::uint64_t b = 0; b < (std::uint64_t{1} << s); ++b) {
        if (static_cast<std::size_t>(__builtin_popcountll(b)) == c) out.push_back(b);
    }
    return out;
}

inline bool in(std::uint64_t set, std::size_t i) { return (set >> i) & 1U; }

/// Brute-force balanced-asymmetry constant over every equal-size pair and step.
inline double brute_balanced_asymmetry(const ergo::Chain& chain, std::size_t horizon) {
    const std::size_t s = chain.agents();
    double worst = 1.0;
    for (std::size_t n = 0; n < horizon; ++n) {
        const auto& a = chain.matrices()[n];
        for (std::size_t c = 1; c < s; ++c) {
            const auto sets = subsets_with_count(s, c);
            for (auto s1 : sets) {
                for (auto s2 : sets) {
                    double lhs = 0.0;
                    double rhs = 0.0;
                    for (std::size_t i = 0; i < s; ++i) {
                        for (std::size_t j = 0; j < s; ++j) {
                            if (in(s1, i) && !in(s2, j)) lhs += a(i, j);
                            if (!in(s1, i) && in(s2, j)) rhs += a(i, j);
                        }
                    }
                    if (lhs == 0.0) continue;
                    worst = std::max(worst, rhs == 0.0 ? std::numeric_limits<double>::infinity() : lhs / rhs);
                }
            }
        }
    }
    return worst;
}

/// Cross flow of one step between T(n) = now and T(n+1) = next.
inline double step_flow(const ergo::StochasticMatrix& a, std::uint64_t now, std::uint64_t next,
                        bool one_sided) {
    double v = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        for (std::size_t j = 0; j < a.size(); ++j) {
            if (!in(next, i) && in(now, j)) v += a(i, j);
            if (!one_sided && in(next, i) && !in(now, j)) v += a(i, j);
        }
    }
    return v;
}

/// Minimum cross flow over every subset sequence T(0..N) of size c, by
/// explicit enumeration of all C(s,c)^(N+1) sequences.
inline double brute_worst_case_flow(const ergo::Chain& chain, std::size_t c, std::size_t horizon,
                                    bool one_sided) {
    const auto sets = subsets_with_count(chain.agents(), c);
    const std::size_t k = sets.size();
    std::vector<std::size_t> idx(horizon + 1, 0);
    double best = std::numeric_limits<double>::infinity();
    while (true) {
        double total = 0.0;
        for (std::size_t n = 0; n < horizon; ++n) {
            total += step_flow(chain.matrices()[n], sets[idx[n]], sets[idx[n + 1]], one_sided);
        }
        best = std::min(best, total);
        std::size_t pos = 0;
        while (pos <= horizon && ++idx[pos] == k) idx[pos++] = 0;
        if (pos > horizon) break;
    }
    return best;
}

}  // namespace oracle
