#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace ergo {

using Matrix = Eigen::MatrixXd;

/// Row-sum tolerance for matrices built directly from rates.
inline constexpr double kRowTolerance = 1e-12;
/// Row-sum tolerance for backward products (accumulated rounding).
inline constexpr double kProductRowTolerance = 1e-9;

/// Square nonnegative matrix whose rows sum to one. Only obtainable through
/// validate_matrix() or the named constructors, so every instance satisfies
/// the invariants.
class StochasticMatrix {
public:
    /// The 1 x 1 identity.
    StochasticMatrix() : m_(Matrix::Identity(1, 1)) {}
    static StochasticMatrix identity(std::size_t s);
    /// Every entry 1/s.
    static StochasticMatrix uniform(std::size_t s);

    std::size_t size() const { return static_cast<std::size_t>(m_.rows()); }
    double operator()(std::size_t i, std::size_t j) const {
        return m_(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
    }
    const Matrix& entries() const { return m_; }

    friend bool operator==(const StochasticMatrix& a, const StochasticMatrix& b) {
        return a.m_.rows() == b.m_.rows() && a.m_ == b.m_;
    }

private:
    friend StochasticMatrix validate_matrix(const Matrix& raw, double row_tolerance);
    explicit StochasticMatrix(Matrix m) : m_(std::move(m)) {}

    Matrix m_;
};

/// Checks nonnegativity and unit row sums. Rows within `row_tolerance` of one
/// are renormalized; anything further off is rejected.
StochasticMatrix validate_matrix(const Matrix& raw, double row_tolerance = kRowTolerance);
StochasticMatrix validate_matrix(const std::vector<std::vector<double>>& rows,
                                 double row_tolerance = kRowTolerance);

/// Agent states X(n): one row per agent, one column per coordinate.
class StateVector {
public:
    StateVector(Matrix values, std::size_t time_index = 0);
    static StateVector scalar(std::span<const double> values, std::size_t time_index = 0);

    std::size_t agents() const { return static_cast<std::size_t>(values_.rows()); }
    std::size_t dimension() const { return static_cast<std::size_t>(values_.cols()); }
    std::size_t time_index() const { return time_index_; }
    const Matrix& values() const { return values_; }
    double operator()(std::size_t i, std::size_t r = 0) const {
        return values_(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(r));
    }

    /// max_i X_ir - min_i X_ir, summed over coordinates.
    double spread() const;

private:
    Matrix values_;
    std::size_t time_index_;
};

/// A realized finite stretch of a chain: matrices A_k, A_{k+1}, ..., A_{k+L-1}.
class Chain {
public:
    Chain(std::size_t agents, std::vector<StochasticMatrix> matrices, std::size_t start_index = 0);
    /// Requires a non-empty list; the agent count is taken from the first matrix.
    explicit Chain(std::vector<StochasticMatrix> matrices, std::size_t start_index = 0);

    /// Materializes A_n = make(n) for n in [start_index, start_index + length).
    static Chain generate(std::size_t agents, std::size_t length,
                          const std::function<StochasticMatrix(std::size_t)>& make,
                          std::size_t start_index = 0);
    static Chain constant(const StochasticMatrix& a, std::size_t length);

    std::size_t agents() const { return agents_; }
    std::size_t start_index() const { return start_; }
    /// One past the last defined index.
    std::size_t end_index() const { return start_ + matrices_.size(); }
    std::size_t length() const { return matrices_.size(); }

    /// A_n, indexed by absolute time n.
    const StochasticMatrix& at(std::size_t n) const;
    std::span<const StochasticMatrix> matrices() const { return matrices_; }

    /// The sub-chain on [from, to).
    Chain slice(std::size_t from, std::size_t to) const;

private:
    void check_sizes() const;

    std::size_t agents_;
    std::vector<StochasticMatrix> matrices_;
    std::size_t start_;
};

/// Produces A_n from the current state; must be deterministic in (state, n).
using Generator = std::function<StochasticMatrix(const StateVector&, std::size_t n)>;

/// X(n+1) = A_n X(n), every coordinate with the same matrix.
StateVector step(const StateVector& x, const StochasticMatrix& a);

/// A(n,k) = A_{n-1} A_{n-2} ... A_k; the empty product A(k,k) is the identity.
StochasticMatrix backward_product(const Chain& chain, std::size_t k, std::size_t n);

struct Trajectory {
    std::vector<StateVector> states;  // x(0) ... x(N)
    Chain realized;                   // A_0 ... A_{N-1} actually applied
};

/// Iterates the linear dynamics over an exogenous chain starting at
/// x0.time_index().
Trajectory trajectory(const Chain& chain, const StateVector& x0, std::size_t horizon);
/// Endogenous variant: A_m is produced from x(m) before stepping.
Trajectory trajectory(const Generator& generator, const StateVector& x0, std::size_t horizon);

}  // namespace ergo
