#include "ergochain/chain.hpp"

#include "ergochain/errors.hpp"

#include <cmath>
#include <sstream>
#include <string>

namespace ergo {

namespace {

Eigen::Index idx(std::size_t i) { return static_cast<Eigen::Index>(i); }

}  // namespace

StochasticMatrix StochasticMatrix::identity(std::size_t s) {
    return StochasticMatrix(Matrix::Identity(idx(s), idx(s)));
}

StochasticMatrix StochasticMatrix::uniform(std::size_t s) {
    return StochasticMatrix(Matrix::Constant(idx(s), idx(s), 1.0 / static_cast<double>(s)));
}

StochasticMatrix validate_matrix(const Matrix& raw, double row_tolerance) {
    if (raw.rows() != raw.cols() || raw.rows() == 0) {
        std::ostringstream os;
        os << "expected a non-empty square matrix, got " << raw.rows() << "x" << raw.cols();
        throw DimensionMismatch(os.str());
    }
    Matrix m = raw;
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        double sum = 0.0;
        for (Eigen::Index j = 0; j < m.cols(); ++j) {
            const double v = m(i, j);
            if (!(v >= 0.0)) {
                throw NegativeEntry(static_cast<std::size_t>(i), static_cast<std::size_t>(j), v);
            }
            sum += v;
        }
        if (!(std::abs(sum - 1.0) <= row_tolerance)) {
            throw RowSumViolation(static_cast<std::size_t>(i), sum);
        }
        if (sum != 1.0) {
            m.row(i) /= sum;
        }
    }
    return StochasticMatrix(std::move(m));
}

StochasticMatrix validate_matrix(const std::vector<std::vector<double>>& rows,
                                 double row_tolerance) {
    const auto s = rows.size();
    Matrix m(idx(s), idx(s));
    for (std::size_t i = 0; i < s; ++i) {
        if (rows[i].size() != s) {
            std::ostringstream os;
            os << "row " << i << " has " << rows[i].size() << " entries, expected " << s;
            throw DimensionMismatch(os.str());
        }
        for (std::size_t j = 0; j < s; ++j) m(idx(i), idx(j)) = rows[i][j];
    }
    return validate_matrix(m, row_tolerance);
}

StateVector::StateVector(Matrix values, std::size_t time_index)
    : values_(std::move(values)), time_index_(time_index) {
    if (values_.rows() == 0 || values_.cols() == 0) {
        throw DimensionMismatch("state vector needs at least one agent and one coordinate");
    }
}

StateVector StateVector::scalar(std::span<const double> values, std::size_t time_index) {
    Matrix m(idx(values.size()), 1);
    for (std::size_t i = 0; i < values.size(); ++i) m(idx(i), 0) = values[i];
    return StateVector(std::move(m), time_index);
}

double StateVector::spread() const {
    double total = 0.0;
    for (Eigen::Index r = 0; r < values_.cols(); ++r) {
        total += values_.col(r).maxCoeff() - values_.col(r).minCoeff();
    }
    return total;
}

Chain::Chain(std::size_t agents, std::vector<StochasticMatrix> matrices, std::size_t start_index)
    : agents_(agents), matrices_(std::move(matrices)), start_(start_index) {
    check_sizes();
}

Chain::Chain(std::vector<StochasticMatrix> matrices, std::size_t start_index)
    : agents_(matrices.empty() ? 0 : matrices.front().size()),
      matrices_(std::move(matrices)),
      start_(start_index) {
    check_sizes();
}

void Chain::check_sizes() const {
    if (agents_ == 0) throw DimensionMismatch("chain needs at least one agent");
    for (std::size_t m = 0; m < matrices_.size(); ++m) {
        if (matrices_[m].size() != agents_) {
            std::ostringstream os;
            os << "matrix " << start_ + m << " is " << matrices_[m].size() << "x"
               << matrices_[m].size() << ", chain has " << agents_ << " agents";
            throw DimensionMismatch(os.str());
        }
    }
}

Chain Chain::generate(std::size_t agents, std::size_t length,
                      const std::function<StochasticMatrix(std::size_t)>& make,
                      std::size_t start_index) {
    std::vector<StochasticMatrix> ms;
    ms.reserve(length);
    for (std::size_t n = start_index; n < start_index + length; ++n) ms.push_back(make(n));
    return Chain(agents, std::move(ms), start_index);
}

Chain Chain::constant(const StochasticMatrix& a, std::size_t length) {
    return Chain(a.size(), std::vector<StochasticMatrix>(length, a));
}

const StochasticMatrix& Chain::at(std::size_t n) const {
    if (n < start_ || n >= end_index()) {
        std::ostringstream os;
        os << "index " << n << " outside chain range [" << start_ << ", " << end_index() << ")";
        throw IndexOutOfRange(os.str());
    }
    return matrices_[n - start_];
}

Chain Chain::slice(std::size_t from, std::size_t to) const {
    if (from < start_ || to > end_index() || from > to) {
        std::ostringstream os;
        os << "slice [" << from << ", " << to << ") outside chain range [" << start_ << ", "
           << end_index() << ")";
        throw IndexOutOfRange(os.str());
    }
    std::vector<StochasticMatrix> ms(matrices_.begin() + static_cast<std::ptrdiff_t>(from - start_),
                                     matrices_.begin() + static_cast<std::ptrdiff_t>(to - start_));
    return Chain(agents_, std::move(ms), from);
}

StateVector step(const StateVector& x, const StochasticMatrix& a) {
    if (x.agents() != a.size()) {
        std::ostringstream os;
        os << "state has " << x.agents() << " agents, matrix is " << a.size() << "x" << a.size();
        throw DimensionMismatch(os.str());
    }
    return StateVector(a.entries() * x.values(), x.time_index() + 1);
}

StochasticMatrix backward_product(const Chain& chain, std::size_t k, std::size_t n) {
    if (n < k || k < chain.start_index() || n > chain.end_index()) {
        std::ostringstream os;
        os << "backward product A(" << n << ", " << k << ") needs start_index <= k <= n <= "
           << chain.end_index() << " (start_index " << chain.start_index() << ")";
        throw IndexOutOfRange(os.str());
    }
    if (n == k) return StochasticMatrix::identity(chain.agents());
    Matrix p = chain.at(k).entries();
    for (std::size_t m = k + 1; m < n; ++m) {
        p = chain.at(m).entries() * p;
    }
    return validate_matrix(p, kProductRowTolerance);
}

Trajectory trajectory(const Chain& chain, const StateVector& x0, std::size_t horizon) {
    const std::size_t first = x0.time_index();
    // Validates the range up front so no partial trajectory escapes.
    Chain used = chain.slice(first, first + horizon);
    std::vector<StateVector> states;
    states.reserve(horizon + 1);
    states.push_back(x0);
    for (std::size_t m = 0; m < horizon; ++m) {
        states.push_back(step(states.back(), used.at(first + m)));
    }
    return {std::move(states), std::move(used)};
}

Trajectory trajectory(const Generator& generator, const StateVector& x0, std::size_t horizon) {
    std::vector<StateVector> states;
    std::vector<StochasticMatrix> applied;
    states.reserve(horizon + 1);
    applied.reserve(horizon);
    states.push_back(x0);
    for (std::size_t m = 0; m < horizon; ++m) {
        const StateVector& x = states.back();
        applied.push_back(generator(x, x.time_index()));
        states.push_back(step(x, applied.back()));
    }
    return {std::move(states), Chain(x0.agents(), std::move(applied), x0.time_index())};
}

}  // namespace ergo
