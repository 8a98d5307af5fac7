#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace ergo {

/// Base for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class NegativeEntry : public Error {
public:
    NegativeEntry(std::size_t row, std::size_t col, double value);
    std::size_t row;
    std::size_t col;
};

class RowSumViolation : public Error {
public:
    RowSumViolation(std::size_t row, double sum);
    std::size_t row;
    double sum;
};

class DimensionMismatch : public Error {
public:
    using Error::Error;
};

class IndexOutOfRange : public Error {
public:
    using Error::Error;
};

class InvalidParameter : public Error {
public:
    using Error::Error;
};

class SizeLimitExceeded : public Error {
public:
    SizeLimitExceeded(std::size_t size, std::size_t limit);
    std::size_t size;
};

class EmptyOrFullSubset : public Error {
public:
    using Error::Error;
};

class CardinalityMismatch : public Error {
public:
    using Error::Error;
};

class AsymmetricNeighborSet : public Error {
public:
    AsymmetricNeighborSet(std::size_t i, std::size_t j, std::size_t n);
};

class SelfConfidenceViolated : public Error {
public:
    SelfConfidenceViolated(std::size_t agent, std::size_t n, double diagonal);
    std::size_t agent;
    std::size_t step;
};

class IntegralEstimateUnreliable : public Error {
public:
    using Error::Error;
};

}  // namespace ergo
