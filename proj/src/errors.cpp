#include "ergochain/errors.hpp"

#include <sstream>

namespace ergo {

namespace {

template <class... Parts>
std::string concat(const Parts&... parts) {
    std::ostringstream os;
    (os << ... << parts);
    return os.str();
}

}  // namespace

NegativeEntry::NegativeEntry(std::size_t r, std::size_t c, double value)
    : Error(concat("negative entry ", value, " at (", r, ", ", c, ")")), row(r), col(c) {}

RowSumViolation::RowSumViolation(std::size_t r, double s)
    : Error(concat("row ", r, " sums to ", s)), row(r), sum(s) {}

SizeLimitExceeded::SizeLimitExceeded(std::size_t s, std::size_t limit)
    : Error(concat("agent count ", s, " exceeds exhaustive-enumeration limit ", limit)), size(s) {}

AsymmetricNeighborSet::AsymmetricNeighborSet(std::size_t i, std::size_t j, std::size_t n)
    : Error(concat("agent ", j, " is a neighbor of ", i, " at step ", n, " but not conversely")) {}

SelfConfidenceViolated::SelfConfidenceViolated(std::size_t a, std::size_t n, double diagonal)
    : Error(concat("agent ", a, " has non-positive self weight ", diagonal, " at step ", n)),
      agent(a),
      step(n) {}

}  // namespace ergo
