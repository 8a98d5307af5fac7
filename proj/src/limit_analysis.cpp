#include "ergochain/limit_analysis.hpp"

#include "ergochain/errors.hpp"

#include <algorithm>
#include <numeric>
#include <sstream>

namespace ergo {

std::string_view to_string(LimitVerdict v) {
    switch (v) {
        case LimitVerdict::ergodic: return "ergodic";
        case LimitVerdict::class_ergodic: return "class-ergodic";
        case LimitVerdict::inconclusive: return "inconclusive";
    }
    return "inconclusive";
}

LimitVerdict weakest(LimitVerdict a, LimitVerdict b) {
    return static_cast<int>(a) >= static_cast<int>(b) ? a : b;
}

std::vector<std::size_t> default_horizons(std::size_t available) {
    std::vector<std::size_t> out;
    for (std::size_t len = 16; len <= 16384 && len <= available; len *= 2) out.push_back(len);
    if (available > 0 && (out.empty() || out.back() != available)) out.push_back(available);
    return out;
}

std::vector<std::size_t> default_start_indices(std::size_t horizon) {
    std::vector<std::size_t> out{0, horizon / 10, horizon / 3};
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

namespace {

double row_distance(const Matrix& m, Eigen::Index a, Eigen::Index b) {
    return (m.row(a) - m.row(b)).cwiseAbs().maxCoeff();
}

std::size_t find_root(std::vector<std::size_t>& parent, std::size_t i) {
    while (parent[i] != i) {
        parent[i] = parent[parent[i]];
        i = parent[i];
    }
    return i;
}

/// Single-linkage groups of rows closer than `threshold`, ordered by smallest member.
std::vector<std::vector<std::size_t>> group_rows(const Matrix& m, double threshold) {
    const auto s = static_cast<std::size_t>(m.rows());
    std::vector<std::size_t> parent(s);
    std::iota(parent.begin(), parent.end(), 0);
    for (std::size_t i = 0; i < s; ++i) {
        for (std::size_t j = i + 1; j < s; ++j) {
            if (row_distance(m, static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) < threshold) {
                parent[find_root(parent, j)] = find_root(parent, i);
            }
        }
    }
    std::vector<std::vector<std::size_t>> groups;
    std::vector<std::size_t> slot(s, s);
    for (std::size_t i = 0; i < s; ++i) {
        const std::size_t r = find_root(parent, i);
        if (slot[r] == s) {
            slot[r] = groups.size();
            groups.emplace_back();
        }
        groups[slot[r]].push_back(i);
    }
    return groups;
}

}  // namespace

LimitClassification classify_limit(const Chain& chain, std::size_t k,
                                   std::span<const std::size_t> horizons,
                                   const LimitTolerances& tol) {
    if (horizons.empty()) throw InvalidParameter("classify_limit needs at least one horizon");
    for (std::size_t i = 0; i < horizons.size(); ++i) {
        if (horizons[i] == 0 || (i > 0 && horizons[i] <= horizons[i - 1])) {
            throw InvalidParameter("horizons must be positive and strictly increasing");
        }
    }
    if (k < chain.start_index() || k + horizons.back() > chain.end_index()) {
        std::ostringstream os;
        os << "A(" << k + horizons.back() << ", " << k << ") needs indices outside ["
           << chain.start_index() << ", " << chain.end_index() << ")";
        throw IndexOutOfRange(os.str());
    }

    LimitClassification out;
    out.start_index = k;
    const auto s = static_cast<Eigen::Index>(chain.agents());
    Matrix product = Matrix::Identity(s, s);
    Matrix previous = product;
    Matrix previous_horizon;
    std::size_t len = 0;
    for (std::size_t h : horizons) {
        while (len < h) {
            if (len + 1 == h) previous = product;
            product = chain.at(k + len).entries() * product;
            ++len;
        }
        HorizonResidual r;
        r.length = h;
        for (Eigen::Index a = 0; a < s; ++a) {
            for (Eigen::Index b = a + 1; b < s; ++b) {
                r.row_spread = std::max(r.row_spread, row_distance(product, a, b));
            }
        }
        const Matrix& reference = out.residuals.empty() ? previous : previous_horizon;
        r.change = (product - reference).cwiseAbs().maxCoeff();
        out.residuals.push_back(r);
        previous_horizon = product;
    }

    out.limit = validate_matrix(product, kProductRowTolerance);
    out.stabilized = out.residuals.back().change < tol.limit;
    out.groups = group_rows(product, tol.limit);

    for (const auto& g : out.groups) {
        for (std::size_t a = 0; a < g.size(); ++a) {
            double inside = 0.0;
            for (auto j : g) inside += product(static_cast<Eigen::Index>(g[a]), static_cast<Eigen::Index>(j));
            out.max_leak = std::max(out.max_leak, 1.0 - inside);
            for (std::size_t b = a + 1; b < g.size(); ++b) {
                out.max_group_spread =
                    std::max(out.max_group_spread, row_distance(product, static_cast<Eigen::Index>(g[a]),
                                                                static_cast<Eigen::Index>(g[b])));
            }
        }
    }

    if (!out.stabilized || out.max_group_spread >= tol.limit) {
        out.verdict = LimitVerdict::inconclusive;
    } else if (out.groups.size() == 1) {
        out.verdict = LimitVerdict::ergodic;
    } else if (out.max_leak < tol.leak) {
        out.verdict = LimitVerdict::class_ergodic;
    } else {
        out.verdict = LimitVerdict::inconclusive;
    }
    return out;
}

}  // namespace ergo
