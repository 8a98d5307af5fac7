#pragma once

#include "ergochain/models.hpp"

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

namespace ergo {

enum class IntegralMethod { automatic, analytic, quadrature };

/// Controls for the improper integral of the kernel from M_x to infinity.
struct QuadratureControl {
    IntegralMethod method = IntegralMethod::automatic;
    double relative_tolerance = 1e-12;  // per adaptive Gauss-Kronrod segment
    double tail_fraction = 1e-10;       // stop once the tail estimate is this small
    std::size_t max_doublings = 80;
};

struct IntegralEstimate {
    double value = 0.0;        // best estimate; +inf when divergent
    double lower_bound = 0.0;  // guaranteed from below (truncated, error removed)
    double tail = 0.0;         // estimated mass beyond `cutoff`
    double cutoff = 0.0;       // upper end of the numerically integrated range
    bool controlled = true;    // tail estimate met the requested fraction
    std::string method;
};

/// int_{from}^{inf} f(y) dy. Power-law kernels use closed forms unless
/// quadrature is forced; other kernels use adaptive quadrature on doubling
/// ranges with a local power-decay tail model.
IntegralEstimate kernel_tail_integral(const Kernel& f, double from,
                                      const QuadratureControl& control = {});

struct CertificateInput {
    CsSpec spec;
    std::size_t agents = 0;
    double m_x = 0.0;  // max initial position gap
    double m_v = 0.0;  // max initial velocity gap

    static CertificateInput from_state(const CsSpec& spec, const CsState& initial);
};

struct CertificateResult {
    bool certified = false;
    bool kernel_guard = false;  // sup f = f(0) < 1/s
    double kernel_sup = 0.0;
    IntegralEstimate integral{};
    double rhs = 0.0;         // s / (3h) * integral
    double margin = 0.0;      // rhs - M_v
    double proof_lhs = 0.0;   // 3 M_v
    double proof_rhs = 0.0;   // (s / h) * integral
    CertificateInput input;
};

/// Velocity-consensus certificate: certified iff f(0) < 1/s and
/// M_v < s/(3h) * int_{M_x}^inf f. Quadrature-based decisions use the
/// integral's lower bound; throws IntegralEstimateUnreliable when neither the
/// tail is controlled nor the truncated integral already certifies.
CertificateResult certificate_check(const CertificateInput& input,
                                    const QuadratureControl& control = {});

struct CorollaryResult {
    bool certified = false;
    int branch = 0;             // 1: beta <= 1/2, 2: beta > 1/2
    bool kernel_guard = false;  // K / sigma^(2 beta) < 1/s
    double threshold = 0.0;     // +inf on branch 1
    double margin = 0.0;
    bool integral_certified = false;
    /// corollary-certified implies integral-certified
    bool consistent = true;
};

/// Closed-form power-law certificate:
///   beta <= 1/2                       -> certified
///   M_v < sK / (3h (2beta-1) (M_x+sigma)^(2beta-1)) -> certified
/// both under K / sigma^(2beta) < 1/s.
CorollaryResult corollary_check(double K, double sigma, double beta, std::size_t agents, double h,
                                double m_x, double m_v);

struct MonitorOptions {
    double epsilon = 1e-10;
    bool keep_sorted = false;
};

/// Step-by-step audit of a Cucker-Smale run against the contraction argument:
///   z(n)   = sum_r (max_i V_ir(n) - min_i V_ir(n))
///   g(n)   = M_x + h sum_{m<n} z(m)
///   z(n+1) <= (1 - s f(g(n))) z(n),  a_ij(n) >= f(g(n)),  gap(n) <= g(n).
struct ContractionTrace {
    std::vector<double> z;                // n = 0..N
    std::vector<double> g;                // n = 0..N
    std::vector<double> position_gap;     // max_{i,j} |X_i(n) - X_j(n)|
    std::vector<std::uint8_t> step_ok;    // all three bounds hold at n
    /// Per-step V components sorted ascending (z_ir), when requested.
    std::vector<Positions> sorted_components;

    std::size_t contraction_violations = 0;
    std::size_t rate_violations = 0;
    std::size_t gap_violations = 0;
    std::size_t z_increases = 0;  // z(n+1) > z(n) + epsilon
    double worst_contraction_excess = 0.0;
    double worst_rate_deficit = 0.0;
    double worst_gap_excess = 0.0;

    std::size_t violations() const {
        return contraction_violations + rate_violations + gap_violations;
    }
};

ContractionTrace contraction_monitor(const CsSpec& spec, const CsRun& run,
                                     const MonitorOptions& options = {});

}  // namespace ergo
