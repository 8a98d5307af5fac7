#include "ergochain/cs_certificate.hpp"

#include "ergochain/errors.hpp"

#include <boost/math/constants/constants.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/special_functions/beta.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace ergo {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

IntegralEstimate power_law_integral(const PowerLawParams& p, double from) {
    IntegralEstimate e;
    e.cutoff = kInf;
    if (p.beta <= 0.5) {
        e.value = kInf;
        e.lower_bound = kInf;
        e.method = "analytic: divergent for beta <= 1/2";
        return e;
    }
    if (p.beta == 1.0) {
        e.value = p.K / p.sigma * (boost::math::constants::half_pi<double>() - std::atan(from / p.sigma));
        e.method = "analytic: K/sigma * (pi/2 - atan(M_x/sigma))";
    } else {
        // y = sigma * sqrt(1/t - 1) maps the tail onto an incomplete beta integral.
        const double t0 = p.sigma * p.sigma / (p.sigma * p.sigma + from * from);
        e.value = 0.5 * p.K * std::pow(p.sigma, 1.0 - 2.0 * p.beta) *
                  boost::math::beta(p.beta - 0.5, 0.5, t0);
        e.method = "analytic: incomplete beta B(t0; beta-1/2, 1/2)";
    }
    e.lower_bound = e.value;
    return e;
}

IntegralEstimate quadrature_integral(const Kernel& f, double from, const QuadratureControl& c) {
    using boost::math::quadrature::gauss_kronrod;
    IntegralEstimate e;
    e.method = "adaptive Gauss-Kronrod (7/15) on doubling ranges + power-decay tail";
    double total = 0.0;
    double error = 0.0;
    double lo = from;
    double hi = from + std::max(from, 1.0);
    const auto fn = [&f](double y) { return f(y); };
    for (std::size_t k = 0; k <= c.max_doublings; ++k) {
        double err = 0.0;
        total += gauss_kronrod<double, 15>::integrate(fn, lo, hi, 15, c.relative_tolerance, &err);
        error += err;
        e.cutoff = hi;

        const double f_hi = f(hi);
        const double f_2hi = f(2.0 * hi);
        if (f_hi == 0.0) {
            e.tail = 0.0;
        } else if (f_2hi == 0.0) {
            e.tail = f_hi * hi;  // monotone bound on [hi, 2hi], zero beyond
        } else {
            const double decay = std::log2(f_hi / f_2hi);
            e.tail = decay > 1.0 + 1e-3 ? f_hi * hi / (decay - 1.0) : kInf;
        }
        if (e.tail <= c.tail_fraction * total) break;
        lo = hi;
        hi *= 2.0;
    }
    e.controlled = e.tail <= c.tail_fraction * total;
    e.value = e.controlled ? total + e.tail : kInf;
    e.lower_bound = std::max(0.0, total - error);
    return e;
}

void require_nonnegative(double v, const char* what) {
    if (!(v >= 0.0) || !std::isfinite(v)) {
        std::ostringstream os;
        os << what << " must be finite and nonnegative, got " << v;
        throw InvalidParameter(os.str());
    }
}

}  // namespace

IntegralEstimate kernel_tail_integral(const Kernel& f, double from, const QuadratureControl& control) {
    require_nonnegative(from, "lower integration limit");
    const bool analytic_available = f.power_law_params().has_value();
    switch (control.method) {
        case IntegralMethod::analytic:
            if (!analytic_available) {
                throw InvalidParameter("no closed form for kernel " + f.name());
            }
            return power_law_integral(*f.power_law_params(), from);
        case IntegralMethod::quadrature:
            return quadrature_integral(f, from, control);
        case IntegralMethod::automatic:
            break;
    }
    return analytic_available ? power_law_integral(*f.power_law_params(), from)
                              : quadrature_integral(f, from, control);
}

CertificateInput CertificateInput::from_state(const CsSpec& spec, const CsState& initial) {
    return {spec, initial.agents(), initial.position_diameter(), initial.velocity_diameter()};
}

CertificateResult certificate_check(const CertificateInput& input, const QuadratureControl& control) {
    if (input.agents == 0) throw InvalidParameter("certificate needs at least one agent");
    require_nonnegative(input.m_x, "M_x");
    require_nonnegative(input.m_v, "M_v");

    CertificateResult r{.input = input};
    const double s = static_cast<double>(input.agents);
    const double h = input.spec.h;
    r.kernel_sup = input.spec.kernel.at_zero();
    r.kernel_guard = r.kernel_sup < 1.0 / s;
    r.integral = kernel_tail_integral(input.spec.kernel, input.m_x, control);

    const double scale = s / (3.0 * h);
    r.rhs = scale * r.integral.value;
    r.margin = r.rhs - input.m_v;
    r.proof_lhs = 3.0 * input.m_v;
    r.proof_rhs = s / h * r.integral.value;

    const bool bound_certifies = input.m_v < scale * r.integral.lower_bound;
    if (!r.integral.controlled && !bound_certifies) {
        std::ostringstream os;
        os << "tail of " << input.spec.kernel.name() << " beyond " << r.integral.cutoff
           << " could not be bounded and the truncated integral " << r.integral.lower_bound
           << " does not certify M_v = " << input.m_v;
        throw IntegralEstimateUnreliable(os.str());
    }
    r.certified = r.kernel_guard && bound_certifies;
    return r;
}

CorollaryResult corollary_check(double K, double sigma, double beta, std::size_t agents, double h,
                                double m_x, double m_v) {
    if (agents == 0) throw InvalidParameter("corollary needs at least one agent");
    if (!(h > 0.0)) throw InvalidParameter("time step h must be positive");
    require_nonnegative(m_x, "M_x");
    require_nonnegative(m_v, "M_v");
    const Kernel f = Kernel::power_law(K, sigma, beta);  // validates K, sigma, beta
    const double s = static_cast<double>(agents);

    CorollaryResult r;
    r.kernel_guard = K / std::pow(sigma, 2.0 * beta) < 1.0 / s;
    if (beta <= 0.5) {
        r.branch = 1;
        r.threshold = kInf;
    } else {
        r.branch = 2;
        r.threshold = s * K / (3.0 * h * (2.0 * beta - 1.0) * std::pow(m_x + sigma, 2.0 * beta - 1.0));
    }
    r.margin = r.threshold - m_v;
    r.certified = r.kernel_guard && m_v < r.threshold;

    const auto full = certificate_check(CertificateInput{CsSpec(f, h), agents, m_x, m_v});
    r.integral_certified = full.certified;
    r.consistent = !r.certified || r.integral_certified;
    return r;
}

ContractionTrace contraction_monitor(const CsSpec& spec, const CsRun& run, const MonitorOptions& opt) {
    ContractionTrace t;
    if (run.states.empty()) return t;
    const std::size_t n_states = run.states.size();
    const std::size_t s = run.states.front().agents();
    const double sd = static_cast<double>(s);

    t.z.reserve(n_states);
    t.g.reserve(n_states);
    t.position_gap.reserve(n_states);
    for (const auto& st : run.states) {
        const auto& v = st.velocities;
        t.z.push_back((v.colwise().maxCoeff() - v.colwise().minCoeff()).sum());
        t.position_gap.push_back(st.position_diameter());
        if (opt.keep_sorted) {
            Positions sorted = v;
            for (Eigen::Index r = 0; r < 3; ++r) {
                std::sort(sorted.col(r).begin(), sorted.col(r).end());
            }
            t.sorted_components.push_back(std::move(sorted));
        }
    }
    t.g.push_back(t.position_gap.front());
    for (std::size_t n = 0; n + 1 < n_states; ++n) t.g.push_back(t.g[n] + spec.h * t.z[n]);

    t.step_ok.assign(n_states, 1);
    for (std::size_t n = 0; n < n_states; ++n) {
        const double excess_gap = t.position_gap[n] - t.g[n];
        if (excess_gap > opt.epsilon) {
            ++t.gap_violations;
            t.step_ok[n] = 0;
        }
        t.worst_gap_excess = std::max(t.worst_gap_excess, excess_gap);
        if (n + 1 == n_states) break;

        const double floor_rate = spec.kernel(t.g[n]);
        const double bound = (1.0 - sd * floor_rate) * t.z[n];
        const double excess = t.z[n + 1] - bound;
        if (excess > opt.epsilon) {
            ++t.contraction_violations;
            t.step_ok[n] = 0;
        }
        t.worst_contraction_excess = std::max(t.worst_contraction_excess, excess);
        if (t.z[n + 1] > t.z[n] + opt.epsilon) ++t.z_increases;

        if (n < run.realized.length()) {
            const auto& a = run.realized.matrices()[n];
            for (std::size_t i = 0; i < s; ++i) {
                for (std::size_t j = 0; j < s; ++j) {
                    if (i == j) continue;
                    const double deficit = floor_rate - a(i, j);
                    if (deficit > opt.epsilon) {
                        ++t.rate_violations;
                        t.step_ok[n] = 0;
                    }
                    t.worst_rate_deficit = std::max(t.worst_rate_deficit, deficit);
                }
            }
        }
    }
    return t;
}

}  // namespace ergo
