#include "ergochain/kernel.hpp"

#include "ergochain/errors.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <vector>

namespace ergo {

namespace {

void require_positive(double v, const char* what) {
    if (!(v > 0.0) || !std::isfinite(v)) {
        std::ostringstream os;
        os << what << " must be positive and finite, got " << v;
        throw InvalidParameter(os.str());
    }
}

std::vector<double> probe_points(double support) {
    std::vector<double> pts{0.0};
    for (double y = 1e-6; y < 1e6; y *= 1.05) pts.push_back(y);
    if (std::isfinite(support)) {
        for (int k = 1; k <= 400; ++k) pts.push_back(support * 1.5 * k / 400.0);
    }
    std::sort(pts.begin(), pts.end());
    return pts;
}

}  // namespace

Kernel::Kernel(std::function<double(double)> f, std::string name, double support)
    : f_(std::move(f)), name_(std::move(name)), support_(support) {}

Kernel Kernel::indicator(double radius) {
    require_positive(radius, "radius");
    std::ostringstream name;
    name << "indicator(R=" << radius << ")";
    return Kernel([radius](double x) { return x < radius ? 1.0 : 0.0; }, name.str(), radius);
}

Kernel Kernel::tent(double radius) {
    require_positive(radius, "radius");
    std::ostringstream name;
    name << "tent(R=" << radius << ")";
    return Kernel([radius](double x) { return x < radius ? 1.0 - x / radius : 0.0; }, name.str(),
                  radius);
}

Kernel Kernel::power_law(double K, double sigma, double beta) {
    require_positive(K, "K");
    require_positive(sigma, "sigma");
    if (!(beta >= 0.0) || !std::isfinite(beta)) {
        std::ostringstream os;
        os << "beta must be nonnegative and finite, got " << beta;
        throw InvalidParameter(os.str());
    }
    std::ostringstream name;
    name << "power-law(K=" << K << ", sigma=" << sigma << ", beta=" << beta << ")";
    const double s2 = sigma * sigma;
    Kernel k([K, s2, beta](double y) { return K / std::pow(s2 + y * y, beta); }, name.str(),
             std::numeric_limits<double>::infinity());
    k.power_law_ = PowerLawParams{K, sigma, beta};
    return k;
}

Kernel Kernel::custom(std::function<double(double)> f, std::string name, double support) {
    if (!f) throw InvalidParameter("kernel function is empty");
    double prev = f(0.0);
    if (!(prev > 0.0)) throw InvalidParameter("kernel " + name + " must be positive at 0");
    for (double y : probe_points(support)) {
        const double v = f(y);
        if (!(v >= 0.0)) throw InvalidParameter("kernel " + name + " is negative somewhere");
        if (v > prev * (1.0 + 1e-12)) {
            std::ostringstream os;
            os << "kernel " << name << " increases near y = " << y;
            throw InvalidParameter(os.str());
        }
        prev = v;
    }
    if (std::isfinite(support) && f(support) != 0.0) {
        throw InvalidParameter("kernel " + name + " does not vanish at its declared support");
    }
    return Kernel(std::move(f), std::move(name), support);
}

Kernel power_law_kernel(double K, double sigma, double beta) {
    return Kernel::power_law(K, sigma, beta);
}

}  // namespace ergo
