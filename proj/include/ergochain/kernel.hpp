#pragma once

#include <functional>
#include <limits>
#include <optional>
#include <string>

namespace ergo {

struct PowerLawParams {
    double K = 0.0;
    double sigma = 1.0;
    double beta = 0.0;
};

/// A non-increasing interaction kernel f : [0, inf) -> [0, inf).
class Kernel {
public:
    /// f(x) = 1 on [0, R), 0 from R on (agents exactly R apart do not interact).
    static Kernel indicator(double radius);
    /// f(x) = max(0, 1 - x/R).
    static Kernel tent(double radius);
    /// f(y) = K / (sigma^2 + y^2)^beta.
    static Kernel power_law(double K, double sigma, double beta);
    /// Arbitrary kernel; sampled on a dense grid and rejected with
    /// InvalidParameter if negative or increasing anywhere on it.
    static Kernel custom(std::function<double(double)> f, std::string name,
                         double support = std::numeric_limits<double>::infinity());

    double operator()(double y) const { return f_(y); }
    /// sup f = f(0) for a non-increasing kernel.
    double at_zero() const { return f_(0.0); }
    /// Smallest R with f = 0 on [R, inf); +inf if the kernel never vanishes.
    double support() const { return support_; }
    const std::optional<PowerLawParams>& power_law_params() const { return power_law_; }
    const std::string& name() const { return name_; }

private:
    Kernel(std::function<double(double)> f, std::string name, double support);

    std::function<double(double)> f_;
    std::string name_;
    double support_;
    std::optional<PowerLawParams> power_law_;
};

/// Same as Kernel::power_law; K > 0, sigma > 0, beta >= 0.
Kernel power_law_kernel(double K, double sigma, double beta);

}  // namespace ergo
