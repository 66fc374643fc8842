#include "sisdecay/special.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>

#include <fmt/format.h>

namespace sisdecay {

namespace {

constexpr unsigned kMaxDepth = 18;

}  // namespace

QuadResult integrate(const std::function<double(double)>& f, double a, double b, double tol,
                     bool absolute) {
    using boost::math::quadrature::gauss_kronrod;
    double error = 0;
    double l1 = 0;
    const double value = gauss_kronrod<double, 15>::integrate(f, a, b, kMaxDepth, tol, &error, &l1);
    if (!std::isfinite(value)) {
        throw QuadratureError("integrand produced a non-finite value", error);
    }
    const double target = absolute ? tol : tol * std::max(std::fabs(value), 1e-300);
    // Boost reports the summed Kronrod-Gauss difference, which is pessimistic
    // by orders of magnitude for smooth integrands; allow a factor 100.
    if (error > 100 * target) {
        throw QuadratureError(fmt::format("achieved error {:.3g} above target {:.3g}", error, target),
                              error);
    }
    return {value, error};
}

QuadResult integrate_endpoint_singular(const std::function<double(double)>& f, double a, double b,
                                      double tol) {
    boost::math::quadrature::tanh_sinh<double> rule;
    double error = 0;
    double l1 = 0;
    std::size_t levels = 0;
    const double value = rule.integrate([&](double x) { return f(x); }, a, b, tol, &error, &l1, &levels);
    if (!std::isfinite(value)) {
        throw QuadratureError("integrand produced a non-finite value", error);
    }
    const double target = tol * std::max(std::fabs(value), 1e-300);
    if (error > 100 * target) {
        throw QuadratureError(fmt::format("achieved error {:.3g} above target {:.3g}", error, target),
                              error);
    }
    return {value, error};
}

QuadResult integrate_to_infinity(const std::function<double(double)>& f, double a, double tol,
                                 bool absolute) {
    auto mapped = [&](double t) {
        const double s = 1 - t;
        const double u = a + t / s;
        return f(u) / (s * s);
    };
    return integrate(mapped, 0.0, 1.0, tol, absolute);
}

}  // namespace sisdecay
