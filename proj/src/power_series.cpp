#include "zkflat/power_series.hpp"

#include <cmath>

namespace zkflat {

namespace {

// Coefficients of the d-th derivative.
std::vector<double> diff_coeffs(const std::vector<double>& c, int d) {
    std::vector<double> out = c;
    for (int pass = 0; pass < d; ++pass) {
        if (out.size() <= 1) return {0.0};
        std::vector<double> next(out.size() - 1);
        for (size_t n = 1; n < out.size(); ++n)
            next[n - 1] = out[n] * static_cast<double>(n);
        out = std::move(next);
    }
    return out;
}

} // namespace

double PowerSeries::eval(double x, int deriv_order) const {
    require(deriv_order >= 0 && deriv_order <= 3, "power series: deriv order 0..3");
    require(std::fabs(x) <= 1.0 + 1e-12, "power series: |x| must be <= 1");
    const std::vector<double> c = diff_coeffs(coeffs, deriv_order);
    double acc = 0.0;
    for (size_t n = c.size(); n-- > 0;) acc = acc * x + c[n];
    return acc;
}

double PowerSeries::abs_sum(int deriv_order) const {
    const std::vector<double> c = diff_coeffs(coeffs, deriv_order);
    double acc = 0.0;
    for (double v : c) acc += std::fabs(v);
    return acc;
}

double eval(const PowerSeries& ps, double x, int deriv_order) {
    return ps.eval(x, deriv_order);
}

} // namespace zkflat
