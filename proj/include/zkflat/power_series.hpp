#pragma once

#include <vector>

#include "zkflat/error.hpp"

namespace zkflat {

/// Truncated power series sum c_n x^n of an entire function on [-1, 0].
///
/// tail_bound dominates sum_{n>N} |c_n| over |x| <= 1 for the exact
/// continuation of the coefficient recursion that produced the series.
struct PowerSeries {
    std::vector<double> coeffs; // c_0 .. c_N
    double tail_bound = 0.0;
    bool tail_monotone = true; // heuristic factorial-decay flag

    int degree() const { return static_cast<int>(coeffs.size()) - 1; }

    /// Value of the deriv_order-th derivative (0..3) at x in [-1, 0], by
    /// Horner on the differentiated coefficients.
    double eval(double x, int deriv_order = 0) const;

    /// Sup of sum |c_n| (resp. of the differentiated series) over |x| <= 1.
    double abs_sum(int deriv_order = 0) const;
};

double eval(const PowerSeries& ps, double x, int deriv_order = 0);

} // namespace zkflat
